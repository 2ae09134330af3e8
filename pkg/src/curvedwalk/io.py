"""JSON / CSV formats for coins and fine fields.

Complex numbers are stored as ``[re, im]`` pairs.
"""
from __future__ import annotations

import csv
import json

import numpy as np

from .conditions import CoinSpec
from .grouping import FineField, build_encoding

__all__ = [
    "ParseError",
    "encode_complex",
    "decode_complex",
    "coin_to_json",
    "coin_from_json",
    "save_coin",
    "load_coin",
    "write_field_csv",
    "read_field_csv",
]


class ParseError(ValueError):
    """Malformed input file."""


def encode_complex(a) -> list:
    arr = np.asarray(a, dtype=np.complex128)
    pairs = np.stack([arr.real, arr.imag], axis=-1)
    return pairs.tolist()


def decode_complex(obj, ndim: int) -> np.ndarray:
    try:
        arr = np.asarray(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"not a numeric array: {exc}") from None
    if arr.ndim != ndim + 1 or arr.shape[-1] != 2:
        raise ParseError(f"expected [re, im] pairs in a {ndim}-D array, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def coin_to_json(spec: CoinSpec, **extra) -> dict:
    d = {
        "k": int(spec.k),
        "c": float(spec.c),
        "alpha_prime": encode_complex(spec.alpha_prime),
        "delta_prime": encode_complex(spec.delta_prime),
        "C": encode_complex(spec.C),
    }
    d.update(extra)
    return d


def coin_from_json(d: dict):
    """A :class:`CoinSpec`, or the bare matrix ``C`` when no vectors are stored.

    Returns ``(C, spec_or_None, k)``.
    """
    if not isinstance(d, dict) or "C" not in d:
        raise ParseError("coin JSON needs at least a 'C' entry")
    C = decode_complex(d["C"], 2)
    if C.shape[0] != C.shape[1] or C.shape[0] % 2:
        raise ParseError(f"C must be square of even size, got {C.shape}")
    k = int(d.get("k", C.shape[0] // 2))
    if 2 * k != C.shape[0]:
        raise ParseError("k does not match the size of C")
    if "alpha_prime" not in d or "delta_prime" not in d:
        return C, None, k
    a = decode_complex(d["alpha_prime"], 1)
    dp = decode_complex(d["delta_prime"], 1)
    if a.shape != (2 * k,) or dp.shape != (2 * k,):
        raise ParseError("alpha_prime / delta_prime have the wrong length")
    c = float(d["c"]) if "c" in d else float(np.sum(np.concatenate([np.ones(k), -np.ones(k)]) * np.abs(a) ** 2))
    return C, CoinSpec(C, build_encoding(a, dp, k), c, k), k


def save_coin(spec: CoinSpec, path, **extra) -> None:
    with open(path, "w") as fh:
        json.dump(coin_to_json(spec, **extra), fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_coin(path):
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None
    return coin_from_json(d)


def write_field_csv(field: FineField, path) -> None:
    """Header ``index,re,im``."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["index", "re", "im"])
        for i, v in enumerate(field.samples):
            w.writerow([i, repr(float(v.real)), repr(float(v.imag))])


def read_field_csv(path, spacing: float = 1.0, origin: float = 0.0) -> FineField:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
        rows.sort(key=lambda r: int(r["index"]))
        vals = [float(r["re"]) + 1j * float(r["im"]) for r in rows]
    except (OSError, KeyError, ValueError, TypeError) as exc:
        raise ParseError(f"cannot parse field CSV {path}: {exc}") from None
    return FineField(np.array(vals, dtype=np.complex128), spacing, origin)
