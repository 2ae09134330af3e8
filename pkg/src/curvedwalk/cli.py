"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 infeasible input or bad
configuration.  Errors are printed to stderr as a JSON object.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

from .analysis import convergence_order, gaussian, gaussian_packet, track, write_convergence_report
from .conditions import residual_report, speed_candidates
from .evolution import ConfigurationError, SimConfig, run, write_trajectory_csv
from .fixed import FixedBuildOptions, build_fixed_coin
from .io import ParseError, load_coin, save_coin
from .linalg import DegenerateInputError, InfeasibleError, eig_subspace
from .tiled import density_from_speed, tiled_spec

EXIT_OK, EXIT_USAGE, EXIT_INFEASIBLE = 0, 2, 3


class UsageError(Exception):
    pass


def _emit(obj) -> None:
    json.dump(obj, sys.stdout, indent=2, sort_keys=True)
    sys.stdout.write("\n")


def _fail(kind: str, message: str, code: int) -> int:
    json.dump({"error": kind, "message": message}, sys.stderr, sort_keys=True)
    sys.stderr.write("\n")
    return code


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {v}")
    return v


# -- build-coin / check-coin / speeds -------------------------------------

def cmd_build_coin(args) -> int:
    if args.scheme == "fixed":
        if args.c is None or args.r is not None:
            raise UsageError("the fixed scheme takes --c (and not --r)")
        spec = build_fixed_coin(FixedBuildOptions(args.k, args.c, im_f=args.im_f, seed=args.seed))
        extra = {"scheme": "fixed"}
    else:
        if (args.c is None) == (args.r is None):
            raise UsageError("the tiled scheme takes exactly one of --c / --r")
        if args.im_f is not None:
            raise UsageError("--im-f only applies to the fixed scheme")
        if args.r is not None:
            if not 0 <= args.r <= args.k:
                raise InfeasibleError(f"r must lie in [0, {args.k}]")
            r, mirrored = args.r, False
        else:
            choice = density_from_speed(args.k, args.c)
            r, mirrored = choice.r, choice.mirrored
        spec = tiled_spec(args.k, r, mirrored)
        extra = {"scheme": "tiled", "r": r, "mirrored": mirrored}
    save_coin(spec, args.out, **extra)
    _emit({"realized_speed": spec.c, "residuals": residual_report(spec), "out": args.out})
    return EXIT_OK


def cmd_check_coin(args) -> int:
    C, spec, k = load_coin(args.coin)
    if spec is None:
        raise ParseError("check-coin needs alpha_prime and delta_prime in the coin file")
    _emit({"k": k, "c": spec.c, "residuals": residual_report(spec)})
    return EXIT_OK


def cmd_speeds(args) -> int:
    C, _, k = load_coin(args.coin)
    cands = speed_candidates(C)
    fixed_dim = len(eig_subspace(C, 1.0))
    _emit({"k": k, "speeds": cands, "count": len(cands), "fixed_space_dim": fixed_dim,
           "bound_ok": len(cands) <= fixed_dim})
    return EXIT_OK


# -- simulate / converge --------------------------------------------------

_SIM_KEYS = ("k", "n_cells", "steps", "eps", "scheme", "metric", "x_min", "snapshot_every", "assignment", "r")


def _load_config(path) -> dict:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ParseError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in {path}: {exc}") from None
    if not isinstance(d, dict):
        raise ParseError("config must be a JSON object")
    return d


def _override(d: dict, args, keys=("k", "n_cells", "steps", "eps", "scheme")) -> dict:
    for key in keys:
        v = getattr(args, key, None)
        if v is not None:
            d[key] = v
    return d


def _sim_config(d: dict) -> SimConfig:
    missing = [k for k in ("k", "n_cells", "steps", "eps") if k not in d]
    if missing:
        raise ParseError(f"config is missing {missing}")
    try:
        return SimConfig.from_json({k: d[k] for k in _SIM_KEYS if k in d})
    except TypeError as exc:
        raise ParseError(f"bad config: {exc}") from None


def _initial(d: dict) -> dict:
    init = dict(d.get("initial", {}))
    if init.get("kind", "gaussian") != "gaussian":
        raise ParseError("only gaussian initial fields are supported")
    if "x0" not in init or "sigma" not in init:
        raise ParseError("initial needs x0 and sigma")
    return init


def cmd_simulate(args) -> int:
    d = _override(_load_config(args.config), args)
    cfg = _sim_config(d)
    init = _initial(d)
    psi0 = gaussian_packet(float(init["x0"]), float(init["sigma"]), float(init.get("k0", 0.0)),
                           size=2 * cfg.k * cfg.n_cells, spacing=cfg.spacing, origin=cfg.x_min)
    result = run(cfg, psi0)
    os.makedirs(args.out, exist_ok=True)
    write_trajectory_csv(result, os.path.join(args.out, "trajectory.csv"))
    meta = result.metadata()
    if len(result.snapshots) >= 2:
        _, _, obs = track(result)
        meta["observables"] = {"norm": obs.norm, "mean_position": obs.mean_position,
                               "fitted_velocity": obs.fitted_velocity}
    with open(os.path.join(args.out, "metadata.json"), "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    _emit({"out": args.out, **{k: meta[k] for k in ("config_hash", "realized_speeds")},
           **({"fitted_velocity": meta["observables"]["fitted_velocity"]} if "observables" in meta else {})})
    return EXIT_OK


def _parse_eps(text: str) -> list[float]:
    from fractions import Fraction

    try:
        return [float(Fraction(p.strip())) for p in text.split(",") if p.strip()]
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"bad eps list {text!r}") from None


def cmd_converge(args) -> int:
    d = _override(_load_config(args.config), args, keys=("k", "scheme"))
    for key in ("length", "horizon"):
        if key not in d:
            raise ParseError(f"converge config needs {key!r}")
    d.setdefault("n_cells", 4)
    d.setdefault("steps", 0)
    d["eps"] = args.eps[0]
    cfg = _sim_config(d)
    init = _initial(d)
    psi0 = gaussian(float(init["x0"]), float(init["sigma"]), float(init.get("k0", 0.0)))
    res = convergence_order(cfg, args.eps, length=float(d["length"]), horizon=float(d["horizon"]), psi0=psi0)
    write_convergence_report(res, args.out)
    _emit({"out": args.out, "errors": list(res.errors), **res.to_json()})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="curvedwalk", description="Paired quantum walks with tunable speed")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build-coin", help="build a coin and its encoding")
    b.add_argument("--scheme", choices=["fixed", "tiled"], required=True)
    b.add_argument("--k", type=_positive_int, required=True)
    b.add_argument("--c", type=float)
    b.add_argument("--r", type=int)
    b.add_argument("--im-f", dest="im_f", type=float)
    b.add_argument("--seed", type=int)
    b.add_argument("--out", required=True)
    b.set_defaults(func=cmd_build_coin)

    c = sub.add_parser("check-coin", help="print every condition residual of a coin file")
    c.add_argument("--coin", required=True)
    c.set_defaults(func=cmd_check_coin)

    s = sub.add_parser("speeds", help="candidate speeds of a coin")
    s.add_argument("--coin", required=True)
    s.set_defaults(func=cmd_speeds)

    for name, func, helptext in (("simulate", cmd_simulate, "run the walk"),
                                  ("converge", cmd_converge, "convergence sweep over eps")):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--config", required=True)
        q.add_argument("--out", required=True)
        q.add_argument("--k", type=_positive_int)
        q.add_argument("--scheme", choices=["fixed", "tiled", "tiled+perturbation"])
        if name == "simulate":
            q.add_argument("--n-cells", dest="n_cells", type=_positive_int)
            q.add_argument("--steps", type=int)
            q.add_argument("--eps", type=float)
        else:
            q.add_argument("--eps", type=_parse_eps, required=True,
                           help="comma separated, fractions allowed (1/64,1/128,...)")
        q.set_defaults(func=func)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        return _fail("usage", str(exc), EXIT_USAGE)
    except ParseError as exc:
        return _fail("parse", str(exc), EXIT_USAGE)
    except (InfeasibleError, DegenerateInputError) as exc:
        return _fail("infeasible", str(exc), EXIT_INFEASIBLE)
    except ConfigurationError as exc:
        return _fail("configuration", str(exc), EXIT_INFEASIBLE)
    except ValueError as exc:
        return _fail("domain", str(exc), EXIT_INFEASIBLE)


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
