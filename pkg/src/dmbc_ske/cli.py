"""Command-line front end.

Exit codes: 0 success, 2 input error, 3 infeasible configuration.
Reports are JSON; everything except the ``timing`` block is a function of
the echoed config and seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .bounds import AuxScheme, lower_bound, parse_ratio_grid, upper_bound
from .channel import Split, TwoDmbc, analyze_degraded, find_degraded_split
from .io import SpecError, load_channel, load_distribution, load_joint, load_scheme
from .protocol import (CodebookError, ParameterError, build_codebooks, derive_parameters,
                       estimate_security)
from .protocol.exact import MAX_VIEW, eve_view_size, exact_secrecy
from .typicality import TypicalityParams, verify_joint_aep

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 2, 3


class InputError(Exception):
    pass


class Infeasible(Exception):
    pass


def _jsonable(o):
    if isinstance(o, dict):
        return {str(k): _jsonable(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_jsonable(v) for v in o]
    if isinstance(o, np.ndarray):
        return _jsonable(o.tolist())
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, (float, np.floating)):
        x = float(o)
        return x if np.isfinite(x) else None
    return o


def dumps_report(report: dict) -> str:
    # repr-exact floats so re-runs can be compared byte for byte
    return json.dumps(_jsonable(report), indent=2, sort_keys=True) + "\n"


def _jobs(args) -> int:
    if getattr(args, "jobs", None):
        return max(1, args.jobs)
    env = os.environ.get("SKE_JOBS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"SKE_JOBS must be an integer, got {env!r}") from None
    return 1


def _need_seed(args) -> None:
    if getattr(args, "out", None) and args.seed is None:
        raise InputError("--seed is required together with --out")


def _seed(args) -> int:
    return 0 if args.seed is None else args.seed


def _two(args) -> TwoDmbc:
    return TwoDmbc(load_channel(args.fwd), load_channel(args.bwd))


# commands -------------------------------------------------------------------


def cmd_bounds(args) -> dict:
    _need_seed(args)
    two = _two(args)
    caps = None
    if args.aux_card:
        if len(args.aux_card) != 3 or min(args.aux_card) < 1:
            raise InputError("--aux-card takes three positive integers: |V| |W1| |W2|")
        caps = tuple(args.aux_card)
    try:
        ratios = parse_ratio_grid(args.ratio_grid) if args.ratio_grid else None
    except ValueError as e:
        raise InputError(f"--ratio-grid: {e}") from None
    seed = _seed(args)
    lo = lower_bound(two, caps, args.grid, args.restarts, ratios, seed,
                     literal_eve_term=args.literal_eve_term)
    up = upper_bound(two, args.grid, args.restarts, seed)
    return {
        "config": {"fwd": two.forward.tensor, "bwd": two.backward.tensor,
                   "aux_card": caps, "grid": args.grid, "restarts": args.restarts,
                   "ratio_grid": args.ratio_grid, "seed": seed,
                   "literal_eve_term": args.literal_eve_term},
        "lower_bound": lo.as_dict(), "upper_bound": up.as_dict(),
        "L_A": lo.detail["L_A"], "L_B": lo.detail["L_B"],
    }


def cmd_check_degraded(args) -> dict:
    ch = load_channel(args.ch)
    if args.split:
        try:
            split = Split.parse(args.split)
            split.check(ch)
        except ValueError as e:
            raise InputError(f"--split: {e}") from None
        rep = analyze_degraded(ch, split, tol=args.tol)
    else:
        try:
            rep = find_degraded_split(ch, tol=args.tol)
        except ValueError as e:
            raise InputError(str(e)) from None
        if rep is None:
            # no factorisation works; show why the unsplit channel fails
            rep = analyze_degraded(ch, Split.obverse_only(ch), tol=args.tol)
    return {"config": {"ch": ch.tensor, "split": args.split, "tol": args.tol},
            "searched": not args.split, "report": rep.as_dict(), "degraded": rep.degraded}


def cmd_simulate(args) -> dict:
    _need_seed(args)
    two = _two(args)
    nx = two.forward.x_size
    input_f = (load_distribution(args.input, nx) if args.input
               else np.full(nx, 1.0 / nx))
    if args.scheme:
        scheme = load_scheme(args.scheme)
    else:
        scheme = AuxScheme.simple(two.forward.sizes[1], two.backward.x_size)
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    seed = _seed(args)
    try:
        params = derive_parameters(two, scheme, input_f, args.nf, args.alpha, args.beta,
                                   args.epsilon, strict=not args.relaxed, max_eta=args.max_eta)
        est = estimate_security(two, scheme, input_f, params, args.trials, seed,
                                fresh_codebooks=args.fresh_codebooks, jobs=_jobs(args),
                                min_trials=1)
    except (ParameterError, CodebookError) as e:
        raise Infeasible(str(e)) from None
    out = {
        "config": {"fwd": two.forward.tensor, "bwd": two.backward.tensor,
                   "scheme": scheme.as_dict(), "input": input_f, "nf": args.nf,
                   "alpha": args.alpha, "beta": args.beta, "epsilon": args.epsilon,
                   "trials": args.trials, "seed": seed, "fresh_codebooks": args.fresh_codebooks,
                   "relaxed": args.relaxed, "max_eta": args.max_eta},
        "parameters": params.as_dict(),
        "security": est.as_dict(),
        "warnings": [],
    }
    if args.trials < 200:
        out["warnings"].append("fewer than 200 trials; confidence intervals are wide")
    if not params.slack_ok:
        out["warnings"].append("slack condition 3*N*epsilon < n_b*beta = n_f*alpha does not hold")
    if args.exact:
        if eve_view_size(two, params) > MAX_VIEW:
            raise InputError(f"--exact needs Eve's view to have at most {MAX_VIEW} outcomes")
        books = build_codebooks(params, scheme,
                                np.random.default_rng(np.random.SeedSequence([seed, 1 << 30])))
        out["exact_secrecy"] = exact_secrecy(two, books, params).as_dict()
    return out


def cmd_verify_aep(args) -> dict:
    _need_seed(args)
    if args.trials < 1:
        raise InputError("--trials must be >= 1")
    if args.n < 0 or args.d < 0 or args.n + args.d == 0:
        raise InputError("--n and --d must be non-negative and not both zero")
    if not args.epsilon > 0:
        raise InputError("--epsilon must be > 0")
    ju, jt = load_joint(args.jointU), load_joint(args.jointT)
    seed = _seed(args)
    rep = verify_joint_aep(ju, jt, TypicalityParams(args.epsilon, args.n, args.d), args.trials,
                           seed, jobs=_jobs(args))
    return {"config": {"jointU": ju, "jointT": jt, "n": args.n, "d": args.d,
                       "epsilon": args.epsilon, "trials": args.trials, "seed": seed},
            "report": rep.as_dict(), "passed": rep.passed}


# parser ---------------------------------------------------------------------


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dmbc-ske", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, seed=True):
        p.add_argument("--out", help="write the JSON report here instead of stdout")
        if seed:
            p.add_argument("--seed", type=int, help="master seed (required with --out)")
        p.add_argument("--jobs", type=int, help="worker processes (default: $SKE_JOBS or 1)")

    p = sub.add_parser("bounds", help="lower and upper bounds on the secret-key capacity")
    p.add_argument("--fwd", required=True)
    p.add_argument("--bwd", required=True)
    p.add_argument("--aux-card", type=int, nargs="+", metavar="N",
                   help="caps on |V| |W1| |W2| (both directions)")
    p.add_argument("--grid", type=float, default=0.01)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--ratio-grid", help='n_f:n_b ratios, e.g. "1:9,1:1,9:1"')
    p.add_argument("--literal-eve-term", action="store_true",
                   help="drop I(V;Z) from the backward-initiated direction")
    common(p)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("check-degraded", help="test a channel for (split) degradedness")
    p.add_argument("--ch", required=True)
    p.add_argument("--split", help='"xo,xr:yo,yr:zo,zr"')
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--out")
    p.set_defaults(func=cmd_check_degraded, seed=None)

    p = sub.add_parser("simulate", help="Monte-Carlo run of the key agreement scheme")
    p.add_argument("--fwd", required=True)
    p.add_argument("--bwd", required=True)
    p.add_argument("--nf", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--trials", type=int, default=200)
    p.add_argument("--fresh-codebooks", type=_bool, default=True, metavar="BOOL")
    p.add_argument("--scheme", help="auxiliary test channels (JSON); default V=Y, W1=X, W2 constant")
    p.add_argument("--input", help="forward input law, comma-separated or JSON file")
    p.add_argument("--relaxed", action="store_true",
                   help="record instead of enforce the slack condition")
    p.add_argument("--max-eta", type=int, default=20)
    p.add_argument("--exact", action="store_true",
                   help="add exact H(S|Z) by enumeration (micro instances only)")
    common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-aep", help="sampling check of the bipartite joint AEP")
    p.add_argument("--jointU", required=True)
    p.add_argument("--jointT", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--trials", type=int, default=10000)
    common(p)
    p.set_defaults(func=cmd_verify_aep)
    return ap


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code is not None else EXIT_OK
    t0 = time.perf_counter()
    try:
        body = args.func(args)
        code = EXIT_OK
    except (SpecError, InputError) as e:
        print(f"dmbc-ske {args.command}: error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Infeasible as e:
        print(f"dmbc-ske {args.command}: infeasible: {e}", file=sys.stderr)
        return EXIT_INFEASIBLE
    report = {"tool": "dmbc-ske", "version": __version__, "command": args.command,
              "argv": argv, **body,
              "timing": {"wall_time_s": round(time.perf_counter() - t0, 3)}}
    text = dumps_report(report)
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return code


def strip_timing(report: dict) -> dict:
    """Report without wall-time fields, for reproducibility comparisons."""
    return {k: v for k, v in report.items() if k != "timing"}


if __name__ == "__main__":
    sys.exit(main())
