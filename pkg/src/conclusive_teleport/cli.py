"""Command-line front end: ``run``, ``enumerate``, ``sweep`` and ``mc``.

Exit codes: 0 success, 2 invalid arguments or parameters, 1 internal
invariant violation.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any, Optional, Sequence

from .analysis import DEFAULT_GRID, closed_form_success, make_grid, monte_carlo, report, sweep
from .protocols import ChannelParams, InputParams, ParameterError, run_scheme
from .state import StateError

EXIT_OK, EXIT_INTERNAL, EXIT_USAGE = 0, 1, 2

ENUMERATE_COLUMNS = [
    "leaf_id",
    "bell_outcome",
    "ancilla_outcome",
    "basis_outcome",
    "probability",
    "success",
    "fidelity",
    "classical_bits",
]
SWEEP_COLUMNS = ["alpha_sq", "scheme1_prob", "scheme2_prob", "ratio"]
MC_COLUMNS = ["trials", "successes", "estimate", "std_error", "closed_form", "z_score"]
RUN_COLUMNS = ["scheme", "success", "fidelity", "classical_bits", "bell_bits", "flag_bits", "branch_trace"]

_H = 1 / math.sqrt(2)


def _cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return format(v, ".17g")
    if isinstance(v, (list, tuple)):
        return ";".join(_cell(x) for x in v)
    return str(v)


def to_csv(rows: Sequence[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_cell(row[c]) for c in columns])
    return buf.getvalue()


def to_json(obj: Any) -> str:
    # float repr round-trips exactly, so values match the 17-digit CSV cells
    return json.dumps(obj, allow_nan=False) + "\n"


def _inputs(args) -> InputParams:
    return InputParams(complex(args.a_re, args.a_im), complex(args.b_re, args.b_im))


def _params(args) -> tuple[ChannelParams, InputParams]:
    return ChannelParams.from_alpha_sq(args.alpha_sq), _inputs(args)


def _param_fields(args) -> dict:
    return {
        "alpha_sq": args.alpha_sq,
        "a_re": args.a_re,
        "a_im": args.a_im,
        "b_re": args.b_re,
        "b_im": args.b_im,
    }


def cmd_run(args) -> tuple[list[dict], Sequence[str], Any]:
    ch, inp = _params(args)
    res = run_scheme(args.scheme, ch, inp, mode="sample", seed=args.seed)
    bob = None
    if res.bob_state is not None:
        bob = [[float(z.real), float(z.imag)] for z in res.bob_state.amps]
    record = {
        "scheme": args.scheme,
        "success": res.success,
        "fidelity": res.fidelity_vs_target,
        "classical_bits": res.message.total_bits,
        "bell_bits": list(res.message.bell_bits),
        "flag_bits": list(res.message.flag_bits),
        "branch_trace": list(res.branch_trace),
    }
    return [record], RUN_COLUMNS, {**record, "seed": args.seed, **_param_fields(args), "bob_state": bob}


def cmd_enumerate(args):
    ch, inp = _params(args)
    rep = report(args.scheme, ch, inp)
    rows = [
        {
            "leaf_id": leaf.leaf_id,
            "bell_outcome": leaf.bell.value,
            "ancilla_outcome": leaf.ancilla,
            "basis_outcome": leaf.basis,
            "probability": leaf.probability,
            "success": leaf.success,
            "fidelity": leaf.fidelity,
            "classical_bits": leaf.message.total_bits,
        }
        for leaf in rep.leaves
    ]
    doc = {
        "scheme": args.scheme,
        **_param_fields(args),
        "total_success_probability": rep.total_success_probability,
        "closed_form_probability": rep.closed_form_probability,
        "max_abs_deviation": rep.max_abs_deviation,
        "leaves": rows,
    }
    return rows, ENUMERATE_COLUMNS, doc


def cmd_sweep(args):
    inp = _inputs(args)
    grid = make_grid(args.grid_start, args.grid_end, args.grid_step)
    rows = [vars(r) for r in sweep(grid, inp)]
    return rows, SWEEP_COLUMNS, {"rows": rows}


def cmd_mc(args):
    ch, inp = _params(args)
    est = monte_carlo(args.scheme, ch, inp, args.trials, args.seed)
    closed = closed_form_success(args.scheme, ch)
    record = {
        "trials": est.trials,
        "successes": est.successes,
        "estimate": est.estimate,
        "std_error": est.std_error,
        "closed_form": closed,
        "z_score": est.z_score(closed),
    }
    return [record], MC_COLUMNS, record


def _add_params(p: argparse.ArgumentParser, scheme: bool = True, alpha: bool = True) -> None:
    if scheme:
        p.add_argument("--scheme", type=int, choices=(1, 2), required=True)
    if alpha:
        p.add_argument("--alpha-sq", type=float, required=True, help="alpha^2; beta^2 = 1 - alpha^2")
    p.add_argument("--a-re", "--a", dest="a_re", type=float, default=_H)
    p.add_argument("--a-im", type=float, default=0.0)
    p.add_argument("--b-re", "--b", dest="b_re", type=float, default=_H)
    p.add_argument("--b-im", type=float, default=0.0)
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--output", default=None, help="output file (default: standard output)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conclusive-teleport",
        description="Simulate probabilistic teleportation of a|00>+b|11> over alpha|000>+beta|111>.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="play one sampled trajectory")
    _add_params(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("enumerate", help="exact branch tree")
    _add_params(p)
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("sweep", help="success probabilities along an alpha^2 grid")
    _add_params(p, scheme=False, alpha=False)
    p.add_argument("--grid-start", type=float, default=DEFAULT_GRID[0])
    p.add_argument("--grid-end", type=float, default=DEFAULT_GRID[-1])
    p.add_argument("--grid-step", type=float, default=0.05)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("mc", help="Monte-Carlo success estimate")
    _add_params(p)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_mc)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        rows, columns, doc = args.func(args)
        text = to_csv(rows, columns) if args.format == "csv" else to_json(doc)
    except (ParameterError, StateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:  # any other failure means a broken invariant
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    if args.output is None:
        sys.stdout.write(text)
        return EXIT_OK
    try:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        print(f"error: cannot write {args.output}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
