"""Command line front end.

    python cli.py expand --n 2 --beta 1.61803398875 --x 1 --mode quasi --depth 10
    python cli.py admissible --n 4 --block 31
    python cli.py interval --n 4 --block 31
    python cli.py entropy --n 4 --block 31
    python cli.py dim --n 10 --beta 9
    python cli.py curve --n 20 --lo 5.9 --hi 20 --points 2000 --p-max 2 --out fig2.csv
    python cli.py enumerate --n 4 --p-max 3
    python cli.py critical --n 10

Results go to stdout, diagnostics to stderr. Exit status is 0 on success,
2 on invalid input and 3 when a budget runs out or a comparison stays
undecided.
"""

import argparse
import csv
import io
import json
import logging
import sys
from typing import List, Optional

from admissible import admissibility_witness, critical_bases, enumerate_admissible, interval_endpoints
from config import OUTPUT_FORMATS, Config, RunConfig
from dimension import dim_unique_set, sample_curve, unresolved_fraction, write_csv
from entropy import entropy_report
from errors import BudError
from expansions import Base, Mode, TiePolicy, expand
from numerics import format_real, sig15
from words import Alphabet, Word

logger = logging.getLogger(__name__)


def _dump(payload) -> str:
    return json.dumps(payload, sort_keys=True)


def _table(header: List[str], *rows: List[str]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().rstrip("\n")


def cmd_expand(args, run: RunConfig) -> str:
    base = Base.of(args.beta, run.n)
    result = expand(args.x, base, run.depth, Mode(args.mode), TiePolicy.SNAP)
    if run.output_format == "json":
        return _dump({
            "digits": result.digits.to_list(),
            "residual_bound": sig15(result.residual_bound),
            "snapped": list(result.snapped),
        })
    if run.output_format == "csv":
        return result.digits.render(sep=",")
    return result.digits.render() if run.n <= 10 else result.digits.render(sep="-")


def cmd_admissible(args, run: RunConfig) -> str:
    block = Word.parse(args.block, Alphabet(run.n))
    ok, witness = admissibility_witness(block)
    if run.output_format == "json":
        return _dump({"N": run.n, "block": block.to_list(), "admissible": ok, "witness": witness or None})
    return "true" if ok else f"false: {witness}"


def cmd_interval(args, run: RunConfig) -> str:
    block = Word.parse(args.block, Alphabet(run.n))
    interval = interval_endpoints(block, run.tol)
    if run.output_format == "json":
        return _dump(interval.to_json())
    if run.output_format == "csv":
        lo, hi = interval.beta_L, interval.beta_U
        return _table(
            ["block", "beta_L", "beta_L_radius", "beta_U", "beta_U_radius"],
            [block.render(sep="-"), format_real(lo.value), format_real(lo.radius),
             format_real(hi.value), format_real(hi.radius)],
        )
    return "\n".join([
        f"beta_L = {format_real(interval.beta_L.value)} +/- {format_real(interval.beta_L.radius)}",
        f"beta_U = {format_real(interval.beta_U.value)} +/- {format_real(interval.beta_U.radius)}",
    ])


def cmd_entropy(args, run: RunConfig) -> str:
    block = Word.parse(args.block, Alphabet(run.n))
    report = entropy_report(block, run.tol)
    if run.output_format == "json":
        return _dump({key: sig15(v) if isinstance(v, float) else v for key, v in report.to_json().items()})
    if run.output_format == "csv":
        return _table(
            ["block", "rho", "rho_lower", "rho_upper", "h", "zero_certified"],
            [block.render(sep="-"), format_real(report.rho), format_real(report.rho_lower),
             format_real(report.rho_upper), format_real(report.h), str(report.zero_certified).lower()],
        )
    return "\n".join([
        f"rho = {format_real(report.rho)} in [{format_real(report.rho_lower)}, {format_real(report.rho_upper)}]",
        f"h = {format_real(report.h)}",
    ])


def cmd_dim(args, run: RunConfig) -> str:
    sample = dim_unique_set(Base.of(args.beta, run.n), run.p_max, run.tol, run.depth)
    if run.output_format == "json":
        return _dump(sample.to_json())
    if run.output_format == "csv":
        buffer = io.StringIO()
        write_csv([sample], buffer)
        return buffer.getvalue().rstrip("\n")
    if sample.dim is None:
        return f"dim in [0, {format_real(sample.upper)}] ({sample.regime.value}: {sample.detail})"
    text = f"dim = {format_real(sample.dim)} ({sample.regime.value}"
    if sample.block is not None:
        text += f", block {sample.block.render(sep='-')}, h = {format_real(sample.entropy)}"
    return text + ")"


def cmd_curve(args, run: RunConfig) -> str:
    samples = sample_curve(Alphabet(run.n), args.lo, args.hi, args.points, run.p_max, run.tol,
                           run.depth, workers=args.workers)
    if run.output_format == "json":
        body = _dump({
            "N": run.n,
            "unresolved_fraction": sig15(unresolved_fraction(samples)),
            "samples": [s.to_json() for s in samples],
        }) + "\n"
    else:
        buffer = io.StringIO()
        write_csv(samples, buffer)
        body = buffer.getvalue()

    if args.out:
        with open(args.out, "w", newline="") as f:
            f.write(body)
        return f"wrote {len(samples)} samples to {args.out}"
    return body.rstrip("\n")


def cmd_enumerate(args, run: RunConfig) -> str:
    blocks = enumerate_admissible(Alphabet(run.n), run.p_max)
    if run.output_format == "json":
        return _dump({"N": run.n, "p_max": run.p_max, "blocks": [b.to_list() for b in blocks]})
    return "\n".join(b.render(sep="-") for b in blocks)


def cmd_critical(args, run: RunConfig) -> str:
    g_n, beta_c = critical_bases(Alphabet(run.n), run.tol)
    if run.output_format == "json":
        return _dump({"N": run.n, "G_N": sig15(g_n), "beta_c": sig15(beta_c)})
    if run.output_format == "csv":
        return _table(["N", "G_N", "beta_c"], [str(run.n), format_real(g_n), format_real(beta_c)])
    return f"G_N = {format_real(g_n)}\nbeta_c = {format_real(beta_c)}"


COMMANDS = {
    "expand": cmd_expand,
    "admissible": cmd_admissible,
    "interval": cmd_interval,
    "entropy": cmd_entropy,
    "dim": cmd_dim,
    "curve": cmd_curve,
    "enumerate": cmd_enumerate,
    "critical": cmd_critical,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, required=True, help="alphabet size N >= 2")
    common.add_argument("--tol", type=float, default=Config.DEFAULT_TOL)
    common.add_argument("--depth", type=int, default=Config.DEFAULT_DEPTH)
    common.add_argument("--p-max", type=int, default=Config.DEFAULT_P_MAX)
    common.add_argument("--format", choices=OUTPUT_FORMATS, default="text")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")

    parser = argparse.ArgumentParser(prog="bud", description="Dimension of univoque sets in non-integer bases")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expand", parents=[common], help="greedy or quasi-greedy expansion of x")
    p.add_argument("--beta", required=True)
    p.add_argument("--x", default="1")
    p.add_argument("--mode", choices=[m.value for m in Mode], default=Mode.QUASI.value)

    for name, text in [("admissible", "check a block"),
                       ("interval", "admissible interval of a block"),
                       ("entropy", "entropy of the subshift of a block")]:
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--block", required=True)

    p = sub.add_parser("dim", parents=[common], help="dimension of U at one base")
    p.add_argument("--beta", required=True)

    p = sub.add_parser("curve", parents=[common], help="dimension on a grid of bases")
    p.add_argument("--lo", type=float, required=True)
    p.add_argument("--hi", type=float, required=True)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--out", default=None)
    p.add_argument("--workers", type=int, default=1)

    sub.add_parser("enumerate", parents=[common], help="admissible blocks up to length p-max")
    sub.add_parser("critical", parents=[common], help="generalized golden ratio and Komornik-Loreti constant")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = Config.LOG_LEVEL if isinstance(logging.getLevelName(Config.LOG_LEVEL), int) else logging.WARNING
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else level,
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    Config.validate_config()

    try:
        run = RunConfig.from_args(args)
        output = COMMANDS[args.command](args, run)
    except BudError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    print(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
