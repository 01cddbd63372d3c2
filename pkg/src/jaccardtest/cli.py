"""Command-line interface.

Exit codes: 0 success, 2 input validation failure, 3 resource guard
(enumeration cap or timeout).
"""

from __future__ import annotations

import argparse
import logging
import sys
from contextlib import contextmanager
from typing import Iterator, Sequence

from .core import ENGINES, ResourceLimitError
from .engines import EngineConfig, run_test
from .matrix import (
    all_pairs_test,
    format_real,
    read_matrix,
    write_reports,
)
from .simulate import SimSpec
from .studies import benchmark_command, simulate_command, write_calibration, write_runtime

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_RESOURCE = 3

log = logging.getLogger("jaccardtest")


def _vector(text: str) -> list[int]:
    text = text.strip()
    parts = text.split(",") if "," in text else list(text)
    try:
        return [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a 0/1 vector: {text!r}") from None


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from None


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _engine_options(p: argparse.ArgumentParser, default: str = "mca") -> None:
    g = p.add_argument_group("engine")
    g.add_argument("--engine", choices=ENGINES, default=default)
    g.add_argument("--epsilon", type=float, default=1e-5, help="MCA accuracy (default 1e-5)")
    g.add_argument("--report-upper", action="store_true", help="report the MCA upper bound")
    g.add_argument("--B", dest="B", type=int, default=None,
                   help="bootstrap iterations (default 5*m)")
    g.add_argument("--seed", type=_u64, default=0)
    g.add_argument("--add-one", action="store_true",
                   help="bootstrap p-values as (1+count)/(1+B)")
    g.add_argument("--max-m", type=int, default=2000, help="largest m the exact engine accepts")


def _config(args: argparse.Namespace, engine: str | None = None) -> EngineConfig:
    return EngineConfig(engine=engine or args.engine, epsilon=args.epsilon,
                        report_upper=args.report_upper, B=args.B, seed=args.seed,
                        add_one_smoothing=args.add_one, max_m=args.max_m)


@contextmanager
def _output(path: str | None) -> Iterator:
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _delim(name: str) -> str:
    return "\t" if name == "tab" else ","


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jaccardtest",
        description="Significance of centered Jaccard/Tanimoto similarity between presence-absence vectors.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    t = sub.add_parser("test", help="test one pair of vectors")
    t.add_argument("vectors", nargs="*", type=_vector, metavar="VECTOR",
                   help="two vectors such as 1,0,1,1 or 1011")
    t.add_argument("--input", help="matrix file to take the pair from")
    t.add_argument("--pair", nargs=2, metavar=("ROW_I", "ROW_J"), help="row labels in --input")
    t.add_argument("--transpose", action="store_true")
    _engine_options(t)

    mx = sub.add_parser("matrix", help="test all pairs of rows of a 0/1 matrix")
    mx.add_argument("--input", required=True)
    mx.add_argument("--output")
    mx.add_argument("--transpose", action="store_true", help="compare columns (units) instead of rows")
    mx.add_argument("--workers", type=int, default=1)
    mx.add_argument("--no-header", action="store_true")
    mx.add_argument("--no-labels", action="store_true")
    mx.add_argument("--out-delimiter", choices=("comma", "tab"), default="comma")
    mx.add_argument("--pi0-smoother", action="store_true")
    _engine_options(mx)

    sm = sub.add_parser("simulate", help="calibration table from a simulated query/panel mixture")
    sm.add_argument("--n", type=int, default=2000)
    sm.add_argument("--m", type=int, default=200)
    sm.add_argument("--p", type=float, default=0.5)
    sm.add_argument("--pi0", type=float, default=0.75)
    sm.add_argument("--strength", type=float, default=0.5, help="dependence strength of alternatives")
    sm.add_argument("--sim-seed", type=_u64, default=0, help="seed for the simulated data")
    sm.add_argument("--output")
    _engine_options(sm)

    bm = sub.add_parser("benchmark", help="runtime table per engine and length")
    bm.add_argument("--m-grid", type=_int_list, default=[50, 100, 200, 300, 400, 500])
    bm.add_argument("--reps", type=int, default=10)
    bm.add_argument("--engines", type=lambda s: s.split(","), default=list(ENGINES))
    bm.add_argument("--timeout", type=float, default=120.0)
    bm.add_argument("--output")
    _engine_options(bm)
    return parser


def _cmd_test(args: argparse.Namespace) -> int:
    if args.input:
        if not args.pair:
            raise ValueError("--input requires --pair ROW_I ROW_J")
        mat = read_matrix(args.input)
        if args.transpose:
            mat = mat.transpose()
        index = {lab: k for k, lab in enumerate(mat.row_labels)}
        missing = [lab for lab in args.pair if lab not in index]
        if missing:
            raise ValueError(f"unknown row label(s): {', '.join(missing)}")
        a, b = (mat.cells[index[lab]] for lab in args.pair)
    else:
        if len(args.vectors) != 2:
            raise ValueError("give exactly two vectors, or --input with --pair")
        a, b = args.vectors
    res = run_test(a, b, _config(args))
    print(f"engine\t{res.engine}")
    for name in ("coefficient", "expectation", "centered", "p_value"):
        print(f"{name}\t{format_real(getattr(res, name))}")
    for key, val in res.diagnostics.items():
        print(f"{key}\t{format_real(val) if isinstance(val, float) else val}")
    return EXIT_OK


def _cmd_matrix(args: argparse.Namespace) -> int:
    mat = read_matrix(args.input, header=False if args.no_header else None,
                      row_labels=False if args.no_labels else None)
    if args.transpose:
        mat = mat.transpose()
    reports = all_pairs_test(mat, _config(args), workers=args.workers, smoother=args.pi0_smoother)
    with _output(args.output) as out:
        write_reports(reports, out, _delim(args.out_delimiter))
    return EXIT_OK


def _cmd_simulate(args: argparse.Namespace) -> int:
    spec = SimSpec(n=args.n, m=args.m, p=args.p, pi0=args.pi0,
                   dependence_strength=args.strength, seed=args.sim_seed)
    rows = simulate_command(spec, _config(args))
    with _output(args.output) as out:
        write_calibration(rows, out)
    return EXIT_OK


def _cmd_benchmark(args: argparse.Namespace) -> int:
    bad = [e for e in args.engines if e not in ENGINES]
    if bad:
        raise ValueError(f"unknown engine(s): {', '.join(bad)}")
    rows = benchmark_command(args.m_grid, args.reps, args.engines, _config(args),
                             timeout=args.timeout, seed=args.seed)
    with _output(args.output) as out:
        write_runtime(rows, out)
    return EXIT_OK


_COMMANDS = {"test": _cmd_test, "matrix": _cmd_matrix, "simulate": _cmd_simulate,
             "benchmark": _cmd_benchmark}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return _COMMANDS[args.command](args)
    except ResourceLimitError as exc:
        log.error("%s", exc)
        return EXIT_RESOURCE
    except (ValueError, OSError) as exc:
        log.error("%s", exc)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
