# Copyright © 2026 fairopt contributors
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of this
# software and associated documentation files (the "Software"), to deal in the Software
# without restriction, including without limitation the rights to use, copy, modify,
# merge, publish, distribute, sublicense, and/or sell copies of the Software, and to
# permit persons to whom the Software is furnished to do so, subject to the following
# conditions:
#
# The above copyright notice and this permission notice shall be included in all copies
# or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR IMPLIED,
# INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY, FITNESS FOR A
# PARTICULAR PURPOSE AND NON-INFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR COPYRIGHT
# HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER IN AN ACTION OF
# CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN CONNECTION WITH THE SOFTWARE
# OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

"""Command line interface of `fairopt`.

```
fairopt gen --kind assignment --n 10 --d 50 --seed 7 -o v50-20.inst
fairopt solve v50-20.inst --weights inverse-square --init rank-based
fairopt exact v50-8.inst
fairopt export-lp v50-20.inst -o v50-20.lp
fairopt bench --kind assignment --sizes 8,10,12 --d 10,30,50 --reps 10 --csv out.csv
```

Exit codes: 0 on success, 1 when an instance file cannot be read or an output
cannot be written, 2 on usage errors, 3 when an instance is too large for an exact
method.
"""

__all__ = [
    "CSV_FIELDS",
    "gap",
    "run",
    "main",
]

import argparse
import csv
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterator, List, Optional, Sequence, TextIO, Tuple

from fairopt import solver
from fairopt.errors import (
    CapacityError,
    FairOptError,
    ValidationError,
)
from fairopt.ggi import WeightVector, weight_scheme
from fairopt.instance_file import read_instance, write_instance
from fairopt.instances import (
    Instance,
    PerfectMatching,
    Permutation,
    Solution,
    agent_values,
    gen_assignment,
    gen_matching,
    instance_name,
)
from fairopt.oracle import export_ip, format_ip, ggi_brute_force
from fairopt.solver import INIT_STRATEGIES, SUBGRADIENT_SIGNS, SolverConfig
from fairopt.subsolvers import ENUM_CAP_ASSIGNMENT, ENUM_CAP_MATCHING

log = logging.getLogger("fairopt")

CSV_FIELDS = [
    "instance",
    "kind",
    "n",
    "d",
    "seed",
    "init",
    "sign",
    "iters",
    "best_ggi",
    "upper_bound",
    "gap_vs_ub",
    "gap_vs_exact",
    "certificate",
    "time_ms",
]

EXIT_OK = 0
EXIT_IO = 1
EXIT_USAGE = 2
EXIT_CAPACITY = 3

THREADS_ENV = "FAIROPT_THREADS"


class _UsageError(Exception):
    pass


def gap(opt: float, sol: float) -> float:
    """Return the percentage `(opt - sol) * 100 / opt` by which `sol` falls short of
    `opt`.

    Examples:

    ```pycon
    >>> round(gap(100, 99.7), 9)
    0.3
    >>> gap(100, 0)
    100.0

    ```
    """
    if not opt > 0:
        raise ValidationError("the gap needs a positive reference value, got %g" % opt)
    return (opt - sol) * 100.0 / opt


def _int_list(s: str) -> List[int]:
    try:
        values = [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated integers: %r" % s)
    if not values:
        raise argparse.ArgumentTypeError("expected at least one integer")
    return values


def _weights(text: str, n: int) -> WeightVector:
    if text in ("inverse-square", "classic-gini"):
        return weight_scheme(n, text)
    try:
        values = [float(x) for x in text.split(",")]
    except ValueError:
        raise ValidationError("unknown weight scheme %r" % text)
    return weight_scheme(n, "custom", values)


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    defaults = SolverConfig()
    p.add_argument(
        "--weights",
        default="inverse-square",
        help="inverse-square, classic-gini or comma separated decreasing weights",
    )
    p.add_argument("--init", choices=INIT_STRATEGIES, default=defaults.init_strategy)
    p.add_argument(
        "--sign", choices=SUBGRADIENT_SIGNS, default=defaults.subgradient_sign
    )
    p.add_argument("--max-iter", type=int, default=defaults.max_iter)
    p.add_argument("--rho0", type=float, default=defaults.rho0)
    p.add_argument("--patience", type=int, default=defaults.halving_patience)
    p.add_argument("--tol", type=float, default=defaults.y_change_tol)


def _config(args: argparse.Namespace) -> SolverConfig:
    return SolverConfig(
        max_iter=args.max_iter,
        rho0=args.rho0,
        halving_patience=args.patience,
        y_change_tol=args.tol,
        init_strategy=args.init,
        subgradient_sign=args.sign,
    )


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fairopt",
        description="Fair assignment and perfect matching under the Generalized "
        "Gini Index",
    )
    parser.add_argument(
        "-v", "--verbose", action="store_true", help="log every solver iteration"
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("gen", help="generate a random instance file")
    p.add_argument("--kind", choices=("assignment", "matching"), required=True)
    p.add_argument("--n", type=int, required=True, help="number of GGI components")
    p.add_argument("--d", type=int, required=True, help="utility deviation")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-o", "--output", help="output path, v<d>-<2n>.inst by default")

    p = sub.add_parser("solve", help="run the primal-dual heuristic on an instance")
    p.add_argument("instance")
    _add_solver_flags(p)
    p.add_argument(
        "--exact", action="store_true", help="also report the gap to the optimum"
    )
    p.add_argument("--csv", help="append the result row to this file")

    p = sub.add_parser("exact", help="find a GGI-optimal solution by enumeration")
    p.add_argument("instance")
    p.add_argument("--weights", default="inverse-square")

    p = sub.add_parser("export-lp", help="write the 0,1 linear program of an instance")
    p.add_argument("instance")
    p.add_argument("--weights", default="inverse-square")
    p.add_argument("-o", "--output", help="output path, stdout by default")

    p = sub.add_parser("bench", help="benchmark the heuristic on random instances")
    p.add_argument("--kind", choices=("assignment", "matching"), required=True)
    p.add_argument(
        "--sizes", type=_int_list, required=True, help="numbers of GGI components"
    )
    p.add_argument("--d", type=_int_list, required=True, help="utility deviations")
    p.add_argument("--reps", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    _add_solver_flags(p)
    p.add_argument(
        "--no-exact", action="store_true", help="skip the exact oracle runs"
    )
    p.add_argument(
        "--threads", type=int, help="worker processes, $%s by default" % THREADS_ENV
    )
    p.add_argument("--csv", help="output path, stdout by default")
    return parser


def _within_exact_caps(inst: Instance) -> bool:
    if inst.kind == "assignment":
        return inst.n <= ENUM_CAP_ASSIGNMENT
    return 2 * inst.n <= ENUM_CAP_MATCHING


def _format(x: float) -> str:
    return "%.10g" % x


def _row(
    name: str,
    inst: Instance,
    w: WeightVector,
    config: SolverConfig,
    exact: bool,
) -> Dict[str, str]:
    report = solver.solve(inst, w, config)
    ub = report.best_upper_bound
    gap_ub = _format(gap(ub, report.best_ggi)) if ub > 0 else ""
    gap_exact = ""
    if exact and _within_exact_caps(inst):
        _, opt = ggi_brute_force(inst, w)
        if opt > 0:
            gap_exact = _format(gap(opt, report.best_ggi))
    prov = inst.provenance
    return {
        "instance": name,
        "kind": inst.kind,
        "n": str(inst.n),
        "d": str(prov.d) if prov is not None else "",
        "seed": str(prov.seed) if prov is not None else "",
        "init": config.init_strategy,
        "sign": config.subgradient_sign,
        "iters": str(report.iterations),
        "best_ggi": _format(report.best_ggi),
        "upper_bound": _format(ub),
        "gap_vs_ub": gap_ub,
        "gap_vs_exact": gap_exact,
        "certificate": "true" if report.certificate else "false",
        "time_ms": "%.1f" % (report.wall_time * 1000.0),
    }


_BenchTask = Tuple[str, int, int, int, str, SolverConfig, bool]


def _bench_row(task: _BenchTask) -> Dict[str, str]:
    kind, n, d, seed, weights, config, exact = task
    gen = gen_assignment if kind == "assignment" else gen_matching
    inst = gen(n, d, seed)
    return _row(instance_name(inst), inst, _weights(weights, n), config, exact)


def _bench_tasks(args: argparse.Namespace, config: SolverConfig) -> List[_BenchTask]:
    tasks = []
    index = 0
    for n in args.sizes:
        for d in args.d:
            for _ in range(args.reps):
                seed = args.seed + index
                exact = not args.no_exact
                tasks.append((args.kind, n, d, seed, args.weights, config, exact))
                index += 1
    return tasks


def _threads(args: argparse.Namespace) -> int:
    if args.threads is not None:
        threads = args.threads
    else:
        env = os.environ.get(THREADS_ENV, "1")
        try:
            threads = int(env)
        except ValueError:
            raise _UsageError("%s must be an integer, got %r" % (THREADS_ENV, env))
    if threads < 1:
        raise _UsageError("the number of threads must be positive")
    return threads


def _rows(tasks: Sequence[_BenchTask], threads: int) -> Iterator[Dict[str, str]]:
    if threads == 1 or len(tasks) <= 1:
        for task in tasks:
            yield _bench_row(task)
        return
    with ProcessPoolExecutor(max_workers=threads) as executor:
        # map() yields in submission order
        yield from executor.map(_bench_row, tasks)


def _write_csv(
    rows: Iterator[Dict[str, str]], out: TextIO, header: bool = True
) -> None:
    writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator="\n")
    if header:
        writer.writeheader()
    for row in rows:
        writer.writerow(row)
        out.flush()


def _format_solution(sol: Solution) -> str:
    if isinstance(sol, Permutation):
        return " ".join("%d->%d" % (i + 1, j + 1) for i, j in enumerate(sol.sigma))
    assert isinstance(sol, PerfectMatching)
    return " ".join("%d-%d" % (i + 1, j + 1) for i, j in sol.pairs)


def _instance_label(path: str, inst: Instance) -> str:
    if inst.provenance is not None:
        return instance_name(inst)
    return os.path.splitext(os.path.basename(path))[0]


def _cmd_gen(args: argparse.Namespace, stdout: TextIO) -> int:
    if args.kind == "assignment":
        inst = gen_assignment(args.n, args.d, args.seed)
    else:
        inst = gen_matching(args.n, args.d, args.seed)
    path = args.output or "%s.inst" % instance_name(inst)
    write_instance(inst, path)
    stdout.write("%s\n" % path)
    return EXIT_OK


def _cmd_solve(args: argparse.Namespace, stdout: TextIO) -> int:
    inst = read_instance(args.instance)
    w = _weights(args.weights, inst.n)
    row = _row(_instance_label(args.instance, inst), inst, w, _config(args), args.exact)
    if args.csv:
        header = not os.path.exists(args.csv) or os.path.getsize(args.csv) == 0
        with open(args.csv, "a", encoding="utf-8", newline="") as f:
            _write_csv(iter([row]), f, header)
    else:
        _write_csv(iter([row]), stdout)
    return EXIT_OK


def _cmd_exact(args: argparse.Namespace, stdout: TextIO) -> int:
    inst = read_instance(args.instance)
    w = _weights(args.weights, inst.n)
    sol, value = ggi_brute_force(inst, w)
    values = agent_values(inst, sol)
    stdout.write("instance %s\n" % _instance_label(args.instance, inst))
    stdout.write("ggi %s\n" % _format(value))
    stdout.write("solution %s\n" % _format_solution(sol))
    stdout.write("values %s\n" % " ".join(_format(x) for x in values))
    return EXIT_OK


def _cmd_export_lp(args: argparse.Namespace, stdout: TextIO) -> int:
    inst = read_instance(args.instance)
    w = _weights(args.weights, inst.n)
    if args.output:
        export_ip(inst, w, args.output)
    else:
        stdout.write(format_ip(inst, w))
    return EXIT_OK


def _cmd_bench(args: argparse.Namespace, stdout: TextIO) -> int:
    if args.reps < 1:
        raise _UsageError("--reps must be positive")
    config = _config(args)
    for n in args.sizes:
        _weights(args.weights, n)
    tasks = _bench_tasks(args, config)
    threads = _threads(args)
    log.info("running %d benchmark instances on %d workers", len(tasks), threads)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            _write_csv(_rows(tasks, threads), f)
    else:
        _write_csv(_rows(tasks, threads), stdout)
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "solve": _cmd_solve,
    "exact": _cmd_exact,
    "export-lp": _cmd_export_lp,
    "bench": _cmd_bench,
}


def run(
    argv: Optional[Sequence[str]] = None,
    stdout: Optional[TextIO] = None,
    stderr: Optional[TextIO] = None,
) -> int:
    """Run the command line `argv` and return its exit code."""
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    parser = _parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    solver.debug = args.verbose
    started = time.perf_counter()
    try:
        code = _COMMANDS[args.command](args, out)
    except (_UsageError, ValidationError) as e:
        err.write("fairopt %s: error: %s\n" % (args.command, e))
        return EXIT_USAGE
    except CapacityError as e:
        err.write("fairopt %s: %s\n" % (args.command, e))
        return EXIT_CAPACITY
    except (FairOptError, OSError) as e:
        err.write("fairopt %s: %s\n" % (args.command, e))
        return EXIT_IO
    log.debug("%s finished in %.3f s", args.command, time.perf_counter() - started)
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
