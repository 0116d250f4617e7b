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

"""Exact GGI optimization for small instances and export of the 0,1 linear program.

The GGI-optimal solution of an instance is the optimum of the linearized program

    max   sum_k w'_k (k r_k - sum_i d_ik)
    s.t.  r_k - d_ik <= sum_j u_ij z_ij      for all components i and ranks k
          z feasible, d >= 0, r free

with 1-based ranks `k`. `export_ip()` writes it in the LP text format read by
mainstream MILP solvers. `ggi_brute_force()` finds the same optimum by
enumerating every feasible solution.
"""

__all__ = [
    "BOUNDS_BRUTE_FORCE_CAP",
    "ggi_brute_force",
    "allocation_brute_force",
    "format_ip",
    "export_ip",
]

import itertools
import os
from typing import Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from fairopt.errors import CapacityError, ValidationError
from fairopt.ggi import WeightVector, ggi
from fairopt.instances import AllocationBounds, Instance, Solution, agent_values
from fairopt.subsolvers import enumerate_feasible

BOUNDS_BRUTE_FORCE_CAP = 20

_LINE_WIDTH = 79


def _check_weights(inst: Instance, w: WeightVector) -> None:
    if w.n != inst.n:
        raise ValidationError(
            "weights have %d components, instance has %d" % (w.n, inst.n)
        )


def ggi_brute_force(inst: Instance, w: WeightVector) -> Tuple[Solution, float]:
    """Return a GGI-optimal solution of `inst` and its GGI value.

    Type: `(Instance, WeightVector) -> Tuple[Solution, float]`

    Ties are broken by the enumeration order of `enumerate_feasible()`: the first
    optimal solution found is returned. Raises `CapacityError` beyond the
    enumeration caps.
    """
    _check_weights(inst, w)
    best: Optional[Solution] = None
    best_value = -np.inf
    for sol in enumerate_feasible(inst):
        value = ggi(agent_values(inst, sol), w)
        if value > best_value:
            best, best_value = sol, value
    assert best is not None
    return best, float(best_value)


def _row_patterns(m: int, lo: int, hi: int) -> List[Tuple[int, ...]]:
    return [
        p for p in itertools.product((0, 1), repeat=m) if lo <= sum(p) <= hi
    ]


def _allocations(
    bounds: AllocationBounds, n: int, m: int
) -> Iterator[NDArray[np.int64]]:
    rows = [_row_patterns(m, bounds.row_min[i], bounds.row_max[i]) for i in range(n)]
    col_min = np.asarray(bounds.col_min)
    col_max = np.asarray(bounds.col_max)
    for choice in itertools.product(*rows):
        z = np.array(choice, dtype=np.int64).reshape(n, m)
        cols = z.sum(axis=0)
        if np.all(cols >= col_min) and np.all(cols <= col_max):
            yield z


def allocation_brute_force(
    inst: Instance,
    w: WeightVector,
    bounds: AllocationBounds,
) -> Tuple[NDArray[np.int64], float]:
    """Return a GGI-optimal selection matrix `z` under degree bounds and its value.

    Type: `(Instance, WeightVector, AllocationBounds) -> Tuple[NDArray[int64],
    float]`

    Only assignment-kind instances are accepted, with a possibly rectangular
    `n x m` utility matrix. All binary matrices meeting the bounds are enumerated,
    so `n * m` is capped at `BOUNDS_BRUTE_FORCE_CAP`.
    """
    if inst.kind != "assignment":
        raise ValidationError("allocation bounds apply to assignment instances only")
    _check_weights(inst, w)
    n, m = inst.n, inst.m
    bounds.validate(n, m)
    if n * m > BOUNDS_BRUTE_FORCE_CAP:
        raise CapacityError("allocation enumeration", n * m, BOUNDS_BRUTE_FORCE_CAP)
    best: Optional[NDArray[np.int64]] = None
    best_value = -np.inf
    for z in _allocations(bounds, n, m):
        value = ggi((inst.u * z).sum(axis=1), w)
        if value > best_value:
            best, best_value = z, value
    if best is None:
        raise ValidationError("no selection satisfies the allocation bounds")
    return best, float(best_value)


def _num(x: float) -> str:
    x = float(x)
    if x.is_integer():
        return str(int(x))
    return repr(x)


def _linear(terms: Sequence[Tuple[float, str]]) -> List[str]:
    parts: List[str] = []
    for coef, var in terms:
        if coef == 0:
            continue
        sign = "-" if coef < 0 else "+"
        mag = abs(coef)
        body = var if mag == 1 else "%s %s" % (_num(mag), var)
        if not parts:
            parts.append(body if sign == "+" else "- " + body)
        else:
            parts.append("%s %s" % (sign, body))
    return parts or ["0 %s" % terms[0][1]]


def _wrap(head: str, parts: Sequence[str], tail: str = "") -> List[str]:
    lines: List[str] = []
    line = head
    for part in list(parts) + ([tail] if tail else []):
        if len(line) + 1 + len(part) > _LINE_WIDTH and line.strip():
            lines.append(line)
            line = "   " + part
        else:
            line = "%s %s" % (line, part) if line else " " + part
    lines.append(line)
    return lines


def _z(i: int, j: int) -> str:
    return "z_%d_%d" % (i + 1, j + 1)


def _z_vars(inst: Instance) -> List[Tuple[int, int]]:
    if inst.kind == "assignment":
        return [(i, j) for i in range(inst.n) for j in range(inst.m)]
    size = 2 * inst.n
    return [(i, j) for i in range(size) for j in range(i + 1, size)]


def _degree_constraints(
    inst: Instance,
    bounds: Optional[AllocationBounds],
) -> List[str]:
    lines: List[str] = []
    if inst.kind == "matching":
        size = 2 * inst.n
        for v in range(size):
            terms = [(1.0, _z(min(v, x), max(v, x))) for x in range(size) if x != v]
            lines.extend(_wrap(" deg_%d:" % (v + 1), _linear(terms), "= 1"))
        return lines

    n, m = inst.n, inst.m
    b = bounds if bounds is not None else AllocationBounds.assignment(n)
    b.validate(n, m)
    groups = [
        ("row", i + 1, [(1.0, _z(i, j)) for j in range(m)], b.row_min[i], b.row_max[i])
        for i in range(n)
    ] + [
        ("col", j + 1, [(1.0, _z(i, j)) for i in range(n)], b.col_min[j], b.col_max[j])
        for j in range(m)
    ]
    for prefix, index, terms, lo, hi in groups:
        expr = _linear(terms)
        if lo == hi:
            lines.extend(_wrap(" %s_%d:" % (prefix, index), expr, "= %d" % lo))
        else:
            if lo > 0:
                head = " %s_%d_lo:" % (prefix, index)
                lines.extend(_wrap(head, expr, ">= %d" % lo))
            lines.extend(_wrap(" %s_%d_hi:" % (prefix, index), expr, "<= %d" % hi))
    return lines


def format_ip(
    inst: Instance,
    w: WeightVector,
    bounds: Optional[AllocationBounds] = None,
) -> str:
    """Return the LP text of the linearized GGI program of `inst`.

    Type: `(Instance, WeightVector, Optional[AllocationBounds]) -> str`

    Variables are named with 1-based indices: binaries `z_i_j`, free rank variables
    `r_k` and non-negative deviations `d_i_k`. Degree constraints come first, by
    vertex index, followed by the linking constraints in `(i, k)` order. Matching
    instances keep their penalty edges. `bounds` replaces the one-to-one degree
    constraints of an assignment instance.
    """
    _check_weights(inst, w)
    if bounds is not None and inst.kind != "assignment":
        raise ValidationError("allocation bounds apply to assignment instances only")
    if bounds is None and inst.kind == "assignment" and not inst.square:
        raise ValidationError("a rectangular assignment needs allocation bounds")
    n = inst.n
    deltas = w.deltas

    objective = [((k + 1) * deltas[k], "r_%d" % (k + 1)) for k in range(n)]
    objective += [
        (-deltas[k], "d_%d_%d" % (i + 1, k + 1)) for i in range(n) for k in range(n)
    ]

    lines = [
        "\\ fairopt GGI model",
        "\\ kind %s, n %d, m %d" % (inst.kind, n, inst.m),
        "Maximize",
    ]
    lines.extend(_wrap(" obj:", _linear(objective)))
    lines.append("Subject To")
    lines.extend(_degree_constraints(inst, bounds))

    zs = _z_vars(inst)
    for i in range(n):
        utility = [(-float(inst.u[a, b]), _z(a, b)) for a, b in zs if a == i]
        for k in range(n):
            terms = [(1.0, "r_%d" % (k + 1)), (-1.0, "d_%d_%d" % (i + 1, k + 1))]
            terms += utility
            head = " link_%d_%d:" % (i + 1, k + 1)
            lines.extend(_wrap(head, _linear(terms), "<= 0"))

    lines.append("Bounds")
    lines.extend(" r_%d free" % (k + 1) for k in range(n))
    lines.append("Binaries")
    lines.extend(_wrap("", [_z(i, j) for i, j in zs]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def export_ip(
    inst: Instance,
    w: WeightVector,
    path: Union[str, "os.PathLike[str]"],
    bounds: Optional[AllocationBounds] = None,
) -> None:
    """Write `format_ip(inst, w, bounds)` to `path`."""
    text = format_ip(inst, w, bounds)
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(text)
