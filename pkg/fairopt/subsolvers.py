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

"""Exact solvers for the weighted subproblem.

Given non-negative component weights `theta`, the weighted subproblem asks for the
feasible solution maximizing `sum_i theta_i * T_i`. Assignment instances are
solved by the Hungarian algorithm, perfect matching instances by dynamic
programming over vertex subsets. Exhaustive enumeration of all feasible solutions
serves as ground truth for small instances.
"""

__all__ = [
    "DP_CAP",
    "ENUM_CAP_ASSIGNMENT",
    "ENUM_CAP_MATCHING",
    "hungarian",
    "dp_perfect_matching",
    "enumerate_feasible",
    "solve_weighted",
    "weighted_value",
    "max_weight",
]

import itertools
from typing import Any, Iterator, List, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from fairopt.errors import CapacityError, ValidationError
from fairopt.instances import (
    Instance,
    PerfectMatching,
    Permutation,
    Solution,
    agent_values,
)

DP_CAP = 24
ENUM_CAP_ASSIGNMENT = 8
ENUM_CAP_MATCHING = 10

_Pairs = Tuple[Tuple[int, int], ...]


def hungarian(weights: Any) -> Tuple[Tuple[int, ...], float]:
    """Return a permutation maximizing `sum_i weights[i, sigma[i]]` and its value.

    Type: `(ArrayLike) -> Tuple[Tuple[int, ...], float]`

    The maximization is turned into a minimization over the non-negative costs
    `max(weights) - weights` and solved by the shortest augmenting path variant of
    the Hungarian algorithm with row and column potentials, in `O(n^3)`.

    Examples:

    ```pycon
    >>> hungarian([[5, 1], [2, 3]])
    ((0, 1), 8.0)

    ```
    """
    w = np.asarray(weights, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValidationError("the Hungarian algorithm needs a square matrix")
    if not np.all(np.isfinite(w)):
        raise ValidationError("weights must be finite")
    n = w.shape[0]
    if n == 0:
        return (), 0.0
    cost = w.max() - w

    # 1-based rows and columns, column 0 is the virtual root of each search
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, np.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], np.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]
            u[p[used]] += delta
            v[used] -= delta
            minv[1:][free] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0 != 0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    sigma = [0] * n
    for j in range(1, n + 1):
        sigma[p[j] - 1] = j - 1
    value = float(w[np.arange(n), sigma].sum())
    return tuple(sigma), value


def dp_perfect_matching(pairweights: Any, cap: int = DP_CAP) -> Tuple[_Pairs, float]:
    """Return a maximum weight perfect matching of a complete graph and its value.

    Type: `(ArrayLike, int) -> Tuple[Tuple[Tuple[int, int], ...], float]`

    The weight of the pair `(i, j)`, `i < j`, is read from the strict upper triangle
    of the `2n x 2n` matrix `pairweights`. The dynamic program runs over the subsets
    of already matched vertices, always matching the smallest free vertex next. It
    uses `O(2^(2n))` memory, so graphs larger than `cap` vertices are refused.

    Examples:

    ```pycon
    >>> dp_perfect_matching([[0, 5], [0, 0]])
    (((0, 1),), 5.0)

    ```
    """
    w = np.asarray(pairweights, dtype=np.float64)
    if w.ndim != 2 or w.shape[0] != w.shape[1]:
        raise ValidationError("pair weights must form a square matrix")
    size = w.shape[0]
    if size == 0 or size % 2 != 0:
        raise ValidationError("a perfect matching needs a positive even vertex count")
    if size > cap:
        raise CapacityError(
            "perfect matching DP",
            size,
            cap,
            "export the model with export-lp and use a MILP solver",
        )
    if not np.all(np.isfinite(np.triu(w, 1))):
        raise ValidationError("weights must be finite")

    full = (1 << size) - 1
    best = np.full(1 << size, -np.inf)
    best[0] = 0.0
    pick_i = np.zeros(1 << size, dtype=np.int8)
    pick_j = np.zeros(1 << size, dtype=np.int8)
    # Masks whose lowest free vertex is i only receive moves from masks whose
    # lowest free vertex is smaller, so increasing i finalizes them in order.
    for i in range(size - 1):
        low = (1 << i) - 1
        masks = (np.arange(1 << (size - i - 1), dtype=np.int64) << (i + 1)) | low
        for j in range(i + 1, size):
            bit = 1 << j
            src = masks[(masks & bit) == 0]
            if src.shape[0] == 0:
                continue
            dst = src | (1 << i) | bit
            cand = best[src] + w[i, j]
            gain = cand > best[dst]
            hit = dst[gain]
            best[hit] = cand[gain]
            pick_i[hit] = i
            pick_j[hit] = j

    pairs: List[Tuple[int, int]] = []
    mask = full
    while mask:
        i, j = int(pick_i[mask]), int(pick_j[mask])
        pairs.append((i, j))
        mask &= ~((1 << i) | (1 << j))
    pairs.sort()
    value = float(sum(w[i, j] for i, j in pairs))
    return tuple(pairs), value


def _matchings(vertices: Sequence[int]) -> Iterator[List[Tuple[int, int]]]:
    if not vertices:
        yield []
        return
    first, rest = vertices[0], vertices[1:]
    for k, partner in enumerate(rest):
        remaining = rest[:k] + rest[k + 1 :]
        for tail in _matchings(remaining):
            yield [(first, partner)] + tail


def enumerate_feasible(inst: Instance) -> Iterator[Solution]:
    """Yield every feasible solution of `inst` exactly once.

    Type: `(Instance) -> Iterator[Solution]`

    There are `n!` assignments and `(2n - 1)!!` perfect matchings. Sizes above
    `ENUM_CAP_ASSIGNMENT` components or `ENUM_CAP_MATCHING` vertices raise
    `CapacityError` right away.
    """
    if inst.kind == "assignment":
        if not inst.square:
            raise ValidationError("enumeration needs a square assignment matrix")
        if inst.n > ENUM_CAP_ASSIGNMENT:
            raise CapacityError("assignment enumeration", inst.n, ENUM_CAP_ASSIGNMENT)
        return (Permutation(sigma) for sigma in itertools.permutations(range(inst.n)))
    size = 2 * inst.n
    if size > ENUM_CAP_MATCHING:
        raise CapacityError("perfect matching enumeration", size, ENUM_CAP_MATCHING)
    return (PerfectMatching(tuple(pairs)) for pairs in _matchings(list(range(size))))


def _theta(inst: Instance, theta: Any) -> NDArray[np.float64]:
    arr = np.asarray(theta, dtype=np.float64)
    if arr.shape != (inst.n,):
        raise ValidationError(
            "expected %d component weights, got shape %r" % (inst.n, arr.shape)
        )
    for i, x in enumerate(arr):
        if not np.isfinite(x) or x < -1e-12:
            raise ValidationError("component weights must be non-negative", i + 1)
    return np.maximum(arr, 0.0)


def solve_weighted(inst: Instance, theta: Any, dp_cap: int = DP_CAP) -> Solution:
    """Return a feasible solution maximizing `sum_i theta_i * T_i`.

    Type: `(Instance, ArrayLike, int) -> Solution`

    Ties between optimal solutions are broken by the deterministic execution of
    the underlying solver.
    """
    th = _theta(inst, theta)
    if inst.kind == "assignment":
        if not inst.square:
            raise ValidationError("the weighted subproblem needs a square assignment")
        sigma, _ = hungarian(th[:, None] * inst.u)
        return Permutation(sigma)
    size = 2 * inst.n
    scale = np.zeros(size)
    scale[: inst.n] = th
    pairs, _ = dp_perfect_matching(np.triu(scale[:, None] * inst.u, 1), dp_cap)
    return PerfectMatching(pairs)


def weighted_value(inst: Instance, theta: Any, sol: Solution) -> float:
    """Return `sum_i theta_i * T_i` for the solution `sol`."""
    return float(np.dot(_theta(inst, theta), agent_values(inst, sol)))


def max_weight(inst: Instance, dp_cap: int = DP_CAP) -> Solution:
    """Return a solution of the maximum weight problem, all weights equal to 1."""
    return solve_weighted(inst, np.ones(inst.n), dp_cap)
