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

"""Problem instances, feasible solutions and random instance generation.

Two problem kinds are supported:

* `"assignment"`: `n` components (agents) are assigned to `n` columns (objects)
  one-to-one. `u[i, j]` is the utility of giving column `j` to component `i`.
* `"matching"`: a complete graph on `2n` vertices must be covered by a perfect
  matching. Utilities are indexed by vertex pairs `i < j` and kept in the strict
  upper triangle of a `2n x 2n` matrix. The GGI components are the first `n`
  vertices; vertex `i` collects the utility of its selected edge only when its
  partner has a larger index.

The generators reproduce the hard random instances of the experiments: utilities
of a row are positively correlated around a base value drawn uniformly from
`{1, ..., 100}`, with integer noise uniform in `[-d, d]`. Every instance is drawn
from its own PCG64 stream seeded by `(seed, n, d, kind)`, so generation is
bit-identical across runs and platforms.
"""

__all__ = [
    "KINDS",
    "PENALTY",
    "Provenance",
    "Instance",
    "Permutation",
    "PerfectMatching",
    "Solution",
    "AllocationBounds",
    "gen_assignment",
    "gen_matching",
    "z_matrix",
    "check_solution",
    "agent_values",
    "instance_name",
]

from typing import Any, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.typing import NDArray

from fairopt.errors import InfeasibleSolutionError, ValidationError

KINDS = ("assignment", "matching")
PENALTY = -1000

_KIND_CODES = {"assignment": 1, "matching": 2}


class Provenance(NamedTuple):
    d: int
    seed: int


class Instance:
    """A fair assignment or perfect matching problem.

    Attributes:
        kind (str): `"assignment"` or `"matching"`
        n (int): Number of GGI components
        u (NDArray[int64]): Utilities, `n x m` for assignment, strict upper triangle
            of `2n x 2n` for matching
        provenance (Optional[Provenance]): Generator parameters, if generated
    """

    def __init__(
        self,
        kind: str,
        n: int,
        u: Any,
        provenance: Optional[Provenance] = None,
    ) -> None:
        if kind not in KINDS:
            raise ValidationError("unsupported problem kind %r" % (kind,))
        if n < 1:
            raise ValidationError("the number of components must be positive")
        raw = np.asarray(u)
        if raw.ndim != 2:
            raise ValidationError("utilities must form a matrix")
        if not np.all(np.isfinite(raw)) or not np.all(raw == np.round(raw)):
            raise ValidationError("utilities must be integers")
        mat = raw.astype(np.int64)
        if kind == "assignment":
            if mat.shape[0] != n or mat.shape[1] < 1:
                raise ValidationError(
                    "assignment utilities must have %d rows, got shape %r"
                    % (n, mat.shape)
                )
        else:
            if mat.shape != (2 * n, 2 * n):
                raise ValidationError(
                    "matching utilities must be %d x %d, got shape %r"
                    % (2 * n, 2 * n, mat.shape)
                )
            mat = np.triu(mat, 1)
        mat.setflags(write=False)
        self.kind = kind
        self.n = n
        self.u = mat
        self.provenance = provenance

    @property
    def m(self) -> int:
        """Number of columns: objects for assignment, vertices for matching."""
        return int(self.u.shape[1])

    @property
    def vertices(self) -> int:
        return 2 * self.n if self.kind == "matching" else self.n + self.m

    @property
    def square(self) -> bool:
        return self.u.shape[0] == self.u.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return False
        return (
            self.kind == other.kind
            and self.n == other.n
            and self.provenance == other.provenance
            and bool(np.array_equal(self.u, other.u))
        )

    def __repr__(self) -> str:
        return "Instance(%r, n=%d, m=%d, provenance=%r)" % (
            self.kind,
            self.n,
            self.m,
            self.provenance,
        )


class Permutation(NamedTuple):
    """A feasible assignment: component `i` receives column `sigma[i]`."""

    sigma: Tuple[int, ...]


class PerfectMatching(NamedTuple):
    """A perfect matching as a sorted tuple of vertex pairs `(i, j)`, `i < j`."""

    pairs: Tuple[Tuple[int, int], ...]

    @classmethod
    def of(cls, pairs: Sequence[Tuple[int, int]]) -> "PerfectMatching":
        return cls(tuple(sorted((min(i, j), max(i, j)) for i, j in pairs)))


Solution = Union[Permutation, PerfectMatching]


class AllocationBounds(NamedTuple):
    """Degree bounds of the general allocation model.

    Component `i` receives between `row_min[i]` and `row_max[i]` columns, column `j`
    goes to between `col_min[j]` and `col_max[j]` components. The assignment problem
    has all bounds equal to 1.
    """

    row_min: Tuple[int, ...]
    row_max: Tuple[int, ...]
    col_min: Tuple[int, ...]
    col_max: Tuple[int, ...]

    @classmethod
    def assignment(cls, n: int) -> "AllocationBounds":
        ones = (1,) * n
        return cls(ones, ones, ones, ones)

    def validate(self, n: int, m: int) -> None:
        if len(self.row_min) != n or len(self.row_max) != n:
            raise ValidationError("row bounds must have %d entries" % n)
        if len(self.col_min) != m or len(self.col_max) != m:
            raise ValidationError("column bounds must have %d entries" % m)
        for i, (lo, hi) in enumerate(zip(self.row_min, self.row_max)):
            if not 0 <= lo <= hi:
                raise ValidationError("row bounds must satisfy 0 <= min <= max", i + 1)
        for j, (lo, hi) in enumerate(zip(self.col_min, self.col_max)):
            if not 0 <= lo <= hi:
                raise ValidationError(
                    "column bounds must satisfy 0 <= min <= max", j + 1
                )

    def feasible(self, z: NDArray[Any]) -> bool:
        rows = z.sum(axis=1)
        cols = z.sum(axis=0)
        return bool(
            np.all(rows >= self.row_min)
            and np.all(rows <= self.row_max)
            and np.all(cols >= self.col_min)
            and np.all(cols <= self.col_max)
        )


def _stream(kind: str, n: int, d: int, seed: int) -> np.random.Generator:
    if n < 1:
        raise ValidationError("the number of components must be positive")
    if d < 0:
        raise ValidationError("the deviation d must be non-negative")
    if seed < 0:
        raise ValidationError("the seed must be an unsigned integer")
    entropy = np.random.SeedSequence([seed, n, d, _KIND_CODES[kind]])
    return np.random.Generator(np.random.PCG64(entropy))


def gen_assignment(n: int, d: int, seed: int) -> Instance:
    """Generate a random assignment instance.

    Type: `(int, int, int) -> Instance`

    The first column of row `i` is uniform over `{1, ..., 100}`; every other entry
    of the row is that value plus an integer noise uniform in `[-d, d]`. Values are
    kept as drawn, even when the noise makes them negative.
    """
    rng = _stream("assignment", n, d, seed)
    base = rng.integers(1, 101, size=n, dtype=np.int64)
    noise = rng.integers(-d, d + 1, size=(n, n), dtype=np.int64)
    noise[:, 0] = 0
    return Instance("assignment", n, base[:, None] + noise, Provenance(d, seed))


def gen_matching(n: int, d: int, seed: int) -> Instance:
    """Generate a random perfect matching instance on `2n` vertices.

    Type: `(int, int, int) -> Instance`

    Pairs inside the first half of the vertices cost `PENALTY`. Row `i` draws a base
    value uniform over `{1, ..., 100}`; for a first-half row it is the utility of the
    pair `(i, n)` and the later pairs add integer noise uniform in `[-d, d]` to it.
    Second-half rows use their base value plus noise for every pair.
    """
    rng = _stream("matching", n, d, seed)
    size = 2 * n
    base = rng.integers(1, 101, size=size, dtype=np.int64)
    noise = rng.integers(-d, d + 1, size=(size, size), dtype=np.int64)
    u = np.zeros((size, size), dtype=np.int64)
    for i in range(size - 1):
        if i < n:
            u[i, i + 1 : n] = PENALTY
            u[i, n] = base[i]
            u[i, n + 1 :] = base[i] + noise[i, n + 1 :]
        else:
            u[i, i + 1 :] = base[i] + noise[i, i + 1 :]
    return Instance("matching", n, u, Provenance(d, seed))


def check_solution(inst: Instance, sol: Solution) -> None:
    """Raise `InfeasibleSolutionError` unless `sol` is a feasible assignment or
    perfect matching of `inst`."""
    if inst.kind == "assignment":
        if not isinstance(sol, Permutation):
            raise InfeasibleSolutionError("an assignment instance needs a permutation")
        if not inst.square:
            raise InfeasibleSolutionError(
                "a permutation needs a square utility matrix, use allocation bounds"
            )
        if sorted(sol.sigma) != list(range(inst.n)):
            raise InfeasibleSolutionError(
                "%r is not a permutation of %d columns" % (sol.sigma, inst.n)
            )
    else:
        if not isinstance(sol, PerfectMatching):
            raise InfeasibleSolutionError(
                "a matching instance needs a perfect matching"
            )
        covered = [v for pair in sol.pairs for v in pair]
        if sorted(covered) != list(range(2 * inst.n)):
            raise InfeasibleSolutionError(
                "pairs %r do not cover the %d vertices exactly once"
                % (sol.pairs, 2 * inst.n)
            )
        if any(i >= j for i, j in sol.pairs):
            raise InfeasibleSolutionError("pairs must be written as (i, j) with i < j")


def z_matrix(inst: Instance, sol: Solution) -> NDArray[np.int64]:
    """Return the binary selection matrix of a feasible solution."""
    check_solution(inst, sol)
    z = np.zeros(inst.u.shape, dtype=np.int64)
    if isinstance(sol, Permutation):
        z[np.arange(inst.n), list(sol.sigma)] = 1
    else:
        for i, j in sol.pairs:
            z[i, j] = 1
    return z


def agent_values(inst: Instance, sol: Solution) -> NDArray[np.float64]:
    """Return the component values `T_i = sum_j u[i, j] * z[i, j]`.

    Type: `(Instance, Solution) -> NDArray[float64]`

    For matching, only the first `n` vertices are components and the pair `(i, j)`
    with `i < j` is counted in row `i`.
    """
    z = z_matrix(inst, sol)
    return (inst.u * z).sum(axis=1)[: inst.n].astype(np.float64)


def instance_name(inst: Instance) -> str:
    """Return the `v<d>-<2n>` name of a generated instance."""
    if inst.provenance is None:
        return "instance-%d" % (2 * inst.n)
    return "v%d-%d" % (inst.provenance.d, 2 * inst.n)
