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

"""Euclidean projection onto the dual weight polytope.

The dual weights `y` form an `n x n` matrix. Column `k` (0-based) of a feasible `y`
satisfies `0 <= y[i, k] <= w'_k` and `sum_i y[i, k] = (k + 1) * w'_k`. Dividing the
column by `w'_k` turns this set into the capped simplex

    {x in [0, 1]^n : sum(x) = k + 1}

so the projection onto the polytope splits into `n` independent capped simplex
projections, one per column.
"""

__all__ = [
    "FEASIBILITY_TOL",
    "project_capped_simplex",
    "project_dual",
    "qp_projection_oracle",
    "dual_violation",
    "in_dual_polytope",
    "uniform_dual",
]

import itertools
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from fairopt.errors import CapacityError, ValidationError

FEASIBILITY_TOL = 1e-9
QP_ORACLE_CAP = 6


def _vector(v: Any) -> NDArray[np.float64]:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValidationError("expected a non-empty 1-d vector")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("the vector must have finite entries")
    return arr


def _budget(k: int, n: int) -> None:
    if int(k) != k or not 1 <= k <= n:
        raise ValidationError(
            "the budget k must be an integer in [1, %d], got %r" % (n, k)
        )


def _snap(x: NDArray[np.float64], k: float) -> NDArray[np.float64]:
    x = np.clip(x, 0.0, 1.0)
    residual = k - x.sum()
    if residual != 0.0:
        interior = (x > 0.0) & (x < 1.0)
        count = int(interior.sum())
        if count > 0 and abs(residual) <= FEASIBILITY_TOL * max(1.0, k):
            x[interior] += residual / count
            x = np.clip(x, 0.0, 1.0)
    return x


def project_capped_simplex(v: Any, k: int) -> NDArray[np.float64]:
    """Return the Euclidean projection of `v` onto `{x in [0, 1]^n : sum(x) = k}`.

    Type: `(ArrayLike, int) -> NDArray[float64]`

    The projection is `clip(v - tau, 0, 1)` for the unique shift `tau` that meets
    the budget. The budget as a function of `tau` is piecewise linear with
    breakpoints at `v_i - 1` and `v_i`; it is evaluated at every breakpoint with
    prefix sums over the sorted `v`, and `tau` is interpolated inside the segment
    that crosses `k`. The total cost is `O(n log n)`.

    Examples:

    ```pycon
    >>> project_capped_simplex([2, 0], 1).tolist()
    [1.0, 0.0]
    >>> project_capped_simplex([0.6, 0.6, 0.6], 3).tolist()
    [1.0, 1.0, 1.0]

    ```
    """
    arr = _vector(v)
    n = arr.shape[0]
    _budget(k, n)
    if k == n:
        return np.ones(n)

    s = np.sort(arr)
    prefix = np.concatenate(([0.0], np.cumsum(s)))
    taus = np.sort(np.concatenate((arr - 1.0, arr)))
    # values <= tau contribute 0, values >= tau + 1 contribute 1
    lo = np.searchsorted(s, taus, side="right")
    hi = np.searchsorted(s, taus + 1.0, side="left")
    budgets = (n - hi) + (prefix[hi] - prefix[lo]) - (hi - lo) * taus

    j = int(np.argmax(budgets <= k))
    if j == 0 or budgets[j] == k:
        tau = taus[j]
    else:
        t0, t1 = taus[j - 1], taus[j]
        b0, b1 = budgets[j - 1], budgets[j]
        tau = t0 + (b0 - k) * (t1 - t0) / (b0 - b1)
    return _snap(arr - tau, float(k))


def qp_projection_oracle(v: Any, k: int) -> NDArray[np.float64]:
    """Return the capped simplex projection by enumerating active sets.

    Type: `(ArrayLike, int) -> NDArray[float64]`

    Each coordinate is either fixed at 0, fixed at 1 or free. For a pattern with
    the free set `I` and `m` coordinates at 1, the closest point on the budget
    hyperplane is `x_I = v_I - tau` with `tau = (sum(v_I) + m - k) / |I|`. Among the
    candidates that fall inside the box, the closest one to `v` is the projection.
    There are `3^n` patterns, so `n` is capped at `QP_ORACLE_CAP`.
    """
    arr = _vector(v)
    n = arr.shape[0]
    _budget(k, n)
    if n > QP_ORACLE_CAP:
        raise CapacityError("capped simplex projection oracle", n, QP_ORACLE_CAP)

    best: Optional[NDArray[np.float64]] = None
    best_dist = np.inf
    for pattern in itertools.product((0, 1, 2), repeat=n):
        p = np.array(pattern)
        ones = int((p == 1).sum())
        free = p == 2
        x = (p == 1).astype(np.float64)
        if free.any():
            tau = (arr[free].sum() + ones - k) / free.sum()
            x[free] = arr[free] - tau
            outside = (x[free] < -FEASIBILITY_TOL) | (x[free] > 1 + FEASIBILITY_TOL)
            if outside.any():
                continue
        elif ones != k:
            continue
        dist = float(np.sum((arr - x) ** 2))
        if dist < best_dist:
            best, best_dist = x, dist
    assert best is not None
    return np.clip(best, 0.0, 1.0)


def _deltas(deltas: Any) -> NDArray[np.float64]:
    d = _vector(getattr(deltas, "deltas", deltas))
    for k, x in enumerate(d):
        if not x > 0:
            raise ValidationError("weight deltas must be positive", k + 1)
    return d


def _dual_matrix(y: Any, n: int) -> NDArray[np.float64]:
    arr = np.asarray(y, dtype=np.float64)
    if arr.shape != (n, n):
        raise ValidationError(
            "dual weights must be %d x %d, got shape %r" % (n, n, arr.shape)
        )
    if not np.all(np.isfinite(arr)):
        raise ValidationError("dual weights must be finite")
    return arr


def project_dual(yraw: Any, deltas: Any) -> NDArray[np.float64]:
    """Return the Euclidean projection of `yraw` onto the dual weight polytope.

    Type: `(ArrayLike, ArrayLike) -> NDArray[float64]`

    `deltas` are the weight deltas `w'` (a `WeightVector` is accepted too). Column
    `k` of the result is `w'_k * project_capped_simplex(yraw[:, k] / w'_k, k + 1)`.
    """
    d = _deltas(deltas)
    n = d.shape[0]
    raw = _dual_matrix(yraw, n)
    y = np.empty((n, n))
    for k in range(n):
        y[:, k] = d[k] * project_capped_simplex(raw[:, k] / d[k], k + 1)
        np.clip(y[:, k], 0.0, d[k], out=y[:, k])
    return y


def dual_violation(y: Any, deltas: Any) -> float:
    """Return the largest violation of the dual polytope constraints by `y`."""
    d = _deltas(deltas)
    n = d.shape[0]
    arr = _dual_matrix(y, n)
    budgets = np.arange(1, n + 1) * d
    return float(
        max(
            np.max(-arr),
            np.max(arr - d[None, :]),
            np.max(np.abs(arr.sum(axis=0) - budgets)),
            0.0,
        )
    )


def in_dual_polytope(y: Any, deltas: Any, tol: float = FEASIBILITY_TOL) -> bool:
    return dual_violation(y, deltas) <= tol


def uniform_dual(deltas: Any) -> NDArray[np.float64]:
    """Return the interior point `y[i, k] = (k + 1) / n * w'_k` of the polytope.

    Examples:

    ```pycon
    >>> uniform_dual([0.75, 0.25]).tolist()
    [[0.375, 0.25], [0.375, 0.25]]

    ```
    """
    d = _deltas(deltas)
    n = d.shape[0]
    col = np.arange(1, n + 1) * d / n
    return np.tile(col, (n, 1))
