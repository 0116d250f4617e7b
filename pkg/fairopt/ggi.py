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

"""Generalized Gini Index: weight schemes, Lorenz components and evaluation.

The Generalized Gini Index (GGI) of a vector `v` is an ordered weighted average
with strictly decreasing positive weights `w`:

    GGI_w(v) = sum_k w_k * sorted(v)[k] = sum_k w'_k * L_k(v)

where `L_k(v)` is the sum of the `k` smallest components of `v` (its `k`-th
Lorenz component) and `w'_k = w_k - w_{k+1}` with `w_{n+1} = 0`. The second form
is a positive combination of Lorenz components, and it is the one the solver
builds on.

Vectors are plain sequences or 1-d `numpy` arrays of floats. Indices of the Python
API are 0-based.
"""

__all__ = [
    "TOL",
    "WeightVector",
    "weight_scheme",
    "lorenz",
    "ggi",
    "sorted_weighted_sum",
    "pigou_dalton_transfer",
    "gini_coefficient",
    "lorenz_dominates",
]

from typing import Any, Optional, Sequence, Union

import numpy as np
from numpy.typing import NDArray

from fairopt.errors import ValidationError

TOL = 1e-12

Vector = Union[Sequence[float], NDArray[Any]]


class WeightVector:
    """GGI weights `w` together with their deltas `w'`.

    Attributes:
        n (int): Number of components
        w (NDArray[float64]): Weights, strictly decreasing and positive
        deltas (NDArray[float64]): `deltas[k] = w[k] - w[k + 1]`, the last one is
            `w[n - 1]`
    """

    def __init__(self, w: Vector) -> None:
        """Validate the weights and compute their deltas.

        Raises `ValidationError` naming the 1-based index of the first weight that
        breaks the strictly decreasing and positive requirement.
        """
        arr = np.array(w, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] == 0:
            raise ValidationError("GGI weights must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(arr)):
            raise ValidationError("GGI weights must be finite")
        n = arr.shape[0]
        for k in range(n - 1):
            if not arr[k] - arr[k + 1] > TOL:
                raise ValidationError("GGI weights must be strictly decreasing", k + 2)
        if not arr[-1] > TOL:
            raise ValidationError("GGI weights must be positive", n)
        deltas = arr - np.append(arr[1:], 0.0)
        arr.setflags(write=False)
        deltas.setflags(write=False)
        self.n = n
        self.w = arr
        self.deltas = deltas

    @property
    def w_max_delta(self) -> float:
        return float(self.deltas.max())

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightVector):
            return False
        return self.n == other.n and bool(np.array_equal(self.w, other.w))

    def __repr__(self) -> str:
        return "WeightVector(%r)" % ([float(x) for x in self.w],)


def weight_scheme(
    n: int,
    scheme: str,
    values: Optional[Vector] = None,
) -> WeightVector:
    """Return the GGI weights of size `n` for a named scheme.

    Type: `(int, str, Optional[Sequence[float]]) -> WeightVector`

    Schemes:

    * `"inverse-square"`: `w_k = 1 / k**2`, the fast decreasing weights used in the
      experiments
    * `"classic-gini"`: `w_k = (2 * (n - k) + 1) / n**2`, the weights of the classic
      Gini index
    * `"custom"`: the strictly decreasing positive `values` of length `n`

    Examples:

    ```pycon
    >>> weight_scheme(2, "classic-gini")
    WeightVector([0.75, 0.25])
    >>> weight_scheme(3, "inverse-square").deltas.tolist()[0]
    0.75
    >>> weight_scheme(2, "custom", [1.0, 2.0])
    Traceback (most recent call last):
        ...
    fairopt.errors.ValidationError: GGI weights must be strictly decreasing (at index 2)

    ```
    """
    if n < 1:
        raise ValidationError("the number of components must be positive")
    k = np.arange(1, n + 1, dtype=np.float64)
    if scheme == "inverse-square":
        return WeightVector(1.0 / k**2)
    elif scheme == "classic-gini":
        return WeightVector((2.0 * (n - k) + 1.0) / float(n * n))
    elif scheme == "custom":
        if values is None:
            raise ValidationError("the custom scheme needs explicit weights")
        weights = WeightVector(values)
        if weights.n != n:
            raise ValidationError(
                "expected %d custom weights, got %d" % (n, weights.n)
            )
        return weights
    else:
        raise ValidationError("unknown weight scheme %r" % (scheme,))


def _values(v: Vector) -> NDArray[np.float64]:
    arr = np.asarray(v, dtype=np.float64)
    if arr.ndim != 1 or arr.shape[0] == 0:
        raise ValidationError("a value vector must be a non-empty 1-d sequence")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("a value vector must have finite entries")
    return arr


def lorenz(v: Vector) -> NDArray[np.float64]:
    """Return the Lorenz components of `v`: the `k`-th one is the sum of the `k`
    smallest values.

    Examples:

    ```pycon
    >>> lorenz([3, 1, 2]).tolist()
    [1.0, 3.0, 6.0]

    ```
    """
    return np.cumsum(np.sort(_values(v)))


def ggi(v: Vector, w: WeightVector) -> float:
    """Return the Generalized Gini Index of `v`, computed as `sum_k w'_k L_k(v)`.

    Type: `(Sequence[float], WeightVector) -> float`

    Examples:

    ```pycon
    >>> ggi([0, 100], WeightVector([1, 0.25]))
    25.0

    ```
    """
    arr = _values(v)
    if arr.shape[0] != w.n:
        raise ValidationError(
            "value vector has %d components, weights have %d" % (arr.shape[0], w.n)
        )
    return float(np.dot(w.deltas, np.cumsum(np.sort(arr))))


def sorted_weighted_sum(v: Vector, w: WeightVector) -> float:
    """Return `sum_k w_k * sorted(v)[k]`, the ordered weighted average form of
    `ggi()`."""
    arr = _values(v)
    if arr.shape[0] != w.n:
        raise ValidationError(
            "value vector has %d components, weights have %d" % (arr.shape[0], w.n)
        )
    return float(np.dot(w.w, np.sort(arr)))


def pigou_dalton_transfer(v: Vector, i: int, j: int, eps: float) -> NDArray[np.float64]:
    """Move `eps` of value from the richer component `j` to the poorer component
    `i`.

    Type: `(Sequence[float], int, int, float) -> NDArray[float64]`

    Requires `v[i] < v[j]` and `0 < eps < v[j] - v[i]`.

    Examples:

    ```pycon
    >>> pigou_dalton_transfer([0, 10], 0, 1, 3).tolist()
    [3.0, 7.0]

    ```
    """
    arr = _values(v).copy()
    n = arr.shape[0]
    if not (0 <= i < n and 0 <= j < n):
        raise ValidationError("transfer indices out of range")
    if not arr[i] < arr[j]:
        raise ValidationError("a transfer must go from a richer to a poorer component")
    if not 0 < eps < arr[j] - arr[i]:
        raise ValidationError(
            "transfer amount must lie strictly between 0 and %g" % (arr[j] - arr[i])
        )
    arr[i] += eps
    arr[j] -= eps
    return arr


def gini_coefficient(v: Vector) -> float:
    """Return the classic Gini coefficient `1 - GGI(v) / mean(v)` under the classic
    Gini weights. It is twice the area between the Lorenz curve of `v` and the line
    of perfect equality.

    Examples:

    ```pycon
    >>> gini_coefficient([0, 100])
    0.5
    >>> gini_coefficient([7, 7, 7])
    0.0

    ```
    """
    arr = _values(v)
    mean = float(arr.mean())
    if not mean > 0:
        raise ValidationError("the Gini coefficient needs a positive total")
    g = 1.0 - ggi(arr, weight_scheme(arr.shape[0], "classic-gini")) / mean
    return 0.0 if abs(g) <= TOL else g


def lorenz_dominates(a: Vector, b: Vector) -> bool:
    """Return whether `a` Lorenz-dominates `b`: every Lorenz component of `a` is at
    least the one of `b` and at least one is larger."""
    la = lorenz(a)
    lb = lorenz(b)
    if la.shape != lb.shape:
        raise ValidationError("cannot compare vectors of different sizes")
    return bool(np.all(la >= lb - TOL) and np.any(la > lb + TOL))
