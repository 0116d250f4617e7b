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

"""The primal-dual heuristic for GGI-optimal assignments and perfect matchings.

The solver alternates between a primal step and a dual step:

1. Given dual weights `y` in the polytope `{0 <= y[i, k] <= w'_k, sum_i y[i, k] =
   (k + 1) * w'_k}`, solve the weighted subproblem with component weights
   `theta_i = sum_k y[i, k]`. Its solution is a feasible incumbent candidate and
   its weighted value is an upper bound on the optimal GGI.
2. Rebuild the rank variables `(r, d)` of the linearized program from the
   component values of that solution, take a projected subgradient step on `y`,
   and go back to 1.

Iterations stop after `max_iter` steps, when `y` barely moves, when the
subgradient vanishes, or when `y` certifies the current solution optimal.

You can enable the per-iteration log this way:

```python
import logging
logging.basicConfig(level=logging.DEBUG)
import fairopt.solver
fairopt.solver.debug = True
```
"""

__all__ = [
    "INIT_STRATEGIES",
    "SUBGRADIENT_SIGNS",
    "SolverConfig",
    "RDPair",
    "IterationRecord",
    "SolverReport",
    "rank_dual",
    "init_dual",
    "reconstruct_rd",
    "rd_objective",
    "subgradient",
    "step_size",
    "rho_schedule",
    "upper_bound",
    "certificate",
    "maxweight_ratio_bound",
    "solve",
]

import dataclasses
import logging
import time
from dataclasses import dataclass, field
from typing import Any, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from numpy.typing import NDArray

from fairopt.errors import DualFeasibilityError, ValidationError
from fairopt.ggi import TOL, WeightVector, ggi
from fairopt.instances import Instance, Solution, agent_values
from fairopt.projection import (
    FEASIBILITY_TOL,
    dual_violation,
    project_dual,
    uniform_dual,
)
from fairopt.subsolvers import DP_CAP, max_weight, solve_weighted

log = logging.getLogger("fairopt")

debug = False

INIT_STRATEGIES = ("rank-based", "uniform")
SUBGRADIENT_SIGNS = ("standard", "descent")
CERTIFICATE_TOL = 1e-9


@dataclass(frozen=True)
class SolverConfig:
    """Parameters of `solve()`.

    Attributes:
        max_iter (int): Maximum number of iterations
        rho0 (float): Initial step relaxation factor
        halving_patience (int): `rho` is halved after this many consecutive
            iterations without an upper bound improvement
        y_change_tol (float): Stop when the max-norm change of `y` is at most this
        init_strategy (str): `"rank-based"` starts from the ranking of a maximum
            weight solution, `"uniform"` from the center of the dual polytope
        subgradient_sign (str): `"standard"` steps along `y - gamma * g`, `"descent"`
            along `y + gamma * g`
        dp_cap (int): Largest number of vertices for the matching subproblem
    """

    max_iter: int = 200
    rho0: float = 2.0
    halving_patience: int = 3
    y_change_tol: float = 1e-6
    init_strategy: str = "rank-based"
    subgradient_sign: str = "standard"
    dp_cap: int = DP_CAP

    def __post_init__(self) -> None:
        if self.max_iter < 1:
            raise ValidationError("max_iter must be at least 1")
        if not self.rho0 > 0:
            raise ValidationError("rho0 must be positive")
        if self.halving_patience < 1:
            raise ValidationError("halving_patience must be at least 1")
        if self.y_change_tol < 0:
            raise ValidationError("y_change_tol must be non-negative")
        if self.init_strategy not in INIT_STRATEGIES:
            raise ValidationError("unknown init strategy %r" % (self.init_strategy,))
        if self.subgradient_sign not in SUBGRADIENT_SIGNS:
            raise ValidationError(
                "unknown subgradient sign %r" % (self.subgradient_sign,)
            )
        if self.dp_cap < 2:
            raise ValidationError("dp_cap must be at least 2")

    def replace(self, **changes: Any) -> "SolverConfig":
        return dataclasses.replace(self, **changes)


class RDPair(NamedTuple):
    """Rank variables of the linearized program.

    `r[k]` is the `(k + 1)`-th smallest component value and
    `d[i, k] = max(0, r[k] - T[i])`.
    """

    r: NDArray[np.float64]
    d: NDArray[np.float64]


class IterationRecord(NamedTuple):
    t: int
    ggi: float
    upper_bound: float
    rho: float
    gamma: Optional[float]
    y_change: Optional[float]


@dataclass
class SolverReport:
    """The outcome of `solve()`.

    Attributes:
        best_solution (Solution): Solution with the highest GGI found
        best_ggi (float): Its GGI value
        iterations (int): Number of primal steps taken
        upper_bounds (List[float]): Upper bound on the optimal GGI at each iteration
        ggi_values (List[float]): GGI of the primal solution of each iteration
        rho_values (List[float]): Step relaxation factor of each iteration
        certificate (bool): Whether the dual weights proved `best_solution` optimal
        stop_reason (str): `"max-iter"`, `"converged"`, `"certificate"` or
            `"stationary"`
        wall_time (float): Seconds spent in `solve()`
        config (SolverConfig): Parameters of the run
        best_iteration (int): Iteration that found `best_solution`, 0 for the
            maximum weight start
        maxweight_ggi (Optional[float]): GGI of the maximum weight start
        ratio_bound (Optional[float]): Guaranteed fraction of the optimal GGI
            reached by the maximum weight start, when it applies
        final_dual (NDArray[float64]): Dual weights after the last update
        trace (List[IterationRecord]): Per-iteration record
    """

    best_solution: Solution
    best_ggi: float
    iterations: int
    upper_bounds: List[float]
    ggi_values: List[float]
    rho_values: List[float]
    certificate: bool
    stop_reason: str
    wall_time: float
    config: SolverConfig
    best_iteration: int
    maxweight_ggi: Optional[float] = None
    ratio_bound: Optional[float] = None
    final_dual: NDArray[np.float64] = field(default_factory=lambda: np.zeros((0, 0)))
    trace: List[IterationRecord] = field(default_factory=list)

    @property
    def best_upper_bound(self) -> float:
        return min(self.upper_bounds)


def _deltas(w: Any) -> NDArray[np.float64]:
    if isinstance(w, WeightVector):
        return np.asarray(w.deltas)
    return np.asarray(w, dtype=np.float64)


def _decreasing_order(t: NDArray[np.float64]) -> NDArray[np.int64]:
    # by decreasing value, ties by increasing index
    return np.lexsort((np.arange(t.shape[0]), -t))


def rank_dual(values: Any, deltas: Any) -> NDArray[np.float64]:
    """Return the extreme dual weights matching the ranking of `values`.

    Type: `(ArrayLike, ArrayLike) -> NDArray[float64]`

    Column `k` gives `w'_k` to the `k + 1` smallest components and 0 to the others.
    Ties are ranked by index, the component with the larger index counting as the
    smaller one.
    """
    t = np.asarray(values, dtype=np.float64)
    d = _deltas(deltas)
    n = d.shape[0]
    if t.shape != (n,):
        raise ValidationError(
            "expected %d component values, got shape %r" % (n, t.shape)
        )
    order = _decreasing_order(t)
    y = np.zeros((n, n))
    for k in range(n):
        y[order[n - k - 1 :], k] = d[k]
    return y


def init_dual(
    inst: Instance,
    w: Any,
    strategy: str = "rank-based",
    dp_cap: int = DP_CAP,
) -> Tuple[NDArray[np.float64], Optional[Solution]]:
    """Return the starting dual weights and, for the rank-based start, the maximum
    weight solution they come from.

    Type: `(Instance, WeightVector, str, int) -> Tuple[NDArray[float64],
    Optional[Solution]]`

    * `"uniform"`: `y[i, k] = (k + 1) / n * w'_k` for every component
    * `"rank-based"`: solve the maximum weight problem and give `w'_k` to the
      `k + 1` poorest components of its solution
    """
    d = _deltas(w)
    if d.shape != (inst.n,):
        raise ValidationError(
            "weights have %d components, instance has %d" % (d.shape[0], inst.n)
        )
    if strategy == "uniform":
        return uniform_dual(d), None
    elif strategy == "rank-based":
        sol = max_weight(inst, dp_cap)
        return rank_dual(agent_values(inst, sol), d), sol
    else:
        raise ValidationError("unknown init strategy %r" % (strategy,))


def reconstruct_rd(values: Any) -> RDPair:
    """Return the rank variables `(r, d)` built from the component values.

    Examples:

    ```pycon
    >>> rd = reconstruct_rd([5, 2, 9])
    >>> rd.r.tolist()
    [2.0, 5.0, 9.0]
    >>> rd.d.tolist()
    [[0.0, 0.0, 4.0], [0.0, 3.0, 7.0], [0.0, 0.0, 0.0]]

    ```
    """
    t = np.asarray(values, dtype=np.float64)
    if t.ndim != 1 or t.shape[0] == 0:
        raise ValidationError("component values must be a non-empty 1-d vector")
    r = np.sort(t)
    d = np.maximum(0.0, r[None, :] - t[:, None])
    return RDPair(r, d)


def rd_objective(rd: RDPair, w: Any) -> float:
    """Return the linearized objective `sum_k w'_k ((k + 1) r_k - sum_i d_ik)`."""
    d = _deltas(w)
    k = np.arange(1, d.shape[0] + 1)
    return float(np.dot(d, k * rd.r - rd.d.sum(axis=0)))


def subgradient(values: Any, rd: RDPair) -> NDArray[np.float64]:
    """Return `g[i, k] = r_k - d[i, k] - T_i`, which is never positive."""
    t = np.asarray(values, dtype=np.float64)
    return rd.r[None, :] - rd.d - t[:, None]


def step_size(val: float, best: float, sqn: float, rho: float) -> Optional[float]:
    """Return the step `(val - best) * rho / sqn`, or `None` when `sqn` is zero and
    the dual weights are stationary.

    Examples:

    ```pycon
    >>> step_size(10, 8, 4, 1)
    0.5
    >>> step_size(1, 1, 0, 2) is None
    True

    ```
    """
    if not sqn > 0:
        return None
    return (val - best) * rho / sqn


def rho_schedule(
    upper_bounds: Sequence[float], rho0: float, patience: int
) -> List[float]:
    """Replay the step relaxation factors of a run from its upper bounds.

    `rho` is halved after every `patience` consecutive iterations whose upper bound
    does not improve on the best one so far.
    """
    rhos = []
    rho = rho0
    best = np.inf
    streak = 0
    for ub in upper_bounds:
        rhos.append(rho)
        if ub < best - TOL:
            best = ub
            streak = 0
        else:
            streak += 1
        if streak >= patience:
            rho /= 2.0
            streak = 0
    return rhos


def upper_bound(inst: Instance, y: Any, w: Any, dp_cap: int = DP_CAP) -> float:
    """Return the Lagrangian upper bound of the dual weights `y`.

    Type: `(Instance, ArrayLike, WeightVector, int) -> float`

    For `y` in the dual polytope the bound is the optimal value of the weighted
    subproblem with `theta_i = sum_k y[i, k]`, and it is at least the optimal GGI.
    Outside the polytope the bound is infinite, so `DualFeasibilityError` is raised.
    """
    violation = dual_violation(y, _deltas(w))
    if violation > FEASIBILITY_TOL:
        raise DualFeasibilityError("the bound is unbounded", violation)
    theta = np.asarray(y, dtype=np.float64).sum(axis=1)
    sol = solve_weighted(inst, theta, dp_cap)
    return float(np.dot(theta, agent_values(inst, sol)))


def certificate(y: Any, values: Any, w: Any = None) -> bool:
    """Return whether `y` proves optimal any solution with component values
    `values` that solves the weighted subproblem of `y`.

    Type: `(ArrayLike, ArrayLike, Optional[WeightVector]) -> bool`

    The proof holds when every column `k` of `y` puts `w'_k` on `k + 1` components
    and 0 on the others, and no component of the first group is richer than a
    component of the second. Without `w`, `w'_k` is read from the column sums.
    """
    arr = np.asarray(y, dtype=np.float64)
    t = np.asarray(values, dtype=np.float64)
    n = t.shape[0]
    if arr.shape != (n, n):
        raise ValidationError("dual weights must be %d x %d" % (n, n))
    if w is None:
        d = arr.sum(axis=0) / np.arange(1, n + 1)
    else:
        d = _deltas(w)
    for k in range(n):
        if not d[k] > CERTIFICATE_TOL:
            return False
        col = arr[:, k]
        capped = np.abs(col - d[k]) <= CERTIFICATE_TOL
        zero = np.abs(col) <= CERTIFICATE_TOL
        if not np.all(capped | zero) or int(capped.sum()) != k + 1:
            return False
        if k + 1 < n and t[capped].max() > t[~capped].min() + CERTIFICATE_TOL:
            return False
    return True


def maxweight_ratio_bound(values: Any, w: Any) -> float:
    """Return the guaranteed ratio between the GGI of a maximum weight solution with
    component values `values` and the optimal GGI.

    Type: `(ArrayLike, WeightVector) -> float`

    The ratio is `max(2 w'_n / ((n + 1) max(w')), n min(T) / sum(T))`. It is only
    meaningful for non-negative component values.

    Examples:

    ```pycon
    >>> round(maxweight_ratio_bound([9, 1], [0.75, 0.25]), 6)
    0.222222

    ```
    """
    t = np.asarray(values, dtype=np.float64)
    d = _deltas(w)
    n = d.shape[0]
    if t.shape != (n,):
        raise ValidationError(
            "expected %d component values, got shape %r" % (n, t.shape)
        )
    total = float(t.sum())
    if not total > 0:
        raise ValidationError("the ratio bound needs a positive total value")
    by_weights = 2.0 * d[-1] / ((n + 1) * d.max())
    by_values = n * float(t.min()) / total
    return float(max(by_weights, by_values))


def solve(
    inst: Instance,
    w: WeightVector,
    config: Optional[SolverConfig] = None,
) -> SolverReport:
    """Search for a GGI-optimal solution of `inst` with the primal-dual heuristic.

    Type: `(Instance, WeightVector, Optional[SolverConfig]) -> SolverReport`

    The returned solution is the one with the highest GGI among the maximum weight
    start (rank-based initialization only) and the primal solutions of all
    iterations. Raises `CapacityError` if the subproblem is too large for the exact
    weighted solvers.
    """
    cfg = config if config is not None else SolverConfig()
    if w.n != inst.n:
        raise ValidationError(
            "weights have %d components, instance has %d" % (w.n, inst.n)
        )
    started = time.perf_counter()
    d = np.asarray(w.deltas)
    log.info(
        "solving %r with %s start, %s sign, max_iter %d",
        inst,
        cfg.init_strategy,
        cfg.subgradient_sign,
        cfg.max_iter,
    )

    y, start = init_dual(inst, w, cfg.init_strategy, cfg.dp_cap)
    best_solution: Optional[Solution] = None
    best_ggi = -np.inf
    best_iteration = 0
    maxweight_ggi = None
    ratio = None
    if start is not None:
        start_values = agent_values(inst, start)
        best_solution = start
        best_ggi = maxweight_ggi = ggi(start_values, w)
        if start_values.min() >= 0 and start_values.sum() > 0:
            ratio = maxweight_ratio_bound(start_values, d)

    upper_bounds: List[float] = []
    ggi_values: List[float] = []
    rho_values: List[float] = []
    trace: List[IterationRecord] = []
    certified = False
    stop_reason = "max-iter"
    rho = cfg.rho0
    best_bound = np.inf
    streak = 0

    for t in range(1, cfg.max_iter + 1):
        theta = y.sum(axis=1)
        sol = solve_weighted(inst, theta, cfg.dp_cap)
        values = agent_values(inst, sol)
        value = ggi(values, w)
        bound = float(np.dot(theta, values))
        upper_bounds.append(bound)
        ggi_values.append(value)
        rho_values.append(rho)
        if value > best_ggi:
            best_solution, best_ggi, best_iteration = sol, value, t
        if bound < best_bound - TOL:
            best_bound = bound
            streak = 0
        else:
            streak += 1

        if certificate(y, values, d):
            # bound == value here, so the incumbent is optimal too
            certified = True
            stop_reason = "certificate"
            trace.append(IterationRecord(t, value, bound, rho, None, None))
            break

        g = subgradient(values, reconstruct_rd(values))
        gamma = step_size(bound, best_ggi, float(np.sum(g * g)), rho)
        if gamma is None:
            stop_reason = "stationary"
            trace.append(IterationRecord(t, value, bound, rho, None, None))
            break
        if cfg.subgradient_sign == "standard":
            moved = y - gamma * g
        else:
            moved = y + gamma * g
        y_next = project_dual(moved, d)
        change = float(np.max(np.abs(y_next - y)))
        y = y_next
        trace.append(IterationRecord(t, value, bound, rho, gamma, change))
        if debug:
            log.debug(
                "iteration %d: ggi = %.6g, bound = %.6g, rho = %g, gamma = %.6g, "
                "dy = %.3g" % (t, value, bound, rho, gamma, change)
            )

        if streak >= cfg.halving_patience:
            rho /= 2.0
            streak = 0
        if change <= cfg.y_change_tol:
            stop_reason = "converged"
            break

    assert best_solution is not None
    wall_time = time.perf_counter() - started
    log.info(
        "stopped after %d iterations (%s): best GGI %.6g, bound %.6g",
        len(upper_bounds),
        stop_reason,
        best_ggi,
        min(upper_bounds),
    )
    return SolverReport(
        best_solution=best_solution,
        best_ggi=float(best_ggi),
        iterations=len(upper_bounds),
        upper_bounds=upper_bounds,
        ggi_values=ggi_values,
        rho_values=rho_values,
        certificate=certified,
        stop_reason=stop_reason,
        wall_time=wall_time,
        config=cfg,
        best_iteration=best_iteration,
        maxweight_ggi=maxweight_ggi,
        ratio_bound=ratio,
        final_dual=y,
        trace=trace,
    )
