"""Fixed points of the self-consistent equity map.

The map is monotone and sends the box ``[m, M]`` (all-liabilities-lost to
face-value equities) into itself, so its fixed points form a complete
lattice.  Plain fixed-point iteration started from the face values ``M``
decreases monotonically to the greatest solution; started from the lower
bounds ``m`` it increases towards the least solution provided the valuation
functions are continuous from below.  Comparing the two brackets decides
uniqueness up to the solve tolerance, and on acyclic claim graphs the
iteration terminates exactly after a number of sweeps bounded by the claim
depth.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from .network import FinancialNetwork, topology
from .valuation import BoundValuation, ValuationSpec, en_interbank

__all__ = [
    "SolveConfig",
    "SolveReport",
    "UniquenessReport",
    "default_epsilon",
    "picard_step",
    "solve",
    "greatest_solution",
    "least_solution",
    "uniqueness_check",
    "solve_dag",
    "en_clearing_payments",
]

# Componentwise slack for declaring an iterate non-monotone; covers float
# roundoff in the map evaluation without masking genuine violations.
MONOTONE_SLACK = 1e-12

FACE_VALUES = "face_values"
LOWER_BOUNDS = "lower_bounds"


def default_epsilon(net: FinancialNetwork) -> float:
    """Solve tolerance scaled to the network's largest book equity."""
    m = net.book_equity()
    scale = float(np.max(np.abs(m))) if m.size else 1.0
    return 1e-10 * max(1.0, scale)


@dataclass(frozen=True)
class SolveConfig:
    """Iteration controls.

    ``start`` is one of the strings ``"face_values"`` / ``"lower_bounds"``
    or an explicit per-bank equity vector (clamped into ``[m, M]`` before
    iterating).  ``epsilon=None`` selects the scale-aware default.
    """

    epsilon: Optional[float] = None
    max_iterations: int = 100_000
    start: Union[str, np.ndarray] = FACE_VALUES

    def __post_init__(self):
        if self.epsilon is not None and not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if isinstance(self.start, str):
            if self.start not in (FACE_VALUES, LOWER_BOUNDS):
                raise ValueError(f"unknown start {self.start!r}")
        else:
            object.__setattr__(self, "start", np.asarray(self.start, dtype=float))

    def resolve_epsilon(self, net: FinancialNetwork) -> float:
        return self.epsilon if self.epsilon is not None else default_epsilon(net)


@dataclass(frozen=True, eq=False)
class SolveReport:
    """Outcome of one fixed-point iteration run.

    ``monotone`` records whether the iterates moved in the direction the
    start point predicts (downwards from face values, upwards from the
    lower bounds); a violation beyond slack signals a non-feasible
    valuation function.  ``residual`` is the final sup-norm step.
    """

    solution: np.ndarray
    iterations: int
    converged: bool
    residual: float
    monotone: Optional[bool]
    kind: str  # "greatest" | "least" | "custom"
    epsilon: float
    warnings: tuple = ()

    @property
    def defaulted(self) -> np.ndarray:
        """Banks whose solved equity is negative."""
        return self.solution < 0


@dataclass(frozen=True, eq=False)
class UniquenessReport:
    """Bracket comparison; ``unique`` is None when either solve failed."""

    unique: Optional[bool]
    gap: float
    greatest: SolveReport
    least: SolveReport


def picard_step(net: FinancialNetwork, spec: ValuationSpec,
                equities: np.ndarray) -> np.ndarray:
    """One application of the equity map at the given equity vector.

    The caller is responsible for supplying equities within ``[m, M]``;
    the map itself is well defined (and monotone) on all of R^n.
    """
    return spec.bind(net).equity_map(np.asarray(equities, dtype=float))


def _iterate(bound: BoundValuation, start: np.ndarray, epsilon: float,
             max_iterations: int, kind: str,
             warnings: tuple = ()) -> SolveReport:
    direction = {"greatest": -1, "least": +1}.get(kind, 0)
    equities = np.asarray(start, dtype=float)
    monotone: Optional[bool] = True if direction else None
    residual = np.inf
    converged = False
    iterations = 0
    for iterations in range(1, max_iterations + 1):
        updated = bound.equity_map(equities)
        residual = float(np.max(np.abs(updated - equities)))
        if direction == -1 and np.any(updated > equities + MONOTONE_SLACK):
            monotone = False
        elif direction == +1 and np.any(updated < equities - MONOTONE_SLACK):
            monotone = False
        equities = updated
        if residual <= epsilon:
            converged = True
            break
    if monotone is False:
        warnings = warnings + (
            "iterates were not monotone; a valuation function may not be feasible",)
    lower = bound.net.equity_lower_bound()
    upper = bound.book_equity
    return SolveReport(
        solution=np.clip(equities, lower, upper),
        iterations=iterations,
        converged=converged,
        residual=residual,
        monotone=monotone,
        kind=kind,
        epsilon=epsilon,
        warnings=warnings,
    )


def solve(net: FinancialNetwork, spec: ValuationSpec,
          config: Optional[SolveConfig] = None) -> SolveReport:
    """Run the fixed-point iteration from the start point in ``config``.

    String starts map to the greatest/least bracket solves; an explicit
    vector is clamped into ``[m, M]`` and iterated as a custom solve, whose
    limit (when it converges) lies between the two bracket solutions.
    """
    config = config or SolveConfig()
    if isinstance(config.start, str):
        if config.start == FACE_VALUES:
            return greatest_solution(net, spec, config)
        return least_solution(net, spec, config)
    if config.start.shape != (net.n,):
        raise ValueError(
            f"custom start must have shape ({net.n},), got {config.start.shape}")
    bound = spec.bind(net)
    start = np.clip(config.start, net.equity_lower_bound(), bound.book_equity)
    return _iterate(bound, start, config.resolve_epsilon(net),
                    config.max_iterations, "custom")


def greatest_solution(net: FinancialNetwork, spec: ValuationSpec,
                      config: Optional[SolveConfig] = None) -> SolveReport:
    """Iterate from face values; converges to the greatest solution."""
    config = config or SolveConfig()
    if not (isinstance(config.start, str) and config.start == FACE_VALUES):
        raise ValueError("greatest_solution requires start='face_values'")
    bound = spec.bind(net)
    return _iterate(bound, bound.book_equity, config.resolve_epsilon(net),
                    config.max_iterations, "greatest")


def least_solution(net: FinancialNetwork, spec: ValuationSpec,
                   config: Optional[SolveConfig] = None) -> SolveReport:
    """Iterate upwards from the lower bounds towards the least solution.

    Convergence to the least solution is only guaranteed for valuation
    functions continuous from below; specs with downward jumps carry a
    warning in the report.
    """
    config = config or SolveConfig(start=LOWER_BOUNDS)
    if not (isinstance(config.start, str) and config.start == LOWER_BOUNDS):
        raise ValueError("least_solution requires start='lower_bounds'")
    warnings = ()
    if not spec.continuous_from_below:
        warnings = (
            "spec contains a valuation function that is not continuous from "
            "below; the limit from the lower bounds may overshoot the least "
            "solution",)
    bound = spec.bind(net)
    return _iterate(bound, net.equity_lower_bound(), config.resolve_epsilon(net),
                    config.max_iterations, "least", warnings)


def uniqueness_check(net: FinancialNetwork, spec: ValuationSpec,
                     config: Optional[SolveConfig] = None) -> UniquenessReport:
    """Solve both brackets and compare them.

    The solution is declared unique when the brackets agree within twice
    the solve tolerance; if either bracket failed to converge the answer
    is indeterminate (``unique=None``).
    """
    config = config or SolveConfig()
    greatest = greatest_solution(net, spec, replace(config, start=FACE_VALUES))
    least = least_solution(net, spec, replace(config, start=LOWER_BOUNDS))
    gap = float(np.max(np.abs(greatest.solution - least.solution)))
    if not (greatest.converged and least.converged):
        return UniquenessReport(unique=None, gap=gap, greatest=greatest, least=least)
    return UniquenessReport(unique=gap <= 2.0 * greatest.epsilon, gap=gap,
                            greatest=greatest, least=least)


def solve_dag(net: FinancialNetwork, spec: ValuationSpec,
              config: Optional[SolveConfig] = None) -> SolveReport:
    """Exact solve on an acyclic claim graph.

    With unit external valuation and borrower-only interbank factors, banks
    settle in order of their claim depth: sources are exact immediately and
    each sweep finalizes the next depth layer, so the iteration reaches a
    bitwise fixed point within ``depth + 1`` sweeps and the unique solution
    is returned with zero residual.
    """
    info = topology(net)
    if not info.is_dag:
        raise ValueError("solve_dag requires an acyclic claim graph")
    if spec.external_kind != "unit":
        raise ValueError("solve_dag requires unit external valuation")
    if spec.depends_on_lender:
        raise ValueError(
            "solve_dag requires borrower-only interbank valuation functions")
    config = config or SolveConfig()
    bound = spec.bind(net)
    budget = info.dag_depth + 1
    equities = bound.book_equity.copy()
    monotone = True
    iterations = 0
    residual = np.inf
    for iterations in range(1, budget + 1):
        updated = bound.equity_map(equities)
        residual = float(np.max(np.abs(updated - equities)))
        if np.any(updated > equities + MONOTONE_SLACK):
            monotone = False
        equities = updated
        if residual == 0.0:
            break
    assert residual == 0.0, "acyclic iteration failed to settle within depth+1"
    return SolveReport(
        solution=equities,
        iterations=iterations,
        converged=True,
        residual=0.0,
        monotone=monotone,
        kind="greatest",
        epsilon=config.resolve_epsilon(net),
    )


def en_clearing_payments(net: FinancialNetwork, equities: np.ndarray) -> np.ndarray:
    """Interbank payments implied by an equity vector under pro-rata
    clearing: each bank pays its obligations scaled by its clearing factor."""
    obligations = net.total_obligations()
    return obligations * np.asarray(en_interbank(equities, obligations), dtype=float)
