"""Valuation functions for interbank claims.

Every interbank valuation maps equity levels to a discount factor in
``[0, 1]`` that multiplies the face value of a claim, and is nondecreasing
in the borrower's (and, where relevant, the lender's) equity.  The module
ships the classic at-maturity rules (Eisenberg-Noe pro-rata clearing,
Rogers-Veraart fire-sale haircuts, Furfine all-or-nothing recovery, linear
DebtRank) and their before-maturity counterparts obtained by averaging the
Eisenberg-Noe payoff over a distribution of future external-asset moves,
either log-normal (zero-drift geometric Brownian motion) or uniform.

The before-maturity factor decomposes as::

    value = 1 - default_probability + beta * endogenous_recovery

where ``beta`` is an extra exogenous haircut applied to whatever is
recovered from a defaulted borrower.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence, Union

import numpy as np
from scipy.special import erf

from .network import FinancialNetwork

__all__ = [
    "SpecError",
    "ValuationSpec",
    "BoundValuation",
    "EvalContext",
    "FeasibilityViolation",
    "FeasibilityReport",
    "en_interbank",
    "rv_external",
    "rv_lender",
    "rv_interbank",
    "furfine_interbank",
    "debtrank_interbank",
    "gbm_default_probability",
    "gbm_endogenous_recovery",
    "exante_interbank",
    "exante_en_gbm_interbank",
    "uniform_default_probability",
    "uniform_endogenous_recovery",
    "exante_en_uniform_interbank",
    "probe_curve",
    "feasibility_probe",
]

EXTERNAL_KINDS = ("unit", "rogers_veraart")
INTERBANK_KINDS = (
    "eisenberg_noe",
    "rogers_veraart",
    "furfine",
    "linear_debtrank",
    "exante_en_gbm",
    "exante_en_uniform",
)


class SpecError(ValueError):
    """Raised for valuation parameters outside their admissible range."""


def _positive_part(x):
    return np.maximum(x, 0.0)


def en_interbank(equity, obligations):
    """Pro-rata clearing factor: full repayment when solvent, otherwise the
    fraction of total obligations covered by the residual assets.

    ``1`` if ``equity >= 0``, else ``((equity + obligations)/obligations)+``.
    A bank with zero obligations has no creditors, so its factor is fixed at
    ``1`` (the value never enters the equity map but must stay feasible).
    """
    equity = np.asarray(equity, dtype=float)
    obligations = np.asarray(obligations, dtype=float)
    safe = np.where(obligations > 0, obligations, 1.0)
    frac = np.clip((equity + obligations) / safe, 0.0, 1.0)
    frac = np.where(obligations > 0, frac, 1.0)
    return np.where(equity >= 0, 1.0, frac)


def rv_external(equity, alpha):
    """External-asset factor with a fire-sale haircut ``alpha`` on default."""
    equity = np.asarray(equity, dtype=float)
    return np.where(equity >= 0, 1.0, float(alpha))


def rv_lender(equity, beta):
    """Lender-side factor: a defaulted lender liquidates its interbank
    assets at a fraction ``beta`` of their clearing value."""
    equity = np.asarray(equity, dtype=float)
    return np.where(equity >= 0, 1.0, float(beta))


def rv_interbank(lender_equity, borrower_equity, beta, obligations):
    """Fire-sale interbank factor: the lender haircut times the pro-rata
    clearing factor of the borrower."""
    return rv_lender(lender_equity, beta) * en_interbank(borrower_equity, obligations)


def furfine_interbank(equity, recovery):
    """All-or-nothing factor: ``1`` when solvent, fixed ``recovery`` when not."""
    equity = np.asarray(equity, dtype=float)
    return np.where(equity >= 0, 1.0, float(recovery))


def debtrank_interbank(equity, book_equity):
    """Linear distress factor: the borrower's positive equity relative to its
    book value, capped at one.

    A bank whose book equity is not positive is treated as recovering
    nothing (factor ``0``), which keeps the factor within ``[0, 1]`` and
    nondecreasing on all inputs.
    """
    equity = np.asarray(equity, dtype=float)
    book_equity = np.asarray(book_equity, dtype=float)
    safe = np.where(book_equity > 0, book_equity, 1.0)
    frac = np.clip(_positive_part(equity) / safe, 0.0, 1.0)
    return np.where(book_equity > 0, frac, 0.0)


def _gbm_args(equity, external_assets, sigma, maturity):
    equity = np.asarray(equity, dtype=float)
    external_assets = np.asarray(external_assets, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    if np.any(sigma <= 0):
        raise SpecError("sigma must be positive")
    if maturity <= 0:
        raise SpecError("time to maturity must be positive")
    return equity, external_assets, sigma


def gbm_default_probability(equity, external_assets, sigma, maturity):
    """Probability that a log-normal move of the external assets wipes out
    the given equity before maturity.

    The assets follow a zero-drift geometric Brownian motion with volatility
    ``sigma`` over the remaining time ``maturity``; default means the asset
    drop exceeds the current equity.  Equity at or above the external assets
    cannot be wiped out (assets stay positive), so the probability is zero
    there.  With zero external assets the move is identically zero and the
    probability degenerates to the solvency indicator.
    """
    equity, external_assets, sigma = _gbm_args(equity, external_assets, sigma, maturity)
    equity, external_assets, sigma = np.broadcast_arrays(equity, external_assets, sigma)
    stochastic = external_assets > 0
    at_risk = stochastic & (equity < external_assets)
    ratio = np.divide(equity, external_assets,
                      out=np.zeros_like(equity), where=at_risk)
    spread = np.sqrt(2.0 * maturity) * sigma
    # log1p(-1) = -inf would still feed erf the correct limit; keep it quiet
    with np.errstate(divide="ignore"):
        arg = (np.log1p(-ratio) + 0.5 * sigma * sigma * maturity) / spread
    prob = np.where(at_risk, 0.5 * (1.0 + erf(arg)), 0.0)
    degenerate = np.where(equity < 0, 1.0, 0.0)
    out = np.where(stochastic, prob, degenerate)
    return out if out.ndim else float(out)


def gbm_endogenous_recovery(equity, external_assets, sigma, maturity, obligations):
    """Expected pro-rata repayment fraction recovered from a borrower that
    defaults under the log-normal shock model.

    Averages ``(terminal equity + obligations) / obligations`` over the
    asset moves that leave the borrower in default but with something left
    to distribute.  Evaluated in closed form from the log-normal partial
    expectation; the tail-expectation term carries the external-assets
    scale.  Zero obligations leave nothing to recover against; zero
    external assets reduce to the at-maturity pro-rata fraction.
    """
    equity, external_assets, sigma = _gbm_args(equity, external_assets, sigma, maturity)
    obligations = np.asarray(obligations, dtype=float)
    equity, external_assets, sigma, obligations = np.broadcast_arrays(
        equity, external_assets, sigma, obligations)
    has_debt = obligations > 0
    safe_pbar = np.where(has_debt, obligations, 1.0)
    stochastic = external_assets > 0

    p_default = gbm_default_probability(equity, external_assets, sigma, maturity)
    p_cleared = gbm_default_probability(equity + obligations, external_assets,
                                        sigma, maturity)

    half_var = 0.5 * sigma * sigma * maturity
    spread = np.sqrt(2.0 * maturity) * sigma
    safe_assets = np.where(stochastic, external_assets, 1.0)

    under_assets = stochastic & (equity < external_assets)
    ratio0 = np.divide(equity, safe_assets, out=np.zeros_like(equity),
                       where=under_assets)
    under_debt = stochastic & (equity + obligations < external_assets)
    ratio1 = np.divide(equity + obligations, safe_assets,
                       out=np.zeros_like(equity), where=under_debt)
    with np.errstate(divide="ignore"):
        log0 = np.log1p(np.where(under_assets, -ratio0, 0.0))
        log1 = np.log1p(np.where(under_debt, -ratio1, 0.0))
    tail = np.where(under_assets,
                    -erf((half_var - log0) / spread) - erf((half_var + log0) / spread),
                    0.0)
    tail = tail + np.where(under_debt,
                           erf((half_var + log1) / spread) + erf((half_var - log1) / spread),
                           0.0)

    closed = ((1.0 + equity / safe_pbar) * (p_default - p_cleared)
              + external_assets * tail / (2.0 * safe_pbar))
    # Degenerate point mass at zero move: at-maturity pro-rata recovery.
    point_mass = np.where(equity < 0,
                          np.clip((equity + obligations) / safe_pbar, 0.0, 1.0),
                          0.0)
    out = np.where(stochastic, closed, point_mass)
    out = np.where(has_debt, np.clip(out, 0.0, 1.0), 0.0)
    return out if out.ndim else float(out)


def exante_interbank(default_probability, recovery, beta):
    """Before-maturity factor ``1 - p_default + beta * recovery``."""
    value = 1.0 - np.asarray(default_probability, dtype=float) \
        + float(beta) * np.asarray(recovery, dtype=float)
    return np.clip(value, 0.0, 1.0)


def exante_en_gbm_interbank(equity, external_assets, sigma, maturity,
                            obligations, beta=1.0):
    """Before-maturity pro-rata factor under the log-normal shock model."""
    pd_ = gbm_default_probability(equity, external_assets, sigma, maturity)
    rho = gbm_endogenous_recovery(equity, external_assets, sigma, maturity,
                                  obligations)
    return exante_interbank(pd_, rho, beta)


def uniform_default_probability(equity, book_equity):
    """Default probability when the asset move is uniform on
    ``[-book_equity, 0]``: one minus the positive equity share of book value,
    clamped to ``[0, 1]``.  Non-positive book equity means certain default.
    """
    equity = np.asarray(equity, dtype=float)
    book_equity = np.asarray(book_equity, dtype=float)
    safe = np.where(book_equity > 0, book_equity, 1.0)
    prob = np.clip(1.0 - _positive_part(equity) / safe, 0.0, 1.0)
    out = np.where(book_equity > 0, prob, 1.0)
    return out if out.ndim else float(out)


def uniform_endogenous_recovery(equity, book_equity, obligations):
    """Expected pro-rata repayment fraction under the uniform shock model.

    Integrates ``(equity + move + obligations) / obligations`` over the
    moves in ``[-book_equity, 0]`` that leave the borrower in default with
    residual assets; the integral is elementary and evaluated exactly.
    """
    equity = np.asarray(equity, dtype=float)
    book_equity = np.asarray(book_equity, dtype=float)
    obligations = np.asarray(obligations, dtype=float)
    equity, book_equity, obligations = np.broadcast_arrays(
        equity, book_equity, obligations)
    ok = (book_equity > 0) & (obligations > 0)
    safe_m = np.where(ok, book_equity, 1.0)
    safe_p = np.where(ok, obligations, 1.0)
    upper = -_positive_part(equity)
    lower = np.maximum(-obligations - equity, -book_equity)
    width = upper - lower
    value = ((equity + obligations) / (safe_p * safe_m) * width
             + (upper * upper - lower * lower) / (2.0 * safe_p * safe_m))
    value = np.where(width > 0, value, 0.0)
    out = np.where(ok, np.clip(value, 0.0, 1.0), 0.0)
    return out if out.ndim else float(out)


def exante_en_uniform_interbank(equity, book_equity, obligations, beta=1.0):
    """Before-maturity pro-rata factor under the uniform shock model."""
    pd_ = uniform_default_probability(equity, book_equity)
    rho = uniform_endogenous_recovery(equity, book_equity, obligations)
    return exante_interbank(pd_, rho, beta)


def _check_unit_interval(name: str, value) -> float:
    value = float(value)
    if not np.isfinite(value) or value < 0.0 or value > 1.0:
        raise SpecError(f"{name} must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class ValuationSpec:
    """A chosen external plus interbank valuation family with parameters.

    ``sigma`` may be a single volatility applied to every bank or a per-bank
    sequence; ``maturity`` is the remaining time to the common maturity.
    Prefer the classmethod constructors, which only ask for the parameters
    their family uses.
    """

    interbank_kind: str
    external_kind: str = "unit"
    alpha: Optional[float] = None
    beta: Optional[float] = None
    recovery: Optional[float] = None
    sigma: Union[float, tuple, None] = None
    maturity: Optional[float] = None

    def __post_init__(self):
        if self.external_kind not in EXTERNAL_KINDS:
            raise SpecError(f"unknown external valuation kind {self.external_kind!r}")
        if self.interbank_kind not in INTERBANK_KINDS:
            raise SpecError(f"unknown interbank valuation kind {self.interbank_kind!r}")
        if self.external_kind == "rogers_veraart":
            if self.alpha is None:
                raise SpecError("rogers_veraart external valuation needs alpha")
            object.__setattr__(self, "alpha", _check_unit_interval("alpha", self.alpha))
        elif self.alpha is not None:
            raise SpecError("alpha only applies to the rogers_veraart external kind")
        kind = self.interbank_kind
        if kind in ("rogers_veraart", "exante_en_gbm", "exante_en_uniform"):
            if self.beta is None:
                raise SpecError(f"{kind} needs beta")
            object.__setattr__(self, "beta", _check_unit_interval("beta", self.beta))
        elif self.beta is not None:
            raise SpecError(f"beta does not apply to {kind}")
        if kind == "furfine":
            if self.recovery is None:
                raise SpecError("furfine needs a recovery fraction")
            object.__setattr__(self, "recovery",
                               _check_unit_interval("recovery", self.recovery))
        elif self.recovery is not None:
            raise SpecError(f"recovery does not apply to {kind}")
        if kind == "exante_en_gbm":
            if self.sigma is None or self.maturity is None:
                raise SpecError("exante_en_gbm needs sigma and maturity")
            sigma = self.sigma
            if np.ndim(sigma) == 0:
                sigma = float(sigma)
                bad = not np.isfinite(sigma) or sigma <= 0
            else:
                sigma = tuple(float(s) for s in sigma)
                bad = any(not np.isfinite(s) or s <= 0 for s in sigma)
            if bad:
                raise SpecError("sigma must be positive and finite")
            object.__setattr__(self, "sigma", sigma)
            maturity = float(self.maturity)
            if not np.isfinite(maturity) or maturity <= 0:
                raise SpecError(
                    "time to maturity must be positive; valuation at maturity "
                    "is the eisenberg_noe family")
            object.__setattr__(self, "maturity", maturity)
        else:
            if self.sigma is not None or self.maturity is not None:
                raise SpecError(f"sigma/maturity do not apply to {kind}")

    @classmethod
    def eisenberg_noe(cls) -> "ValuationSpec":
        return cls(interbank_kind="eisenberg_noe")

    @classmethod
    def rogers_veraart(cls, alpha: float, beta: float) -> "ValuationSpec":
        return cls(interbank_kind="rogers_veraart", external_kind="rogers_veraart",
                   alpha=alpha, beta=beta)

    @classmethod
    def furfine(cls, recovery: float) -> "ValuationSpec":
        return cls(interbank_kind="furfine", recovery=recovery)

    @classmethod
    def linear_debtrank(cls) -> "ValuationSpec":
        return cls(interbank_kind="linear_debtrank")

    @classmethod
    def exante_en_gbm(cls, sigma, maturity: float, beta: float = 1.0) -> "ValuationSpec":
        return cls(interbank_kind="exante_en_gbm", sigma=sigma, maturity=maturity,
                   beta=beta)

    @classmethod
    def exante_en_uniform(cls, beta: float) -> "ValuationSpec":
        return cls(interbank_kind="exante_en_uniform", beta=beta)

    @property
    def is_exante(self) -> bool:
        return self.interbank_kind in ("exante_en_gbm", "exante_en_uniform")

    @property
    def depends_on_lender(self) -> bool:
        return self.interbank_kind == "rogers_veraart"

    @property
    def continuous_from_below(self) -> bool:
        """Whether every factor in the spec is continuous from below.

        Convergence of the iteration started at the lattice bottom is only
        guaranteed under this property.  The pro-rata and linear families
        are continuous; the fire-sale and all-or-nothing families jump at
        zero equity unless their haircut parameter equals one.
        """
        if self.external_kind == "rogers_veraart" and self.alpha < 1.0:
            return False
        if self.interbank_kind == "rogers_veraart" and self.beta < 1.0:
            return False
        if self.interbank_kind == "furfine" and self.recovery < 1.0:
            return False
        return True

    def sigma_vector(self, n: int) -> np.ndarray:
        if self.sigma is None:
            raise SpecError(f"{self.interbank_kind} has no volatility parameter")
        sigma = np.asarray(self.sigma, dtype=float)
        if sigma.ndim == 0:
            return np.full(n, float(sigma))
        if sigma.shape != (n,):
            raise SpecError(f"sigma must be scalar or have shape ({n},), got {sigma.shape}")
        return sigma.copy()

    def bind(self, net: FinancialNetwork) -> "BoundValuation":
        return BoundValuation(self, net)


@dataclass(frozen=True, eq=False)
class BoundValuation:
    """A valuation spec attached to one network's balance-sheet constants.

    Precomputes the per-bank obligations, book equities and (for the GBM
    family) volatilities so that factor vectors and the equity map can be
    evaluated repeatedly at different equity vectors.
    """

    spec: ValuationSpec
    net: FinancialNetwork
    obligations: np.ndarray = field(init=False)
    book_equity: np.ndarray = field(init=False)
    _sigma: Optional[np.ndarray] = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "obligations", self.net.total_obligations())
        object.__setattr__(self, "book_equity", self.net.book_equity())
        sigma = (self.spec.sigma_vector(self.net.n)
                 if self.spec.interbank_kind == "exante_en_gbm" else None)
        object.__setattr__(self, "_sigma", sigma)

    @property
    def sigma(self) -> Optional[np.ndarray]:
        """Per-bank volatilities (None outside the log-normal family)."""
        return self._sigma

    def external_factors(self, equities: np.ndarray) -> np.ndarray:
        spec = self.spec
        if spec.external_kind == "unit":
            return np.ones(self.net.n)
        return rv_external(equities, spec.alpha)

    def lender_factors(self, equities: np.ndarray) -> Optional[np.ndarray]:
        """Per-lender multiplier, or None when the family ignores the lender."""
        if self.spec.interbank_kind == "rogers_veraart":
            return rv_lender(equities, self.spec.beta)
        return None

    def borrower_factors(self, equities: np.ndarray) -> np.ndarray:
        spec = self.spec
        kind = spec.interbank_kind
        if kind in ("eisenberg_noe", "rogers_veraart"):
            return en_interbank(equities, self.obligations)
        if kind == "furfine":
            return furfine_interbank(equities, spec.recovery)
        if kind == "linear_debtrank":
            return debtrank_interbank(equities, self.book_equity)
        if kind == "exante_en_gbm":
            return exante_en_gbm_interbank(
                equities, self.net.external_assets, self._sigma, spec.maturity,
                self.obligations, spec.beta)
        return exante_en_uniform_interbank(
            equities, self.book_equity, self.obligations, spec.beta)

    def edge_discounts(self, equities: np.ndarray) -> np.ndarray:
        """Matrix of claim discount factors; entry ``[i, j]`` values bank i's
        claim on bank j (meaningful wherever such a claim exists)."""
        borrower = self.borrower_factors(equities)
        lender = self.lender_factors(equities)
        if lender is None:
            return np.broadcast_to(borrower, (self.net.n, self.net.n)).copy()
        return np.outer(lender, borrower)

    def edge_factor(self, lender: int, borrower: int, equities: np.ndarray) -> float:
        eq = np.asarray(equities, dtype=float)
        value = float(self.borrower_factors(eq)[borrower])
        lenders = self.lender_factors(eq)
        if lenders is not None:
            value *= float(lenders[lender])
        return value

    def equity_map(self, equities: np.ndarray) -> np.ndarray:
        """One application of the self-consistent balance-sheet valuation:
        external assets at their external factor, claims at their discount
        factors, liabilities at face value."""
        net = self.net
        inflow = net.interbank_assets @ self.borrower_factors(equities)
        lender = self.lender_factors(equities)
        if lender is not None:
            inflow = lender * inflow
        return (net.external_assets * self.external_factors(equities)
                - net.external_liabilities + inflow - self.obligations)


@dataclass(frozen=True, eq=False)
class EvalContext:
    """Inputs for valuing one claim: the lender/borrower pair, the current
    equity vector and the borrower-side balance-sheet constants."""

    lender: int
    borrower: int
    equities: np.ndarray
    obligations: np.ndarray
    book_equity: np.ndarray
    external_assets: np.ndarray

    @classmethod
    def from_network(cls, net: FinancialNetwork, lender: int, borrower: int,
                     equities) -> "EvalContext":
        n = net.n
        if not (0 <= lender < n and 0 <= borrower < n):
            raise SpecError("lender/borrower index out of range")
        eq = np.asarray(equities, dtype=float)
        if eq.shape != (n,):
            raise SpecError(f"equities must have shape ({n},)")
        return cls(lender=lender, borrower=borrower, equities=eq,
                   obligations=net.total_obligations(),
                   book_equity=net.book_equity(),
                   external_assets=np.asarray(net.external_assets, dtype=float))


def edge_valuation(spec: ValuationSpec, ctx: EvalContext) -> float:
    """Discount factor the lender applies to its claim in the given context."""
    j = ctx.borrower
    e_j = float(ctx.equities[j])
    kind = spec.interbank_kind
    if kind == "eisenberg_noe":
        return float(en_interbank(e_j, ctx.obligations[j]))
    if kind == "rogers_veraart":
        return float(rv_interbank(ctx.equities[ctx.lender], e_j, spec.beta,
                                  ctx.obligations[j]))
    if kind == "furfine":
        return float(furfine_interbank(e_j, spec.recovery))
    if kind == "linear_debtrank":
        return float(debtrank_interbank(e_j, ctx.book_equity[j]))
    if kind == "exante_en_gbm":
        sigma = spec.sigma_vector(len(ctx.equities))[j]
        return float(exante_en_gbm_interbank(
            e_j, ctx.external_assets[j], sigma, spec.maturity,
            ctx.obligations[j], spec.beta))
    return float(exante_en_uniform_interbank(
        e_j, ctx.book_equity[j], ctx.obligations[j], spec.beta))


@dataclass(frozen=True)
class FeasibilityViolation:
    family: str
    parameters: dict
    kind: str  # "range" or "monotonicity"
    equity: float
    value: float
    previous_equity: Optional[float] = None
    previous_value: Optional[float] = None

    def __str__(self) -> str:
        if self.kind == "range":
            return (f"{self.family}{self.parameters}: value {self.value} at "
                    f"equity {self.equity} falls outside [0, 1]")
        return (f"{self.family}{self.parameters}: value decreases from "
                f"{self.previous_value} at equity {self.previous_equity} to "
                f"{self.value} at equity {self.equity}")


@dataclass(frozen=True)
class FeasibilityReport:
    passed: bool
    checked: int
    violation: Optional[FeasibilityViolation] = None


def probe_curve(family: str, parameters: Mapping, grid: Sequence[float],
                values: Sequence[float], tolerance: float = 1e-12) -> FeasibilityReport:
    """Check one factor curve for range containment in [0, 1] and
    nondecreasing behavior along an ascending equity grid, reporting the
    first violation found."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    params = dict(parameters)
    for k in range(len(grid)):
        v = values[k]
        if not np.isfinite(v) or v < -tolerance or v > 1.0 + tolerance:
            return FeasibilityReport(False, k + 1, FeasibilityViolation(
                family, params, "range", float(grid[k]), float(v)))
        if k and v < values[k - 1] - tolerance:
            return FeasibilityReport(False, k + 1, FeasibilityViolation(
                family, params, "monotonicity", float(grid[k]), float(v),
                float(grid[k - 1]), float(values[k - 1])))
    return FeasibilityReport(True, len(grid))


def feasibility_probe(spec: ValuationSpec, net: FinancialNetwork,
                      points: int = 201, margin: float = 1.0,
                      tolerance: float = 1e-12) -> FeasibilityReport:
    """Probe every factor the spec ships against every bank of the network.

    For each bank the equity grid spans the bank's lattice interval extended
    by ``margin`` on both sides.  Factorized lender/borrower families are
    checked one argument at a time, which implies joint monotonicity.
    """
    bound = spec.bind(net)
    lower = net.equity_lower_bound()
    upper = net.book_equity()
    checked = 0
    for j in range(net.n):
        grid = np.linspace(lower[j] - margin, upper[j] + margin, points)
        curves = {}
        base = {"bank": net.bank_ids[j]}
        kind = spec.interbank_kind
        if kind in ("eisenberg_noe", "rogers_veraart"):
            curves["en_interbank"] = (
                {**base, "obligations": float(bound.obligations[j])},
                en_interbank(grid, bound.obligations[j]))
        if kind == "rogers_veraart":
            curves["rv_lender"] = ({**base, "beta": spec.beta},
                                   rv_lender(grid, spec.beta))
        if kind == "furfine":
            curves["furfine_interbank"] = ({**base, "recovery": spec.recovery},
                                           furfine_interbank(grid, spec.recovery))
        if kind == "linear_debtrank":
            curves["debtrank_interbank"] = (
                {**base, "book_equity": float(bound.book_equity[j])},
                debtrank_interbank(grid, bound.book_equity[j]))
        if kind == "exante_en_gbm":
            sigma = bound.sigma[j]
            params = {**base, "sigma": float(sigma), "maturity": spec.maturity,
                      "beta": spec.beta}
            curves["exante_en_gbm_interbank"] = (params, exante_en_gbm_interbank(
                grid, net.external_assets[j], sigma, spec.maturity,
                bound.obligations[j], spec.beta))
        if kind == "exante_en_uniform":
            params = {**base, "book_equity": float(bound.book_equity[j]),
                      "beta": spec.beta}
            curves["exante_en_uniform_interbank"] = (params, exante_en_uniform_interbank(
                grid, bound.book_equity[j], bound.obligations[j], spec.beta))
        if spec.external_kind == "rogers_veraart":
            curves["rv_external"] = ({**base, "alpha": spec.alpha},
                                     rv_external(grid, spec.alpha))
        else:
            curves["unit_external"] = (base, np.ones_like(grid))
        for family, (params, values) in curves.items():
            report = probe_curve(family, params, grid, values, tolerance)
            checked += report.checked
            if not report.passed:
                return FeasibilityReport(False, checked, report.violation)
    return FeasibilityReport(True, checked)
