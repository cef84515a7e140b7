"""Shared fixtures: reference networks, random generators, and the
independent numerical oracles used to check closed forms."""
import math

import numpy as np
import pytest
from scipy import integrate

from neva import FinancialNetwork


def ring_network() -> FinancialNetwork:
    """Three-bank ring (claims A->B->C->A), book equity one per bank,
    leverages 10.5 / 5.5 / 3.5."""
    liabilities = np.zeros((3, 3))
    liabilities[0, 2] = 0.5  # A owes C
    liabilities[1, 0] = 0.5  # B owes A
    liabilities[2, 1] = 0.5  # C owes B
    return FinancialNetwork(["A", "B", "C"], [10.0, 5.0, 3.0], [9.0, 4.0, 2.0],
                            liabilities)


def open_chain_network() -> FinancialNetwork:
    """Claims A->B->C, unit external assets, no external liabilities."""
    liabilities = np.zeros((3, 3))
    liabilities[1, 0] = 1.2  # B owes A
    liabilities[2, 1] = 1.2  # C owes B
    return FinancialNetwork(["A", "B", "C"], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0],
                            liabilities)


def tree_network() -> FinancialNetwork:
    """Claims A->B and A->C."""
    liabilities = np.zeros((3, 3))
    liabilities[1, 0] = 1.0  # B owes A
    liabilities[2, 0] = 1.0  # C owes A
    return FinancialNetwork(["A", "B", "C"], [1.0, 0.1, 1.0], [0.0, 0.0, 0.0],
                            liabilities)


def closed_chain_network() -> FinancialNetwork:
    """Claims A->B->C->A with asymmetric weights."""
    liabilities = np.zeros((3, 3))
    liabilities[0, 2] = 1.5  # A owes C
    liabilities[1, 0] = 1.1  # B owes A
    liabilities[2, 1] = 1.2  # C owes B
    return FinancialNetwork(["A", "B", "C"], [1.0, 1.0, 1.0], [0.0, 0.0, 0.0],
                            liabilities)


@pytest.fixture
def ring():
    return ring_network()


@pytest.fixture
def open_chain():
    return open_chain_network()


@pytest.fixture
def tree():
    return tree_network()


@pytest.fixture
def closed_chain():
    return closed_chain_network()


def random_network(rng: np.random.Generator, max_banks: int = 10,
                   nonnegative_cashflow: bool = True) -> FinancialNetwork:
    """Random sparse network; by default external liabilities are kept below
    external assets (nonnegative operating cashflow)."""
    n = int(rng.integers(2, max_banks + 1))
    scale = rng.uniform(0.5, 2.0)
    assets = rng.uniform(0.5, 3.0, n) * scale
    if nonnegative_cashflow:
        liabilities_ext = assets * rng.uniform(0.0, 1.0, n)
    else:
        liabilities_ext = rng.uniform(0.0, 4.0, n) * scale
    liabilities = rng.uniform(0.1, 1.0, (n, n)) * (rng.random((n, n)) < 0.4)
    np.fill_diagonal(liabilities, 0.0)
    ids = [f"B{k}" for k in range(n)]
    return FinancialNetwork(ids, assets, liabilities_ext, liabilities)


def random_dag_network(rng: np.random.Generator,
                       max_banks: int = 10) -> FinancialNetwork:
    """Random acyclic claim graph: claims only flow towards earlier banks in
    a random permutation, so the liability matrix is acyclic by construction."""
    n = int(rng.integers(2, max_banks + 1))
    order = rng.permutation(n)
    claims = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < 0.5:
                claims[order[a], order[b]] = rng.uniform(0.1, 1.5)
    assets = rng.uniform(0.2, 3.0, n)
    liabilities_ext = assets * rng.uniform(0.0, 1.0, n)
    ids = [f"B{k}" for k in range(n)]
    return FinancialNetwork(ids, assets, liabilities_ext, claims.T)


def en_clearing_oracle(net: FinancialNetwork, tol: float = 1e-14,
                       max_iterations: int = 100_000) -> np.ndarray:
    """Independent clearing-payment fixed point, iterated in payment space:
    p <- min[(e + Pi^T p)^+, pbar] from p = pbar."""
    obligations = net.total_obligations()
    cashflow = net.external_assets - net.external_liabilities
    shares = np.divide(net.interbank_liabilities,
                       obligations[:, None],
                       out=np.zeros_like(net.interbank_liabilities),
                       where=obligations[:, None] > 0)
    payments = obligations.copy()
    for _ in range(max_iterations):
        inflow = shares.T @ payments
        updated = np.minimum(np.maximum(cashflow + inflow, 0.0), obligations)
        if np.max(np.abs(updated - payments)) <= tol:
            return updated
        payments = updated
    return payments


def lognormal_move_pdf(x: float, assets: float, sigma: float, tau: float) -> float:
    """Density of the terminal-minus-initial external assets under the
    zero-drift log-normal law (support x > -assets)."""
    if x <= -assets:
        return 0.0
    u = 1.0 + x / assets
    return (math.exp(-(math.log(u) + 0.5 * sigma * sigma * tau) ** 2
                     / (2.0 * sigma * sigma * tau))
            / (math.sqrt(2.0 * math.pi * tau) * sigma * (x + assets)))


def _quad(fn, lo, hi, assets, sigma, tau):
    mode = assets * (math.exp(-1.5 * sigma * sigma * tau) - 1.0)
    points = [p for p in (mode, 0.0) if lo < p < hi]
    value, _ = integrate.quad(fn, lo, hi, points=points or None, limit=400,
                              epsabs=1e-13, epsrel=1e-13)
    return value


def gbm_default_probability_quadrature(equity, assets, sigma, tau) -> float:
    """Default probability by direct integration of the move density."""
    if equity >= assets:
        return 0.0
    return _quad(lambda x: lognormal_move_pdf(x, assets, sigma, tau),
                 -assets, -equity, assets, sigma, tau)


def gbm_recovery_quadrature(equity, assets, sigma, tau, obligations) -> float:
    """Endogenous recovery by direct integration of the move density."""
    lo = max(-obligations - equity, -assets)
    hi = -equity
    if hi <= lo:
        return 0.0
    def integrand(x):
        return ((equity + x + obligations) / obligations
                * lognormal_move_pdf(x, assets, sigma, tau))
    return _quad(integrand, lo, hi, assets, sigma, tau)


def uniform_default_probability_quadrature(equity, book, obligations=None) -> float:
    lo, hi = -book, min(-equity, 0.0)
    if hi <= lo:
        return 0.0
    value, _ = integrate.quad(lambda x: 1.0 / book, lo, hi,
                              epsabs=1e-13, epsrel=1e-13)
    return value


def uniform_recovery_quadrature(equity, book, obligations) -> float:
    lo = max(-obligations - equity, -book)
    hi = min(-equity, 0.0)
    if hi <= lo:
        return 0.0
    value, _ = integrate.quad(
        lambda x: (equity + x + obligations) / obligations / book, lo, hi,
        epsabs=1e-13, epsrel=1e-13)
    return value
