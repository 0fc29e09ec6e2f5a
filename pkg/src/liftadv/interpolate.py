"""Minimum-weighted-norm interpolation of constant labels.

Two routes to the same coefficients: a general weighted pseudoinverse solve
through a Cholesky factorization of the ``n x n`` Gram matrix, and the
closed form that holds on the regular grid with Fourier features. The general
solver is the reference; the closed form is checked against it.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import linalg

from .featurelift import (
    BilevelEnsemble,
    FeatureFamily,
    TrainingSet,
    alias_indices,
    alias_signs,
    fourier_map,
    sample_rfs_weights,
)

COND_MAX = 1e12
ALIAS_SPREAD_TOL = 1e-9


class GramSingular(np.linalg.LinAlgError):
    """The n x n Gram matrix is too ill-conditioned for an exact interpolation."""

    def __init__(self, cond: float, threshold: float):
        self.cond = cond
        self.threshold = threshold
        super().__init__(f"Gram matrix condition number {cond:.3e} exceeds {threshold:.1e}")


class AliasStructureViolated(ValueError):
    pass


@dataclass
class CoefficientVector:
    """Learned weights on the unweighted basis.

    ``a`` is the constant-feature coefficient. ``b`` is the common alias
    coefficient (sign-normalized by the alias value on the grid) when the
    alias structure holds; otherwise None. ``b_spread`` records the max
    deviation of the individual alias coefficients from ``b``.
    """

    alpha: np.ndarray
    a: float
    b: Optional[float]
    family: FeatureFamily
    n: Optional[int] = None
    b_spread: float = 0.0

    @property
    def b_consistent(self) -> bool:
        return self.b is not None and self.b_spread <= ALIAS_SPREAD_TOL


@dataclass
class RfsSolution:
    beta: np.ndarray
    alpha_eff: np.ndarray
    W: np.ndarray = field(repr=False)
    least_squares: bool = False

    @property
    def d(self) -> int:
        return self.W.shape[1]


def _check_conditioning(G: np.ndarray, cond_max: float) -> None:
    ev = np.linalg.eigvalsh(G)
    lo, hi = ev[0], ev[-1]
    cond = math.inf if lo <= 0 else hi / lo
    if cond > cond_max:
        raise GramSingular(cond, cond_max)


def solve_min_norm(design: np.ndarray, weighting: np.ndarray, labels: np.ndarray,
                   cond_max: float = COND_MAX) -> np.ndarray:
    """``alpha = S M^T (M S M^T)^{-1} y`` with ``S = diag(weighting)``.

    Zero weights exclude the corresponding features (their coefficients are
    exactly zero). No ridge is added: an ill-conditioned Gram matrix raises
    :class:`GramSingular`.
    """
    M = np.atleast_2d(np.asarray(design, dtype=float))
    w = np.asarray(weighting, dtype=float)
    y = np.asarray(labels, dtype=float)
    if np.any(w < 0):
        raise ValueError("feature weights must be non-negative")
    if M.shape[1] != w.shape[0] or M.shape[0] != y.shape[0]:
        raise ValueError(f"shape mismatch: design {M.shape}, weights {w.shape}, labels {y.shape}")
    active = w > 0
    Ma = M[:, active]
    alpha = np.zeros(M.shape[1])
    if Ma.shape[1] < Ma.shape[0]:
        # fewer live features than constraints: the Gram matrix is singular by
        # construction, so solve the (consistent) primal system directly
        root = np.sqrt(w[active])
        zeta, *_ = np.linalg.lstsq(Ma * root, y, rcond=None)
        alpha[active] = root * zeta
        resid = np.max(np.abs(M @ alpha - y))
        if resid > 1e-8 * max(1.0, np.max(np.abs(y))):
            raise GramSingular(math.inf, cond_max)
        return alpha
    MS = Ma * w[active]
    G = MS @ Ma.T
    G = 0.5 * (G + G.T)
    _check_conditioning(G, cond_max)
    factor = linalg.cho_factor(G, lower=True)
    dual = linalg.cho_solve(factor, y)
    alpha[active] = MS.T @ dual
    return alpha


def _summarize_aliases(alpha: np.ndarray, n: int, B: int) -> tuple[Optional[float], float]:
    idx = alias_indices(n, B)
    if len(idx) == 0:
        return None, 0.0
    vals = alpha[idx] * alias_signs(n, B)
    b = float(vals.mean())
    return b, float(np.max(np.abs(vals - b)))


def fit(ensemble: BilevelEnsemble, trainset: TrainingSet, family: str = "fourier",
        cond_max: float = COND_MAX) -> CoefficientVector:
    """General solver applied to an ensemble's weighting and a training set."""
    fam = FeatureFamily(kind=family, B=ensemble.B)
    M = fam.design(trainset.points)
    alpha = solve_min_norm(M, ensemble.weights(), trainset.labels, cond_max=cond_max)
    b, spread = None, 0.0
    if family == "fourier" and trainset.layout == "grid" and ensemble.B % 2 == 1:
        b, spread = _summarize_aliases(alpha, ensemble.n, ensemble.B)
        if spread > ALIAS_SPREAD_TOL:
            b = None
    return CoefficientVector(alpha=alpha, a=float(alpha[0]), b=b, family=fam,
                             n=ensemble.n, b_spread=spread)


def closed_form_ab(lambda1: float, lambdaL: float, N_A: float) -> tuple[float, float]:
    """Constant and alias coefficients on the regular grid.

    The reduced problem keeps the constant feature (grid value ``1/sqrt2``)
    and the ``N_A`` aliases (grid value 1). Its min-norm solution is
    proportional to the effective root-weights, which gives
    ``a = (lambda1/sqrt2) / (lambda1/2 + N_A lambdaL)`` and
    ``b = lambdaL / (lambda1/2 + N_A lambdaL)``; these satisfy
    ``a/sqrt2 + N_A b = 1``.
    """
    denom = 0.5 * lambda1 + N_A * lambdaL
    return (lambda1 / math.sqrt(2.0)) / denom, lambdaL / denom


def closed_form_coeffs(ensemble: BilevelEnsemble) -> CoefficientVector:
    if not ensemble.alias_structure or ensemble.B % 2 == 0:
        raise AliasStructureViolated(
            f"(B-1)={ensemble.B - 1} is not a multiple of 2n={2 * ensemble.n}")
    a, b = closed_form_ab(ensemble.lambda1, ensemble.lambdaL, ensemble.N_A)
    alpha = np.zeros(ensemble.B)
    alpha[0] = a
    alpha[alias_indices(ensemble.n, ensemble.B)] = b * alias_signs(ensemble.n, ensemble.B)
    return CoefficientVector(alpha=alpha, a=a, b=b,
                             family=FeatureFamily(kind="fourier", B=ensemble.B), n=ensemble.n)


def uncorrected_ab(lambda1: float, lambdaL: float, B: int, n: int) -> tuple[float, float]:
    """The coefficient pair with the uncorrected denominator constant.

    Kept only for comparison: it does not satisfy the interpolation identity
    unless ``lambda1 == 0``. See :func:`closed_form_ab` for the correct pair.
    """
    N = (B - 1) / (2 * n)
    denom = math.sqrt(2.0) * lambda1 + 2.0 * lambdaL * N
    return math.sqrt(2.0) * lambda1 / denom, 2.0 * lambdaL / denom


def solve_rfs(ensemble: BilevelEnsemble, trainset: TrainingSet, d: int, seed: int,
              cond_max: float = COND_MAX, W: Optional[np.ndarray] = None) -> RfsSolution:
    """Minimum-norm interpolator on ``d`` random-Fourier-sum features.

    For ``d < n`` no interpolator exists; the least-squares solution is
    returned instead (flagged ``least_squares``), which is what the
    underparameterized side of a double-descent curve needs.
    """
    if W is None:
        W = sample_rfs_weights(ensemble, d, seed)
    Phi = fourier_map(trainset.points, ensemble.B) @ W
    y = trainset.labels
    n = len(y)
    if d >= n:
        beta = solve_min_norm(Phi, np.ones(d), y, cond_max=cond_max)
        ls = False
    else:
        G = Phi.T @ Phi
        _check_conditioning(G, cond_max)
        beta = linalg.cho_solve(linalg.cho_factor(G, lower=True), Phi.T @ y)
        ls = True
    return RfsSolution(beta=beta, alpha_eff=W @ beta, W=W, least_squares=ls)
