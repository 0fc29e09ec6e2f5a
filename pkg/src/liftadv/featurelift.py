"""Feature maps, bilevel weightings and training sets for 1-D lifted models.

Every other module consumes the objects defined here: the bilevel ensemble
(diagonal feature weighting), the Fourier / Legendre / random-Fourier-sum
feature families, and regular-grid or uniform-random training sets.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

INV_SQRT2 = 1.0 / math.sqrt(2.0)
LEGENDRE_MAX_B = 512


@dataclass(frozen=True)
class BilevelEnsemble:
    """Bilevel weighting ``diag(lambda1, lambdaL, ..., lambdaL)`` of size ``B``.

    ``N_A`` is the number of cosine aliases of the constant feature on the
    regular ``n``-point grid. It is an integer whenever ``(B - 1)`` is a
    multiple of ``2n``; with a ``B`` override it may be fractional, in which
    case ``alias_structure`` is False.
    """

    n: int
    p: float
    q: float
    B: int
    gamma: float
    lambda1: float
    lambdaL: float
    N_A: float
    alias_structure: bool

    @property
    def h(self) -> float:
        """Lobe scale ``(B - 1 + n) / 2``: negative lobes sit on ``[(2k-1)/h, 2k/h]``."""
        return 0.5 * (self.B - 1 + self.n)

    def weights(self) -> np.ndarray:
        w = np.full(self.B, self.lambdaL, dtype=float)
        w[0] = self.lambda1
        return w


def adjusted_feature_count(n: int, p: float) -> int:
    """Smallest ``B >= n**p`` with ``(B - 1)`` a multiple of ``2n``."""
    target = n ** p
    # guard against n**p landing a hair above an integer
    base = math.ceil(target - 1e-9 * max(1.0, target))
    step = 2 * n
    k = max(1, math.ceil((base - 1) / step))
    return k * step + 1


def build_ensemble(n: int, p: float, q: float, B_override: Optional[int] = None) -> BilevelEnsemble:
    if n < 2:
        raise ValueError(f"need n >= 2 training points, got n={n}")
    if p <= 1:
        raise ValueError(f"need p > 1 (overparameterization), got p={p}")
    if q < 0:
        raise ValueError(f"need q >= 0, got q={q}")
    B = int(B_override) if B_override is not None else adjusted_feature_count(n, p)
    if B < 2:
        raise ValueError(f"feature count must be at least 2, got B={B}")
    gamma = float(n) ** (-q)
    lambda1 = gamma * B
    lambdaL = (1.0 - gamma) * B / (B - 1)
    alias_ok = (B - 1) % (2 * n) == 0
    N_A = (B - 1) // (2 * n) if alias_ok else (B - 1) / (2 * n)
    return BilevelEnsemble(n=n, p=p, q=q, B=B, gamma=gamma, lambda1=lambda1,
                           lambdaL=lambdaL, N_A=N_A, alias_structure=alias_ok)


# --------------------------------------------------------------------------
# Fourier features
# --------------------------------------------------------------------------

def _check_odd(B: int) -> None:
    if B < 1 or B % 2 == 0:
        raise ValueError(f"Fourier map needs an odd feature count (constant + sin/cos pairs), got B={B}")


def fourier_frequencies(B: int) -> tuple[np.ndarray, np.ndarray]:
    """Return (frequency m, is_cosine) per feature index; index 0 is the constant."""
    _check_odd(B)
    idx = np.arange(B)
    m = (idx + 1) // 2
    is_cos = (idx % 2 == 0) & (idx > 0)
    return m, is_cos


def fourier_map(x, B: int) -> np.ndarray:
    """Lift ``x`` to ``[1/sqrt2, sin(pi x), cos(pi x), ..., sin(M pi x), cos(M pi x)]``.

    Scalar ``x`` gives a length-``B`` vector; an array gives shape ``x.shape + (B,)``.
    """
    _check_odd(B)
    x = np.asarray(x, dtype=float)
    M = (B - 1) // 2
    theta = np.pi * x[..., None] * np.arange(1, M + 1)
    out = np.empty(x.shape + (B,), dtype=float)
    out[..., 0] = INV_SQRT2
    out[..., 1::2] = np.sin(theta)
    out[..., 2::2] = np.cos(theta)
    return out


def alias_indices(n: int, B: int) -> np.ndarray:
    """0-based indices of the cosines ``cos(k n pi x)``, ``k = 1..floor((B-1)/2n)``."""
    _check_odd(B)
    N = (B - 1) // (2 * n)
    return 2 * n * np.arange(1, N + 1)


def alias_signs(n: int, B: int) -> np.ndarray:
    """Value of each alias cosine on the regular grid: ``cos(k n pi) = (-1)**(k n)``."""
    k = np.arange(1, (B - 1) // (2 * n) + 1)
    return np.where((k * n) % 2 == 0, 1.0, -1.0)


# --------------------------------------------------------------------------
# Legendre features
# --------------------------------------------------------------------------

def legendre_map(x, B: int) -> np.ndarray:
    """First ``B`` orthonormal Legendre polynomials at ``x``.

    Normalized so that ``int_{-1}^{1} phi_j phi_k dx = delta_jk``, the same
    convention the Fourier map satisfies. Uses Bonnet's three-term recurrence.
    """
    if B < 1 or B > LEGENDRE_MAX_B:
        raise ValueError(f"Legendre map supports 1 <= B <= {LEGENDRE_MAX_B}, got B={B}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ValueError("Legendre features are defined on [-1, 1]")
    out = np.empty(x.shape + (B,), dtype=float)
    out[..., 0] = 1.0
    if B > 1:
        out[..., 1] = x
    for k in range(1, B - 1):
        out[..., k + 1] = ((2 * k + 1) * x * out[..., k] - k * out[..., k - 1]) / (k + 1)
    out *= np.sqrt((2 * np.arange(B) + 1) / 2.0)
    return out


# --------------------------------------------------------------------------
# Random-Fourier-sum features
# --------------------------------------------------------------------------

def sample_rfs_weights(ensemble: BilevelEnsemble, d: int, seed: int) -> np.ndarray:
    """Draw the ``B x d`` mixing matrix; column ``j`` is ``N(0, diag(weights))``.

    Column ``j`` depends only on ``(seed, j)``, so a width-``d`` matrix is a
    prefix of any wider matrix drawn with the same seed.
    """
    if d < 1:
        raise ValueError(f"need d >= 1 RFS features, got d={d}")
    scale = np.sqrt(ensemble.weights())
    W = np.empty((ensemble.B, d))
    for j in range(d):
        rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, j])))
        W[:, j] = rng.standard_normal(ensemble.B)
    W *= scale[:, None]
    return W


@dataclass(frozen=True)
class FeatureFamily:
    """Which basis the learned coefficients live on.

    ``kind`` is ``"fourier"``, ``"legendre"`` or ``"rfs"``. For RFS the
    mixing matrix ``W`` is attached and ``d`` is its column count.
    """

    kind: str
    B: int
    W: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    seed: Optional[int] = None

    @property
    def d(self) -> Optional[int]:
        return None if self.W is None else self.W.shape[1]

    def design(self, x) -> np.ndarray:
        if self.kind == "fourier":
            return fourier_map(x, self.B)
        if self.kind == "legendre":
            return legendre_map(x, self.B)
        if self.kind == "rfs":
            return fourier_map(x, self.B) @ self.W
        raise ValueError(f"unknown feature family {self.kind!r}")


# --------------------------------------------------------------------------
# Training data
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class TrainingSet:
    points: np.ndarray
    labels: np.ndarray
    layout: str
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return len(self.points)


def make_training_set(n: int, layout: str = "grid", seed: Optional[int] = None) -> TrainingSet:
    """Regular grid ``x_i = -1 + 2i/n`` (i = 1..n) or ``n`` uniform draws on [-1, 1]."""
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    if layout == "grid":
        pts = -1.0 + 2.0 * np.arange(1, n + 1) / n
    elif layout == "random":
        if seed is None:
            raise ValueError("uniform-random layout needs a seed")
        rng = np.random.default_rng([seed, n])
        pts = np.sort(rng.uniform(-1.0, 1.0, size=n))
    else:
        raise ValueError(f"layout must be 'grid' or 'random', got {layout!r}")
    return TrainingSet(points=pts, labels=np.ones(n), layout=layout, seed=seed)
