"""Monte-Carlo risk estimators and distributional diagnostics.

The adversary is exhaustive at lobe resolution: the learned function is
scanned once on a global grid fine enough to resolve every kernel lobe inside
an ``eps``-ball, each negative run is bisected to its exact endpoints, and a
test point is attacked successfully iff it lies within ``eps`` of a run.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
import numpy as np
from scipy import stats

from .featurelift import TrainingSet, alias_indices, alias_signs
from .riskexact import LearnedFunction, find_zero_crossings

CDF_THRESHOLDS = np.round(np.arange(1, 21) * 0.1, 10)


@dataclass(frozen=True)
class McConfig:
    """``n_test`` uniform test points, drawn in batches of ``batch``.

    Test points are stratified (one per ``2/n_test`` cell) unless
    ``stratified`` is False. ``inner_grid`` is the number of adversary grid
    cells per ``eps``-ball; it is raised automatically to
    ``2 * ceil(eps * (B - 1 + n))`` when that is larger.
    """

    n_test: int = 100_000
    inner_grid: int = 64
    seed: int = 0
    batch: int = 25_000
    stratified: bool = True
    workers: int = 1


def _batch_points(cfg: McConfig, b: int) -> np.ndarray:
    lo = b * cfg.batch
    hi = min(cfg.n_test, lo + cfg.batch)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([cfg.seed, b])))
    u = rng.random(hi - lo)
    if cfg.stratified:
        return -1.0 + 2.0 * (np.arange(lo, hi) + u) / cfg.n_test
    return -1.0 + 2.0 * u


def test_points(cfg: McConfig) -> np.ndarray:
    """All test abscissas for ``cfg``; independent of the worker count."""
    nb = int(math.ceil(cfg.n_test / cfg.batch))
    return np.concatenate([_batch_points(cfg, b) for b in range(nb)])


def _map_batches(fn, cfg: McConfig) -> np.ndarray:
    nb = int(math.ceil(cfg.n_test / cfg.batch))
    workers = cfg.workers or int(os.environ.get("LIFTADV_WORKERS", "1"))
    if workers <= 1 or nb == 1:
        parts = [fn(b) for b in range(nb)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(fn, range(nb)))
    return np.concatenate(parts)


def _binomial(hits: np.ndarray) -> tuple[float, float]:
    m = len(hits)
    p = float(np.mean(hits))
    return p, math.sqrt(p * (1.0 - p) / m)


def mc_classification_risk(f: LearnedFunction, cfg: McConfig) -> tuple[float, float]:
    """Fraction of test points where ``f < 0``, with its binomial standard error."""
    if cfg.n_test < 1000:
        raise ValueError("n_test must be at least 1000")
    hits = _map_batches(lambda b: f(_batch_points(cfg, b)) < 0, cfg)
    return _binomial(hits)


def dilated_negative_set(f: LearnedFunction, epsilon: float, spacing: float,
                         lo: float = -1.0, hi: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Merged intervals ``[l - eps, r + eps]`` around every negative run of ``f``.

    Negative runs come from a scan at ``spacing`` (with hidden-dip refinement)
    and bisected endpoints, so the ball test below is exact up to the root
    tolerance rather than the scan spacing.
    """
    num = int(math.ceil((hi - lo) / spacing)) + 1
    zs = find_zero_crossings(f, interval=(lo, hi), scan_points=num, periodic=False)
    if len(zs) == 0:
        return np.empty(0), np.empty(0)
    L = zs.intervals[:, 0] - epsilon
    R = np.maximum.accumulate(zs.intervals[:, 1] + epsilon)
    # start a new block wherever a left end clears every earlier right end
    new_block = np.ones(len(L), dtype=bool)
    new_block[1:] = L[1:] > R[:-1]
    starts = np.flatnonzero(new_block)
    ends = np.append(starts[1:], len(L)) - 1
    return L[starts], R[ends]


def adversary_spacing(f: LearnedFunction, epsilon: float, inner_grid: int) -> float:
    """Scan spacing: ``inner_grid`` cells per ball, at least 8 per half-lobe.

    Negative runs are bisected afterwards, so nothing is gained below lobe
    resolution; the spacing never drops under ``1 / (inner_grid * scale)``.
    """
    needed = 2 * int(math.ceil(epsilon * f.scale))
    cells = max(inner_grid, needed, 2)
    fine = min(2.0 * epsilon / cells, 1.0 / (8.0 * f.scale))
    return max(fine, 1.0 / (max(inner_grid, 8) * f.scale))


def mc_adversarial_risk(f: LearnedFunction, epsilon: float, cfg: McConfig) -> tuple[float, float]:
    """Fraction of test points within ``epsilon`` of a point where ``f < 0``.

    Balls are clipped to [-1, 1]. A point already misclassified is always a
    hit (the adversary may play ``x`` itself), so the estimate dominates the
    classification estimate under the same seed.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if epsilon == 0:
        return mc_classification_risk(f, cfg)
    Ls, Rs = dilated_negative_set(f, epsilon, adversary_spacing(f, epsilon, cfg.inner_grid))

    def batch(b):
        x = _batch_points(cfg, b)
        hit = f(x) < 0
        if len(Ls):
            j = np.searchsorted(Ls, x, side="right") - 1
            hit |= (j >= 0) & (x <= Rs[np.maximum(j, 0)])
        return hit

    return _binomial(_map_batches(batch, cfg))


def balls_and_bins_prediction() -> float:
    """Adversarial risk limit ``1 - 1/e`` for uniformly random training points."""
    return 1.0 - math.exp(-1.0)


@dataclass
class DistanceCdf:
    distances: np.ndarray
    cdf: list = field(default_factory=list)

    @property
    def fractions(self) -> np.ndarray:
        return np.array([c for _, c in self.cdf])


def _cdf_from(distances: np.ndarray) -> DistanceCdf:
    d = np.sort(np.asarray(distances, dtype=float))
    if len(d) == 0:
        return DistanceCdf(distances=d, cdf=[])
    frac = np.searchsorted(d, CDF_THRESHOLDS + 1e-12, side="right") / len(d)
    cdf = [(float(t), float(v)) for t, v in zip(CDF_THRESHOLDS, frac)]
    # random layouts can leave gaps wider than the last threshold
    cdf.append((math.inf, 1.0))
    return DistanceCdf(distances=d, cdf=cdf)


def nearest_training_distance(x: np.ndarray, trainset: TrainingSet, periodic: bool) -> np.ndarray:
    pts = np.sort(np.asarray(trainset.points, dtype=float))
    if periodic:
        pts = np.concatenate([pts - 2.0, pts, pts + 2.0])
    j = np.searchsorted(pts, x)
    left = pts[np.clip(j - 1, 0, len(pts) - 1)]
    right = pts[np.clip(j, 0, len(pts) - 1)]
    return np.minimum(np.abs(x - left), np.abs(x - right))


def misclassified_distance_cdf(f: LearnedFunction, trainset: TrainingSet,
                               cfg: McConfig) -> DistanceCdf:
    """Distances (in units of ``1/n``) from misclassified test points to the nearest training point.

    The regular grid is treated as periodic so that x = -1 sees the training
    point at x = 1.
    """
    x = test_points(cfg)
    bad = x[f(x) < 0]
    periodic = trainset.layout == "grid"
    d = nearest_training_distance(bad, trainset, periodic) * trainset.n
    return _cdf_from(d)


def ks_distance(a: DistanceCdf, b: DistanceCdf) -> float:
    """Two-sample Kolmogorov-Smirnov statistic between the raw distance samples."""
    if len(a.distances) == 0 or len(b.distances) == 0:
        return 1.0
    return float(stats.ks_2samp(a.distances, b.distances).statistic)


@dataclass
class AliasStats:
    avg_alias_weight: float
    alias_spread: tuple
    non_alias_energy: float


def alias_statistics(alpha_eff: np.ndarray, n: int, B: int) -> AliasStats:
    """Mean and 30/70 percentiles of the sign-normalized alias coefficients, and
    the squared mass on every other non-constant feature."""
    alpha_eff = np.asarray(alpha_eff, dtype=float)
    idx = alias_indices(n, B)
    vals = alpha_eff[idx] * alias_signs(n, B)
    mask = np.ones(B, dtype=bool)
    mask[0] = False
    mask[idx] = False
    p30, p70 = np.percentile(vals, [30, 70])
    return AliasStats(avg_alias_weight=float(vals.mean()), alias_spread=(float(p30), float(p70)),
                      non_alias_energy=float(np.sum(alpha_eff[mask] ** 2)))


def regression_mse(alpha: np.ndarray) -> float:
    """Mean squared error against ``f* = 1`` under Unif[-1, 1].

    With the orthonormal map the truth has coefficient ``sqrt2`` on the
    constant feature, so Parseval gives ``|alpha - sqrt2 e0|^2 / 2``.
    """
    d = np.asarray(alpha, dtype=float).copy()
    d[0] -= math.sqrt(2.0)
    return 0.5 * float(d @ d)
