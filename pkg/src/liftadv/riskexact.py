"""Exact classification and adversarial risk via zero crossings.

A learned function is evaluated either as a plain feature expansion or, on
the regular grid, in its Dirichlet-kernel form
``f(x) = (2a - sqrt2 b)/(2 sqrt2) + (b/2) D_{N_A}(n pi (x - x0))`` with ``x0`` a
training point. Roots are located by a dense sign scan plus bisection; the
misclassified set is the union of the intervals between paired roots, and the
adversarial set is that union dilated by ``eps``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy import fft as sfft
from scipy.optimize import minimize_scalar

from .featurelift import BilevelEnsemble, INV_SQRT2
from .interpolate import CoefficientVector, RfsSolution, closed_form_ab

SQRT2 = math.sqrt(2.0)
DIP_CONSTANT = 0.4344  # |min D_N| / (N + 1/2) for large N
HALF_DIP_CONSTANT = 0.2172
BISECT_MAXITER = 200
SING_TOL = 1e-12


class UnresolvedRoot(RuntimeError):
    pass


# --------------------------------------------------------------------------
# Dirichlet kernel
# --------------------------------------------------------------------------

def dirichlet_kernel(theta, N: float) -> np.ndarray:
    """``D_N(theta) = sin((N + 1/2) theta) / sin(theta / 2)`` with the removable
    singularity at multiples of ``2 pi`` replaced by ``2N + 1``."""
    theta = np.asarray(theta, dtype=float)
    s = np.sin(0.5 * theta)
    small = np.abs(s) < SING_TOL
    with np.errstate(divide="ignore", invalid="ignore"):
        D = np.sin((N + 0.5) * theta) / np.where(small, 1.0, s)
    return np.where(small, 2.0 * N + 1.0, D)


def dirichlet_min(N: float) -> tuple[float, float]:
    """Global minimum of ``D_N`` and its location, searched on the first negative lobe."""
    w = 2.0 * math.pi / (2.0 * N + 1.0)
    res = minimize_scalar(lambda t: float(dirichlet_kernel(t, N)), bounds=(w, 2.0 * w),
                          method="bounded", options={"xatol": 1e-14 * w})
    return float(res.fun), float(res.x)


def dirichlet_envelope(x, n: int, b: float):
    """Envelope ``2b / (n pi x)`` bounding ``(b/2)|D_{N_A}(n pi x)|`` on ``(0, 1/n]``."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise ValueError("envelope is defined for x > 0")
    out = 2.0 * b / (n * math.pi * x)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# Learned functions
# --------------------------------------------------------------------------

class LearnedFunction:
    """Vectorized callable ``x -> f(x)`` on [-1, 1] with scan metadata.

    ``scale`` is the reciprocal of the finest sign structure (roughly the
    number of half-lobes per unit length); ``period`` is set for functions
    whose risk can be computed on one period.
    """

    period: Optional[float] = None
    center: float = 0.0
    scale: float = 1.0

    def __call__(self, x) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def grid(self, lo: float, hi: float, num: int) -> tuple[np.ndarray, np.ndarray]:
        xs = np.linspace(lo, hi, num)
        return xs, self(xs)

    def default_interval(self) -> tuple[float, float, bool]:
        if self.period is not None:
            return self.center - self.period / 2, self.center + self.period / 2, True
        return -1.0, 1.0, False


class DirichletForm(LearnedFunction):
    """Closed-form evaluation of the regular-grid interpolator.

    ``center`` is a training point (x = 1 is one for every n). For a
    fractional ``N_A`` (a feature count that breaks the alias structure) the
    function is the periodic extension of its central period.
    """

    def __init__(self, a: float, b: float, N_A: float, n: int, center: float = 1.0):
        self.a = float(a)
        self.b = float(b)
        self.N_A = float(N_A)
        self.n = int(n)
        self.center = float(center)
        self.period = 2.0 / n
        self.h = n * (self.N_A + 0.5)
        self.scale = 2.0 * self.h

    @classmethod
    def from_ensemble(cls, ens: BilevelEnsemble) -> "DirichletForm":
        a, b = closed_form_ab(ens.lambda1, ens.lambdaL, ens.N_A)
        return cls(a, b, ens.N_A, ens.n)

    @classmethod
    def from_coeffs(cls, cv: CoefficientVector, ens: BilevelEnsemble) -> "DirichletForm":
        if cv.b is None:
            raise ValueError("coefficients lack a common alias value; use FourierSeries")
        return cls(cv.a, cv.b, ens.N_A, ens.n)

    @property
    def floor(self) -> float:
        """Signal floor ``(2a - sqrt2 b) / (2 sqrt2)``."""
        return (2.0 * self.a - SQRT2 * self.b) / (2.0 * SQRT2)

    @property
    def B(self) -> float:
        return 2.0 * self.n * self.N_A + 1.0

    def reduce(self, x) -> np.ndarray:
        u = np.asarray(x, dtype=float) - self.center
        P = self.period
        return u - P * np.round(u / P)

    def kernel(self, x) -> np.ndarray:
        return dirichlet_kernel(self.n * math.pi * self.reduce(x), self.N_A)

    def __call__(self, x) -> np.ndarray:
        return self.floor + 0.5 * self.b * self.kernel(x)


def _trig_coeffs(alpha: np.ndarray) -> np.ndarray:
    """Complex ``z_m = c_m - i s_m`` so that the non-constant part is ``Re sum z_m e^{i m pi x}``."""
    alpha = np.asarray(alpha, dtype=float)
    M = (len(alpha) - 1) // 2
    z = np.zeros(M + 1, dtype=complex)
    z[1:] = alpha[2::2] - 1j * alpha[1::2]
    return z


def trig_eval(x, alpha: np.ndarray, chunk: int = 4096) -> np.ndarray:
    """Evaluate ``<alpha, fourier_map(x)>`` in ``O(len(x) * B)`` via a blocked
    factorization ``e^{i m theta} = e^{i S t theta} e^{i r theta}`` (``m = S t + r``)."""
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    z = _trig_coeffs(alpha)
    M1 = len(z)
    S = max(1, int(math.ceil(math.sqrt(M1))))
    T = int(math.ceil(M1 / S))
    Z = np.zeros(S * T, dtype=complex)
    Z[:M1] = z
    Z = Z.reshape(T, S)
    r = np.arange(S)
    t = np.arange(T)
    out = np.empty(flat.shape)
    for start in range(0, len(flat), chunk):
        th = math.pi * flat[start:start + chunk]
        A = np.exp(1j * np.outer(th, r))
        C = np.exp(1j * np.outer(S * th, t))
        out[start:start + chunk] = np.real(np.sum(C * (A @ Z.T), axis=1))
    return (alpha[0] * INV_SQRT2 + out).reshape(x.shape)


class FourierSeries(LearnedFunction):
    """``f(x) = <alpha, fourier_map(x)>`` for arbitrary Fourier coefficients."""

    def __init__(self, alpha: np.ndarray, n: Optional[int] = None, period: Optional[float] = None,
                 center: float = 1.0):
        self.alpha = np.asarray(alpha, dtype=float)
        self.B = len(self.alpha)
        if self.B % 2 == 0:
            raise ValueError("Fourier coefficient vector must have odd length")
        self.n = n
        self.period = period
        self.center = center
        self.scale = float(self.B - 1 + (n or 0))

    @classmethod
    def from_coeffs(cls, cv: CoefficientVector, periodic_grid: bool = False) -> "FourierSeries":
        period = 2.0 / cv.n if (periodic_grid and cv.n) else None
        return cls(cv.alpha, n=cv.n, period=period)

    @classmethod
    def from_rfs(cls, sol: RfsSolution, n: Optional[int] = None) -> "FourierSeries":
        return cls(sol.alpha_eff, n=n)

    def __call__(self, x) -> np.ndarray:
        return trig_eval(x, self.alpha)

    def grid(self, lo: float, hi: float, num: int) -> tuple[np.ndarray, np.ndarray]:
        # uniform spacing 2/L lets one length-L FFT give exact values on the grid
        span = hi - lo
        M = (self.B - 1) // 2
        L = max(int(math.ceil(2.0 * (num - 1) / span)), 2 * M + 2)
        L = sfft.next_fast_len(L)
        k_max = int(math.floor(span * L / 2.0 + 1e-9))
        z = _trig_coeffs(self.alpha) * np.exp(1j * math.pi * np.arange(M + 1) * lo)
        buf = np.zeros(L, dtype=complex)
        buf[:M + 1] = z
        vals = np.real(sfft.ifft(buf)) * L + self.alpha[0] * INV_SQRT2
        k = np.arange(k_max + 1)
        return lo + 2.0 * k / L, vals[k % L]


class LegendreSeries(LearnedFunction):
    """``f(x) = <alpha, legendre_map(x)>`` evaluated with Clenshaw's recurrence."""

    def __init__(self, alpha: np.ndarray, n: Optional[int] = None):
        self.alpha = np.asarray(alpha, dtype=float)
        self.B = len(self.alpha)
        self.n = n
        self._c = self.alpha * np.sqrt((2 * np.arange(self.B) + 1) / 2.0)
        # zeros of degree-B polynomials crowd to spacing ~1/B^2 at the endpoints
        self.scale = float(2 * self.B ** 2)

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return npleg.legval(np.clip(x, -1.0, 1.0), self._c)


def eval_function(f: LearnedFunction, x):
    out = f(x)
    return float(out) if np.ndim(out) == 0 else out


# --------------------------------------------------------------------------
# Zero crossings
# --------------------------------------------------------------------------

@dataclass
class ZeroCrossingSet:
    """Sorted negative intervals ``(l_i, r_i)`` of a learned function on ``[lo, hi]``."""

    intervals: np.ndarray
    lo: float
    hi: float
    periodic: bool = False
    tol: float = 0.0

    def __post_init__(self):
        self.intervals = np.asarray(self.intervals, dtype=float).reshape(-1, 2)

    @property
    def length(self) -> float:
        return self.hi - self.lo

    def __len__(self) -> int:
        return len(self.intervals)

    @property
    def roots(self) -> np.ndarray:
        return self.intervals.ravel()


def _bisect(f, lo: np.ndarray, hi: np.ndarray, lo_neg: np.ndarray, xtol: float) -> np.ndarray:
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(BISECT_MAXITER):
        if np.all(hi - lo <= xtol):
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        neg = f(mid) < 0
        same = neg == lo_neg
        lo = np.where(same, mid, lo)
        hi = np.where(same, hi, mid)
    raise UnresolvedRoot(f"bisection did not reach width {xtol:.2e} in {BISECT_MAXITER} iterations")


def hidden_dips(f, xs: np.ndarray, vs: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Find negative dips that fall between scan nodes.

    Looks at positive local minima of the sampled values, extrapolates a
    parabola through each, and minimizes ``f`` directly where the parabola
    dips below zero. Returns the abscissas and values of confirmed negative
    minima.
    """
    if len(vs) < 3:
        return np.empty(0), np.empty(0)
    mid = vs[1:-1]
    is_min = (mid <= vs[:-2]) & (mid <= vs[2:]) & (mid >= 0)
    idx = np.flatnonzero(is_min) + 1
    if len(idx) == 0:
        return np.empty(0), np.empty(0)
    y0, y1, y2 = vs[idx - 1], vs[idx], vs[idx + 1]
    curv = y0 - 2 * y1 + y2
    with np.errstate(divide="ignore", invalid="ignore"):
        vertex = y1 - (y2 - y0) ** 2 / (8.0 * curv)
    # generous margin: parabola is only an estimate of the true lobe bottom
    cand = idx[(vertex < 0.25 * np.abs(curv)) | ~np.isfinite(vertex)]
    xs_out, vs_out = [], []
    for i in cand:
        res = minimize_scalar(lambda t: float(f(np.array([t]))[0]), bounds=(xs[i - 1], xs[i + 1]),
                              method="bounded", options={"xatol": 1e-15 + 1e-13 * abs(xs[i])})
        if res.fun < 0:
            xs_out.append(res.x)
            vs_out.append(res.fun)
    return np.asarray(xs_out), np.asarray(vs_out)


def default_scan_points(f: LearnedFunction, lo: float, hi: float) -> int:
    # >= 8 samples per half-lobe of width 1/h = 2/(B - 1 + n)
    return int(max(1024, math.ceil(8.0 * f.scale * (hi - lo))) + 1)


def find_zero_crossings(f: LearnedFunction, interval: Optional[tuple[float, float]] = None,
                        scan_points: Optional[int] = None, tol: Optional[float] = None,
                        periodic: Optional[bool] = None) -> ZeroCrossingSet:
    """Sign-change scan on a uniform grid, then bisection of every bracket.

    The default interval is one period centred on a training point for
    periodic functions and [-1, 1] otherwise. ``tol`` is the root abscissa
    tolerance (default ``1e-12`` times the interval length).
    """
    lo, hi, per = f.default_interval()
    if interval is not None:
        lo, hi = interval
        per = False
    if periodic is not None:
        per = periodic
    if scan_points is None:
        scan_points = default_scan_points(f, lo, hi)
    xtol = 1e-12 * (hi - lo) if tol is None else tol
    xs, vs = f.grid(lo, hi, scan_points)
    if xs[-1] < hi:
        xs = np.append(xs, hi)
        vs = np.append(vs, f(np.array([hi])))
    extra_x, _ = hidden_dips(f, xs, vs)
    if len(extra_x):
        ex_v = f(extra_x)
        xs = np.concatenate([xs, extra_x])
        vs = np.concatenate([vs, ex_v])
        order = np.argsort(xs, kind="stable")
        xs, vs = xs[order], vs[order]
    neg = vs < 0
    change = np.flatnonzero(neg[:-1] != neg[1:])
    roots = np.empty(0)
    if len(change):
        roots = _bisect(f, xs[change], xs[change + 1], neg[change], xtol)
    entering = ~neg[change]  # positive -> negative means a left root l_i
    bounds: list[float] = []
    if neg[0]:
        bounds.append(lo)
    bounds.extend(roots.tolist())
    if neg[-1]:
        bounds.append(hi)
    ivs = np.asarray(bounds).reshape(-1, 2)
    if len(change) and neg[0] == entering[0]:  # pragma: no cover - defensive
        raise UnresolvedRoot("inconsistent crossing pattern")
    return ZeroCrossingSet(intervals=ivs, lo=lo, hi=hi, periodic=per, tol=xtol)


# --------------------------------------------------------------------------
# Roots to risk
# --------------------------------------------------------------------------

def classification_risk(zs: ZeroCrossingSet) -> float:
    if len(zs) == 0:
        return 0.0
    return float(np.sum(zs.intervals[:, 1] - zs.intervals[:, 0]) / zs.length)


def _padded_intervals(ivs: np.ndarray, eps: float, merge_overlaps: bool) -> np.ndarray:
    lt = ivs[:, 0] - eps
    rt = ivs[:, 1] + eps
    if merge_overlaps and len(ivs) > 1:
        # l~_i = max(l_i - eps, r~_{i-1})
        lt[1:] = np.maximum(lt[1:], rt[:-1])
    return np.column_stack([lt, rt])


def adversarial_risk(zs: ZeroCrossingSet, epsilon: float, merge_overlaps: bool = True) -> float:
    """Measure of the ``epsilon``-dilated misclassified set over the interval length.

    Padded intervals are clipped to the interval, or wrapped around it when
    the crossing set is periodic. ``merge_overlaps=False`` disables the
    overlap correction and exists only as a mutation check for the
    validation gate.
    """
    if epsilon < 0:
        raise ValueError("epsilon must be non-negative")
    if len(zs) == 0:
        return 0.0
    ivs = zs.intervals
    L = zs.length
    if epsilon == 0:
        return classification_risk(zs)
    if not zs.periodic:
        pad = _padded_intervals(ivs, epsilon, merge_overlaps)
        lt = np.clip(pad[:, 0], zs.lo, zs.hi)
        rt = np.clip(pad[:, 1], zs.lo, zs.hi)
        total = float(np.sum(np.maximum(rt - lt, 0.0)))
        return min(1.0, total / L) if merge_overlaps else total / L
    if not merge_overlaps:
        return float(np.sum(ivs[:, 1] - ivs[:, 0] + 2 * epsilon) / L)
    pieces = []
    for l, r in ivs:
        s, e = l - epsilon - zs.lo, r + epsilon - zs.lo
        if e - s >= L:
            return 1.0
        s0 = s % L
        e0 = s0 + (e - s)
        if e0 <= L:
            pieces.append((s0, e0))
        else:
            pieces.append((s0, L))
            pieces.append((0.0, e0 - L))
    pieces.sort()
    total, cur_s, cur_e = 0.0, pieces[0][0], pieces[0][1]
    for s, e in pieces[1:]:
        if s > cur_e:
            total += cur_e - cur_s
            cur_s, cur_e = s, e
        else:
            cur_e = max(cur_e, e)
    total += cur_e - cur_s
    return min(1.0, total / L)


# --------------------------------------------------------------------------
# Theory: k*, risk bounds, bilevel predictions
# --------------------------------------------------------------------------

def h_of(B: float, n: int) -> float:
    return 0.5 * (B - 1 + n)


def k_star_bounds(a: float, b: float, B: float, n: int) -> tuple[float, bool]:
    """Upper bound on the crossing-lobe count and the sufficient condition for k* >= 1.

    When the signal floor ``2a - sqrt2 b`` is not positive the upper bound is
    vacuous and reported as ``inf``.
    """
    c2 = 2.0 * a - SQRT2 * b
    positive = HALF_DIP_CONSTANT * SQRT2 * b * (B - 1 + n) > n * c2
    if c2 <= 0:
        return math.inf, positive
    upper = (2.0 * SQRT2 * b * (B - 1 + n) + n * c2) / (2.0 * math.pi * n * c2)
    return upper, positive


def risk_bounds(a: float, b: float, B: float, n: int) -> tuple[float, float, int]:
    """(classification bound, small-perturbation adversarial bound, 0/1 medium-perturbation value)."""
    c2 = 2.0 * a - SQRT2 * b
    _, positive = k_star_bounds(a, b, B, n)
    if c2 <= 0:
        return 0.5, 0.5, int(positive)
    h = h_of(B, n)
    bound = SQRT2 * b / (math.pi * c2) + n / (2.0 * h)
    return bound, bound, int(positive)


def n0_of_q(q: float) -> Optional[float]:
    """Sample size beyond which medium perturbations always succeed (q > 1 only)."""
    if q <= 1:
        return None
    return ((2.0 + SQRT2) / (HALF_DIP_CONSTANT * 2.0 * SQRT2)) ** (1.0 / (q - 1.0))


class Regime(str, enum.Enum):
    BENIGN = "q<1"
    SEPARATING_LOW = "1<q<1+(p-1)/2"
    SEPARATING_HIGH = "1+(p-1)/2<q<p"
    ISOTROPIC = "q>p"
    BOUNDARY = "boundary"


# predicted asymptotic errors per regime:
# (regression, classification LFF, classification IF, adversarial eps=1/n)
REGIME_TABLE = {
    Regime.BENIGN: (0.0, 0.0, 0.0, 0.0),
    Regime.SEPARATING_LOW: (1.0, 0.0, 0.0, 1.0),
    Regime.SEPARATING_HIGH: (1.0, 0.0, 0.5, 1.0),
    Regime.ISOTROPIC: (1.0, 0.5, 0.5, 1.0),
}


def regime_of(p: float, q: float) -> Regime:
    mid = 1.0 + (p - 1.0) / 2.0
    if q < 1:
        return Regime.BENIGN
    if 1 < q < mid:
        return Regime.SEPARATING_LOW
    if mid < q < p:
        return Regime.SEPARATING_HIGH
    if q > p:
        return Regime.ISOTROPIC
    return Regime.BOUNDARY


# constant in the asymptotic classification bound min(1/2, C n^{q-p})
ASYMPTOTIC_C = 1.0 / (2.0 * (2.0 - SQRT2)) + 1.0


@dataclass
class BilevelPrediction:
    risk_bound: float
    asymptotic_bound: float
    n0: Optional[float]
    regime: Regime


def bilevel_predictions(ens: BilevelEnsemble) -> BilevelPrediction:
    a, b = closed_form_ab(ens.lambda1, ens.lambdaL, ens.N_A)
    cls_bound, _, _ = risk_bounds(a, b, ens.B, ens.n)
    asym = min(0.5, ASYMPTOTIC_C * float(ens.n) ** (ens.q - ens.p))
    return BilevelPrediction(risk_bound=min(0.5, cls_bound), asymptotic_bound=asym,
                             n0=n0_of_q(ens.q), regime=regime_of(ens.p, ens.q))


def critical_survival(n: int, B: float, dip: str = "exact") -> float:
    """Constant-feature coefficient ``a_c`` at which the deepest kernel dip touches zero.

    Along the interpolation constraint ``a/sqrt2 + N_A b = 1`` the minimum of
    the learned function is ``t + (1 - t)(D_min - 1)/(2 N_A)`` with
    ``t = a/sqrt2``; it vanishes at ``t = kappa / (1 + kappa)`` where
    ``kappa = (1 - D_min) / (2 N_A)``. ``dip="exact"`` minimizes the kernel
    numerically; ``dip="asymptotic"`` uses ``D_min = -0.4344 (N_A + 1/2)``.
    For ``a < a_c`` the function dips below zero next to every training point.
    """
    N = (B - 1) / (2.0 * n)
    if dip == "exact":
        Dmin, _ = dirichlet_min(N)
    elif dip == "asymptotic":
        Dmin = -DIP_CONSTANT * (N + 0.5)
    else:
        raise ValueError(f"dip must be 'exact' or 'asymptotic', got {dip!r}")
    kappa = (1.0 - Dmin) / (2.0 * N)
    return SQRT2 * kappa / (1.0 + kappa)


def interpolating_b(a: float, N_A: float) -> float:
    """Alias coefficient forced by the interpolation constraint for a given ``a``."""
    return (1.0 - a / SQRT2) / N_A


# --------------------------------------------------------------------------
# Lobes
# --------------------------------------------------------------------------

@dataclass
class QuadraticLobe:
    k: int
    real: bool
    m_k: float  # NaN when the lobe does not cross
    center: float
    roots: tuple[float, float]
    d_k: float  # gap l_k - r_{k-1}; NaN when undefined


def _lobe_quadratic(k: int, f: DirichletForm) -> tuple[float, float, bool]:
    h = f.h
    mid = (2 * k - 0.5) / h
    g_mid = 0.5 * f.b * float(dirichlet_kernel(f.n * math.pi * mid, f.N_A))
    # q_k(x) = C (x - (2k-1)/h)(x - 2k/h) matched to the kernel term at the lobe midpoint
    C = -4.0 * h * h * g_mid
    w2 = (0.5 / h) ** 2
    disc = w2 - f.floor / C if C > 0 else -1.0
    center = (4 * k - 1) / (2.0 * h)
    if disc <= 0:
        return center, math.nan, False
    return center, 2.0 * math.sqrt(disc), True


def quadratic_lobe(k: int, a: float, b: float, B: float, n: int) -> QuadraticLobe:
    """Quadratic stand-in for the ``k``-th negative kernel lobe.

    The parabola shares the lobe's two zeros ``(2k-1)/h`` and ``2k/h`` and is
    matched to the kernel term at the lobe midpoint. ``m_k`` is the length of
    the interval where floor + parabola is negative (NaN if it never is).
    ``d_k = l_k - r_{k-1}`` uses ``r_0 = 0``, the training point itself.
    """
    if k < 1:
        raise ValueError("lobes are indexed from 1")
    f = DirichletForm(a, b, (B - 1) / (2.0 * n), n, center=0.0)
    center, m, real = _lobe_quadratic(k, f)
    roots = (center - m / 2, center + m / 2) if real else (math.nan, math.nan)
    if k == 1:
        prev_r = 0.0
    else:
        pc, pm, preal = _lobe_quadratic(k - 1, f)
        prev_r = pc + pm / 2 if preal else math.nan
    d_k = roots[0] - prev_r if real else math.nan
    return QuadraticLobe(k=k, real=real, m_k=m, center=center, roots=roots, d_k=d_k)


def lobe_crossings(f: DirichletForm, zs: Optional[ZeroCrossingSet] = None) -> dict[int, float]:
    """Map lobe index -> crossing width for lobes on the right of the training point."""
    if zs is None:
        zs = find_zero_crossings(f, interval=(f.center, f.center + f.period / 2))
    out: dict[int, float] = {}
    for l, r in zs.intervals:
        mid = 0.5 * (l + r) - f.center
        if mid <= 0:
            continue
        k = int(math.ceil(mid * f.h / 2.0 - 1e-12))
        out[k] = out.get(k, 0.0) + (r - l)
    return out


# --------------------------------------------------------------------------
# Reports
# --------------------------------------------------------------------------

@dataclass
class RiskReport:
    classification: float
    adversarial: dict = field(default_factory=dict)
    k_star: int = 0
    first_benign_lobe: int = 1
    crossings_per_period: int = 0
    k_star_upper: float = 0.0
    k_star_positive_condition: bool = False
    bound_classification: float = 0.5
    bound_adv_small: float = 0.5
    adv_medium_predicted: int = 0
    n0_q: Optional[float] = None


def resolve_epsilon(rule, n: int, B: float) -> float:
    """Turn ``'1/n' | '2/n' | '2pi/h' | '2/h' | <real>`` into a number."""
    if isinstance(rule, (int, float)):
        return float(rule)
    s = str(rule).strip().lower().replace(" ", "")
    h = h_of(B, n)
    table = {"1/n": 1.0 / n, "2/n": 2.0 / n, "2pi/h": 2.0 * math.pi / h, "2/h": 2.0 / h}
    if s in table:
        return table[s]
    return float(s)


def risk_report(f: DirichletForm, epsilons: Iterable = ("1/n", "2/n", "2pi/h"),
                q: Optional[float] = None) -> RiskReport:
    """Exact risks of a Dirichlet-form function plus every theory quantity."""
    zs = find_zero_crossings(f)
    crossings = lobe_crossings(f)
    K = max(crossings) if crossings else 0
    benign = 1
    while benign in crossings:
        benign += 1
    adv = {}
    for e in epsilons:
        adv[str(e)] = float(adversarial_risk(zs, resolve_epsilon(e, f.n, f.B)))
    upper, positive = k_star_bounds(f.a, f.b, f.B, f.n)
    cb, ab, med = risk_bounds(f.a, f.b, f.B, f.n)
    return RiskReport(classification=classification_risk(zs), adversarial=adv, k_star=K,
                      first_benign_lobe=benign, crossings_per_period=len(zs),
                      k_star_upper=upper, k_star_positive_condition=positive,
                      bound_classification=cb, bound_adv_small=ab, adv_medium_predicted=med,
                      n0_q=n0_of_q(q) if q is not None else None)
