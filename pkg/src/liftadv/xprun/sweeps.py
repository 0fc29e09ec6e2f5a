"""Parameter sweeps over n, q, d and the misclassification-distance CDF."""
from __future__ import annotations

import itertools
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Optional, Sequence

import numpy as np

from ..featurelift import build_ensemble, make_training_set
from ..interpolate import GramSingular, closed_form_coeffs, fit, solve_rfs
from ..mcestim import (
    McConfig,
    alias_statistics,
    ks_distance,
    mc_adversarial_risk,
    mc_classification_risk,
    misclassified_distance_cdf,
    regression_mse,
)
from ..riskexact import (
    DirichletForm,
    FourierSeries,
    UnresolvedRoot,
    adversarial_risk,
    classification_risk,
    critical_survival,
    find_zero_crossings,
    k_star_bounds,
    lobe_crossings,
    n0_of_q,
    resolve_epsilon,
    risk_bounds,
)
from .records import INPUT_FIELDS, RunRecord, single_line

KINDS = ("n", "q", "d", "phase", "cdf")
DEFAULT_N = (8, 16, 30, 64, 128, 256)
DEFAULT_Q = (0.5, 1.0, 1.25, 1.45, 1.75, 2.0)
DEFAULT_D = (2, 4, 6, 8, 10, 12, 16, 32, 64, 128, 256, 512, 1024, 2048, 4096, 8192)
WORKERS_ENV = "LIFTADV_WORKERS"


@dataclass
class SweepSpec:
    """A sweep: fixed parameters, one varying parameter, and seeds.

    ``kind`` is one of ``n``, ``q``, ``d``, ``phase`` (an ``n x q`` grid; the
    q values live in ``fixed["q_values"]``) or ``cdf``. For ``cdf`` a varying
    value of ``0`` for ``d`` stands for the closed-form Fourier interpolator.
    """

    kind: str
    fixed: dict = field(default_factory=dict)
    varying: tuple = ("n", DEFAULT_N)
    seeds: Sequence[int] = (0,)
    record_timing: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"sweep kind must be one of {KINDS}, got {self.kind!r}")
        name, values = self.varying
        if name in self.fixed:
            raise ValueError(f"{name!r} is both fixed and varying")
        if not list(values):
            raise ValueError("varying values must be nonempty")
        if not list(self.seeds):
            raise ValueError("need at least one seed")

    def cells(self) -> list[dict]:
        name, values = self.varying
        base = {k: v for k, v in self.fixed.items() if k != "q_values"}
        base.setdefault("kind", self.kind)
        out = []
        if self.kind == "phase":
            for v, q, s in itertools.product(values, self.fixed.get("q_values", DEFAULT_Q), self.seeds):
                out.append({**base, name: v, "q": q, "seed": s})
        else:
            for v, s in itertools.product(values, self.seeds):
                out.append({**base, name: v, "seed": s})
        for c in out:
            c["record_timing"] = self.record_timing
        return out


_DEFAULTS = {f.name: f.default for f in fields(RunRecord)}


def _base_record(c: dict) -> RunRecord:
    kw = {k: c.get(k, _DEFAULTS[k]) for k in INPUT_FIELDS}
    if kw["kind"] in ("d", "cdf") and kw["method"] == "exact":
        kw["method"] = "mc"
    if kw["layout"] == "random" and kw["kind"] in ("n", "q", "phase") and "method" not in c:
        kw["method"] = "mc"
    if kw["method"] == "mc":
        kw["n_test"] = kw["n_test"] or 20_000
        kw["inner_grid"] = kw["inner_grid"] or 64
    return RunRecord(**kw)


def _fill_theory(rec: RunRecord, ens, a: float, b: float) -> None:
    rec.B, rec.N_A, rec.a, rec.b = ens.B, float(ens.N_A), float(a), float(b)
    rec.eps = resolve_epsilon(rec.eps_rule, ens.n, ens.B)
    if not math.isfinite(b):
        return
    upper, pos = k_star_bounds(a, b, ens.B, ens.n)
    cb, ab, med = risk_bounds(a, b, ens.B, ens.n)
    rec.k_star_upper, rec.k_star_positive = upper, pos
    rec.bound_classification, rec.bound_adv_small, rec.adv_medium_predicted = cb, ab, med
    if ens.alias_structure:
        rec.critical_a = critical_survival(ens.n, ens.B)
    n0 = n0_of_q(ens.q)
    rec.n0 = math.nan if n0 is None else n0


def _exact_fill(rec: RunRecord, f, n: int) -> None:
    zs = find_zero_crossings(f)
    rec.classification = classification_risk(zs)
    rec.adversarial = adversarial_risk(zs, rec.eps)
    rec.adversarial_2n = adversarial_risk(zs, 2.0 / n)
    rec.classification_stderr = rec.adversarial_stderr = 0.0
    if isinstance(f, DirichletForm):
        cr = lobe_crossings(f)
        rec.k_star = max(cr) if cr else 0


def _mc_fill(rec: RunRecord, f) -> McConfig:
    cfg = McConfig(n_test=rec.n_test, inner_grid=rec.inner_grid, seed=rec.seed)
    rec.classification, rec.classification_stderr = mc_classification_risk(f, cfg)
    rec.adversarial, rec.adversarial_stderr = mc_adversarial_risk(f, rec.eps, cfg)
    return cfg


def _cell_ensemble(rec: RunRecord):
    ens = build_ensemble(rec.n, rec.p, rec.q, rec.B_override)
    ts = make_training_set(rec.n, rec.layout, rec.seed if rec.layout == "random" else None)
    return ens, ts


def _run_ensemble_cell(rec: RunRecord) -> None:
    ens, ts = _cell_ensemble(rec)
    cv = fit(ens, ts)
    b = cv.b if cv.b is not None else math.nan
    _fill_theory(rec, ens, cv.a, b)
    if ts.layout == "grid" and cv.b_consistent:
        f = DirichletForm(cv.a, cv.b, ens.N_A, ens.n)
    else:
        f = FourierSeries(cv.alpha, n=ens.n)
    rec.regression_mse = regression_mse(cv.alpha)
    if rec.method == "exact":
        _exact_fill(rec, f, ens.n)
    else:
        _mc_fill(rec, f)
        rec.adversarial_2n = mc_adversarial_risk(
            f, 2.0 / ens.n, McConfig(n_test=rec.n_test, inner_grid=rec.inner_grid, seed=rec.seed))[0]


def _fourier_reference(ens):
    cf = closed_form_coeffs(ens)
    return cf, DirichletForm(cf.a, cf.b, ens.N_A, ens.n)


def _run_d_cell(rec: RunRecord) -> None:
    ens, ts = _cell_ensemble(rec)
    cf, fref = _fourier_reference(ens)
    _fill_theory(rec, ens, cf.a, cf.b)
    zs = find_zero_crossings(fref)
    rec.classification_fourier = classification_risk(zs)
    rec.adversarial_fourier = adversarial_risk(zs, rec.eps)
    sol = solve_rfs(ens, ts, rec.d, rec.seed)
    rec.least_squares = sol.least_squares
    f = FourierSeries(sol.alpha_eff, n=ens.n)
    _mc_fill(rec, f)
    rec.regression_mse = regression_mse(sol.alpha_eff)
    rec.alpha_err = float(np.linalg.norm(sol.alpha_eff - cf.alpha))
    st = alias_statistics(sol.alpha_eff, ens.n, ens.B)
    rec.avg_alias_weight = st.avg_alias_weight
    rec.alias_p30, rec.alias_p70 = st.alias_spread
    rec.non_alias_energy = st.non_alias_energy


def _cdf_string(cdf) -> str:
    return ";".join(f"{t!r}:{v!r}" for t, v in cdf.cdf)


def _run_cdf_cell(rec: RunRecord) -> None:
    ens, ts = _cell_ensemble(rec)
    cf, fref = _fourier_reference(ens)
    _fill_theory(rec, ens, cf.a, cf.b)
    cfg = McConfig(n_test=rec.n_test, inner_grid=rec.inner_grid, seed=rec.seed)
    ref = misclassified_distance_cdf(fref, ts, cfg)
    if not rec.d:
        f, cdf = fref, ref
    else:
        sol = solve_rfs(ens, ts, rec.d, rec.seed)
        rec.least_squares = sol.least_squares
        f = FourierSeries(sol.alpha_eff, n=ens.n)
        cdf = misclassified_distance_cdf(f, ts, cfg)
    rec.cdf = _cdf_string(cdf)
    rec.ks_to_fourier = ks_distance(cdf, ref) if rec.d else 0.0
    d = cdf.distances
    rec.within_half = float(np.mean(d <= 0.5)) if len(d) else math.nan
    rec.classification, rec.classification_stderr = mc_classification_risk(f, cfg)


def run_cell(c: dict) -> RunRecord:
    """Evaluate one sweep cell; failures are recorded on the row, never raised."""
    rec = _base_record(c)
    t0 = time.perf_counter()
    try:
        if rec.kind in ("n", "q", "phase"):
            _run_ensemble_cell(rec)
        elif rec.kind == "d":
            _run_d_cell(rec)
        elif rec.kind == "cdf":
            _run_cdf_cell(rec)
        else:
            raise ValueError(f"unknown sweep kind {rec.kind!r}")
    except (GramSingular, UnresolvedRoot, np.linalg.LinAlgError, FloatingPointError, ValueError) as exc:
        rec.status = "failed"
        rec.error = single_line(f"{type(exc).__name__}: {exc}")
    if c.get("record_timing"):
        rec.wall_time = time.perf_counter() - t0
    return rec


def rerun(rec: RunRecord) -> RunRecord:
    """Recompute a record from its own input fields."""
    return run_cell({k: getattr(rec, k) for k in INPUT_FIELDS})


def default_workers() -> int:
    return max(1, int(os.environ.get(WORKERS_ENV, "1")))


def run_sweep(spec: SweepSpec, workers: Optional[int] = None) -> list[RunRecord]:
    """All cells of ``spec`` in cell order; the result does not depend on ``workers``."""
    cells = spec.cells()
    workers = default_workers() if workers is None else workers
    if workers <= 1 or len(cells) == 1:
        return [run_cell(c) for c in cells]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(run_cell, cells))


def sweep_over_n(p: float = 2.0, q: float = 1.45, ns=DEFAULT_N, layout: str = "grid",
                 eps_rule: str = "1/n", seeds=(0,), workers=None, **extra) -> list[RunRecord]:
    fixed = {"p": p, "q": q, "layout": layout, "eps_rule": eps_rule, **extra}
    return run_sweep(SweepSpec("n", fixed, ("n", tuple(ns)), tuple(seeds)), workers)


def sweep_over_q(n: int = 64, p: float = 2.0, qs=DEFAULT_Q, eps_rule: str = "1/n", seeds=(0,),
                 workers=None, **extra) -> list[RunRecord]:
    fixed = {"n": n, "p": p, "eps_rule": eps_rule, **extra}
    return run_sweep(SweepSpec("q", fixed, ("q", tuple(qs)), tuple(seeds)), workers)


def sweep_phase(p: float = 2.0, ns=DEFAULT_N, qs=DEFAULT_Q, eps_rule: str = "2pi/h", workers=None,
                **extra) -> list[RunRecord]:
    fixed = {"p": p, "eps_rule": eps_rule, "q_values": tuple(qs), **extra}
    return run_sweep(SweepSpec("phase", fixed, ("n", tuple(ns)), (0,)), workers)


def sweep_over_d(n: int = 8, p: float = 2.0, q: float = 1.45, ds=DEFAULT_D, seeds=tuple(range(20)),
                 eps_rule: str = "1/n", n_test: int = 20_000, workers=None, **extra) -> list[RunRecord]:
    fixed = {"n": n, "p": p, "q": q, "eps_rule": eps_rule, "n_test": n_test, "method": "mc", **extra}
    return run_sweep(SweepSpec("d", fixed, ("d", tuple(ds)), tuple(seeds)), workers)


def sweep_cdf(n: int = 30, p: float = 2.0, q: float = 1.45, ds=(0, 60, 8192), seeds=(0,),
              n_test: int = 100_000, workers=None, **extra) -> list[RunRecord]:
    fixed = {"n": n, "p": p, "q": q, "n_test": n_test, "method": "mc", **extra}
    return run_sweep(SweepSpec("cdf", fixed, ("d", tuple(ds)), tuple(seeds)), workers)
