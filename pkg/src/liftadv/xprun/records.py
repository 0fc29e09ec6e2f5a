"""Run records and their CSV / JSON / SVG serializations."""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import re
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np

from .. import __version__


@dataclass
class RunRecord:
    """One sweep cell: its inputs, derived quantities, metrics and status.

    The input fields (``kind`` through ``inner_grid``) are enough to re-run
    the cell with :func:`liftadv.xprun.sweeps.rerun`.
    """

    kind: str = ""
    n: int = 0
    p: float = 2.0
    q: float = 0.0
    B_override: Optional[int] = None
    layout: str = "grid"
    seed: int = 0
    eps_rule: str = "1/n"
    d: Optional[int] = None
    method: str = "exact"
    n_test: int = 0
    inner_grid: int = 0
    # derived
    B: int = 0
    N_A: float = math.nan
    a: float = math.nan
    b: float = math.nan
    eps: float = math.nan
    k_star: Optional[int] = None
    k_star_upper: float = math.nan
    k_star_positive: Optional[bool] = None
    bound_classification: float = math.nan
    bound_adv_small: float = math.nan
    adv_medium_predicted: Optional[int] = None
    critical_a: float = math.nan
    n0: float = math.nan
    # metrics
    classification: float = math.nan
    classification_stderr: float = math.nan
    adversarial: float = math.nan
    adversarial_stderr: float = math.nan
    adversarial_2n: float = math.nan
    classification_fourier: float = math.nan
    adversarial_fourier: float = math.nan
    regression_mse: float = math.nan
    alpha_err: float = math.nan
    avg_alias_weight: float = math.nan
    alias_p30: float = math.nan
    alias_p70: float = math.nan
    non_alias_energy: float = math.nan
    least_squares: Optional[bool] = None
    ks_to_fourier: float = math.nan
    within_half: float = math.nan
    cdf: str = ""
    # bookkeeping
    status: str = "ok"
    error: str = ""
    wall_time: float = 0.0
    version: str = __version__

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


INPUT_FIELDS = ("kind", "n", "p", "q", "B_override", "layout", "seed", "eps_rule", "d",
                "method", "n_test", "inner_grid")


def column_names() -> list[str]:
    return sorted(f.name for f in fields(RunRecord))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    return str(v)


_TYPES = {f.name: f.type for f in fields(RunRecord)}


def _parse(name: str, s: str):
    t = str(_TYPES[name])
    optional = t.startswith("Optional")
    if s == "":
        if optional:
            return None
        if t == "str":
            return ""
    if "bool" in t:
        return s == "true"
    if "int" in t:
        return int(s)
    if "float" in t:
        return float(s)
    return s


def single_line(text: str) -> str:
    """Collapse whitespace and drop control characters so a string fits one CSV cell."""
    return " ".join("".join(ch if ch.isprintable() else " " for ch in text).split())


def to_csv(records: Sequence[RunRecord]) -> str:
    """Sorted-header CSV; text fields must be single-line printable (see :func:`single_line`)."""
    cols = column_names()
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for r in records:
        d = r.to_dict()
        for k, v in d.items():
            if isinstance(v, str) and not v.isprintable():
                raise ValueError(f"field {k!r} holds non-printable text: {v!r}")
        w.writerow([_fmt(d[c]) for c in cols])
    return buf.getvalue()


def from_csv(text: str) -> list[RunRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        return []
    header = rows[0]
    return [RunRecord(**{c: _parse(c, v) for c, v in zip(header, row)}) for row in rows[1:]]


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    return v


def to_json(records: Sequence[RunRecord]) -> str:
    out = [{k: _json_safe(v) for k, v in sorted(r.to_dict().items())} for r in records]
    return json.dumps(out, indent=1) + "\n"


def from_json(text: str) -> list[RunRecord]:
    recs = []
    for d in json.loads(text):
        for k, v in d.items():
            if isinstance(v, str) and v in ("nan", "inf", "-inf") and "float" in str(_TYPES[k]):
                d[k] = float(v)
        recs.append(RunRecord(**d))
    return recs


# --------------------------------------------------------------------------
# SVG line plots
# --------------------------------------------------------------------------

def _is_log_spaced(xs: np.ndarray) -> bool:
    xs = np.asarray(sorted(set(xs)), dtype=float)
    if len(xs) < 3 or np.any(xs <= 0):
        return False
    r = xs[1:] / xs[:-1]
    return bool(r.max() / r.min() < 1.5 and r.min() > 1.5)


def aggregate(records: Sequence[RunRecord], x: str, metric: str) -> tuple[np.ndarray, np.ndarray]:
    """Median of ``metric`` over seeds at each value of ``x`` (failed rows skipped)."""
    groups: dict = {}
    for r in records:
        xv, yv = getattr(r, x), getattr(r, metric)
        if r.status != "ok" or xv is None or yv is None or not math.isfinite(float(yv)):
            continue
        groups.setdefault(float(xv), []).append(float(yv))
    xs = np.array(sorted(groups))
    ys = np.array([np.median(groups[k]) for k in xs])
    return xs, ys


def to_svg(records: Sequence[RunRecord], x: str, metrics: Sequence[str],
           width: int = 480, height: int = 320) -> str:
    """Self-contained SVG with one polyline per seed-aggregated metric."""
    series = [(m, *aggregate(records, x, m)) for m in metrics]
    series = [s for s in series if len(s[1])]
    allx = np.concatenate([s[1] for s in series]) if series else np.array([1.0])
    ally = np.concatenate([s[2] for s in series]) if series else np.array([0.0])
    logx = _is_log_spaced(allx)
    tx = np.log10 if logx else (lambda v: np.asarray(v, dtype=float))
    x0, x1 = float(tx(allx).min()), float(tx(allx).max())
    y0, y1 = float(min(0.0, ally.min())), float(max(1e-12, ally.max()))
    if x1 == x0:
        x1 = x0 + 1.0
    pad = 40
    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
             f'data-x="{x}" data-logx="{str(logx).lower()}">',
             f'<rect x="{pad}" y="{pad // 2}" width="{width - 1.5 * pad:g}" height="{height - 1.5 * pad:g}" '
             'fill="none" stroke="#888"/>']
    for i, (m, xs, ys) in enumerate(series):
        px = pad + (tx(xs) - x0) / (x1 - x0) * (width - 1.5 * pad)
        py = height - pad - (ys - y0) / (y1 - y0) * (height - 1.5 * pad)
        pts = " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px, py))
        raw = " ".join(f"{repr(float(a))}:{repr(float(b))}" for a, b in zip(xs, ys))
        parts.append(f'<polyline data-metric="{m}" data-values="{raw}" points="{pts}" fill="none" '
                     f'stroke="{colors[i % len(colors)]}"/>')
        parts.append(f'<text x="{width - pad}" y="{pad + 14 * i}" font-size="11" text-anchor="end" '
                     f'fill="{colors[i % len(colors)]}">{m}</text>')
    parts.append(f'<text x="{width / 2:g}" y="{height - 6}" font-size="11" text-anchor="middle">'
                 f'{x}{" (log)" if logx else ""}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def parse_svg(text: str) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    out = {}
    for m, raw in re.findall(r'<polyline data-metric="([^"]+)" data-values="([^"]*)"', text):
        pairs = [p.split(":") for p in raw.split()]
        out[m] = (np.array([float(a) for a, _ in pairs]), np.array([float(b) for _, b in pairs]))
    return out


def emit(records: Sequence[RunRecord], fmt: str, path, x: Optional[str] = None,
         metrics: Iterable[str] = ("classification", "adversarial")) -> Path:
    if not records:
        raise ValueError("nothing to emit: empty table")
    if fmt == "csv":
        text = to_csv(records)
    elif fmt == "json":
        text = to_json(records)
    elif fmt == "svg":
        text = to_svg(records, x or _guess_x(records), list(metrics))
    else:
        raise ValueError(f"unknown format {fmt!r}")
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"could not write {path}: {exc}") from exc
    return path


def _guess_x(records: Sequence[RunRecord]) -> str:
    kind = records[0].kind
    return {"n": "n", "q": "q", "d": "d", "cdf": "d", "phase": "n"}.get(kind, "n")


def load(path) -> list[RunRecord]:
    path = Path(path)
    text = path.read_text()
    if path.suffix == ".json":
        return from_json(text)
    return from_csv(text)
