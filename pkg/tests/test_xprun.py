import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from liftadv.featurelift import build_ensemble
from liftadv.interpolate import closed_form_ab
from liftadv.riskexact import critical_survival
from liftadv.xprun import (
    RunRecord,
    SweepSpec,
    from_csv,
    from_json,
    parse_svg,
    rerun,
    run_sweep,
    sweep_over_d,
    sweep_over_n,
    to_csv,
    to_json,
    to_svg,
)
from liftadv.xprun.cli import main
from liftadv.xprun.config import parse_config
from liftadv.xprun.records import column_names, emit, load


def same(a: RunRecord, b: RunRecord) -> bool:
    for k, v in a.to_dict().items():
        w = getattr(b, k)
        if isinstance(v, float) and math.isnan(v):
            if not (isinstance(w, float) and math.isnan(w)):
                return False
        elif v != w:
            return False
    return True


@pytest.fixture(scope="module")
def small_n_sweep():
    return sweep_over_n(q=1.45, ns=(8, 16, 30), eps_rule="2/n")


# -- config -------------------------------------------------------------------------

def test_parse_config():
    cfg = parse_config("""
    # comment
    n = 30
    q = 1.45   # trailing
    layout = random
    ds = 8, 16,32
    flag = true
    B-override = none
    """)
    assert cfg == {"n": 30, "q": 1.45, "layout": "random", "ds": (8, 16, 32), "flag": True,
                   "B_override": None}
    with pytest.raises(ValueError):
        parse_config("just words")


# -- sweep specs ----------------------------------------------------------------------------

def test_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec("n", {"n": 8}, ("n", (8, 16)))
    with pytest.raises(ValueError):
        SweepSpec("n", {}, ("n", (8,)), seeds=())
    with pytest.raises(ValueError):
        SweepSpec("warp", {}, ("n", (8,)))
    spec = SweepSpec("d", {"n": 8}, ("d", (4, 8, 16)), seeds=(0, 1))
    assert len(spec.cells()) == 6


# -- serialization ------------------------------------------------------------------------

def test_csv_header_sorted(small_n_sweep):
    text = to_csv(small_n_sweep)
    assert text.splitlines()[0].split(",") == sorted(column_names())


def test_csv_round_trip(small_n_sweep):
    text = to_csv(small_n_sweep)
    back = from_csv(text)
    assert len(back) == len(small_n_sweep)
    assert all(same(a, b) for a, b in zip(small_n_sweep, back))
    assert to_csv(back) == text


finite = st.floats(allow_nan=True, allow_infinity=True)


@settings(max_examples=50)
@given(a=finite, b=finite, n=st.integers(0, 10 ** 6), k=st.one_of(st.none(), st.integers(0, 50)),
       pos=st.one_of(st.none(), st.booleans()),
       err=st.text(st.characters(whitelist_categories=("L", "N", "P", "S"), whitelist_characters=' ,"'),
                   max_size=20))
def test_csv_and_json_round_trip_arbitrary(a, b, n, k, pos, err):
    rec = RunRecord(kind="n", n=n, a=a, b=b, k_star=k, k_star_positive=pos, error=err)
    assert same(from_csv(to_csv([rec]))[0], rec)
    assert same(from_json(to_json([rec]))[0], rec)


def test_csv_rejects_multiline_text():
    with pytest.raises(ValueError):
        to_csv([RunRecord(error="line one\nline two")])


def test_byte_identical_reruns(small_n_sweep):
    again = sweep_over_n(q=1.45, ns=(8, 16, 30), eps_rule="2/n")
    assert to_csv(again) == to_csv(small_n_sweep)


def test_svg_structure(small_n_sweep, tmp_path):
    metrics = ["classification", "adversarial", "a"]
    svg = to_svg(small_n_sweep, "n", metrics)
    assert svg.count("<polyline") == 3
    parsed = parse_svg(svg)
    xs, ys = parsed["a"]
    np.testing.assert_array_equal(xs, [8.0, 16.0, 30.0])
    np.testing.assert_array_equal(ys, [r.a for r in small_n_sweep])
    path = emit(small_n_sweep, "svg", tmp_path / "plot.svg", x="n", metrics=metrics)
    assert path.read_text() == svg


def test_svg_log_axis():
    recs = [RunRecord(kind="d", d=d, classification=0.1, status="ok") for d in (16, 64, 256, 1024)]
    assert 'data-logx="true"' in to_svg(recs, "d", ["classification"])
    recs = [RunRecord(kind="q", q=q, classification=0.1) for q in (0.5, 1.0, 1.5, 2.0)]
    assert 'data-logx="false"' in to_svg(recs, "q", ["classification"])


def test_emit_and_load(small_n_sweep, tmp_path):
    p = emit(small_n_sweep, "json", tmp_path / "t.json")
    assert all(same(a, b) for a, b in zip(load(p), small_n_sweep))
    with pytest.raises(ValueError):
        emit([], "csv", tmp_path / "x.csv")


# -- sweeps -------------------------------------------------------------------------------

def test_failed_rows_are_kept():
    recs = sweep_over_n(q=1.45, ns=(8, 16), B_override=70)
    assert len(recs) == 2
    assert all(r.status == "failed" and "odd" in r.error for r in recs)


def test_records_rerun_bit_for_bit(small_n_sweep):
    for r in small_n_sweep:
        assert same(rerun(r), r)
    mc = sweep_over_d(n=8, ds=(32,), seeds=(3,), n_test=5000)[0]
    assert mc.method == "mc" and same(rerun(mc), mc)


def test_worker_independence():
    spec = SweepSpec("d", {"n": 8, "p": 2.0, "q": 1.45, "n_test": 4000}, ("d", (4, 8, 64)), seeds=(0, 1))
    assert to_csv(run_sweep(spec, workers=1)) == to_csv(run_sweep(spec, workers=2))


def test_transition_tracks_critical_survival():
    ns = tuple(range(6, 41, 2))
    recs = sweep_over_n(q=1.45, ns=ns, eps_rule="1/n")
    first_attack = next(r.n for r in recs if r.adversarial == 1.0)
    first_below = next(r.n for r in recs if r.a < r.critical_a)
    assert abs(ns.index(first_attack) - ns.index(first_below)) <= 1
    for r in recs:
        assert r.adversarial in (0.0, 1.0)


def test_q_below_one_vanishes():
    recs = sweep_over_n(q=0.5, ns=(64, 128), eps_rule="2/n")
    assert all(r.classification == 0.0 and r.adversarial == 0.0 for r in recs)


def test_sweep_d_fields():
    recs = sweep_over_d(n=8, ds=(4, 8, 256), seeds=(0,), n_test=4000)
    assert len(recs) == 3
    assert recs[0].least_squares is True
    big = recs[-1]
    assert big.status == "ok" and big.alpha_err > 0 and big.non_alias_energy > 0
    assert big.classification_fourier == 0.0


# -- CLI ------------------------------------------------------------------------------------

def test_cli_exit_codes(tmp_path, capsys):
    assert main(["coeffs", "--n", "8", "--q", "1.45"]) == 0
    assert main(["risk", "--n", "16", "--q", "1.45", "--eps", "2pi/h"]) == 0
    assert main(["risk", "--n", "1"]) == 2
    assert main(["risk", "--eps", "wide"]) == 2
    assert main(["nonsense"]) == 2
    # 65 features at 64 random points: the Gram matrix is numerically singular
    assert main(["coeffs", "--n", "64", "--layout", "random", "--B-override", "65"]) == 3


def test_cli_sweep_config_and_emit(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text("ns = 8, 16\nq = 2.0\neps = 2/n\n")
    out = tmp_path / "sweep.csv"
    assert main(["sweep-n", "--config", str(cfg), "--out", str(out)]) == 0
    recs = load(out)
    assert [r.n for r in recs] == [8, 16] and all(r.q == 2.0 for r in recs)
    assert all(r.adversarial == 1.0 for r in recs)
    svg = tmp_path / "sweep.svg"
    assert main(["emit", str(out), "--format", "svg", "--out", str(svg)]) == 0
    assert svg.read_text().count("<polyline") == 2
    bad = tmp_path / "bad.cfg"
    bad.write_text("warp = 9\n")
    assert main(["sweep-n", "--config", str(bad)]) == 2


def test_cli_validate(tmp_path):
    rep = tmp_path / "report.json"
    assert main(["validate", "--quiet", "--out", str(rep)]) == 0
    assert '"passed": true' in rep.read_text()
