import math
from importlib import resources

import numpy as np
import pytest

from mrlsmooth import simulation as sim
from mrlsmooth.distributions import AbsNormal, Exponential, Gamma, Uniform
from mrlsmooth.estimators import CurveEstimate, EstimatorSpec, Sample, evaluate_curve
from mrlsmooth.simulation import (
    ConfigError,
    EstimatorTemplate,
    SimulationConfig,
    SimulationError,
    bias_profile,
    default_ise_range,
    ise,
    normality_diagnostic,
    parse_config,
    run_mc,
    sample_distribution,
    sup_errors,
    true_mrl,
)
from mrlsmooth.transform import make_exp_transform

from oracles import midpoint


def test_sample_distribution():
    a = sample_distribution(Uniform(0, 1), 5, np.random.default_rng(9))
    b = sample_distribution(Uniform(0, 1), 5, np.random.default_rng(9))
    np.testing.assert_array_equal(a.values, b.values)
    x = sample_distribution(Exponential(1), 100_000, np.random.default_rng(1))
    assert abs(x.mean - 1.0) < 3 / math.sqrt(100_000)
    assert np.all(sample_distribution(AbsNormal(), 1000, np.random.default_rng(2)).values > 0)
    with pytest.raises(ValueError):
        sample_distribution(Uniform(0, 1), 0, np.random.default_rng(0))


def test_true_mrl():
    assert true_mrl(Exponential(2.0), 0.7) == pytest.approx(0.5)
    assert true_mrl(Uniform(0, 1), 0.2) == pytest.approx(0.4)
    d = Gamma(2, 3)
    t = d.mean
    ref = midpoint(d.sf, t, t + 40 * d.std) / float(d.sf(t))
    assert true_mrl(d, t) == pytest.approx(ref, rel=1e-9)
    with pytest.raises(ValueError):
        true_mrl(d, -1.0)


def _curve(grid, mrl, flags=None):
    flags = np.full(grid.size, "ok", dtype=object) if flags is None else flags
    return CurveEstimate(grid, np.ones_like(grid), mrl, mrl, flags)


def test_ise_examples():
    d = Exponential(1)
    grid = np.linspace(0.01, 5, 400)
    assert ise(_curve(grid, d.mrl(grid)), d, (0.01, 5)) == 0.0
    assert ise(_curve(grid, np.zeros_like(grid)), d, (0.01, 5)) == pytest.approx(4.99)
    flags = np.full(grid.size, "tail-degenerate", dtype=object)
    assert ise(_curve(grid, np.full(grid.size, 7.0), flags), d, (0.01, 5)) == pytest.approx(4.99)


def test_ise_grid_refinement():
    d = Gamma(2, 3)
    s = Sample(d.sample(np.random.default_rng(5), 50))
    spec = EstimatorSpec("transformed2", "epanechnikov", make_exp_transform(0.0), 0.4)
    rng_ = default_ise_range(d)
    coarse = ise(evaluate_curve(spec, s, np.linspace(*rng_, 201)), d, rng_)
    fine = ise(evaluate_curve(spec, s, np.linspace(*rng_, 401)), d, rng_)
    assert abs(coarse - fine) < 0.01 * fine


def test_ise_rejects_invalid_points():
    grid = np.linspace(0.1, 1, 5)
    with pytest.raises(FloatingPointError):
        ise(_curve(grid, np.array([1, 1, np.nan, 1, 1.0])), Exponential(1), (0.1, 1))


def test_default_ranges():
    lo, hi = default_ise_range(Uniform(0, 1))
    assert (lo, hi) == pytest.approx((0.001, 0.999))
    cfg = SimulationConfig(Uniform(0, 1), 10, 1)
    assert cfg.ase_points == pytest.approx((0.001, 0.5, 0.999))
    g = Gamma(2, 3)
    assert default_ise_range(g)[1] == pytest.approx(6 + 3 * math.sqrt(18))


def _small(dist=Gamma(2, 3), **kw):
    kw.setdefault("n", 30)
    kw.setdefault("reps", 8)
    kw.setdefault("seed", 11)
    kw.setdefault("grid_points", 60)
    return SimulationConfig(dist, **kw)


def test_run_mc_deterministic_and_nonnegative():
    a = run_mc(_small())
    b = run_mc(_small())
    for label in a.aise:
        assert a.aise[label] == b.aise[label]
        assert a.aise[label].value >= 0 and math.isfinite(a.aise[label].value)
        for t, st in a.ase[label].items():
            assert st == b.ase[label][t]
            assert st.value >= 0 and st.se >= 0
    assert set(a.aise) == {"empirical", "naive", "transformed1", "transformed2"}
    assert len(a.rows()) == 4 * 4


def test_run_mc_workers_do_not_change_results():
    a = run_mc(_small(reps=6))
    b = run_mc(_small(reps=6, workers=2))
    for label in a.aise:
        assert a.aise[label] == b.aise[label]


def test_single_replication_report():
    cfg = _small(reps=1)
    rep = run_mc(cfg)
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    s = sample_distribution(cfg.distribution, cfg.n, rng)
    spec = EstimatorSpec("empirical")
    curve = evaluate_curve(spec, s, cfg.grid)
    assert rep.aise["empirical"].value == pytest.approx(ise(curve, cfg.distribution, cfg.ise_range))
    assert rep.aise["empirical"].se == 0.0
    t0 = cfg.ase_points[0]
    direct = (evaluate_curve(spec, s, [t0]).mrl[0] - true_mrl(cfg.distribution, t0)) ** 2
    assert rep.ase["empirical"][t0].value == pytest.approx(direct)


def test_boundary_point_equality():
    rep = run_mc(_small(reps=40))
    t0 = rep.config.ase_points[0]
    emp, t2 = rep.ase["empirical"][t0], rep.ase["transformed2"][t0]
    assert abs(emp.value - t2.value) < 2 * math.hypot(emp.se, t2.se)


def test_failure_rate_limit(monkeypatch):
    calls = {"n": 0}
    real = sim.evaluate_curve

    def flaky(spec, sample, grid):
        if spec.method == "naive":
            calls["n"] += 1
            raise FloatingPointError("injected")
        return real(spec, sample, grid)

    monkeypatch.setattr(sim, "evaluate_curve", flaky)
    with pytest.raises(SimulationError, match="naive"):
        run_mc(_small(reps=5))
    assert calls["n"] == 5


def test_fixed_bandwidth_templates():
    tpl = (EstimatorTemplate("transformed2", bandwidth=0.3), EstimatorTemplate("naive", "gaussian", bandwidth=1.0))
    rep = run_mc(_small(estimators=tpl))
    assert set(rep.aise) == {"transformed2", "naive"}


def test_config_validation():
    with pytest.raises(ValueError):
        SimulationConfig(Gamma(2, 3), 10, 0)
    with pytest.raises(ValueError):
        SimulationConfig(Gamma(2, 3), 0, 5)
    with pytest.raises(ValueError):
        SimulationConfig(Uniform(0, 1), 10, 5, ise_range=(0.0, 0.5))
    with pytest.raises(ValueError):
        SimulationConfig(Gamma(2, 3), 10, 5, estimators=(EstimatorTemplate("naive"), EstimatorTemplate("naive")))
    with pytest.raises(ValueError):
        EstimatorTemplate("naive", bandwidth=-1.0)
    with pytest.raises(ValueError):
        EstimatorTemplate("naive", bandwidth="plugin")


def test_bias_profile():
    prof = bias_profile(_small(AbsNormal(), reps=20), np.array([0.01, 0.5, 1.0]))
    assert prof.grid.size == 3
    for label in prof.bias:
        assert prof.bias[label].shape == (3,) and np.all(prof.se[label] >= 0)
    with pytest.raises(ValueError):
        bias_profile(_small(), np.array([-1.0]))


def test_sup_errors():
    out = sup_errors(_small(Exponential(1), reps=5), np.linspace(0.1, 3, 20))
    assert all(v.shape == (5,) and np.all(v >= 0) for v in out.values())


def test_normality_preconditions():
    with pytest.raises(ValueError, match="1000"):
        normality_diagnostic(_small(reps=10), 1.0)


def test_normality_small_n_reports():
    cfg = SimulationConfig(Exponential(1), 20, 1000, estimators=(EstimatorTemplate("transformed2"),), seed=3)
    res = normality_diagnostic(cfg, 1.0)
    assert all(math.isfinite(v) for v in res)


# -- config files -----------------------------------------------------------------

def test_parse_config():
    mode, cfgs = parse_config(
        """
        # comment
        distributions = gamma(2,3); uniform(0,1)
        n = 40
        reps = 10   # trailing comment
        estimators = empirical, transformed2
        bandwidth = 0.25
        kernel = gaussian
        """
    )
    assert mode == "aise"
    assert [str(c.distribution) for c in cfgs] == ["gamma(2,3)", "uniform(0,1)"]
    assert cfgs[0].n == 40 and cfgs[0].reps == 10
    assert [e.method for e in cfgs[0].estimators] == ["empirical", "transformed2"]
    assert cfgs[1].estimators[1].bandwidth == 0.25
    assert cfgs[1].estimators[1].kernel == "gaussian"


@pytest.mark.parametrize(
    "text, msg",
    [
        ("", "empty"),
        ("n = 5\nreps = 2\n", "missing required key 'distribution'"),
        ("distribution = gamma(2,3)\nn = five\nreps = 2", ":2: bad value for 'n'"),
        ("distribution = gamma(2,3)\nn = 5\nreps = 2\ncolour = red", ":4: unknown key"),
        ("distribution = gamma(2,3)\nn 5", ":2: expected 'key = value'"),
        ("distribution = gamma(2,3)\nn = 5\nreps = 2\nestimators = naive, kaplan", ":4: unknown method"),
        ("distribution = gamma(2,3)\nn = 5\nn = 6\nreps = 2", ":3: duplicate key"),
        ("distribution = cauchy\nn = 5\nreps = 2", ":1: bad value"),
        ("distribution = gamma(2,3)\nn = 5\nreps = 0", "reps must be at least 1"),
    ],
)
def test_parse_config_errors(text, msg):
    with pytest.raises(ConfigError, match=msg):
        parse_config(text, "x.cfg")


@pytest.mark.parametrize("name, mode, count", [("table1_desk.cfg", "aise", 5), ("figure2_bias.cfg", "bias", 2)])
def test_shipped_configs(name, mode, count):
    text = resources.files("mrlsmooth").joinpath("configs", name).read_text()
    got_mode, cfgs = parse_config(text, name)
    assert got_mode == mode and len(cfgs) == count
    assert all(c.n == 50 for c in cfgs)


@pytest.mark.slow
def test_bias_profile_boundary_behaviour():
    t = np.array([0.01])
    absn = bias_profile(SimulationConfig(AbsNormal(), 50, 500, seed=21), t)
    assert abs(absn.bias["transformed2"][0]) < 3 * absn.se["transformed2"][0]
    expo = bias_profile(SimulationConfig(Exponential(0.5), 50, 500, seed=22), t)
    naive, t2 = expo.bias["naive"][0], expo.bias["transformed2"][0]
    diff_se = math.hypot(expo.se["naive"][0], expo.se["transformed2"][0])
    assert abs(naive) - abs(t2) > 2 * diff_se
