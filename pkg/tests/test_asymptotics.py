import math

import numpy as np
import pytest

from mrlsmooth import _backend
from mrlsmooth.asymptotics import ESTIMATOR_KINDS, b2_from_b1, eval_b, theoretical_bias_variance
from mrlsmooth.distributions import AbsNormal, Beta, Exponential, Gamma, Uniform, Weibull
from mrlsmooth.kernel import EPANECHNIKOV, GAUSSIAN
from mrlsmooth.transform import EXP, make_exp_transform, make_probit_transform

LOG = make_exp_transform(0.0)
PROBIT = make_probit_transform(0.0, 1.0)
PAIRS = [
    (Uniform(0, 1), PROBIT),
    (Beta(3, 2), PROBIT),
    (Gamma(2, 3), LOG),
    (Weibull(3, 2), LOG),
    (AbsNormal(1), LOG),
    (Exponential(1), LOG),
]


@pytest.mark.parametrize("t", [0.3, 1.0, 2.5])
def test_exponential_closed_forms(t):
    b = eval_b(Exponential(1), LOG, t)
    assert b.b1 == pytest.approx(t * math.exp(-t) * (1 - t), abs=1e-14)
    assert b.b3 == pytest.approx(t * math.exp(-t) * (t - 1), abs=1e-14)
    # b2 = t^2 e^{-t} + int_t^inf u e^{-u} du
    assert b.b2 == pytest.approx(t * t * math.exp(-t) + (t + 1) * math.exp(-t), rel=1e-10)


def test_b1_b3_vanish_at_one():
    b = eval_b(Exponential(1), LOG, 1.0)
    assert abs(b.b1) < 1e-15 and abs(b.b3) < 1e-15


@pytest.mark.parametrize("dist, tr", PAIRS, ids=lambda p: repr(p))
def test_b2_two_routes_agree(dist, tr):
    hi = min(dist.support.upper, dist.mean + 3 * dist.std)
    for t in np.linspace(dist.support.lower + 0.02 * hi, 0.98 * hi, 7):
        assert eval_b(dist, tr, t).b2 == pytest.approx(b2_from_b1(dist, tr, t), abs=1e-7)


@pytest.mark.parametrize("dist, tr", PAIRS, ids=lambda p: repr(p))
def test_mrl_variance_nonnegative(dist, tr):
    hi = min(dist.support.upper, dist.mean + 3 * dist.std)
    for t in np.linspace(dist.support.lower + 0.01 * hi, 0.99 * hi, 15):
        assert eval_b(dist, tr, t).b4 >= 0
        m = theoretical_bias_variance(dist, tr, EPANECHNIKOV, 0.01, 500, t, "mrl2")
        assert m.variance > 0


def test_survival_variance_vanishes_at_boundary():
    m = theoretical_bias_variance(Exponential(1), LOG, EPANECHNIKOV, 0.3, 100, 1e-9, "survival1")
    assert abs(m.variance) < 1e-9


def test_bias_formula_shapes():
    d = Gamma(2, 3)
    b = eval_b(d, LOG, 4.0)
    h, n = 0.3, 200
    mu2, rho = EPANECHNIKOV.mu2, EPANECHNIKOV.rho
    s, m = float(d.sf(4.0)), float(d.mrl(4.0))
    got = {k: theoretical_bias_variance(d, LOG, EPANECHNIKOV, h, n, 4.0, k) for k in ESTIMATOR_KINDS}
    assert got["survival1"].bias == pytest.approx(-0.5 * h * h * b.b1 * mu2)
    assert got["cum_survival1"].bias == pytest.approx(0.5 * h * h * b.b2 * mu2)
    assert got["cum_survival2"].bias == pytest.approx(0.5 * h * h * b.b3 * mu2)
    assert got["mrl2"].bias == pytest.approx(0.5 * h * h / s * (b.b3 + m * b.b1) * mu2)
    assert got["mrl1"].variance == pytest.approx(b.b4 / (n * s * s) - h / n * b.b5 / (s * s) * rho)
    assert got["survival1"].covariance == pytest.approx(float(d.cum_sf(4.0)) * float(d.cdf(4.0)) / n)
    with pytest.raises(ValueError):
        theoretical_bias_variance(d, LOG, GAUSSIAN, h, n, 4.0, "mrl3")
    with pytest.raises(ValueError):
        eval_b(d, LOG, -1.0)


@pytest.mark.slow
def test_monte_carlo_matches_theory():
    d = Exponential(1)
    n, h, reps = 2000, 0.3, 5000
    t = np.array([0.5, 1.0, 2.0])
    rng = np.random.default_rng(2024)
    x = np.log(t)
    surv = np.empty((reps, t.size))
    cum = np.empty((reps, t.size))
    for r in range(reps):
        y = np.log(rng.exponential(1.0, n))
        s, _, c2 = _backend.core.transformed_sums(x, y, h, EPANECHNIKOV.code, EXP, 0.0, math.inf)
        surv[r], cum[r] = s, c2
    for j, tj in enumerate(t):
        th = theoretical_bias_variance(d, LOG, EPANECHNIKOV, h, n, float(tj), "survival2")
        err = surv[:, j] - float(d.sf(tj))
        se = err.std(ddof=1) / math.sqrt(reps)
        assert abs(err.mean() - th.bias) < 3 * se
        assert surv[:, j].var(ddof=1) == pytest.approx(th.variance, rel=0.15)
        prod = (cum[:, j] - cum[:, j].mean()) * (surv[:, j] - surv[:, j].mean())
        cov_se = prod.std(ddof=1) / math.sqrt(reps)
        assert abs(prod.mean() - th.covariance) < 3 * cov_se
