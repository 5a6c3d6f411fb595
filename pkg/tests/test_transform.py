import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from mrlsmooth.distributions import Beta, Gamma
from mrlsmooth.kernel import EPANECHNIKOV, GAUSSIAN
from mrlsmooth.transform import (
    SupportInterval,
    Transform,
    make_exp_transform,
    make_identity_transform,
    make_probit_transform,
    transform_for_support,
    validate_transform,
)


def test_exp_examples():
    tr = make_exp_transform(0.0)
    assert tr.g(0.0) == 1.0
    assert tr.g_inv(1.0) == 0.0
    assert tr.g_d1(2.0) == pytest.approx(7.38905609893065, rel=1e-14)
    assert tr.g_d2(2.0) == pytest.approx(7.38905609893065, rel=1e-14)
    assert make_exp_transform(5.0).g_inv(6.0) == 0.0


def test_probit_examples():
    tr = make_probit_transform(0.0, 1.0)
    assert tr.g(0.0) == 0.5
    assert tr.g_d1(0.0) == pytest.approx(0.3989422804014327, rel=1e-14)
    assert tr.g_d2(0.0) == 0.0
    scaled = make_probit_transform(2.0, 6.0)
    assert scaled.g(0.0) == 4.0
    assert scaled.g_d1(0.0) == pytest.approx(4 * 0.3989422804014327)


@pytest.mark.parametrize(
    "tr, lo, hi",
    [(make_exp_transform(0.0), -8, 8), (make_exp_transform(-3.0), -8, 8), (make_probit_transform(0, 1), -8, 5)],
    ids=["exp", "exp-shift", "probit"],
)
def test_inverse_round_trip(tr, lo, hi):
    y = np.linspace(lo, hi, 1601)
    err = np.abs(tr.g_inv(tr.g(y)) - y) / np.maximum(1.0, np.abs(y))
    assert err.max() < 1e-10


@given(st.floats(1e-9, 1 - 1e-9))
def test_probit_forward_round_trip(t):
    tr = make_probit_transform(0.0, 1.0)
    assert abs(float(tr.g(tr.g_inv(t))) - t) <= 1e-12 * max(1.0, abs(t))


@given(st.floats(1e-6, 1e6))
def test_exp_forward_round_trip(t):
    tr = make_exp_transform(0.0)
    assert abs(float(tr.g(tr.g_inv(t))) - t) <= 1e-12 * max(1.0, abs(t))


def test_limits_at_30():
    tr = make_probit_transform(1.0, 3.0)
    assert tr.g(-30.0) == pytest.approx(1.0, abs=1e-12)
    assert tr.g(30.0) == pytest.approx(3.0, abs=1e-12)
    assert make_exp_transform(2.0).g(-30.0) == pytest.approx(2.0, abs=1e-12)


@pytest.mark.parametrize(
    "tr, kernel",
    [
        (make_exp_transform(0.0), EPANECHNIKOV),
        (make_exp_transform(0.0), GAUSSIAN),
        (make_probit_transform(0.0, 1.0), GAUSSIAN),
        (make_probit_transform(-1.0, 4.0), EPANECHNIKOV),
    ],
)
def test_validate_transform_passes(tr, kernel):
    results = validate_transform(tr, kernel)
    assert [r.name for r in results] == ["monotone", "round_trip", "limits", "derivatives", "integrability"]
    assert all(r.passed for r in results), results


class _BrokenSecondDerivative(Transform):
    def g_d2(self, y):
        return np.zeros_like(np.asarray(y, dtype=float))


def test_validate_transform_catches_bad_derivative():
    tr = _BrokenSecondDerivative(make_exp_transform(0.0).kind, SupportInterval(0.0, math.inf))
    results = {r.name: r for r in validate_transform(tr, EPANECHNIKOV)}
    assert not results["derivatives"].passed
    assert results["monotone"].passed


class _Crashing(Transform):
    def g_inv(self, t):
        raise RuntimeError("boom")


def test_validate_transform_never_raises():
    tr = _Crashing(make_exp_transform(0.0).kind, SupportInterval(0.0, math.inf))
    results = {r.name: r for r in validate_transform(tr, EPANECHNIKOV)}
    assert not results["round_trip"].passed
    assert "boom" in results["round_trip"].detail


@pytest.mark.parametrize(
    "dist, tr",
    [(Gamma(2, 3), make_exp_transform(0.0)), (Beta(3, 2), make_probit_transform(0.0, 1.0))],
    ids=["gamma-exp", "beta-probit"],
)
def test_change_of_variable_survival(dist, tr, rng):
    # S_Y(g^{-1}(t)) = S_X(t)
    n = 10_000
    y = tr.g_inv(dist.sample(rng, n))
    t = np.sort(dist.sample(np.random.default_rng(1), 20))
    emp = (y[None, :] > tr.g_inv(t)[:, None]).mean(axis=1)
    s = dist.sf(t)
    se = np.sqrt(s * (1 - s) / n)
    assert np.all(np.abs(emp - s) <= 3 * se + 1e-12)


def test_support_interval():
    s = SupportInterval.parse("0, inf")
    assert s.lower == 0 and s.upper == math.inf and not s.bounded
    assert str(SupportInterval(0, 1)) == "(0, 1)"
    np.testing.assert_array_equal(SupportInterval(0, 1).contains([0, 0.5, 1]), [False, True, False])
    with pytest.raises(ValueError):
        SupportInterval(1, 0)
    with pytest.raises(ValueError):
        SupportInterval.parse("1")


def test_transform_for_support():
    assert transform_for_support(SupportInterval(0, 1)).name == "probit"
    assert transform_for_support(SupportInterval(0, math.inf)).name == "log"
    assert transform_for_support(SupportInterval(0, 1), "identity").is_identity
    with pytest.raises(ValueError):
        transform_for_support(SupportInterval(0, math.inf), "probit")
    with pytest.raises(ValueError):
        transform_for_support(SupportInterval(0, 1), "log")
    assert make_identity_transform().g(3.0) == 3.0
