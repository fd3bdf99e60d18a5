import math

import numpy as np
import pytest

from orlicz_gauss.gauss_space import H, delta_dot_nabla, gauss_hermite, integrate, l2_norm, make_builtin
from orlicz_gauss.ou_semigroup import (
    apply,
    generator_apply,
    hermite_apply,
    kolmogorov_residual,
    l2_contraction,
    mehler_apply,
    nonexpansive_check,
    resolvent,
    rotation_pair,
    semigroup_law_deviation,
)
from orlicz_gauss.young import COSH_M1, EXP2, power

SIN = make_builtin("sin_sum", {"dim": 1, "terms": [{"a": 1.0, "k": 1.0, "axis": 0}, {"a": 0.5, "k": 2.0, "axis": 0}]})
PTS1 = np.linspace(-3, 3, 11).reshape(-1, 1)


def test_mehler_on_sine_closed_form():
    # P_t sin(kx) = e^{-k^2 (1 - e^{-2t}) / 2} sin(k e^{-t} x)
    t = 0.7
    a, v = math.exp(-t), -math.expm1(-2 * t)
    x = PTS1[:, 0]
    expected = np.exp(-v / 2) * np.sin(a * x) + 0.5 * np.exp(-4 * v / 2) * np.sin(2 * a * x)
    np.testing.assert_allclose(mehler_apply(SIN, t)(PTS1), expected, atol=1e-12)


def test_mehler_on_exponential_closed_form():
    # P_t e^{theta x} = exp(theta e^{-t} x + theta^2 (1 - e^{-2t}) / 2)
    f = make_builtin("exp_linear", {"theta": [0.8]})
    t = 0.4
    x = PTS1[:, 0]
    expected = np.exp(0.8 * math.exp(-t) * x + 0.32 * -math.expm1(-2 * t))
    np.testing.assert_allclose(mehler_apply(f, t)(PTS1), expected, rtol=1e-12)


def test_mehler_matches_hermite_route_2d():
    f = H((2, 1), 0.7) + H((0, 3), -0.2) + H((1, 0), 1.0)
    pts = np.random.default_rng(0).normal(size=(9, 2))
    for t in (0.05, 0.5, 2.0):
        np.testing.assert_allclose(mehler_apply(f, t)(pts), hermite_apply(f, t)(pts), atol=1e-12)


def test_endpoints():
    np.testing.assert_array_equal(mehler_apply(SIN, 0.0)(PTS1), SIN(PTS1))
    rule = gauss_hermite(64, 1)
    np.testing.assert_allclose(mehler_apply(SIN + 2.0, math.inf)(PTS1), integrate(SIN + 2.0, rule), atol=1e-14)
    f = H((2,)) + 1.5
    assert hermite_apply(f, math.inf).terms == {(0,): 1.5}
    with pytest.raises(ValueError):
        hermite_apply(f, -1.0)


def test_gradient_commutation():
    # grad P_t f = e^{-t} P_t grad f, checked by finite differences
    t, h = 0.3, 1e-5
    pt = mehler_apply(SIN, t)
    fd = (pt(PTS1 + h) - pt(PTS1 - h)) / (2 * h)
    np.testing.assert_allclose(pt.gradient(PTS1)[:, 0], fd, atol=1e-8)


def test_generator_on_hermite_eigenfunctions():
    assert generator_apply(H((0,))).terms == {}
    for alpha in [(1,), (4,), (2, 3)]:
        assert generator_apply(H(alpha)).terms == {alpha: -float(sum(alpha))}


def test_generator_on_builtin():
    g = generator_apply(SIN)
    x = PTS1[:, 0]
    expected = -(x * (np.cos(x) + np.cos(2 * x)) + np.sin(x) + 2 * np.sin(2 * x))
    np.testing.assert_allclose(g(PTS1), expected, atol=1e-12)


def test_kolmogorov_equation():
    p0 = make_builtin("gauss_density", {"theta": [0.6]})
    res = kolmogorov_residual(p0, 0.5, PTS1[:, 0])
    assert np.max(res) < 1e-6
    res = kolmogorov_residual(H((3,)) + H((1,)), 0.8, PTS1[:, 0])
    assert np.max(res) < 1e-6
    with pytest.raises(ValueError):
        kolmogorov_residual(SIN, 1e-5, [0.0])


def test_semigroup_law():
    assert semigroup_law_deviation(SIN, 0.3, 0.9, PTS1) < 1e-6
    lc = make_builtin("log_cosh", {"theta": [1.0, -0.5]})
    pts = np.random.default_rng(3).normal(size=(5, 2))
    assert semigroup_law_deviation(lc, 0.2, 0.4, pts) < 1e-6


def test_resolvent_hermite_exact():
    f = H((1,)) + H((3,), 0.5)
    u = resolvent(f)
    assert u.terms == {(1,): 0.5, (3,): 0.125}
    r = gauss_hermite(24, 1)
    assert l2_norm(delta_dot_nabla(u) + u - f, r) <= 1e-12


def test_resolvent_mehler_route():
    u = resolvent(SIN)
    rule = gauss_hermite(40, 1)
    residual = delta_dot_nabla(u) + u - SIN
    assert l2_norm(residual, rule) < 1e-8


def test_rotation_is_orthogonal():
    rng = np.random.default_rng(1)
    x, y = rng.normal(size=(2, 50))
    u, v = rotation_pair(x, y, 0.6)
    np.testing.assert_allclose(u**2 + v**2, x**2 + y**2, rtol=1e-13)
    # the map is a reflection, so applying it twice is the identity
    xx, yy = rotation_pair(u, v, 0.6)
    np.testing.assert_allclose(np.c_[xx, yy], np.c_[x, y], atol=1e-14)


@pytest.mark.parametrize("phi", [power(2), power(3), EXP2, COSH_M1], ids=lambda p: p.name)
def test_nonexpansive(phi):
    rule = gauss_hermite(48, 1)
    for f in (SIN, H((1,)) + H((2,), 0.2)):
        for t in (0.1, 1.0, 5.0):
            assert nonexpansive_check(f, phi, t, rule).holds


def test_l2_contraction_and_mean_invariance():
    rule = gauss_hermite(48, 1)
    for t in (0.1, 1.0):
        lhs, rhs = l2_contraction(SIN, t, rule)
        assert lhs <= rhs + 1e-10
        assert integrate(apply(SIN + 1.0, t), rule) == pytest.approx(integrate(SIN + 1.0, rule), abs=1e-12)
    lhs, rhs = l2_contraction(H((1,)), 0.5, rule)
    assert lhs == pytest.approx(rhs, rel=1e-12)
