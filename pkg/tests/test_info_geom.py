import math

import numpy as np
import pytest

from orlicz_gauss.gauss_space import H, BuiltinFunction, HermiteExpansion, gauss_hermite, make_builtin
from orlicz_gauss.info_geom import (
    CenteringError,
    DivergentNormalizerError,
    SingularGramError,
    from_density,
    hyvarinen_divergence,
    local_score,
    maxexp_sufficient_check,
    natural_gradient,
    normalize,
    otto_divergence,
    otto_gram,
    otto_inner,
    sample_target,
    score_matching_fit,
    score_preconditions,
)

RULE = gauss_hermite(64, 1)
SIN = make_builtin("sin_sum", {"dim": 1})


def test_normalizer_closed_forms():
    for theta in (0.1, 0.5, 2.0):
        assert normalize(H((1,), theta), RULE).K == pytest.approx(theta**2 / 2, rel=1e-12)
    # E exp(c (x^2 - 1)) = e^{-c} (1 - 2c)^{-1/2}
    c = 0.2
    assert normalize(H((2,), c), RULE).K == pytest.approx(-c - 0.5 * math.log(1 - 2 * c), rel=1e-12)


def test_normalizer_divergence():
    for c in (0.5, 0.6):
        with pytest.raises(DivergentNormalizerError):
            normalize(H((2,), c), RULE)
    with pytest.raises(DivergentNormalizerError):
        normalize(make_builtin("exp_linear", {"theta": [1.0]}), RULE)


def test_normalize_ignores_constants():
    u = SIN + H((2,), 0.1)
    a, b = normalize(u, RULE), normalize(u + 3.0, RULE)
    assert a.K == pytest.approx(b.K, rel=1e-13)
    np.testing.assert_allclose(a.log_density(RULE.nodes), b.log_density(RULE.nodes), atol=1e-13)
    assert RULE.expect(a.density(RULE.nodes)) == pytest.approx(1.0, rel=1e-13)


def test_from_density_recovers_exponent():
    p = from_density(make_builtin("gauss_density", {"theta": [0.7]}), RULE)
    assert p.K == pytest.approx(0.245, rel=1e-12)
    np.testing.assert_allclose(p.u(RULE.nodes[:5]), 0.7 * RULE.nodes[:5, 0], atol=1e-12)
    with pytest.raises(ValueError):
        from_density(H((1,)), RULE)


def test_maxexp_check():
    chk = maxexp_sufficient_check(make_builtin("gauss_density", {"theta": [1.0]}), RULE)
    assert chk.l2 == pytest.approx(math.e, rel=1e-12) and chk.inv == pytest.approx(math.e, rel=1e-12)
    assert chk.holds and "evidence" in chk.caveat.lower()
    heavy = normalize(H((2,), 0.3), RULE).as_function()
    chk = maxexp_sufficient_check(heavy, RULE)
    assert chk.l2 == math.inf and not chk.holds and math.isfinite(chk.inv)
    light = normalize(H((2,), 0.2), RULE).as_function()
    assert maxexp_sufficient_check(light, RULE).holds


def test_hyvarinen_gaussian_shift():
    for th, eta in ((0.5, 0.0), (1.0, -0.5), (0.2, 0.2)):
        kh = hyvarinen_divergence(H((1,), th), H((1,), eta), RULE)
        assert kh == pytest.approx((th - eta) ** 2 / 2, abs=1e-14)


def test_hyvarinen_is_not_symmetric():
    p, q = H((1,), 0.5), H((2,), 0.2)
    assert hyvarinen_divergence(p, q, RULE) != pytest.approx(hyvarinen_divergence(q, p, RULE), rel=1e-3)


def test_local_score_decomposition():
    # E_p S(q) - E_p S(p) = KH(p, q), because E_p[delta.grad u_q] = E_p[grad u_p . grad u_q]
    p = normalize(H((1,), 0.4) + H((2,), -0.1), RULE)
    q = normalize(SIN + H((2,), 0.05), RULE)
    gap = p.expect(local_score(q, RULE.nodes), RULE) - p.expect(local_score(p, RULE.nodes), RULE)
    assert gap == pytest.approx(hyvarinen_divergence(p, q, RULE), abs=1e-12)


def test_sampler_gaussian_moments():
    p = normalize(H((1,), 0.6) + H((2,), 0.2), RULE)
    x = sample_target(p, 200_000, seed=3)[:, 0]
    # precision 1 - 2c = 0.6, mean b / precision = 1
    assert x.mean() == pytest.approx(1.0, abs=0.01)
    assert x.var() == pytest.approx(1 / 0.6, rel=0.02)
    np.testing.assert_array_equal(x, sample_target(p, 200_000, seed=3)[:, 0])


def test_sampler_sir_matches_quadrature_moments():
    p = normalize(H((1,), 0.3) + H((4,), -0.05), RULE)
    x = sample_target(p, 100_000, seed=5)[:, 0]
    mean = p.expect(RULE.nodes[:, 0], RULE)
    var = p.expect(RULE.nodes[:, 0] ** 2, RULE) - mean**2
    assert x.mean() == pytest.approx(mean, abs=5 * math.sqrt(var / 1e5) + 0.005)
    assert x.var() == pytest.approx(var, rel=0.03)


def test_score_matching_exact_2d():
    rule = gauss_hermite(24, 2)
    target = H((1, 0), 0.2) + H((1, 1), 0.1) + H((0, 2), -0.15)
    basis = [H((1, 0)), H((0, 1)), H((1, 1)), H((0, 2))]
    fit = score_matching_fit(target, basis, rule)
    np.testing.assert_allclose(fit.coefficients, [0.2, 0.0, 0.1, -0.15], atol=1e-10)
    assert fit.min_eigenvalue > 0


def test_score_matching_empirical_from_points():
    pts = np.random.default_rng(0).normal(loc=0.4, size=(50_000, 1))
    fit = score_matching_fit(pts, [H((1,))], mode="empirical")
    assert abs(fit.coefficients[0] - 0.4) <= 5 * fit.std_errors[0]
    assert fit.samples == 50_000


def test_score_matching_singular_basis():
    basis = [H((1,)), H((1,), 2.0)]
    with pytest.raises(SingularGramError):
        score_matching_fit(H((1,), 0.3), basis, RULE)
    fit = score_matching_fit(H((1,), 0.3), basis, RULE, pseudo=True)
    assert fit.coefficients[0] + 2 * fit.coefficients[1] == pytest.approx(0.3, rel=1e-10)
    with pytest.raises(ValueError):
        score_matching_fit(H((1,)), [], RULE)
    with pytest.raises(ValueError):
        score_matching_fit(H((1,)), [H((1,))], RULE, mode="bogus")


def test_otto_divergence_against_finite_differences():
    # 1-d: delta(h) = x h - h' with h = p g'
    p = normalize(H((1,), 0.5) + SIN, RULE)
    g = make_builtin("log_cosh", {"theta": [1.3]})
    xs = np.linspace(-2.5, 2.5, 11)
    eps = 1e-5

    def h(x):
        pts = np.asarray(x).reshape(-1, 1)
        return p.density(pts) * g.gradient(pts)[:, 0]

    fd = xs * h(xs) - (h(xs + eps) - h(xs - eps)) / (2 * eps)
    np.testing.assert_allclose(otto_divergence(p, g)(xs.reshape(-1, 1)), fd, atol=1e-8)


def test_otto_inner_oracles():
    gamma = normalize(HermiteExpansion(1, {}), RULE)
    assert otto_inner(gamma, H((1,)), H((1,)), RULE).value == pytest.approx(1.0)
    assert otto_inner(gamma, H((1,)), H((2,)), RULE).value == pytest.approx(0.0, abs=1e-13)
    tilt = normalize(H((1,), 0.7), RULE)
    res = otto_inner(tilt, H((1,)), H((1,)), RULE)
    assert res.value == pytest.approx(1.0) and res.agree
    assert res.f_mean == pytest.approx(0.7)
    with pytest.raises(CenteringError):
        otto_inner(tilt, H((1,)), H((1,)), RULE, auto_center=False)


def test_otto_gram_psd():
    rng = np.random.default_rng(11)
    p = normalize(H((1,), 0.3) + H((2,), 0.1), RULE)
    basis = [HermiteExpansion(1, {(k,): c for k, c in enumerate(rng.normal(size=5))}) for _ in range(6)]
    G = otto_gram(p, basis, RULE)
    np.testing.assert_allclose(G, G.T, atol=1e-14)
    assert np.min(np.linalg.eigvalsh(G)) >= -1e-10


def test_natural_gradient():
    gamma = normalize(HermiteExpansion(1, {}), RULE)
    res = natural_gradient(gamma, H((2,)), [H((1,)), H((2,))], RULE)
    np.testing.assert_allclose(res.coefficients, [0.0, 0.5], atol=1e-12)
    # with t = delta.(p grad g*) / p, E_p[t b] = E_p[grad g* . grad b], so g* comes back
    p = normalize(H((1,), 0.4), RULE)
    basis = [H((1,)), H((2,)), H((3,))]
    div = otto_divergence(p, H((2,), 0.7) + H((3,), -0.2))
    target = BuiltinFunction("t", 1, lambda pts: div._value(pts) / p.density(pts))
    res = natural_gradient(p, target, basis, RULE)
    np.testing.assert_allclose(res.coefficients, [0.0, 0.7, -0.2], atol=1e-10)
    ortho = natural_gradient(gamma, H((3,)), [H((1,)), H((2,))], RULE)
    np.testing.assert_allclose(ortho.coefficients, [0.0, 0.0], atol=1e-13)


def test_score_preconditions():
    pre = score_preconditions(normalize(H((1,), 0.5) + H((2,), 0.1), RULE), RULE)
    assert pre.holds
    assert pre.to_dict()["caveat"]
