"""Acceptance criteria 1-10, each checked against an independent oracle.

Every test records one PASS/FAIL line, printed in the pytest terminal summary.
"""

import itertools
import json
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from orlicz_gauss import young
from orlicz_gauss.gauss_space import (
    H,
    HermiteExpansion,
    delta,
    delta_dot_nabla,
    gauss_hermite,
    hermite_eval,
    l2_norm,
    make_builtin,
    partial,
)
from orlicz_gauss.inequalities import (
    C2,
    chi2_bound_check,
    gauss_poincare_check,
    kappa_residual,
    kappa_star,
    run_suite,
)
from orlicz_gauss.info_geom import (
    from_density,
    hyvarinen_divergence,
    otto_gram,
    otto_inner,
    score_matching_fit,
)
from orlicz_gauss.ou_semigroup import mehler_apply, resolvent, semigroup_law_deviation


def multi_indices(dim, max_order):
    return [a for a in itertools.product(range(max_order + 1), repeat=dim) if sum(a) <= max_order]


def test_c1_poincare_equality_case(acceptance):
    start = time.perf_counter()
    worst = 0.0
    for n in range(1, 5):
        rule = gauss_hermite(8, n)
        row = gauss_poincare_check(make_builtin("linear_sum", {"dim": n}), rule)
        worst = max(worst, abs(math.sqrt(row.lhs) - math.sqrt(n)), abs(math.sqrt(row.rhs) - math.sqrt(n)))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-9 and elapsed < 1.0
    acceptance(1, ok, f"Poincare sqrt(n) max error {worst:.2e} (tol 1e-9), {elapsed:.2f}s (< 1s)")
    assert ok


def test_c2_hermite_eigen_oracle(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(2)
    worst = 0.0
    for n in (1, 2):
        pts = rng.normal(size=(10, n))
        for alpha in multi_indices(n, 6):
            f = H(alpha)
            expected = hermite_eval(alpha, pts)
            for t in (0.1, 1.0):
                got = mehler_apply(f, t)(pts)
                worst = max(worst, float(np.max(np.abs(got - math.exp(-t * sum(alpha)) * expected))))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and elapsed < 5.0
    acceptance(2, ok, f"Mehler vs e^(-t|a|) H_a max error {worst:.2e} (tol 1e-8), {elapsed:.2f}s (< 5s)")
    assert ok


def test_c3_constants(acceptance):
    k = kappa_star()
    res = abs(kappa_residual(k))
    c2_1 = abs(C2(1) - math.pi / 2)
    c2_2 = abs(C2(2) - math.pi / 2 * 3 ** 0.25)
    tilde = max(
        abs(young.tilde_phi(young.ExpMode(), a) - math.exp(math.pi**2 * a * a / 8)) for a in (0.1, 0.5)
    )
    ok = res <= 1e-12 and abs(k - 0.431435) <= 1e-5 and c2_1 <= 1e-12 and c2_2 <= 1e-12 and tilde <= 1e-8
    acceptance(
        3, ok,
        f"kappa*={k:.10f} residual {res:.1e}; C2 errors {c2_1:.1e}, {c2_2:.1e}; tilde exp error {tilde:.1e}",
    )
    assert ok


# RHS integrals that diverge in closed form:
#  - exp_centered has |grad f| = e^{x/2}/2, so every exp-type modular of it diverges;
#  - cosh-1 first_version: tilde Phi(a) = e^{pi^2 a^2/8} - 1 and |grad f|^2 >= x^2 for h2, h11,
#    with pi^2/8 > 1/2;
#  - mgf on h2: exp(2 kappa^2 x^2) is not gamma-integrable once kappa >= 1/2.
PROVABLY_DIVERGENT = {
    ("cosh_gauss2", "exp_centered", None),
    ("covariance", "exp_centered|exp_centered", "l1-linf"),
    ("covariance", "exp_centered|exp_centered", "l2-l2"),
    ("first_version", "exp_centered", "cosh-1"),
    ("first_version", "h11", "cosh-1"),
    ("first_version", "h2", "cosh-1"),
    ("mgf", "exp_centered", 0.5),
    ("mgf", "exp_centered", 0.9),
    ("mgf", "h2", 0.5),
    ("mgf", "h2", 0.9),
}


def _vacuous_key(row):
    if row.name == "covariance":
        return row.name, row.function_id, row.params["norm_pair"]
    if row.name == "mgf":
        return row.name, row.function_id, row.params["kappa"]
    if row.name == "first_version":
        return row.name, row.function_id, row.phi_name
    return row.name, row.function_id, None


def test_c4_full_suite(acceptance, catalog):
    start = time.perf_counter()
    report = run_suite(catalog)
    elapsed = time.perf_counter() - start
    s = report.summary()
    names = {r.name for r in report.rows}
    required = {"gauss_poincare", "chi2", "first_version", "mgf", "lp", "llogl", "cosh_gauss2",
                "covariance", "ou_selfadjoint"}
    vacuous = {_vacuous_key(r) for r in report.rows if r.status == "vacuous"}
    for r in report.rows:
        if r.status == "vacuous":
            assert math.isinf(r.rhs)
    ok = (
        len(catalog.functions) >= 10
        and s["failed"] == 0
        and required <= names
        and vacuous <= PROVABLY_DIVERGENT
        and elapsed < 60.0
    )
    acceptance(
        4, ok,
        f"{s['total']} rows, {s['holds']} holds, {s['vacuous']} vacuous (all provably divergent: "
        f"{vacuous <= PROVABLY_DIVERGENT}), {s['failed']} failed, {elapsed:.1f}s (< 60s)",
    )
    assert ok


def test_c5_chi2_closed_form(acceptance, gh1):
    theta = 0.5
    row = chi2_bound_check(make_builtin("gauss_density", {"theta": [theta]}), gh1)
    # E(p - 1)^2 = e^{theta^2} - 1; delta.grad p = theta (x - theta) p and p^2 gamma = e^{theta^2} N(2 theta, 1)
    lhs_oracle = math.expm1(theta**2)
    rhs_oracle = theta**2 * math.exp(theta**2) * (1 + theta**2)
    el, er = abs(row.lhs - lhs_oracle), abs(row.rhs - rhs_oracle)
    # the six-digit reference values 0.284025 / 0.401259 are rounded; the rhs one is off by ~1.1e-6
    ok = el <= 1e-6 and er <= 1e-6 and abs(lhs_oracle - 0.284025) < 1e-6 and abs(rhs_oracle - 0.401259) < 2e-6
    acceptance(5, ok, f"chi2 lhs {row.lhs:.7f} (err {el:.1e}), rhs {row.rhs:.7f} (err {er:.1e}) vs analytic oracle")
    assert ok


def test_c6_hyvarinen(acceptance, gh1):
    gamma_u = HermiteExpansion.constant(0.0, 1)
    worst = 0.0
    for theta in (0.1, 0.5, 1.0):
        kh = hyvarinen_divergence(H([1], theta), gamma_u, gh1)
        worst = max(worst, abs(kh - theta**2 / 2))
    p = H([1], 0.5) + H([2], -0.1)
    self_kh = abs(hyvarinen_divergence(p, p, gh1))
    ok = worst <= 1e-8 and self_kh <= 1e-12
    acceptance(6, ok, f"KH vs theta^2/2 max error {worst:.1e} (tol 1e-8); KH(P,P) = {self_kh:.1e} (tol 1e-12)")
    assert ok


def test_c7_score_matching(acceptance, gh1):
    target = H([1], 0.3) + H([2], 0.1)
    basis = [H([1]), H([2])]
    exact = score_matching_fit(target, basis, gh1, mode="exact")
    err = float(np.max(np.abs(exact.coefficients - [0.3, 0.1])))
    emp = score_matching_fit(target, basis, gh1, mode="empirical", samples=100_000, seed=7)
    z = np.abs(emp.coefficients - [0.3, 0.1]) / emp.std_errors
    ok = err <= 1e-8 and bool(np.all(z <= 5.0))
    acceptance(7, ok, f"exact error {err:.1e} (tol 1e-8); empirical |z| = {np.round(z, 2).tolist()} (<= 5)")
    assert ok


def test_c8_identity_suites(acceptance, catalog):
    xs = np.linspace(0.0, 8.0, 201)
    X, Y = np.meshgrid(xs, xs)
    phis = [young.power(1.5), young.power(2), young.power(3), young.EXP2, young.EXP2_STAR,
            young.COSH_M1, young.COSH_M1_STAR]
    gap = min(float(np.min(young.young_gap(phi, X, Y))) for phi in phis)
    legendre = max(float(np.max(np.abs(young.legendre_residual(phi, xs)))) for phi in phis)

    rule = gauss_hermite(24, 2)
    ibp = 0.0
    for a in multi_indices(2, 6):
        for b in multi_indices(2, 6):
            f, g = H(a), H(b)
            for i in range(2):
                lhs = rule.expect(partial(f, i)._value(rule.nodes) * g._value(rule.nodes))
                rhs = rule.expect(f._value(rule.nodes) * delta(g, i)._value(rule.nodes))
                ibp = max(ibp, abs(lhs - rhs))

    res = 0.0
    for e in catalog.functions:
        if isinstance(e.function, HermiteExpansion):
            f = e.function
            u = resolvent(f)
            r = gauss_hermite(24, f.dim)
            res = max(res, l2_norm(delta_dot_nabla(u) + u - f, r))

    pts = np.linspace(-2.5, 2.5, 9).reshape(-1, 1)
    law = max(
        semigroup_law_deviation(catalog.get(fid).function, s, t, pts)
        for fid in ("sin_mix", "log_cosh", "h1+0.3h2")
        for s, t in ((0.2, 0.5), (1.0, 0.3))
    )
    ok = gap >= -1e-12 and legendre <= 1e-9 and ibp <= 1e-9 and res <= 1e-10 and law <= 1e-6
    acceptance(
        8, ok,
        f"Young gap min {gap:.1e}; Legendre residual {legendre:.1e}; IBP {ibp:.1e}; "
        f"resolvent residual {res:.1e}; semigroup law {law:.1e}",
    )
    assert ok


def test_c9_otto(acceptance, catalog):
    rules = {1: gauss_hermite(128, 1), 2: gauss_hermite(40, 2), 3: gauss_hermite(16, 3)}
    worst, min_eig, triples = 0.0, math.inf, 0
    for d in catalog.densities:
        rule = rules[d.function.dim]
        p = from_density(d.function, rule)
        fs = [e.function for e in catalog.functions if e.function.dim == p.dim]
        for f in fs:
            for g in fs:
                o = otto_inner(p, f, g, rule)
                worst = max(worst, abs(o.value - o.adjoint_value))
                triples += 1
        min_eig = min(min_eig, float(np.min(np.linalg.eigvalsh(otto_gram(p, fs, rule)))))
    ok = worst <= 1e-8 and min_eig >= -1e-10
    acceptance(9, ok, f"{triples} triples, adjoint max error {worst:.1e} (tol 1e-8); Gram min eigenvalue {min_eig:.1e}")
    assert ok


def test_c10_determinism(acceptance, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"report{k}.json"
        proc = subprocess.run(
            [sys.executable, "-m", "orlicz_gauss.cli", "verify", "--out", str(out)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append(out.read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    doc = json.loads(outs[0])
    acceptance(10, ok, f"two verify runs byte-identical ({len(outs[0])} bytes, {doc['result']['summary']['total']} rows)")
    assert ok


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v"]))
