"""The Poincare-type inequalities, one function per check.

Each check returns an :class:`InequalityRow`. Rows whose right-hand side
diverges are marked vacuous; divergence of exponential integrals is decided
by the ray probes in :mod:`orlicz_gauss.tails`.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Optional, Union

import numpy as np

from ..gauss_space import (
    BuiltinFunction,
    GaussFunction,
    GaussQuadrature,
    HermiteExpansion,
    covariance,
    delta_dot_nabla,
    gradient_norm,
    integrate,
    multi_factorial,
)
from ..orlicz_norms import dual_norm, luxemburg_norm, modular
from ..tails import exp_integral_diverges, probe_directions, RADII
from ..young import (
    COSH_M1,
    EXP2_STAR,
    GAUSS2,
    ConvexFunction,
    ExpMode,
    Kind,
    RawPower,
    YoungFunction,
    exp_tail_profile,
    tilde_phi,
)
from .constants import C1, C2, C3, kappa_star
from .report import InequalityRow

HALF_PI = math.pi / 2.0
NormOrd = Union[int, float]


def centered(f: GaussFunction, rule: GaussQuadrature):
    """``(f - mean, mean)``; the mean is exact for Hermite input."""
    m = f.mean if isinstance(f, HermiteExpansion) else integrate(f, rule)
    return f - m, m


def _values(f: GaussFunction, rule: GaussQuadrature) -> np.ndarray:
    return np.asarray(f._value(rule.nodes), dtype=float)


def _grad_norm_values(f: GaussFunction, rule: GaussQuadrature, ord: NormOrd = 2) -> np.ndarray:
    return np.linalg.norm(f._grad(rule.nodes), ord=ord, axis=1)


def _grad_sq(f: GaussFunction):
    return lambda pts: np.sum(f._grad(pts) ** 2, axis=1)


def _phi_name(phi) -> str:
    return phi.name


def gauss_poincare_check(f: GaussFunction, rule: GaussQuadrature, function_id: str = "f") -> InequalityRow:
    """``int (f - fbar)^2 <= int |grad f|^2``."""
    fc, _ = centered(f, rule)
    lhs = rule.expect(_values(fc, rule) ** 2)
    rhs = rule.expect(np.sum(f._grad(rule.nodes) ** 2, axis=1))
    return InequalityRow("gauss_poincare", function_id, "raw-power:2", lhs, rhs)


def chi2_bound_check(p: GaussFunction, rule: GaussQuadrature, function_id: str = "p",
                     normalization_tol: float = 1e-8) -> InequalityRow:
    """``int (p - 1)^2 <= int (delta . grad p)^2`` for a density ``p`` of ``gamma``."""
    mass = integrate(p, rule)
    if abs(mass - 1.0) > normalization_tol:
        raise ValueError(f"density integrates to {mass!r}, not 1")
    pv = _values(p, rule)
    if np.any(pv < 0):
        raise ValueError("density is negative at a quadrature node")
    lhs = rule.expect((pv - 1.0) ** 2)
    rhs = rule.expect(_values(delta_dot_nabla(p), rule) ** 2)
    return InequalityRow("chi2", function_id, "raw-power:2", lhs, rhs, {"mass": mass})


def _tilde_rhs_diverges(phi: ConvexFunction, f: GaussFunction) -> bool:
    """Whether ``int tilde Phi(|grad f|)`` diverges.

    For ``log Phi(s) ~ c s`` the transform grows like ``exp((c pi a / 2)^2 / 2)``;
    ``gauss2`` has ``tilde Phi(a) = inf`` once ``pi a / 2 >= 1``, which is
    detected on the probe rays.
    """
    if isinstance(phi, RawPower):
        return False
    if isinstance(phi, ExpMode):
        coef = HALF_PI**2 / 2.0
    else:
        prof = exp_tail_profile(phi)
        if prof is None:
            return False
        c, k = prof
        if k != 1.0:
            if phi.kind is Kind.GAUSS2:
                dirs = probe_directions(f.dim)
                g = np.concatenate([np.linalg.norm(f._grad(r * dirs), axis=1) for r in RADII])
                return bool(np.any(~np.isfinite(g)) or np.max(g) * HALF_PI >= 1.0)
            return True
        coef = (c * HALF_PI) ** 2 / 2.0
    gsq = _grad_sq(f)
    return exp_integral_diverges(lambda pts: coef * gsq(pts), f.dim)


def _convex_modular(phi: ConvexFunction, fc: GaussFunction, rule: GaussQuadrature) -> float:
    if isinstance(phi, YoungFunction):
        return modular(fc, phi, rule)
    if isinstance(phi, ExpMode):
        if exp_integral_diverges(fc._value, fc.dim):
            return math.inf
        return rule.expect(phi(_values(fc, rule)))
    return rule.expect(phi(_values(fc, rule)))


def first_version_check(f: GaussFunction, phi: ConvexFunction, rule: GaussQuadrature,
                        inner_rule: Optional[GaussQuadrature] = None,
                        function_id: str = "f") -> InequalityRow:
    """``int Phi(f - fbar) <= int tilde Phi(|grad f|)`` with
    ``tilde Phi(a) = E Phi((pi/2) a Z)``."""
    fc, _ = centered(f, rule)
    lhs = _convex_modular(phi, fc, rule)
    if _tilde_rhs_diverges(phi, f):
        return InequalityRow("first_version", function_id, _phi_name(phi), lhs, math.inf, vacuous=True)
    rhs = rule.expect(tilde_phi(phi, _grad_norm_values(f, rule), inner_rule))
    return InequalityRow("first_version", function_id, _phi_name(phi), lhs, rhs, vacuous=math.isinf(rhs))


def mgf_bound_check(f: GaussFunction, kappa: float, rule: GaussQuadrature, function_id: str = "f") -> InequalityRow:
    """``int exp((2 kappa / pi)(f - fbar)) <= int exp((kappa^2 / 2)|grad f|^2)``."""
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    params = {"kappa": kappa}
    fc, _ = centered(f, rule)
    s = 2.0 * kappa / math.pi
    gsq = _grad_sq(f)
    rhs_g = lambda pts: kappa * kappa / 2.0 * gsq(pts)  # noqa: E731
    lhs_g = lambda pts: s * fc._value(pts)  # noqa: E731
    lhs = math.inf if exp_integral_diverges(lhs_g, f.dim) else rule.expect(ExpMode()(lhs_g(rule.nodes)))
    if exp_integral_diverges(rhs_g, f.dim):
        return InequalityRow("mgf", function_id, "exp", lhs, math.inf, params, vacuous=True)
    rhs = rule.expect(ExpMode()(rhs_g(rule.nodes)))
    return InequalityRow("mgf", function_id, "exp", lhs, rhs, params, vacuous=math.isinf(rhs))


def lp_bound_check(f: GaussFunction, p: float, rule: GaussQuadrature, function_id: str = "f") -> InequalityRow:
    """``|f - fbar|_{2p} <= C2(p) | |grad f| |_{2p}``."""
    q = 2.0 * p
    c2 = C2(p)
    fc, _ = centered(f, rule)
    lhs = rule.expect(np.abs(_values(fc, rule)) ** q) ** (1.0 / q)
    rhs = c2 * rule.expect(_grad_norm_values(f, rule) ** q) ** (1.0 / q)
    return InequalityRow("lp", function_id, f"raw-power:{q:g}", lhs, rhs, {"p": p, "C2": c2})


def llogl_bound_check(f: GaussFunction, rule: GaussQuadrature, function_id: str = "f",
                      tol: float = 1e-10) -> InequalityRow:
    """``|f - fbar|_{(exp2)_*} <= C1 | |grad f| |_{(exp2)_*}``, ``C1 = 1/kappa*``."""
    fc, _ = centered(f, rule)
    lhs = luxemburg_norm(fc, EXP2_STAR, rule, tol)
    g = luxemburg_norm(gradient_norm(f), EXP2_STAR, rule, tol)
    rhs = C1() * g.value
    return InequalityRow("llogl", function_id, EXP2_STAR.name, lhs.value, rhs,
                         {"C1": C1(), "kappa_star": kappa_star()}, vacuous=g.diverged)


def cosh_gauss2_bound_check(f: GaussFunction, rule: GaussQuadrature, function_id: str = "f",
                            tol: float = 1e-10) -> InequalityRow:
    """``|f - fbar|_{cosh-1} <= (pi/2) | |grad f| |_{gauss2}``.

    Also evaluates the modular form at ``kappa = 1 / | |grad f| |_{gauss2}``:
    ``int (cosh-1)((2 kappa/pi)(f - fbar)) <= int gauss2(kappa |grad f|)``.
    """
    fc, _ = centered(f, rule)
    gn = gradient_norm(f)
    g = luxemburg_norm(gn, GAUSS2, rule, tol)
    lhs = luxemburg_norm(fc, COSH_M1, rule, tol).value
    if g.diverged:
        return InequalityRow("cosh_gauss2", function_id, COSH_M1.name, lhs, math.inf, {"C3": C3}, vacuous=True)
    params = {"C3": C3, "gauss2_grad_norm": g.value}
    if g.value > 0:
        kappa = 1.0 / g.value
        ml = modular(fc * (2.0 * kappa / math.pi), COSH_M1, rule)
        mr = modular(gn * kappa, GAUSS2, rule)
        params.update(modular_kappa=kappa, modular_lhs=ml, modular_rhs=mr,
                      modular_holds=bool(ml <= mr + 1e-8 * max(1.0, abs(mr))))
    return InequalityRow("cosh_gauss2", function_id, COSH_M1.name, lhs, C3 * g.value, params)


NORM_PAIRS = {"l2-l2": (2, 2), "l1-linf": (1, math.inf)}


def _ord_name(o: NormOrd) -> str:
    return "inf" if math.isinf(o) else f"{o:g}"


def covariance_bound_check(f: GaussFunction, g: GaussFunction, phi: YoungFunction, norm1: NormOrd,
                           norm2: NormOrd, rule: GaussQuadrature, function_id: str = "f|g",
                           tol: float = 1e-10) -> InequalityRow:
    """``|cov(f, g)| <= | |grad f|_1 |_Phi * | |grad g|_2 |_{Psi,*}``.

    ``|.|_1`` and ``|.|_2`` are the vector norms of orders ``norm1`` and
    ``norm2``, which must satisfy ``x . y <= |x|_1 |y|_2`` (a Holder pair);
    the second factor is the dual (Orlicz) norm against ``Phi``.
    """
    if not _is_holder_pair(norm1, norm2):
        raise ValueError(f"norm orders ({norm1}, {norm2}) are not a Holder pair")
    lhs = abs(covariance(f, g, rule))
    a = luxemburg_norm(gradient_norm(f, norm1), phi, rule, tol)
    b = dual_norm(gradient_norm(g, norm2), phi, rule, tol)
    params = {"norm1": _ord_name(norm1), "norm2": _ord_name(norm2), "phi_norm": a.value, "dual_norm": b.value}
    if a.diverged or b.diverged:
        return InequalityRow("covariance", function_id, phi.name, lhs, math.inf, params, vacuous=True)
    rhs = a.value * b.value if (a.value and b.value) else 0.0
    return InequalityRow("covariance", function_id, phi.name, lhs, rhs, params)


def _is_holder_pair(p: NormOrd, q: NormOrd) -> bool:
    if p < 1 or q < 1:
        return False
    inv = (0.0 if math.isinf(p) else 1.0 / p) + (0.0 if math.isinf(q) else 1.0 / q)
    return inv >= 1.0 - 1e-12


def selfadjoint_time_integral(f: HermiteExpansion, g: HermiteExpansion) -> float:
    """``int_0^inf e^{-t} E[P_t grad f . grad g] dt`` in closed form.

    With ``d_i f = sum_b a_b H_b`` and ``d_i g = sum_b c_b H_b`` the integrand is
    ``sum_i sum_b a_b c_b b! e^{-t(1+|b|)}``, so the time integral contributes
    ``1 / (1 + |b|)`` per term.
    """
    total = 0.0
    for i in range(f.dim):
        df, dg = f.partial(i), g.partial(i)
        for b, c in df.terms.items():
            d = dg.terms.get(b)
            if d is not None:
                total += c * d * multi_factorial(b) / (1.0 + sum(b))
    return total


def ou_selfadjoint_check(f: HermiteExpansion, g: HermiteExpansion, rule: GaussQuadrature,
                         function_id: str = "f|g") -> InequalityRow:
    """``cov(f, g) = int_0^inf e^{-t} E[P_t grad f . grad g] dt``: quadrature
    covariance on the left, exact Hermite time integral on the right."""
    if not (isinstance(f, HermiteExpansion) and isinstance(g, HermiteExpansion)):
        raise TypeError("ou_selfadjoint_check needs Hermite expansions")
    lhs = covariance(f, g, rule)
    rhs = selfadjoint_time_integral(f, g)
    return InequalityRow("ou_selfadjoint", function_id, "-", lhs, rhs, equality=True)


@dataclass
class LipschitzBound:
    L: float
    kappa: float
    bound: float
    norm: float
    modular_lhs: float
    modular_rhs: float

    @property
    def holds(self) -> bool:
        tol = 1e-8 * max(1.0, abs(self.bound))
        return self.norm <= self.bound + tol and self.modular_lhs <= self.modular_rhs + 1e-8

    def to_dict(self) -> dict:
        d = asdict(self)
        d["holds"] = self.holds
        return d


def lipschitz_constant(f: GaussFunction) -> float:
    if isinstance(f, BuiltinFunction) and f.lipschitz_bound is not None:
        return float(f.lipschitz_bound)
    if isinstance(f, HermiteExpansion) and f.degree <= 1:
        return math.sqrt(sum(f.coefficient(tuple(int(j == i) for j in range(f.dim))) ** 2 for i in range(f.dim)))
    raise ValueError(f"no Lipschitz bound available for {f.label}")


SQRT_2LN2 = math.sqrt(2.0 * math.log(2.0))


def lipschitz_subexp_bound(f: GaussFunction, rule: GaussQuadrature, tol: float = 1e-10) -> LipschitzBound:
    """Explicit bound on ``|f - fbar|_{cosh-1}`` for ``L``-Lipschitz ``f``.

    With ``kappa = sqrt(2 ln 2)/L`` the ``gauss2`` modular of ``kappa |grad f|``
    is at most ``gauss2(sqrt(2 ln 2)) = 1``, so the cosh modular of
    ``(2 kappa/pi)(f - fbar)`` is at most 1 and the norm is at most
    ``(pi/2) L / sqrt(2 ln 2)``.
    """
    L = lipschitz_constant(f)
    fc, _ = centered(f, rule)
    norm = luxemburg_norm(fc, COSH_M1, rule, tol).value
    if L == 0.0:
        return LipschitzBound(0.0, math.inf, 0.0, norm, 0.0, 0.0)
    kappa = SQRT_2LN2 / L
    ml = modular(fc * (2.0 * kappa / math.pi), COSH_M1, rule)
    mr = modular(gradient_norm(f) * kappa, GAUSS2, rule)
    return LipschitzBound(L, kappa, HALF_PI / kappa, norm, ml, mr)


def lipschitz_subexp_check(f: GaussFunction, rule: GaussQuadrature, function_id: str = "f",
                           tol: float = 1e-10) -> InequalityRow:
    b = lipschitz_subexp_bound(f, rule, tol)
    params = {"L": b.L, "kappa": b.kappa, "modular_lhs": b.modular_lhs, "modular_rhs": b.modular_rhs}
    return InequalityRow("lipschitz_subexp", function_id, COSH_M1.name, b.norm, b.bound, params)
