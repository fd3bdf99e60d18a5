"""Information geometry on the Gaussian space.

Densities with respect to ``gamma`` are held in exponential coordinates,
``p = exp(u - K)`` with ``E_gamma u = 0``. On top of that: the sufficient
conditions for the maximal exponential model, the Hyvarinen divergence and
score matching, and the Otto inner product with its natural gradient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Union

import numpy as np

from .gauss_space import (
    BuiltinFunction,
    GaussFunction,
    GaussQuadrature,
    HermiteExpansion,
    delta_dot_nabla,
    gradient_norm,
    has_derivative,
    integrate,
)
from .orlicz_norms import luxemburg_norm, squared_space_norm
from .tails import quadratic_growth_ratio
from .young import COSH_M1

EVIDENCE_CAVEAT = (
    "finiteness judged from quadrature values and ray probes of the integrand growth; "
    "numerical evidence only, not a proof"
)


class DivergentNormalizerError(ValueError):
    pass


class CenteringError(ValueError):
    pass


class SingularGramError(np.linalg.LinAlgError):
    pass


@dataclass(frozen=True)
class ExpDensity:
    """``p = exp(u - K)`` relative to ``gamma``, ``u`` centered under ``gamma``."""

    u: GaussFunction
    K: float

    @property
    def dim(self) -> int:
        return self.u.dim

    def log_density(self, pts) -> np.ndarray:
        return self.u._value(np.atleast_2d(pts)) - self.K

    def density(self, pts) -> np.ndarray:
        with np.errstate(over="ignore"):
            return np.exp(self.log_density(pts))

    def weights(self, rule: GaussQuadrature) -> np.ndarray:
        """Quadrature weights of ``E_p``: ``w_k p(x_k)``."""
        return rule.weights * self.density(rule.nodes)

    def expect(self, values: np.ndarray, rule: GaussQuadrature) -> float:
        return float(np.dot(self.weights(rule), values))

    def as_function(self) -> BuiltinFunction:
        """``p`` itself, with ``grad p = p grad u`` and ``lap p = p (lap u + |grad u|^2)``."""
        u = self.u
        grad = lap = None
        if has_derivative(u, "gradient"):

            def grad(pts):
                return self.density(pts)[:, None] * u._grad(pts)

            if has_derivative(u, "laplacian"):

                def lap(pts):
                    return self.density(pts) * (u._lap(pts) + np.sum(u._grad(pts) ** 2, axis=1))

        return BuiltinFunction(f"exp({u.label} - K)", u.dim, self.density, grad=grad, lap=lap,
                               log_value=self.log_density)


def _log_mean_exp(values: np.ndarray, weights: np.ndarray) -> float:
    m = float(np.max(values))
    return m + math.log(float(np.dot(weights, np.exp(values - m))))


def normalize(u: GaussFunction, rule: GaussQuadrature) -> ExpDensity:
    """Center ``u`` under ``gamma`` and set ``K = log E_gamma exp(u - ubar)``."""
    if rule.dim != u.dim:
        raise ValueError("rule dimension mismatch")
    ubar = u.mean if isinstance(u, HermiteExpansion) else integrate(u, rule)
    uc = u - ubar if ubar != 0.0 else u
    if quadratic_growth_ratio(uc._value, u.dim) >= 0.5 * (1.0 - 1e-12):
        raise DivergentNormalizerError(f"E_gamma exp(u) diverges for u = {u.label}")
    vals = uc._value(rule.nodes)
    if not np.all(np.isfinite(vals)):
        raise DivergentNormalizerError("u is not finite at every quadrature node")
    return ExpDensity(uc, _log_mean_exp(vals, rule.weights))


def from_density(p: GaussFunction, rule: GaussQuadrature) -> ExpDensity:
    """Log-transform a positive density ``p`` (w.r.t. ``gamma``) and normalize."""
    pv = p._value(rule.nodes)
    if np.any(pv <= 0):
        raise ValueError("density must be positive at every quadrature node")

    def value(pts):
        if isinstance(p, BuiltinFunction):
            return p.log_value(pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(p._value(pts))

    grad = lap = None
    if has_derivative(p, "gradient"):

        def grad(pts):
            return p._grad(pts) / p._value(pts)[:, None]

        if has_derivative(p, "laplacian"):

            def lap(pts):
                pv = p._value(pts)
                return p._lap(pts) / pv - np.sum(p._grad(pts) ** 2, axis=1) / pv**2

    return normalize(BuiltinFunction(f"log({p.label})", p.dim, value, grad=grad, lap=lap), rule)


def as_exp_density(obj: Union[ExpDensity, GaussFunction], rule: GaussQuadrature) -> ExpDensity:
    return obj if isinstance(obj, ExpDensity) else normalize(obj, rule)


@dataclass
class MaxExpCheck:
    l2: float
    inv: float
    caveat: str = EVIDENCE_CAVEAT

    @property
    def holds(self) -> bool:
        return math.isfinite(self.l2) and math.isfinite(self.inv)

    def to_dict(self) -> dict:
        return {"l2": self.l2, "inv": self.inv, "holds": self.holds, "caveat": self.caveat}


def maxexp_sufficient_check(p: GaussFunction, rule: GaussQuadrature) -> MaxExpCheck:
    """``E_gamma p^2`` and ``E_gamma 1/p``; both finite is sufficient for
    ``p`` to lie in the maximal exponential model of ``gamma``.

    Divergence is read off the growth of ``log p`` along the probe rays
    (``p^2 = exp(2 log p)``, ``1/p = exp(-log p)``); builtins of exponential
    form supply ``log p`` directly so the probes do not overflow.
    """
    pv = np.asarray(p._value(rule.nodes), dtype=float)
    if np.any(pv <= 0) or not np.all(np.isfinite(pv)):
        raise ValueError("p must be positive and finite at every quadrature node")

    def logp(pts):
        if isinstance(p, BuiltinFunction):
            return p.log_value(pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            v = p._value(pts)
            return np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), np.nan)

    half = 0.5 * (1.0 - 1e-12)
    l2 = math.inf if quadratic_growth_ratio(lambda x: 2.0 * logp(x), p.dim) >= half else rule.expect(pv**2)
    inv = math.inf if quadratic_growth_ratio(lambda x: -logp(x), p.dim) >= half else rule.expect(1.0 / pv)
    return MaxExpCheck(l2, inv)


def hyvarinen_divergence(p, q, rule: GaussQuadrature) -> float:
    """``(1/2) E_p |grad u_p - grad u_q|^2``."""
    p, q = as_exp_density(p, rule), as_exp_density(q, rule)
    d = p.u._grad(rule.nodes) - q.u._grad(rule.nodes)
    return 0.5 * p.expect(np.sum(d * d, axis=1), rule)


def local_score(q, x, rule: Optional[GaussQuadrature] = None) -> np.ndarray:
    """``S(q, x) = |grad u(x)|^2 / 2 - delta . grad u(x)``; ``q`` is an
    :class:`ExpDensity` or its (uncentered) ``u``, since constants drop out."""
    u = q.u if isinstance(q, ExpDensity) else q
    if not (has_derivative(u, "gradient") and has_derivative(u, "laplacian")):
        raise ValueError(f"local score needs gradient and laplacian of {u.label}")
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if u.dim == 1 and pts.shape[1] != 1:
        pts = pts.reshape(-1, 1)
    g = u._grad(pts)
    return 0.5 * np.sum(g * g, axis=1) - (np.sum(pts * g, axis=1) - u._lap(pts))


@dataclass
class ScoreFitResult:
    coefficients: np.ndarray
    gram: np.ndarray
    moments: np.ndarray
    score: float
    mode: str
    std_errors: Optional[np.ndarray] = None
    samples: int = 0
    min_eigenvalue: float = field(init=False)

    def __post_init__(self):
        self.min_eigenvalue = float(np.min(np.linalg.eigvalsh(self.gram))) if self.gram.size else 0.0

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "coefficients": self.coefficients.tolist(),
            "std_errors": None if self.std_errors is None else self.std_errors.tolist(),
            "gram": self.gram.tolist(),
            "moments": self.moments.tolist(),
            "score": self.score,
            "min_eigenvalue": self.min_eigenvalue,
            "samples": self.samples,
        }


def _basis_features(basis: Sequence[GaussFunction], pts: np.ndarray):
    """Per-point gradients ``(N, k, n)`` and ``delta . grad b`` values ``(N, k)``."""
    for b in basis:
        if not (has_derivative(b, "gradient") and has_derivative(b, "laplacian")):
            raise ValueError(f"basis function {b.label} needs gradient and laplacian")
    grads = np.stack([b._grad(pts) for b in basis], axis=1)
    dd = np.stack([delta_dot_nabla(b)._value(pts) for b in basis], axis=1)
    return grads, dd


def _solve(A: np.ndarray, m: np.ndarray, pseudo: bool, rcond: float = 1e-12) -> np.ndarray:
    ev = np.linalg.eigvalsh(A)
    if ev[0] <= rcond * max(1.0, ev[-1]):
        if not pseudo:
            raise SingularGramError("Gram matrix is singular; pass pseudo=True for a least-squares solve")
        return np.linalg.lstsq(A, m, rcond=None)[0]
    return np.linalg.solve(A, m)


def _gaussian_target(u: GaussFunction):
    """``(precision, mean)`` of ``P = exp(u - K) gamma`` when ``u`` is a Hermite
    expansion of degree <= 2, else ``None``."""
    if not isinstance(u, HermiteExpansion) or u.degree > 2:
        return None
    n = u.dim
    S = np.zeros((n, n))
    b = np.zeros(n)
    for a, c in u.terms.items():
        idx = [i for i in range(n) for _ in range(a[i])]
        if len(idx) == 1:
            b[idx[0]] += c
        elif len(idx) == 2:
            i, j = idx
            if i == j:
                S[i, i] += c  # H_2(x_i) = x_i^2 - 1
            else:
                S[i, j] += c / 2.0
                S[j, i] += c / 2.0
    prec = np.eye(n) - 2.0 * S
    if np.min(np.linalg.eigvalsh(prec)) <= 0:
        return None
    return prec, np.linalg.solve(prec, b)


def sample_target(p: ExpDensity, samples: int, seed: int = 0, oversample: int = 20) -> np.ndarray:
    """Draw from ``P = p gamma``: exactly for Gaussian ``P`` (quadratic ``u``),
    otherwise by sampling-importance-resampling from ``gamma``."""
    rng = np.random.default_rng(seed)
    gauss = _gaussian_target(p.u)
    if gauss is not None:
        prec, mean = gauss
        L = np.linalg.cholesky(np.linalg.inv(prec))
        return mean + rng.standard_normal((samples, p.dim)) @ L.T
    prop = rng.standard_normal((samples * oversample, p.dim))
    logw = p.u._value(prop)
    w = np.exp(logw - np.max(logw))
    idx = rng.choice(prop.shape[0], size=samples, replace=True, p=w / w.sum())
    return prop[idx]


def score_matching_fit(
    target: Union[ExpDensity, GaussFunction, np.ndarray],
    basis: Sequence[GaussFunction],
    rule: Optional[GaussQuadrature] = None,
    mode: str = "exact",
    samples: int = 100_000,
    seed: int = 0,
    pseudo: bool = False,
) -> ScoreFitResult:
    """Minimize ``E_p[|sum c_i grad b_i|^2 / 2 - sum c_i delta . grad b_i]``.

    The minimizer solves ``A c = m`` with ``A_ij = E_p[grad b_i . grad b_j]``
    and ``m_i = E_p[delta . grad b_i]``. ``mode="exact"`` takes the
    expectations by quadrature under ``p``; ``mode="empirical"`` averages over
    ``samples`` draws (or over ``target`` itself when it is an array of points)
    and adds sandwich standard errors for ``c``.
    """
    basis = list(basis)
    if not basis:
        raise ValueError("empty basis")
    if mode == "exact":
        if rule is None:
            raise ValueError("exact mode needs a quadrature rule")
        p = as_exp_density(target, rule)
        w = p.weights(rule)
        grads, dd = _basis_features(basis, rule.nodes)
        A = np.einsum("k,kin,kjn->ij", w, grads, grads)
        m = dd.T @ w
        c = _solve(A, m, pseudo)
        return ScoreFitResult(c, A, m, float(0.5 * c @ A @ c - c @ m), "exact")
    if mode != "empirical":
        raise ValueError(f"mode must be 'exact' or 'empirical', got {mode!r}")
    if isinstance(target, np.ndarray):
        x = np.atleast_2d(target)
    else:
        if not isinstance(target, ExpDensity):
            if rule is None:
                raise ValueError("normalizing a target needs a quadrature rule")
            target = normalize(target, rule)
        x = sample_target(target, samples, seed)
    N = x.shape[0]
    grads, dd = _basis_features(basis, x)
    Ak = np.einsum("kin,kjn->kij", grads, grads)
    A = Ak.mean(axis=0)
    m = dd.mean(axis=0)
    c = _solve(A, m, pseudo)
    psi = Ak @ c - dd
    Ainv = np.linalg.pinv(A) if pseudo else np.linalg.inv(A)
    cov = Ainv @ np.cov(psi, rowvar=False).reshape(len(basis), len(basis)) @ Ainv.T / N
    return ScoreFitResult(c, A, m, float(0.5 * c @ A @ c - c @ m), "empirical",
                          std_errors=np.sqrt(np.diag(cov)), samples=N)


@dataclass
class OttoResult:
    value: float
    adjoint_value: float
    f_mean: float
    g_mean: float

    @property
    def agree(self) -> bool:
        return abs(self.value - self.adjoint_value) <= 1e-8 * max(1.0, abs(self.value))

    def to_dict(self) -> dict:
        return {"value": self.value, "adjoint_value": self.adjoint_value, "agree": self.agree,
                "f_mean_p": self.f_mean, "g_mean_p": self.g_mean}


def otto_divergence(p: ExpDensity, g: GaussFunction) -> BuiltinFunction:
    """``delta . (p grad g) = p (delta . grad g - grad u . grad g)``."""
    dg = delta_dot_nabla(g)

    def value(pts):
        gg = g._grad(pts)
        return p.density(pts) * (dg._value(pts) - np.sum(p.u._grad(pts) * gg, axis=1))

    return BuiltinFunction(f"delta.(p grad {g.label})", g.dim, value)


def p_mean(p: ExpDensity, f: GaussFunction, rule: GaussQuadrature) -> float:
    return p.expect(f._value(rule.nodes), rule)


def otto_inner(p, f: GaussFunction, g: GaussFunction, rule: GaussQuadrature,
               auto_center: bool = True, tol: float = 1e-8) -> OttoResult:
    """``E_p[grad f . grad g]`` for ``p``-centered ``f, g``, and the adjoint form
    ``E_gamma[f delta . (p grad g)]``; the two agree by integration by parts."""
    p = as_exp_density(p, rule)
    fm, gm = p_mean(p, f, rule), p_mean(p, g, rule)
    if not auto_center and max(abs(fm), abs(gm)) > tol:
        raise CenteringError(f"E_p f = {fm!r}, E_p g = {gm!r}; expected 0")
    fc = f - fm if fm else f
    w = p.weights(rule)
    val = float(np.dot(w, np.sum(f._grad(rule.nodes) * g._grad(rule.nodes), axis=1)))
    adj = rule.expect(fc._value(rule.nodes) * otto_divergence(p, g)._value(rule.nodes))
    return OttoResult(val, adj, fm, gm)


def otto_gram(p, basis: Sequence[GaussFunction], rule: GaussQuadrature) -> np.ndarray:
    p = as_exp_density(p, rule)
    w = p.weights(rule)
    grads = np.stack([b._grad(rule.nodes) for b in basis], axis=1)
    return np.einsum("k,kin,kjn->ij", w, grads, grads)


@dataclass
class NaturalGradientResult:
    coefficients: np.ndarray
    gram: np.ndarray
    rhs: np.ndarray

    def to_dict(self) -> dict:
        return {"coefficients": self.coefficients.tolist(), "gram": self.gram.tolist(), "rhs": self.rhs.tolist()}


def natural_gradient(p, target: GaussFunction, basis: Sequence[GaussFunction], rule: GaussQuadrature,
                     pseudo: bool = False) -> NaturalGradientResult:
    """Galerkin inverse of ``g -> delta . (p grad g)``: find ``g = sum c_i b_i``
    with ``<g, b_j>_Otto = E_p[target b_j]`` for every ``j``.

    Basis functions are centered under ``p`` first, which makes the map
    one-to-one on their span.
    """
    p = as_exp_density(p, rule)
    centered = [b - p_mean(p, b, rule) for b in basis]
    G = otto_gram(p, centered, rule)
    tv = target._value(rule.nodes)
    v = np.array([p.expect(tv * b._value(rule.nodes), rule) for b in centered])
    return NaturalGradientResult(_solve(G, v, pseudo), G, v)


@dataclass
class ScorePreconditions:
    grad_sq_cosh_norm: float
    delta_grad_cosh_norm: float
    caveat: str = EVIDENCE_CAVEAT

    @property
    def holds(self) -> bool:
        return math.isfinite(self.grad_sq_cosh_norm) and math.isfinite(self.delta_grad_cosh_norm)

    def to_dict(self) -> dict:
        return {"grad_sq_cosh_norm": self.grad_sq_cosh_norm, "delta_grad_cosh_norm": self.delta_grad_cosh_norm,
                "holds": self.holds, "caveat": self.caveat}


def score_preconditions(q, rule: GaussQuadrature, tol: float = 1e-10) -> ScorePreconditions:
    """Norms behind the consistency assumptions of score matching:
    ``|grad u|`` in the space built on ``(cosh-1)(x^2)`` and ``delta . grad u``
    in the ``cosh-1`` space. Reported, not enforced."""
    u = q.u if isinstance(q, ExpDensity) else q
    a = squared_space_norm(gradient_norm(u), COSH_M1, rule, tol)
    b = luxemburg_norm(delta_dot_nabla(u), COSH_M1, rule, tol)
    return ScorePreconditions(a.value, b.value)


__all__: List[str] = [
    "CenteringError",
    "DivergentNormalizerError",
    "EVIDENCE_CAVEAT",
    "ExpDensity",
    "MaxExpCheck",
    "NaturalGradientResult",
    "OttoResult",
    "ScoreFitResult",
    "ScorePreconditions",
    "SingularGramError",
    "as_exp_density",
    "from_density",
    "hyvarinen_divergence",
    "local_score",
    "maxexp_sufficient_check",
    "natural_gradient",
    "normalize",
    "otto_divergence",
    "otto_gram",
    "otto_inner",
    "p_mean",
    "sample_target",
    "score_matching_fit",
    "score_preconditions",
]
