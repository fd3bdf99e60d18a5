"""Ornstein-Uhlenbeck semigroup on the Gaussian space.

``P_t f(x) = E f(e^{-t} x + sqrt(1 - e^{-2t}) Y)`` with ``Y ~ gamma``. Two
routes are provided: Mehler quadrature for any function, and the exact
eigen-action ``H_alpha -> e^{-t|alpha|} H_alpha`` for Hermite expansions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .gauss_space import (
    BuiltinFunction,
    GaussFunction,
    GaussQuadrature,
    HermiteExpansion,
    delta_dot_nabla,
    gauss_hermite,
    has_derivative,
    integrate,
    l2_norm,
)
from .young import YoungFunction

INFINITY = math.inf
Time = Union[float, int]


@dataclass(frozen=True)
class SemigroupPlan:
    t: float
    inner_rule: GaussQuadrature
    representation: str = "mehler"


def default_inner_rule(dim: int) -> GaussQuadrature:
    return gauss_hermite({1: 48, 2: 24, 3: 12}.get(dim, 8), dim)


def _mehler_average(values_fn, pts: np.ndarray, t: float, rule: GaussQuadrature, trailing=()) -> np.ndarray:
    a = math.exp(-t)
    b = math.sqrt(-math.expm1(-2.0 * t))
    n, m = pts.shape[0], rule.size
    shifted = (a * pts[:, None, :] + b * rule.nodes[None, :, :]).reshape(n * m, pts.shape[1])
    vals = np.asarray(values_fn(shifted), dtype=float).reshape((n, m) + trailing)
    return np.tensordot(vals, rule.weights, axes=([1], [0])) if not trailing else np.einsum(
        "nm...,m->n...", vals, rule.weights
    )


def mehler_apply(f: GaussFunction, t: Time, inner_rule: Optional[GaussQuadrature] = None) -> GaussFunction:
    """``P_t f`` evaluated pointwise by quadrature over the Mehler integral.

    ``t = 0`` returns ``f`` itself and ``t = inf`` the constant ``E f``. The
    result carries ``grad P_t f = e^{-t} P_t grad f`` and
    ``lap P_t f = e^{-2t} P_t lap f`` when ``f`` has those derivatives.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    rule = inner_rule or default_inner_rule(f.dim)
    if rule.dim != f.dim:
        raise ValueError("inner rule dimension mismatch")
    if t == 0:
        return f
    if math.isinf(t):
        return HermiteExpansion.constant(integrate(f, rule), f.dim)
    t = float(t)
    e1, e2 = math.exp(-t), math.exp(-2.0 * t)
    n = f.dim
    grad = lap = hess = None
    if has_derivative(f, "gradient"):

        def grad(pts):
            return e1 * _mehler_average(f._grad, pts, t, rule, (n,))

    if has_derivative(f, "laplacian"):

        def lap(pts):
            return e2 * _mehler_average(f._lap, pts, t, rule)

    if has_derivative(f, "hessian"):

        def hess(pts):
            return e2 * _mehler_average(f._hess, pts, t, rule, (n, n))

    return BuiltinFunction(
        f"P_{t:g}({f.label})",
        n,
        lambda pts: _mehler_average(f._value, pts, t, rule),
        grad=grad,
        lap=lap,
        hess=hess,
    )


def hermite_apply(f: HermiteExpansion, t: Time) -> HermiteExpansion:
    """Exact ``P_t`` on a Hermite expansion: ``c_alpha -> e^{-t|alpha|} c_alpha``."""
    if t < 0:
        raise ValueError("t must be non-negative")
    if math.isinf(t):
        return HermiteExpansion.constant(f.mean, f.dim)
    return f.map_coefficients(lambda a, c: math.exp(-t * sum(a)) * c)


def apply(f: GaussFunction, t: Time, inner_rule: Optional[GaussQuadrature] = None) -> GaussFunction:
    """Exact route for Hermite input, Mehler quadrature otherwise."""
    if isinstance(f, HermiteExpansion):
        return hermite_apply(f, t)
    return mehler_apply(f, t, inner_rule)


def generator_apply(f: GaussFunction) -> GaussFunction:
    """The generator ``-delta . grad``."""
    return delta_dot_nabla(f) * -1.0


RESOLVENT_NODES = 64


def resolvent(f: GaussFunction, inner_rule: Optional[GaussQuadrature] = None, nodes: int = RESOLVENT_NODES):
    """``u = int_0^inf e^{-t} P_t f dt``, the solution of ``delta . grad u + u = f``.

    Hermite input is solved exactly (``c_alpha / (1 + |alpha|)``). Otherwise the
    substitution ``s = e^{-t}`` turns the time integral into
    ``int_0^1 P_{-log s} f ds``, done with ``nodes``-point Gauss-Legendre.
    """
    if isinstance(f, HermiteExpansion):
        return f.map_coefficients(lambda a, c: c / (1.0 + sum(a)))
    rule = inner_rule or default_inner_rule(f.dim)
    x, w = np.polynomial.legendre.leggauss(nodes)
    s = (x + 1.0) / 2.0
    w = w / 2.0
    times = -np.log(s)
    pieces = [mehler_apply(f, float(tk), rule) for tk in times]

    def value(pts):
        return sum(wk * p._value(pts) for wk, p in zip(w, pieces))

    grad = None
    if has_derivative(f, "gradient"):

        def grad(pts):
            return sum(wk * p._grad(pts) for wk, p in zip(w, pieces))

    lap = None
    if has_derivative(f, "laplacian"):

        def lap(pts):
            return sum(wk * p._lap(pts) for wk, p in zip(w, pieces))

    return BuiltinFunction(f"R({f.label})", f.dim, value, grad=grad, lap=lap)


@dataclass
class NonExpansiveReport:
    lhs: float
    rhs: float
    holds: bool

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


def nonexpansive_check(
    f: GaussFunction,
    phi: YoungFunction,
    t: Time,
    rule: GaussQuadrature,
    inner_rule: Optional[GaussQuadrature] = None,
) -> NonExpansiveReport:
    """``E Phi(|P_t f|) <= E Phi(|f|)`` (Jensen through the Mehler rotation)."""
    pt = apply(f, t, inner_rule)
    lhs = rule.expect(phi.evaluate(pt._value(rule.nodes)))
    rhs = rule.expect(phi.evaluate(f._value(rule.nodes)))
    return NonExpansiveReport(lhs, rhs, lhs <= rhs + 1e-8)


def kolmogorov_residual(
    p0: GaussFunction,
    t: float,
    x,
    h_t: float = 1e-4,
    inner_rule: Optional[GaussQuadrature] = None,
) -> float:
    """``|d_t p + x . grad p - lap p|`` at ``(x, t)`` for ``p(., t) = P_t p0``.

    The time derivative is a centered difference with step ``h_t``; the
    spatial operators are exact.
    """
    if not t > h_t > 0:
        raise ValueError("need t > h_t > 0")
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    if p0.dim == 1 and pts.shape[1] != 1:
        pts = pts.reshape(-1, 1)
    plus = apply(p0, t + h_t, inner_rule)._value(pts)
    minus = apply(p0, t - h_t, inner_rule)._value(pts)
    dt = (plus - minus) / (2.0 * h_t)
    pt = apply(p0, t, inner_rule)
    spatial = np.sum(pts * pt._grad(pts), axis=1) - pt._lap(pts)
    res = np.abs(dt + spatial)
    return float(res[0]) if res.shape[0] == 1 else res


def rotation_pair(x, y, t: float):
    """``(e^{-t} X + s Y, s X - e^{-t} Y)`` with ``s = sqrt(1 - e^{-2t})``;
    an orthogonal map of ``(X, Y)``, so it preserves ``gamma x gamma``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    a = math.exp(-t)
    b = math.sqrt(-math.expm1(-2.0 * t))
    return a * x + b * y, b * x - a * y


def semigroup_law_deviation(f: GaussFunction, s: float, t: float, points, inner_rule=None) -> float:
    """``max |P_s(P_t f) - P_{s+t} f|`` over ``points``, both by Mehler."""
    rule = inner_rule or default_inner_rule(f.dim)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    nested = mehler_apply(mehler_apply(f, t, rule), s, rule)._value(pts)
    direct = mehler_apply(f, s + t, rule)._value(pts)
    return float(np.max(np.abs(nested - direct)))


def l2_contraction(f: GaussFunction, t: float, rule: GaussQuadrature, inner_rule=None):
    """``(|P_t f - E f|_2, e^{-t} |f - E f|_2)``."""
    m = integrate(f, rule)
    centered = f - m
    pt = apply(f, t, inner_rule) - m
    return l2_norm(pt, rule), math.exp(-t) * l2_norm(centered, rule)
