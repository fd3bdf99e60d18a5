"""Gaussian integration and the operators d_i, delta_i and delta . grad."""

from __future__ import annotations

import math

import numpy as np

from .functions import (
    BuiltinFunction,
    GaussFunction,
    HermiteExpansion,
    MissingDerivativeError,
    has_derivative,
)
from .quadrature import GaussQuadrature


def _check_dim(f: GaussFunction, rule: GaussQuadrature):
    if f.dim != rule.dim:
        raise ValueError(f"dimension mismatch: function dim {f.dim}, rule dim {rule.dim}")


def integrate(f: GaussFunction, rule: GaussQuadrature) -> float:
    """``sum_i w_i f(x_i)``; ``+inf`` if an evaluation overflows."""
    _check_dim(f, rule)
    return rule.expect(f._value(rule.nodes))


def mean(f: GaussFunction, rule: GaussQuadrature) -> float:
    return integrate(f, rule)


def covariance(f: GaussFunction, g: GaussFunction, rule: GaussQuadrature) -> float:
    _check_dim(f, rule)
    _check_dim(g, rule)
    fv, gv = f._value(rule.nodes), g._value(rule.nodes)
    fc = fv - rule.expect(fv)
    gc = gv - rule.expect(gv)
    return rule.expect(fc * gc)


def partial(f: GaussFunction, i: int) -> GaussFunction:
    """``d_i f``: exact coefficient shift for Hermite input, analytic gradient
    component for builtins."""
    if not 0 <= i < f.dim:
        raise ValueError(f"axis {i} out of range for dim {f.dim}")
    if isinstance(f, HermiteExpansion):
        return f.partial(i)
    if not has_derivative(f, "gradient"):
        raise MissingDerivativeError(f"gradient not available for {f.label}")
    hess = None
    if has_derivative(f, "hessian"):
        hess_full = f._hess

        def grad(pts):
            return hess_full(pts)[:, i, :]

    else:
        grad = None
    return BuiltinFunction(f"d{i + 1}({f.label})", f.dim, lambda pts: f._grad(pts)[:, i], grad=grad, hess=hess)


def delta(f: GaussFunction, i: int) -> GaussFunction:
    """``delta_i f = x_i f - d_i f``, the ``gamma``-adjoint of ``d_i``."""
    if not 0 <= i < f.dim:
        raise ValueError(f"axis {i} out of range for dim {f.dim}")
    if isinstance(f, HermiteExpansion):
        return f.delta(i)
    if not has_derivative(f, "gradient"):
        raise MissingDerivativeError(f"gradient not available for {f.label}")

    def value(pts):
        return pts[:, i] * f._value(pts) - f._grad(pts)[:, i]

    grad = None
    if has_derivative(f, "hessian"):

        def grad(pts):
            g = pts[:, i : i + 1] * f._grad(pts) - f._hess(pts)[:, i, :]
            g[:, i] += f._value(pts)
            return g

    return BuiltinFunction(f"delta{i + 1}({f.label})", f.dim, value, grad=grad)


def delta_dot_nabla(f: GaussFunction) -> GaussFunction:
    """``x . grad f - lap f``; on ``H_alpha`` this is multiplication by ``|alpha|``."""
    if isinstance(f, HermiteExpansion):
        return f.number_operator()
    if not (has_derivative(f, "gradient") and has_derivative(f, "laplacian")):
        raise MissingDerivativeError(f"delta . grad needs gradient and laplacian of {f.label}")
    return BuiltinFunction(
        f"delta.grad({f.label})",
        f.dim,
        lambda pts: np.sum(pts * f._grad(pts), axis=1) - f._lap(pts),
    )


def l2_norm(f: GaussFunction, rule: GaussQuadrature) -> float:
    v = f._value(rule.nodes)
    return math.sqrt(max(rule.expect(v * v), 0.0))
