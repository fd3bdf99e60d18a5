"""Closed-form catalog functions referenced by name in JSON files."""

from __future__ import annotations

import math
from typing import Callable, Dict

import numpy as np

from .functions import BuiltinFunction


class UnknownBuiltinError(KeyError):
    pass


def _vec(params: dict, key: str, dim=None) -> np.ndarray:
    v = np.atleast_1d(np.asarray(params[key], dtype=float))
    if v.ndim != 1 or (dim is not None and v.shape[0] != dim):
        raise ValueError(f"params.{key} must be a vector of length {dim}")
    return v


def _dim(params: dict, default=None) -> int:
    if "dim" in params:
        return int(params["dim"])
    if default is None:
        raise ValueError("params.dim is required")
    return default


def constant(params: dict) -> BuiltinFunction:
    n, c = _dim(params, 1), float(params.get("c", 1.0))
    return BuiltinFunction(
        "constant",
        n,
        lambda x: np.full(x.shape[0], c),
        grad=lambda x: np.zeros_like(x),
        lap=lambda x: np.zeros(x.shape[0]),
        hess=lambda x: np.zeros((x.shape[0], n, n)),
        lipschitz_bound=0.0,
        params=params,
    )


def linear_sum(params: dict) -> BuiltinFunction:
    """``theta . x`` (``theta`` defaults to all ones)."""
    if "theta" in params:
        theta = _vec(params, "theta")
        n = _dim(params, theta.shape[0])
    else:
        n = _dim(params)
        theta = np.ones(n)
    if theta.shape[0] != n:
        raise ValueError("params.theta length must equal dim")
    return BuiltinFunction(
        "linear_sum",
        n,
        lambda x: x @ theta,
        grad=lambda x: np.broadcast_to(theta, x.shape).copy(),
        lap=lambda x: np.zeros(x.shape[0]),
        hess=lambda x: np.zeros((x.shape[0], n, n)),
        lipschitz_bound=float(np.linalg.norm(theta)),
        params=params,
    )


def coordinate(params: dict) -> BuiltinFunction:
    n, i = _dim(params, 1), int(params.get("i", 0))
    if not 0 <= i < n:
        raise ValueError("params.i out of range")
    theta = np.zeros(n)
    theta[i] = 1.0
    f = linear_sum({"dim": n, "theta": theta.tolist()})
    f.name = f.label = "coordinate"
    f.params = params
    return f


def quadratic(params: dict) -> BuiltinFunction:
    """``x' A x + b' x + c``."""
    A = np.atleast_2d(np.asarray(params["A"], dtype=float))
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("params.A must be square")
    b = _vec(params, "b", n) if "b" in params else np.zeros(n)
    c = float(params.get("c", 0.0))
    S = A + A.T
    return BuiltinFunction(
        "quadratic",
        n,
        lambda x: np.einsum("ni,ij,nj->n", x, A, x) + x @ b + c,
        grad=lambda x: x @ S.T + b,
        lap=lambda x: np.full(x.shape[0], float(np.trace(S))),
        hess=lambda x: np.broadcast_to(S, (x.shape[0], n, n)).copy(),
        params=params,
    )


def exp_linear(params: dict) -> BuiltinFunction:
    """``exp(theta . x)``, minus its Gaussian mean ``exp(|theta|^2/2)`` when centered."""
    theta = _vec(params, "theta")
    n = theta.shape[0]
    shift = math.exp(float(theta @ theta) / 2.0) if params.get("centered", False) else 0.0
    t2 = float(theta @ theta)
    return BuiltinFunction(
        "exp_linear",
        n,
        lambda x: np.exp(x @ theta) - shift,
        grad=lambda x: np.exp(x @ theta)[:, None] * theta,
        lap=lambda x: t2 * np.exp(x @ theta),
        hess=lambda x: np.exp(x @ theta)[:, None, None] * np.outer(theta, theta),
        params=params,
    )


def gauss_density(params: dict) -> BuiltinFunction:
    """``exp(theta . x - |theta|^2/2)``, the density of ``N(theta, I)`` w.r.t. gamma."""
    theta = _vec(params, "theta")
    n = theta.shape[0]
    t2 = float(theta @ theta)

    def log_e(x):
        return x @ theta - t2 / 2.0

    def e(x):
        return np.exp(log_e(x))

    return BuiltinFunction(
        "gauss_density",
        n,
        e,
        grad=lambda x: e(x)[:, None] * theta,
        lap=lambda x: t2 * e(x),
        hess=lambda x: e(x)[:, None, None] * np.outer(theta, theta),
        params=params,
        log_value=log_e,
    )


def sin_sum(params: dict) -> BuiltinFunction:
    """``sum_k a_k sin(w_k x_{axis_k})``; bounded and globally Lipschitz."""
    n = _dim(params, 1)
    terms = params.get("terms") or [{"a": 1.0, "k": 1.0, "axis": 0}]
    a = np.array([float(t.get("a", 1.0)) for t in terms])
    w = np.array([float(t.get("k", 1.0)) for t in terms])
    ax = np.array([int(t.get("axis", 0)) for t in terms])
    if np.any((ax < 0) | (ax >= n)):
        raise ValueError("params.terms[].axis out of range")

    def value(x):
        return np.sum(a * np.sin(w * x[:, ax]), axis=1)

    def grad(x):
        g = np.zeros_like(x)
        for j in range(len(a)):
            g[:, ax[j]] += a[j] * w[j] * np.cos(w[j] * x[:, ax[j]])
        return g

    def hess(x):
        h = np.zeros((x.shape[0], n, n))
        for j in range(len(a)):
            h[:, ax[j], ax[j]] -= a[j] * w[j] ** 2 * np.sin(w[j] * x[:, ax[j]])
        return h

    per_axis = np.zeros(n)
    for j in range(len(a)):
        per_axis[ax[j]] += abs(a[j] * w[j])
    return BuiltinFunction(
        "sin_sum", n, value, grad=grad, hess=hess, lipschitz_bound=float(np.linalg.norm(per_axis)), params=params
    )


def log_cosh(params: dict) -> BuiltinFunction:
    """``log cosh(theta . x)``, smooth with Lipschitz constant ``|theta|``."""
    theta = _vec(params, "theta")
    n = theta.shape[0]
    t2 = float(theta @ theta)

    def value(x):
        s = x @ theta
        return np.logaddexp(s, -s) - math.log(2.0)

    def sech2(x):
        return 1.0 / np.cosh(x @ theta) ** 2

    return BuiltinFunction(
        "log_cosh",
        n,
        value,
        grad=lambda x: np.tanh(x @ theta)[:, None] * theta,
        lap=lambda x: t2 * sech2(x),
        hess=lambda x: sech2(x)[:, None, None] * np.outer(theta, theta),
        lipschitz_bound=math.sqrt(t2),
        params=params,
    )


def monomial(params: dict) -> BuiltinFunction:
    """``c * prod_i x_i**k_i``; used for super-linear gradients."""
    k = np.asarray(params["powers"], dtype=int)
    n = k.shape[0]
    c = float(params.get("c", 1.0))

    def term(x, kk):
        if np.any(kk < 0):
            return np.zeros(x.shape[0])
        return c * np.prod(x**kk, axis=1)

    def grad(x):
        cols = []
        for i in range(n):
            kk = k.copy()
            kk[i] -= 1
            cols.append(k[i] * term(x, kk))
        return np.stack(cols, axis=1)

    def hess(x):
        h = np.zeros((x.shape[0], n, n))
        for i in range(n):
            for j in range(n):
                kk = k.copy()
                kk[i] -= 1
                f1 = k[i]
                f2 = kk[j]
                kk[j] -= 1
                h[:, i, j] = f1 * f2 * term(x, kk)
        return h

    return BuiltinFunction("monomial", n, lambda x: term(x, k), grad=grad, hess=hess, params=params)


REGISTRY: Dict[str, Callable[[dict], BuiltinFunction]] = {
    "constant": constant,
    "coordinate": coordinate,
    "linear_sum": linear_sum,
    "quadratic": quadratic,
    "exp_linear": exp_linear,
    "gauss_density": gauss_density,
    "sin_sum": sin_sum,
    "log_cosh": log_cosh,
    "monomial": monomial,
}


def make_builtin(name: str, params: dict) -> BuiltinFunction:
    try:
        factory = REGISTRY[name]
    except KeyError:
        raise UnknownBuiltinError(f"unknown builtin name {name!r}") from None
    return factory(dict(params or {}))
