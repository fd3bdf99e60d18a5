"""Functions on the Gaussian space.

Two concrete representations share one interface (:class:`GaussFunction`):

* :class:`HermiteExpansion`, a finite sum of probabilists' Hermite products
  with exact differentiation, divergence and semigroup actions;
* :class:`BuiltinFunction`, a closed-form function carrying analytic
  gradient / Laplacian / Hessian callables where they are known.

Every evaluator takes points of shape ``(N, dim)`` (or a single point of
shape ``(dim,)``) and is vectorized over ``N``.
"""

from __future__ import annotations

import math
from typing import Callable, Dict, Iterable, Mapping, Optional, Tuple

import numpy as np

MultiIndex = Tuple[int, ...]


class MissingDerivativeError(RuntimeError):
    """The requested derivative is not available for this function."""


def as_points(x, dim: int) -> Tuple[np.ndarray, bool]:
    """Coerce ``x`` to shape ``(N, dim)``; the flag says a single point came in."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    if arr.ndim == 1:
        if dim == 1 and arr.shape[0] != 1:
            return arr.reshape(-1, 1), False
        if arr.shape[0] != dim:
            raise ValueError(f"point has length {arr.shape[0]}, expected {dim}")
        return arr.reshape(1, dim), True
    if arr.ndim != 2 or arr.shape[1] != dim:
        raise ValueError(f"points must have shape (N, {dim}), got {arr.shape}")
    return arr, False


def _out(values: np.ndarray, single: bool):
    return values[0] if single else values


class GaussFunction:
    """Common interface. Subclasses implement the ``_value``/``_grad`` family
    on ``(N, dim)`` arrays."""

    dim: int
    label: str = "f"

    def __call__(self, x):
        pts, single = as_points(x, self.dim)
        v = self._value(pts)
        return float(v[0]) if single else v

    def gradient(self, x):
        pts, single = as_points(x, self.dim)
        return _out(self._grad(pts), single)

    def laplacian(self, x):
        pts, single = as_points(x, self.dim)
        v = self._lap(pts)
        return float(v[0]) if single else v

    def hessian(self, x):
        pts, single = as_points(x, self.dim)
        return _out(self._hess(pts), single)

    @property
    def is_hermite(self) -> bool:
        return False

    # arithmetic helpers, overridden by HermiteExpansion to stay exact
    def __add__(self, other):
        return combine([(1.0, self), (1.0, _lift(other, self.dim))])

    def __radd__(self, other):
        return self.__add__(other)

    def __sub__(self, other):
        return combine([(1.0, self), (-1.0, _lift(other, self.dim))])

    def __rsub__(self, other):
        return combine([(-1.0, self), (1.0, _lift(other, self.dim))])

    def __mul__(self, c):
        if isinstance(c, GaussFunction):
            return product(self, c)
        return combine([(float(c), self)])

    def __rmul__(self, c):
        return self.__mul__(c)

    def __neg__(self):
        return self * -1.0

    def __truediv__(self, c: float):
        return self * (1.0 / float(c))


def _lift(other, dim: int) -> "GaussFunction":
    if isinstance(other, GaussFunction):
        if other.dim != dim:
            raise ValueError(f"dimension mismatch: {dim} vs {other.dim}")
        return other
    return HermiteExpansion.constant(float(other), dim)


def hermite_table(t: np.ndarray, degree: int) -> np.ndarray:
    """``He_0(t) ... He_degree(t)`` stacked on axis 0, via
    ``He_{k+1} = t He_k - k He_{k-1}``."""
    t = np.asarray(t, dtype=float)
    out = np.empty((degree + 1,) + t.shape)
    out[0] = 1.0
    if degree >= 1:
        out[1] = t
    for k in range(1, degree):
        out[k + 1] = t * out[k] - k * out[k - 1]
    return out


def hermite_eval(alpha: MultiIndex, x) -> np.ndarray:
    """``H_alpha(x) = prod_i He_{alpha_i}(x_i)``."""
    alpha = tuple(int(a) for a in alpha)
    pts, single = as_points(x, len(alpha))
    v = np.ones(pts.shape[0])
    for i, a in enumerate(alpha):
        if a:
            v = v * hermite_table(pts[:, i], a)[a]
    return float(v[0]) if single else v


def multi_factorial(alpha: MultiIndex) -> int:
    return math.prod(math.factorial(a) for a in alpha)


class HermiteExpansion(GaussFunction):
    """Finite expansion ``sum_alpha c_alpha H_alpha`` on ``R^dim``.

    Zero coefficients are dropped on construction, so two expansions are equal
    exactly when their ``terms`` dicts are.
    """

    def __init__(self, dim: int, terms: Optional[Mapping[MultiIndex, float]] = None, label: str = "hermite"):
        if dim < 1:
            raise ValueError("dim must be positive")
        self.dim = int(dim)
        self.label = label
        clean: Dict[MultiIndex, float] = {}
        for alpha, c in (terms or {}).items():
            alpha = tuple(int(a) for a in alpha)
            if len(alpha) != self.dim:
                raise ValueError(f"multi-index {alpha} has length {len(alpha)}, expected {self.dim}")
            if any(a < 0 for a in alpha):
                raise ValueError(f"negative multi-index entry in {alpha}")
            c = float(c)
            if c != 0.0:
                clean[alpha] = clean.get(alpha, 0.0) + c
        self.terms = {a: c for a, c in sorted(clean.items()) if c != 0.0}

    @classmethod
    def constant(cls, c: float, dim: int) -> "HermiteExpansion":
        return cls(dim, {(0,) * dim: c})

    @classmethod
    def basis(cls, alpha: Iterable[int], c: float = 1.0) -> "HermiteExpansion":
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: c})

    @property
    def is_hermite(self) -> bool:
        return True

    def __repr__(self) -> str:
        return f"HermiteExpansion(dim={self.dim}, terms={self.terms})"

    def __eq__(self, other) -> bool:
        return isinstance(other, HermiteExpansion) and self.dim == other.dim and self.terms == other.terms

    __hash__ = None

    def allclose(self, other: "HermiteExpansion", atol: float = 1e-12) -> bool:
        keys = set(self.terms) | set(other.terms)
        return self.dim == other.dim and all(
            abs(self.terms.get(k, 0.0) - other.terms.get(k, 0.0)) <= atol for k in keys
        )

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def coefficient(self, alpha: Iterable[int]) -> float:
        return self.terms.get(tuple(alpha), 0.0)

    @property
    def mean(self) -> float:
        """Exact ``E_gamma`` (the constant coefficient)."""
        return self.terms.get((0,) * self.dim, 0.0)

    def inner(self, other: "HermiteExpansion") -> float:
        """Exact ``L^2(gamma)`` inner product, ``sum c_a d_a alpha!``."""
        return sum(c * other.terms.get(a, 0.0) * multi_factorial(a) for a, c in self.terms.items())

    def map_coefficients(self, fn: Callable[[MultiIndex, float], float]) -> "HermiteExpansion":
        return HermiteExpansion(self.dim, {a: fn(a, c) for a, c in self.terms.items()})

    # exact calculus
    def partial(self, i: int) -> "HermiteExpansion":
        """``d_i H_alpha = alpha_i H_{alpha - e_i}``."""
        out: Dict[MultiIndex, float] = {}
        for a, c in self.terms.items():
            if a[i]:
                b = a[:i] + (a[i] - 1,) + a[i + 1 :]
                out[b] = out.get(b, 0.0) + a[i] * c
        return HermiteExpansion(self.dim, out)

    def delta(self, i: int) -> "HermiteExpansion":
        """``delta_i H_alpha = H_{alpha + e_i}``."""
        out = {a[:i] + (a[i] + 1,) + a[i + 1 :]: c for a, c in self.terms.items()}
        return HermiteExpansion(self.dim, out)

    def number_operator(self) -> "HermiteExpansion":
        """``delta . grad`` acting as ``c_alpha -> |alpha| c_alpha``."""
        return self.map_coefficients(lambda a, c: sum(a) * c)

    # linear structure stays inside the Hermite representation
    def _combine_hermite(self, other: "HermiteExpansion", s: float) -> "HermiteExpansion":
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")
        terms = dict(self.terms)
        for a, c in other.terms.items():
            terms[a] = terms.get(a, 0.0) + s * c
        return HermiteExpansion(self.dim, terms)

    def __add__(self, other):
        if isinstance(other, HermiteExpansion):
            return self._combine_hermite(other, 1.0)
        if not isinstance(other, GaussFunction):
            return self._combine_hermite(HermiteExpansion.constant(float(other), self.dim), 1.0)
        return super().__add__(other)

    def __sub__(self, other):
        if isinstance(other, HermiteExpansion):
            return self._combine_hermite(other, -1.0)
        if not isinstance(other, GaussFunction):
            return self._combine_hermite(HermiteExpansion.constant(float(other), self.dim), -1.0)
        return super().__sub__(other)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, c):
        if isinstance(c, GaussFunction):
            return product(self, c)
        return self.map_coefficients(lambda a, v: float(c) * v)

    # evaluation
    def _tables(self, pts: np.ndarray):
        degs = [max((a[i] for a in self.terms), default=0) for i in range(self.dim)]
        return [hermite_table(pts[:, i], d) for i, d in enumerate(degs)]

    def _eval_terms(self, terms: Mapping[MultiIndex, float], pts: np.ndarray, tables) -> np.ndarray:
        v = np.zeros(pts.shape[0])
        for a, c in terms.items():
            t = np.full(pts.shape[0], c)
            for i, ai in enumerate(a):
                if ai:
                    t = t * tables[i][ai]
            v = v + t
        return v

    def _value(self, pts):
        return self._eval_terms(self.terms, pts, self._tables(pts))

    def _grad(self, pts):
        tables = self._tables(pts)
        cols = [self._eval_terms(self.partial(i).terms, pts, tables) for i in range(self.dim)]
        return np.stack(cols, axis=-1)

    def _lap(self, pts):
        tables = self._tables(pts)
        v = np.zeros(pts.shape[0])
        for i in range(self.dim):
            v = v + self._eval_terms(self.partial(i).partial(i).terms, pts, tables)
        return v

    def _hess(self, pts):
        tables = self._tables(pts)
        out = np.empty((pts.shape[0], self.dim, self.dim))
        for i in range(self.dim):
            di = self.partial(i)
            for j in range(i, self.dim):
                out[:, i, j] = out[:, j, i] = self._eval_terms(di.partial(j).terms, pts, tables)
        return out


def _missing(what: str, name: str):
    def fail(pts):
        raise MissingDerivativeError(f"{what} not available for {name}")

    return fail


class BuiltinFunction(GaussFunction):
    """A closed-form function with optional analytic derivatives.

    ``value``, ``grad``, ``lap`` and ``hess`` act on ``(N, dim)`` arrays and
    return shapes ``(N,)``, ``(N, dim)``, ``(N,)``, ``(N, dim, dim)``.
    Positive functions of exponential form may also supply ``log_value``,
    which stays finite where ``value`` overflows.
    """

    def __init__(
        self,
        name: str,
        dim: int,
        value: Callable[[np.ndarray], np.ndarray],
        grad: Optional[Callable] = None,
        lap: Optional[Callable] = None,
        hess: Optional[Callable] = None,
        lipschitz_bound: Optional[float] = None,
        params: Optional[dict] = None,
        log_value: Optional[Callable] = None,
    ):
        self.name = name
        self.label = name
        self.dim = int(dim)
        self.params = dict(params or {})
        self.lipschitz_bound = lipschitz_bound
        self._value_fn = value
        self._grad_fn = grad
        self._lap_fn = lap
        self._hess_fn = hess
        self._log_fn = log_value
        if lap is None and hess is not None:
            self._lap_fn = lambda pts: np.trace(hess(pts), axis1=1, axis2=2)

    def __repr__(self) -> str:
        return f"BuiltinFunction({self.name!r}, dim={self.dim})"

    @property
    def has_gradient(self) -> bool:
        return self._grad_fn is not None

    @property
    def has_laplacian(self) -> bool:
        return self._lap_fn is not None

    @property
    def has_hessian(self) -> bool:
        return self._hess_fn is not None

    def _value(self, pts):
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(self._value_fn(pts), dtype=float).reshape(pts.shape[0])

    def log_value(self, pts) -> np.ndarray:
        """``log f`` at ``pts``; ``nan`` where ``f <= 0``."""
        if self._log_fn is not None:
            return np.asarray(self._log_fn(pts), dtype=float).reshape(pts.shape[0])
        v = self._value(pts)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(v > 0, np.log(np.where(v > 0, v, 1.0)), np.nan)

    def _grad(self, pts):
        if self._grad_fn is None:
            raise MissingDerivativeError(f"gradient not available for {self.name}")
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(self._grad_fn(pts), dtype=float).reshape(pts.shape[0], self.dim)

    def _lap(self, pts):
        if self._lap_fn is None:
            raise MissingDerivativeError(f"laplacian not available for {self.name}")
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(self._lap_fn(pts), dtype=float).reshape(pts.shape[0])

    def _hess(self, pts):
        if self._hess_fn is None:
            raise MissingDerivativeError(f"hessian not available for {self.name}")
        with np.errstate(over="ignore", invalid="ignore"):
            return np.asarray(self._hess_fn(pts), dtype=float).reshape(pts.shape[0], self.dim, self.dim)


def has_derivative(f: GaussFunction, what: str) -> bool:
    if isinstance(f, HermiteExpansion):
        return True
    return getattr(f, f"has_{what}")


def combine(pairs, const: float = 0.0, name: Optional[str] = None) -> GaussFunction:
    """``const + sum c_k f_k``; stays Hermite when every ``f_k`` is."""
    pairs = [(float(c), f) for c, f in pairs]
    dim = pairs[0][1].dim
    if any(f.dim != dim for _, f in pairs):
        raise ValueError("dimension mismatch in linear combination")
    if all(isinstance(f, HermiteExpansion) for _, f in pairs):
        out = HermiteExpansion.constant(const, dim)
        for c, f in pairs:
            out = out._combine_hermite(f, c)
        return out
    name = name or " + ".join(f"{c:g}*{f.label}" for c, f in pairs)

    def value(pts):
        return const + sum(c * f._value(pts) for c, f in pairs)

    def grad_of(attr):
        if not all(has_derivative(f, attr) for _, f in pairs):
            return None
        method = {"gradient": "_grad", "laplacian": "_lap", "hessian": "_hess"}[attr]
        return lambda pts: sum(c * getattr(f, method)(pts) for c, f in pairs)

    lips = [f.lipschitz_bound if isinstance(f, BuiltinFunction) else None for _, f in pairs]
    lip = None
    if all(l is not None for l in lips):
        lip = sum(abs(c) * l for (c, _), l in zip(pairs, lips))
    return BuiltinFunction(
        name,
        dim,
        value,
        grad=grad_of("gradient"),
        lap=grad_of("laplacian"),
        hess=grad_of("hessian"),
        lipschitz_bound=lip,
    )


def product(f: GaussFunction, g: GaussFunction) -> BuiltinFunction:
    """Pointwise product with product-rule derivatives where available."""
    if f.dim != g.dim:
        raise ValueError("dimension mismatch in product")
    grad = lap = hess = None
    if has_derivative(f, "gradient") and has_derivative(g, "gradient"):

        def grad(pts):
            return f._grad(pts) * g._value(pts)[:, None] + f._value(pts)[:, None] * g._grad(pts)

        if has_derivative(f, "laplacian") and has_derivative(g, "laplacian"):

            def lap(pts):
                return (
                    f._lap(pts) * g._value(pts)
                    + 2.0 * np.sum(f._grad(pts) * g._grad(pts), axis=1)
                    + f._value(pts) * g._lap(pts)
                )

        if has_derivative(f, "hessian") and has_derivative(g, "hessian"):

            def hess(pts):
                fg, gg = f._grad(pts), g._grad(pts)
                cross = fg[:, :, None] * gg[:, None, :]
                return (
                    f._hess(pts) * g._value(pts)[:, None, None]
                    + cross
                    + np.swapaxes(cross, 1, 2)
                    + f._value(pts)[:, None, None] * g._hess(pts)
                )

    return BuiltinFunction(
        f"({f.label})*({g.label})",
        f.dim,
        lambda pts: f._value(pts) * g._value(pts),
        grad=grad,
        lap=lap,
        hess=hess,
    )


def compose_scalar(
    f: GaussFunction,
    outer: Callable[[np.ndarray], np.ndarray],
    outer_d1: Optional[Callable] = None,
    outer_d2: Optional[Callable] = None,
    name: str = "h(f)",
) -> BuiltinFunction:
    """``x -> outer(f(x))`` with chain-rule gradient and Laplacian."""
    grad = lap = hess = None
    if outer_d1 is not None and has_derivative(f, "gradient"):

        def grad(pts):
            return outer_d1(f._value(pts))[:, None] * f._grad(pts)

        if outer_d2 is not None and has_derivative(f, "laplacian"):

            def lap(pts):
                v, g = f._value(pts), f._grad(pts)
                return outer_d2(v) * np.sum(g * g, axis=1) + outer_d1(v) * f._lap(pts)

        if outer_d2 is not None and has_derivative(f, "hessian"):

            def hess(pts):
                v, g = f._value(pts), f._grad(pts)
                return outer_d2(v)[:, None, None] * g[:, :, None] * g[:, None, :] + outer_d1(v)[
                    :, None, None
                ] * f._hess(pts)

    return BuiltinFunction(name, f.dim, lambda pts: outer(f._value(pts)), grad=grad, lap=lap, hess=hess)


def gradient_norm(f: GaussFunction, ord: float = 2) -> BuiltinFunction:
    """``x -> |grad f(x)|_ord`` (value only)."""
    return BuiltinFunction(
        f"|grad {f.label}|_{ord:g}",
        f.dim,
        lambda pts: np.linalg.norm(f._grad(pts), ord=ord, axis=1),
    )
