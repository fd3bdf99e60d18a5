"""Young functions used on the Gaussian space.

The catalog is closed: powers ``x**p / p``, ``exp2``, ``cosh-1``, their
conjugates, ``gauss2`` and the squared composition ``Phi(x**2)``. All
evaluators are vectorized over numpy arrays and follow one overflow rule:
anything above ``OVERFLOW`` becomes ``+inf``.
"""

from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from scipy import integrate, optimize, special

OVERFLOW = 1e300

ArrayLike = Union[float, np.ndarray]


class UnsupportedKindError(ValueError):
    """Raised when an operation has no catalog answer for a Young function."""


class Kind(str, enum.Enum):
    POWER = "power"
    EXP2 = "exp2"
    EXP2_STAR = "exp2*"
    COSH_M1 = "cosh-1"
    COSH_M1_STAR = "cosh-1*"
    GAUSS2 = "gauss2"
    SQUARED = "sq"


def _clip_overflow(v: np.ndarray) -> np.ndarray:
    v = np.where(np.isnan(v), np.inf, v)
    return np.where(v > OVERFLOW, np.inf, v)


@dataclass(frozen=True)
class YoungFunction:
    """A catalog Young function ``Phi`` with density ``phi = Phi'``.

    Use the module-level constructors (:func:`power`, :data:`EXP2`, ...) or
    :func:`parse_young` rather than building instances by hand.
    """

    kind: Kind
    p: Optional[float] = None
    base: Optional["YoungFunction"] = None

    def __post_init__(self):
        if self.kind is Kind.POWER and (self.p is None or not self.p > 1):
            raise ValueError(f"power Young function needs p > 1, got {self.p!r}")
        if self.kind is Kind.SQUARED and self.base is None:
            raise ValueError("squared composition needs a base Young function")

    @property
    def name(self) -> str:
        if self.kind is Kind.POWER:
            return f"power:{self.p:g}"
        if self.kind is Kind.SQUARED:
            return f"sq({self.base.name})"
        return self.kind.value

    def __str__(self) -> str:
        return self.name

    def __call__(self, x: ArrayLike) -> ArrayLike:
        return self.evaluate(x)

    def evaluate(self, x: ArrayLike) -> ArrayLike:
        """``Phi(x)`` for ``x >= 0`` (negative input is read as ``|x|``)."""
        scalar = np.ndim(x) == 0
        x = np.abs(np.asarray(x, dtype=float))
        with np.errstate(over="ignore", invalid="ignore"):
            k = self.kind
            if k is Kind.POWER:
                v = x**self.p / self.p
            elif k is Kind.EXP2:
                v = np.expm1(x) - x
            elif k is Kind.EXP2_STAR:
                v = (1.0 + x) * np.log1p(x) - x
            elif k is Kind.COSH_M1:
                # cosh(x) - 1 = 2 sinh(x/2)^2, no cancellation near 0
                v = 2.0 * np.sinh(x / 2.0) ** 2
            elif k is Kind.COSH_M1_STAR:
                v = x * np.arcsinh(x) - np.sqrt(1.0 + x * x) + 1.0
                # series x^2/2 - x^4/24 avoids the cancellation near 0
                v = np.where(x < 1e-4, x * x / 2.0 - x**4 / 24.0, v)
            elif k is Kind.GAUSS2:
                v = np.expm1(x * x / 2.0)
            else:
                v = np.asarray(self.base.evaluate(x * x), dtype=float)
            v = _clip_overflow(np.asarray(v, dtype=float))
        return float(v) if scalar else v

    def log_evaluate(self, x: ArrayLike) -> ArrayLike:
        """``log Phi(x)`` computed without overflow, ``-inf`` at 0."""
        scalar = np.ndim(x) == 0
        x = np.abs(np.asarray(x, dtype=float))
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            k = self.kind
            if k is Kind.POWER:
                out = self.p * np.log(x) - math.log(self.p)
            elif k is Kind.EXP2:
                big = x > 30
                out = np.where(
                    big,
                    x + np.log1p(-(1.0 + x) * np.exp(-np.minimum(x, 700))),
                    np.log(np.expm1(np.minimum(x, 30)) - np.minimum(x, 30)),
                )
            elif k is Kind.COSH_M1:
                big = x > 30
                out = np.where(
                    big,
                    x - math.log(2.0) + np.log1p(-2.0 * np.exp(-np.minimum(x, 700))),
                    np.log(2.0) + 2.0 * np.log(np.sinh(np.minimum(x, 30) / 2.0)),
                )
            elif k is Kind.GAUSS2:
                h = x * x / 2.0
                out = h + np.log(-np.expm1(-h))
            elif k is Kind.SQUARED:
                out = np.asarray(self.base.log_evaluate(x * x), dtype=float)
            else:
                out = np.log(np.asarray(self.evaluate(x), dtype=float))
        return float(out) if scalar else out

    def density(self, x: ArrayLike) -> ArrayLike:
        """The right derivative ``phi(x)``."""
        scalar = np.ndim(x) == 0
        x = np.abs(np.asarray(x, dtype=float))
        with np.errstate(over="ignore", invalid="ignore"):
            k = self.kind
            if k is Kind.POWER:
                v = x ** (self.p - 1.0)
            elif k is Kind.EXP2:
                v = np.expm1(x)
            elif k is Kind.EXP2_STAR:
                v = np.log1p(x)
            elif k is Kind.COSH_M1:
                v = np.sinh(x)
            elif k is Kind.COSH_M1_STAR:
                v = np.arcsinh(x)
            elif k is Kind.GAUSS2:
                v = x * np.exp(x * x / 2.0)
            else:
                v = 2.0 * x * np.asarray(self.base.density(x * x), dtype=float)
            v = _clip_overflow(np.asarray(v, dtype=float))
        return float(v) if scalar else v

    def inverse_density(self, y: ArrayLike) -> ArrayLike:
        """``psi = phi^{-1}``, the density of the conjugate function."""
        scalar = np.ndim(y) == 0
        y = np.abs(np.asarray(y, dtype=float))
        with np.errstate(over="ignore", invalid="ignore"):
            k = self.kind
            if k is Kind.POWER:
                v = y ** (1.0 / (self.p - 1.0))
            elif k is Kind.EXP2:
                v = np.log1p(y)
            elif k is Kind.EXP2_STAR:
                v = np.expm1(y)
            elif k is Kind.COSH_M1:
                v = np.arcsinh(y)
            elif k is Kind.COSH_M1_STAR:
                v = np.sinh(y)
            elif k is Kind.GAUSS2:
                # x e^{x^2/2} = y  <=>  x^2 = W(y^2)
                v = np.sqrt(np.real(special.lambertw(y * y)))
            else:
                v = np.vectorize(self._invert_density_numeric, otypes=[float])(y)
            v = _clip_overflow(np.asarray(v, dtype=float))
        return float(v) if scalar else v

    def _invert_density_numeric(self, y: float) -> float:
        if y == 0:
            return 0.0
        hi = 1.0
        while self.density(hi) < y:
            hi *= 2.0
            if hi > 1e150:
                return math.inf
        return optimize.brentq(lambda s: self.density(s) - y, 0.0, hi, xtol=1e-15, rtol=1e-15)

    def conjugate(self) -> "YoungFunction":
        return conjugate(self)


def power(p: float) -> YoungFunction:
    return YoungFunction(Kind.POWER, p=float(p))


EXP2 = YoungFunction(Kind.EXP2)
EXP2_STAR = YoungFunction(Kind.EXP2_STAR)
COSH_M1 = YoungFunction(Kind.COSH_M1)
COSH_M1_STAR = YoungFunction(Kind.COSH_M1_STAR)
GAUSS2 = YoungFunction(Kind.GAUSS2)

_CONJUGATES = {
    Kind.EXP2: Kind.EXP2_STAR,
    Kind.EXP2_STAR: Kind.EXP2,
    Kind.COSH_M1: Kind.COSH_M1_STAR,
    Kind.COSH_M1_STAR: Kind.COSH_M1,
}


def conjugate(phi: YoungFunction) -> YoungFunction:
    """Return ``Phi_*``. Only the power, exp2 and cosh-1 families are closed."""
    if phi.kind is Kind.POWER:
        return power(phi.p / (phi.p - 1.0))
    if phi.kind in _CONJUGATES:
        return YoungFunction(_CONJUGATES[phi.kind])
    raise UnsupportedKindError(f"no catalog conjugate for {phi.name}")


def squared_compose(phi: YoungFunction) -> YoungFunction:
    """``x -> Phi(x**2)``, the Young function of the squared space."""
    return YoungFunction(Kind.SQUARED, base=phi)


def young_gap(phi: YoungFunction, x: ArrayLike, y: ArrayLike) -> ArrayLike:
    """``Phi(x) + Phi_*(y) - x*y``; nonnegative by the Young inequality."""
    a = np.asarray(phi.evaluate(x), dtype=float)
    b = np.asarray(conjugate(phi).evaluate(y), dtype=float)
    with np.errstate(invalid="ignore"):
        gap = a + b - np.asarray(x, dtype=float) * np.asarray(y, dtype=float)
    gap = np.where(np.isinf(a) | np.isinf(b), np.inf, gap)
    return float(gap) if np.ndim(gap) == 0 else gap


def legendre_residual(phi: YoungFunction, x: ArrayLike) -> ArrayLike:
    """``Phi(x) + Phi_*(phi(x)) - x*phi(x)``, zero up to rounding."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(phi.density(x), dtype=float)
    out = phi.evaluate(x) + conjugate(phi).evaluate(d) - x * d
    return float(out) if np.ndim(out) == 0 else out


def cosh_m1_star_integral(y: float) -> float:
    """Defining integral of ``(cosh-1)_*``; kept as an independent check."""
    val, _ = integrate.quad(np.arcsinh, 0.0, y, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def growth_control(phi: YoungFunction, a: ArrayLike) -> ArrayLike:
    """A constant ``C(a)`` with ``Phi(a x) <= C(a) Phi(x)`` for every ``x >= 0``."""
    a = np.abs(np.asarray(a, dtype=float))
    if phi.kind is Kind.POWER:
        out = a**phi.p
    elif phi.kind in (Kind.EXP2_STAR, Kind.COSH_M1_STAR):
        # phi''(y) is decreasing for both, hence Phi(a y) <= a^2 Phi(y) for a >= 1
        out = np.maximum(a, a * a)
    else:
        raise UnsupportedKindError(f"{phi.name} has no multiplicative growth control")
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class DominationResult:
    dominated: bool
    kappa: Optional[float] = None
    xbar: Optional[float] = None
    counterexample: Optional[float] = None


def eventually_dominates(
    phi1: YoungFunction,
    phi2: YoungFunction,
    kappa_grid: Sequence[float],
    xbar_grid: Sequence[float],
    xmax: float,
    points: int = 2000,
) -> DominationResult:
    """Search for ``kappa, xbar`` with ``phi1(x) <= phi2(kappa x)`` on ``[xbar, xmax]``.

    This is a bounded semi-decision: a witness only certifies the grid points
    in ``[xbar, xmax]``, and a counterexample only says no pair in the given
    grids works up to ``xmax``. Comparisons are made in log space so that
    overflowing values still order correctly.
    """
    if not kappa_grid or not xbar_grid:
        raise ValueError("kappa_grid and xbar_grid must be non-empty")
    if not xmax > max(xbar_grid):
        raise ValueError("xmax must exceed every xbar")
    best_first_bad = -math.inf
    best_x = None
    for kappa in kappa_grid:
        for xbar in xbar_grid:
            xs = np.linspace(xbar, xmax, points)
            lhs = np.asarray(phi1.log_evaluate(xs))
            rhs = np.asarray(phi2.log_evaluate(kappa * xs))
            bad = lhs > rhs + 1e-12 * np.maximum(1.0, np.abs(rhs))
            if not np.any(bad):
                return DominationResult(True, kappa=float(kappa), xbar=float(xbar))
            first_bad = xs[np.argmax(bad)]
            if first_bad > best_first_bad:
                best_first_bad = first_bad
                best_x = float(xs[np.nonzero(bad)[0][-1]])
    return DominationResult(False, counterexample=best_x)


class ExpMode:
    """The plain exponential ``s -> e**s``; not a Young function, only used in
    the moment generating bound."""

    name = "exp"

    def __call__(self, s):
        with np.errstate(over="ignore"):
            return _clip_overflow(np.exp(np.asarray(s, dtype=float)))


@dataclass(frozen=True)
class RawPower:
    """``s -> |s|**q`` without the ``1/q`` normalization of :func:`power`."""

    q: float

    @property
    def name(self) -> str:
        return f"raw-power:{self.q:g}"

    def __call__(self, s):
        with np.errstate(over="ignore"):
            return _clip_overflow(np.abs(np.asarray(s, dtype=float)) ** self.q)


ConvexFunction = Union[YoungFunction, ExpMode, RawPower]

HALF_PI = math.pi / 2.0


def gaussian_abs_moment(q: float) -> float:
    """``E|Z|**q`` for a standard normal ``Z``, ``q > -1``."""
    return 2.0 ** (q / 2.0) * math.exp(special.gammaln((q + 1.0) / 2.0)) / math.sqrt(math.pi)


_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(240)


def _half_line_mean(func, c: np.ndarray) -> np.ndarray:
    """``E g(c |Z|)`` for each scale in ``c`` by Gauss-Legendre on ``[0, Z]``.

    The window grows with ``c`` so the Gaussian bump of exponential integrands
    stays inside it.
    """
    c = np.asarray(c, dtype=float)
    upper = 40.0 + np.abs(c)[..., None]
    z = (_GL_NODES + 1.0) / 2.0 * upper
    w = _GL_WEIGHTS / 2.0 * upper
    dens = 2.0 * np.exp(-z * z / 2.0) / math.sqrt(2.0 * math.pi)
    vals = np.asarray(func(c[..., None] * z), dtype=float)
    with np.errstate(invalid="ignore", over="ignore"):
        terms = np.where(dens > 0, vals * dens, 0.0)
        out = np.sum(w * terms, axis=-1)
    out = np.where(np.any(np.isinf(vals) & (dens > 0), axis=-1), np.inf, out)
    return _clip_overflow(out)


def tilde_phi(phi: ConvexFunction, a: ArrayLike, rule=None) -> ArrayLike:
    """``a -> E Phi((pi/2) a Z)`` for standard normal ``Z``.

    Closed forms are used for powers, the exponential mode, ``cosh-1``,
    ``exp2`` and ``gauss2`` (which is ``+inf`` once ``(pi a / 2)**2 >= 1``).
    Other kinds are integrated over ``|Z|``: by ``rule`` (a 1-d
    :class:`GaussQuadrature`) when given, else by a fixed half-line
    Gauss-Legendre rule.
    """
    scalar = np.ndim(a) == 0
    a = np.abs(np.asarray(a, dtype=float))
    if scalar:
        return float(_tilde_values(phi, a.reshape(1), rule)[0])
    # gradient norms on tensor grids repeat heavily
    u, inv = np.unique(a, return_inverse=True)
    return _tilde_values(phi, u, rule)[inv.ravel()].reshape(a.shape)


_EXP2_SERIES = [gaussian_abs_moment(k) / math.factorial(k) for k in range(2, 24)]


def _tilde_values(phi: ConvexFunction, a: np.ndarray, rule) -> np.ndarray:
    c = HALF_PI * a
    with np.errstate(over="ignore", invalid="ignore"):
        if isinstance(phi, ExpMode):
            out = np.exp(c * c / 2.0)
        elif isinstance(phi, RawPower):
            out = gaussian_abs_moment(phi.q) * c**phi.q
        elif phi.kind is Kind.POWER:
            out = gaussian_abs_moment(phi.p) * c**phi.p / phi.p
        elif phi.kind is Kind.GAUSS2:
            arg = 1.0 - c * c
            out = np.where(arg > 0, 1.0 / np.sqrt(np.where(arg > 0, arg, 1.0)) - 1.0, np.inf)
        elif phi.kind is Kind.COSH_M1:
            out = np.expm1(c * c / 2.0)
        elif phi.kind is Kind.EXP2:
            # E e^{c|Z|} = 2 e^{c^2/2} Phi(c)
            big = 2.0 * np.exp(c * c / 2.0) * special.ndtr(c) - 1.0 - c * math.sqrt(2.0 / math.pi)
            small = sum(m * c ** (k + 2) for k, m in enumerate(_EXP2_SERIES))
            out = np.where(c < 0.5, small, big)
        elif phi.kind is Kind.SQUARED:
            raise UnsupportedKindError(f"tilde transform not provided for {phi.name}")
        elif rule is not None:
            if rule.dim != 1:
                raise ValueError("tilde_phi needs a 1-d rule")
            z = np.abs(rule.nodes[:, 0])
            vals = np.asarray(phi.evaluate(c[..., None] * z), dtype=float)
            out = np.sum(rule.weights * vals, axis=-1)
            out = np.where(np.any(np.isinf(vals), axis=-1), np.inf, out)
        else:
            out = _half_line_mean(phi.evaluate, c)
        return _clip_overflow(np.asarray(out, dtype=float))


_POWER_RE = re.compile(r"^power:([0-9.eE+-]+)$")


def parse_young(text: str) -> YoungFunction:
    """Parse ``power:p``, ``exp2``, ``exp2*``, ``cosh-1``, ``cosh-1*``,
    ``gauss2`` or ``sq(<name>)``."""
    s = text.strip()
    if s.startswith("sq(") and s.endswith(")"):
        return squared_compose(parse_young(s[3:-1]))
    m = _POWER_RE.match(s)
    if m:
        return power(float(m.group(1)))
    for kind in (Kind.EXP2, Kind.EXP2_STAR, Kind.COSH_M1, Kind.COSH_M1_STAR, Kind.GAUSS2):
        if s == kind.value:
            return YoungFunction(kind)
    raise ValueError(f"unknown Young function {text!r}")


def parse_convex(text: str) -> ConvexFunction:
    """Like :func:`parse_young` plus ``exp`` and ``raw-power:q``."""
    s = text.strip()
    if s == "exp":
        return ExpMode()
    if s.startswith("raw-power:"):
        return RawPower(float(s.split(":", 1)[1]))
    return parse_young(s)


def exp_tail_profile(phi: YoungFunction):
    """``(c, k)`` with ``log Phi(s) ~ c s**k`` as ``s -> inf``, or ``None``.

    ``None`` means polynomial-type growth (powers and the two conjugates);
    those modulars never diverge for the function classes handled here.
    """
    k = phi.kind
    if k in (Kind.EXP2, Kind.COSH_M1):
        return 1.0, 1.0
    if k is Kind.GAUSS2:
        return 0.5, 2.0
    if k is Kind.SQUARED:
        inner = exp_tail_profile(phi.base)
        if inner is None:
            return None
        return inner[0], 2.0 * inner[1]
    return None
