"""Luxemburg and Orlicz (dual) norms on the Gaussian space."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from .gauss_space import GaussFunction, GaussQuadrature, compress
from .tails import quadratic_growth_ratio
from .young import YoungFunction, conjugate, exp_tail_profile, squared_compose

ALPHA_MAX = 1e12
ALPHA_MIN = 1e-12
LOG_K_RANGE = (-40.0, 40.0)


@dataclass
class NormResult:
    value: float
    modular_at_value: float
    iterations: int
    bracket: Tuple[float, float]
    diverged: bool = False
    critical_scale: float = 0.0

    def __post_init__(self):
        self.value = float(self.value)
        self.modular_at_value = float(self.modular_at_value)
        self.bracket = (float(self.bracket[0]), float(self.bracket[1]))
        self.critical_scale = float(self.critical_scale)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["bracket"] = list(self.bracket)
        return d


def critical_scale(f: GaussFunction, phi: YoungFunction) -> float:
    """Smallest ``alpha`` above which ``E Phi(|f|/alpha)`` is finite.

    Zero for power-type ``Phi``; for exponential types it comes from the ray
    probes in :mod:`orlicz_gauss.tails` (``inf`` means divergent for every
    ``alpha``).
    """
    prof = exp_tail_profile(phi)
    if prof is None:
        return 0.0
    c, k = prof
    rho = quadratic_growth_ratio(lambda x: c * np.abs(f._value(x)) ** k, f.dim)
    if math.isinf(rho):
        return math.inf
    return (2.0 * rho) ** (1.0 / k)


class _Modular:
    """``alpha -> E Phi(|f|/alpha)`` with node values cached."""

    def __init__(self, f: GaussFunction, phi: YoungFunction, rule: GaussQuadrature, values=None):
        if f.dim != rule.dim:
            raise ValueError(f"dimension mismatch: function dim {f.dim}, rule dim {rule.dim}")
        self.phi = phi
        self.rule = rule
        values = np.abs(f._value(rule.nodes) if values is None else values)
        self.finite = bool(np.all(np.isfinite(values)))
        self.values, self.weights = compress(values, rule.weights) if self.finite else (values, rule.weights)
        self.critical = critical_scale(f, phi)
        self.calls = 0

    @property
    def is_zero(self) -> bool:
        return not np.any(self.values) and self.critical == 0.0

    def __call__(self, alpha: float) -> float:
        self.calls += 1
        if alpha <= self.critical * (1.0 + 1e-12) or not self.finite:
            return math.inf
        v = np.asarray(self.phi.evaluate(self.values / alpha), dtype=float)
        if np.any(np.isnan(v)):
            return math.nan
        if np.any(v == np.inf):
            return math.inf
        return float(np.dot(self.weights, v))


def modular(f: GaussFunction, phi: YoungFunction, rule: GaussQuadrature) -> float:
    """``E_gamma Phi(|f|)``, ``+inf`` when the integral diverges."""
    return _Modular(f, phi, rule)(1.0)


def _luxemburg(m: _Modular, tol: float) -> NormResult:
    if m.is_zero:
        return NormResult(0.0, 0.0, 0, (0.0, 0.0))
    if math.isinf(m.critical):
        return NormResult(math.inf, math.inf, 0, (math.inf, math.inf), diverged=True, critical_scale=math.inf)
    start = max(1.0, m.critical * 2.0) if m.critical > 0 else 1.0
    hi = start
    while m(hi) > 1.0:
        hi *= 2.0
        if hi > ALPHA_MAX:
            return NormResult(math.inf, math.inf, m.calls, (hi / 2.0, math.inf), diverged=True,
                              critical_scale=m.critical)
    if hi > start:
        lo = hi / 2.0
    else:
        while m(hi / 2.0) <= 1.0:
            hi /= 2.0
            if hi < ALPHA_MIN:
                return NormResult(0.0, m(hi), m.calls, (0.0, hi), critical_scale=m.critical)
        lo = hi / 2.0
    lo = max(lo, m.critical)
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        if m(mid) > 1.0:
            lo = mid
        else:
            hi = mid
    return NormResult(hi, m(hi), m.calls, (lo, hi), critical_scale=m.critical)


def luxemburg_norm(f: GaussFunction, phi: YoungFunction, rule: GaussQuadrature, tol: float = 1e-10) -> NormResult:
    """``inf {alpha > 0 : E Phi(|f|/alpha) <= 1}`` by bracketing and bisection.

    The bracket starts at 1 (or above the divergence threshold) and doubles or
    halves within ``[1e-12, 1e12]``; bisection then runs to relative width
    ``tol``. ``diverged`` is set when no scale gives a finite modular <= 1.
    """
    return _luxemburg(_Modular(f, phi, rule), tol)


def dual_norm(f: GaussFunction, phi: YoungFunction, rule: GaussQuadrature, tol: float = 1e-10) -> NormResult:
    """``sup {E f g : E Phi(|g|) <= 1}`` via ``inf_k (1 + E Phi_*(k|f|)) / k``.

    The infimum is located on a log-spaced scan of ``k`` in ``[e^-40, e^40]``
    and polished with bounded Brent search around the best scan point.
    ``bracket`` reports the final ``k`` interval.
    """
    psi = conjugate(phi)
    m = _Modular(f, psi, rule)
    if m.is_zero:
        return NormResult(0.0, 0.0, 0, (0.0, 0.0))

    def objective(logk: float) -> float:
        k = math.exp(logk)
        v = m(1.0 / k)
        return (1.0 + v) / k if math.isfinite(v) else math.inf

    grid = np.linspace(*LOG_K_RANGE, 321)
    vals = np.array([objective(s) for s in grid])
    if not np.any(np.isfinite(vals)):
        return NormResult(math.inf, math.inf, m.calls, (math.inf, math.inf), diverged=True,
                          critical_scale=m.critical)
    i = int(np.argmin(vals))
    a, b = grid[max(i - 1, 0)], grid[min(i + 1, len(grid) - 1)]
    res = optimize.minimize_scalar(
        lambda s: objective(s) if math.isfinite(objective(s)) else 1e300,
        bounds=(a, b),
        method="bounded",
        options={"xatol": max(tol, 1e-12)},
    )
    best_logk, best = (res.x, res.fun) if res.fun <= vals[i] else (grid[i], vals[i])
    k = math.exp(best_logk)
    return NormResult(float(best), m(1.0 / k), m.calls, (math.exp(a), math.exp(b)), critical_scale=m.critical)


def squared_space_norm(f: GaussFunction, phi: YoungFunction, rule: GaussQuadrature, tol: float = 1e-10) -> NormResult:
    """Norm of ``f`` in the space built on ``x -> Phi(x**2)``; its square is
    the ``Phi``-norm of ``f**2``."""
    return luxemburg_norm(f, squared_compose(phi), rule, tol)


@dataclass
class CheckRow:
    lhs: float
    rhs: float
    holds: bool
    margin: float = field(init=False)

    def __post_init__(self):
        self.margin = self.rhs - self.lhs


def holder_check(u: GaussFunction, v: GaussFunction, phi: YoungFunction, rule: GaussQuadrature,
                 tol: float = 1e-10) -> CheckRow:
    """``|E uv| <= 2 |u|_Phi |v|_{Phi_*}`` with Luxemburg norms on both sides."""
    lhs = abs(rule.expect(u._value(rule.nodes) * v._value(rule.nodes)))
    nu = luxemburg_norm(u, phi, rule, tol).value
    nv = luxemburg_norm(v, conjugate(phi), rule, tol).value
    rhs = 2.0 * nu * nv if (nu and nv) else 0.0
    return CheckRow(lhs, rhs, lhs <= rhs + 1e-8 * max(1.0, abs(rhs)))


@dataclass
class TailFit:
    C1: float
    C2: float
    holds: bool
    levels: list
    survival: list
    tail_order: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


MIN_EXCEEDANCES = 50


def sub_exponential_tail(
    f: GaussFunction,
    seed: int = 0,
    samples: int = 100_000,
    t_grid: Optional[Sequence[float]] = None,
    min_tail_order: float = 0.55,
) -> TailFit:
    """Monte Carlo check that ``P(|f| >= t) <= C1 exp(-C2 t)`` looks plausible.

    Survival probabilities are estimated at quantile-spaced levels (or at
    ``t_grid``), dropping levels with fewer than 50 exceedances. ``C2`` is the
    least-squares decay rate of ``log P`` against ``t`` and ``C1`` the smallest
    constant making the envelope valid at every kept level. The envelope is
    accepted when ``C2 > 0`` and the tail order, the slope of
    ``log(-log P)`` against ``log t`` over the upper half of the levels, is at
    least ``min_tail_order``. A sub-exponential tail has order at least 1
    asymptotically; at 10^5 samples chi-square tails measure about 0.6-0.75,
    ``|x|**3`` about 0.5 and ``exp(x**2)`` about 0.15.
    """
    if samples < 10_000:
        raise ValueError("sub_exponential_tail needs at least 10^4 samples")
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((samples, f.dim))
    a = np.abs(f._value(x))
    a = np.where(np.isnan(a), np.inf, a)
    spread = np.max(a) - np.min(a)
    if spread <= 1e-12 * max(1.0, np.max(a)):
        c = float(np.max(a))
        return TailFit(math.exp(c), 1.0, True, [c], [1.0])
    if t_grid is None:
        qs = np.linspace(0.5, 1.0 - MIN_EXCEEDANCES / samples, 24)
        t_grid = np.unique(np.quantile(a[np.isfinite(a)], qs))
    levels, surv = [], []
    for t in np.asarray(t_grid, dtype=float):
        count = int(np.sum(a >= t))
        if count >= MIN_EXCEEDANCES:
            levels.append(float(t))
            surv.append(count / samples)
    if len(levels) < 4:
        raise ValueError("too few tail levels with enough exceedances")
    t = np.array(levels)
    logs = np.log(np.array(surv))
    slope = np.polyfit(t, logs, 1)[0]
    C2 = float(-slope)
    C1 = float(max(1.0, np.max(np.exp(logs + C2 * t))))
    half = len(t) // 2
    upper = (t[half:] > 0) & (logs[half:] < 0)
    if np.count_nonzero(upper) >= 2:
        order = float(np.polyfit(np.log(t[half:][upper]), np.log(-logs[half:][upper]), 1)[0])
    else:
        order = math.inf
    holds = bool(C2 > 0 and order >= min_tail_order)
    return TailFit(C1, C2, holds, levels, surv, order)


__all__ = [
    "CheckRow",
    "NormResult",
    "TailFit",
    "critical_scale",
    "dual_norm",
    "holder_check",
    "luxemburg_norm",
    "modular",
    "squared_space_norm",
    "sub_exponential_tail",
]
