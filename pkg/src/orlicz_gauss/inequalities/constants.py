"""Explicit constants of the Gaussian Poincare-type bounds."""

from __future__ import annotations

import math

from ..young import gaussian_abs_moment

#: ``sqrt(pi/2)``, the coefficient of the linear term in the kappa equation.
_B = math.sqrt(math.pi / 2.0)
_A = math.pi**2 / 4.0


def kappa_star() -> float:
    """Positive root of ``sqrt(pi/2) k + (pi^2/4) k^2 = 1``.

    Written as ``2 / (b + sqrt(b^2 + 4a))`` to avoid cancellation.
    """
    return 2.0 / (_B + math.sqrt(_B * _B + 4.0 * _A))


def kappa_residual(k: float) -> float:
    return _B * k + _A * k * k - 1.0


def C1() -> float:
    return 1.0 / kappa_star()


def gaussian_moment(q: float) -> float:
    """``m(q) = E|Z|^q``; exact double factorial for even integer ``q``."""
    if q == int(q) and int(q) % 2 == 0 and q >= 0:
        return float(math.prod(range(int(q) - 1, 0, -2)))
    return gaussian_abs_moment(q)


def C2(p: float) -> float:
    """``(pi/2) m(2p)^{1/(2p)}`` for ``p > 1/2``."""
    if not p > 0.5:
        raise ValueError("C2(p) needs p > 1/2")
    return math.pi / 2.0 * gaussian_moment(2.0 * p) ** (1.0 / (2.0 * p))


C3 = math.pi / 2.0
