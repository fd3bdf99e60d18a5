"""Tail probes for Gaussian integrals of exponential type.

A quadrature rule only sees a bounded window, so ``E_gamma exp(g)`` looks
finite even when ``g`` grows like ``|x|^2/2`` or faster. The probes here
evaluate ``g(r u) / r^2`` far out along a fixed set of rays; the integral
diverges when the limit reaches ``1/2``. This is numerical evidence over the
probed rays and radii, not a proof.
"""

from __future__ import annotations

import itertools
import math
from functools import lru_cache
from typing import Callable

import numpy as np

RADII = 10.0 * 4.0 ** np.arange(6)
HALF = 0.5


@lru_cache(maxsize=16)
def probe_directions(dim: int, extra: int = 32, seed: int = 0) -> np.ndarray:
    """Unit vectors: the nonzero points of ``{-1,0,1}^dim`` (dim <= 4) or the
    signed axes, plus ``extra`` seeded random directions."""
    if dim <= 4:
        pts = np.array([v for v in itertools.product((-1.0, 0.0, 1.0), repeat=dim) if any(v)])
    else:
        eye = np.eye(dim)
        pts = np.concatenate([eye, -eye])
    rnd = np.random.default_rng(seed).standard_normal((extra, dim))
    pts = np.concatenate([pts, rnd])
    return pts / np.linalg.norm(pts, axis=1, keepdims=True)


def quadratic_growth_ratio(g: Callable[[np.ndarray], np.ndarray], dim: int) -> float:
    """Estimate ``limsup_r max_u g(r u) / r^2`` over the probe rays.

    Returns ``inf`` for super-quadratic growth or overflow and ``0`` when the
    ratio is still decaying at the outer radii (sub-quadratic growth).
    """
    dirs = probe_directions(dim)
    ratios = []
    for r in RADII:
        with np.errstate(over="ignore", invalid="ignore"):
            v = np.asarray(g(r * dirs), dtype=float)
        if np.any(np.isnan(v)) or np.any(v == np.inf):
            return math.inf
        ratios.append(float(np.max(v)) / (r * r))
    last, prev2 = ratios[-1], ratios[-3]
    if last > 1e-9 and last >= 2.0 * max(prev2, 0.0):
        return math.inf
    if last <= 0.5 * prev2 or last <= 0.0:
        # decaying ratio: sub-quadratic growth
        return 0.0
    # g = L r^2 + b r + ... gives ratios L + b/r; eliminate b across the last two
    # radii (spaced 4x) so boundary cases like (x^2 - 1)/2 land on L = 1/2
    return max(0.0, (4.0 * last - ratios[-2]) / 3.0)


def exp_integral_diverges(g: Callable[[np.ndarray], np.ndarray], dim: int) -> bool:
    """Whether ``E_gamma exp(g)`` diverges according to the ray probes."""
    return quadratic_growth_ratio(g, dim) >= HALF * (1.0 - 1e-12)
