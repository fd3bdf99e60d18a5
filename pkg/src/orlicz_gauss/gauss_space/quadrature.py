"""Integration rules for the standard Gaussian measure on R^n."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

MAX_TENSOR_DIM = 4


@dataclass(frozen=True, eq=False)
class GaussQuadrature:
    """Nodes and probability weights approximating ``E_gamma``.

    ``mode`` is ``"gh"`` (tensor Gauss-Hermite, ``order`` nodes per axis) or
    ``"mc"`` (``samples`` seeded standard normal draws with equal weights).
    """

    mode: str
    dim: int
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    order: Optional[int] = None
    samples: Optional[int] = None
    seed: Optional[int] = None

    @property
    def size(self) -> int:
        return len(self.weights)

    def spec(self) -> dict:
        if self.mode == "gh":
            return {"mode": "gh", "order": self.order}
        return {"mode": "mc", "samples": self.samples, "seed": self.seed}

    def expect(self, values: np.ndarray) -> float:
        """Weighted sum of precomputed values; ``+inf`` on any overflow."""
        values = np.asarray(values, dtype=float)
        if not np.all(np.isfinite(values)):
            if np.any(np.isnan(values)):
                return math.nan
            return math.inf if np.any(values == np.inf) else -math.inf
        with np.errstate(over="ignore"):
            return float(np.dot(self.weights, values))


def compress(values: np.ndarray, weights: np.ndarray):
    """Merge nodes with equal ``values``: ``(unique values, summed weights)``.

    Symmetric integrands on tensor grids repeat values many times; integrals
    of ``g(values)`` can then be taken over the unique values only.
    """
    u, inv = np.unique(np.asarray(values, dtype=float), return_inverse=True)
    return u, np.bincount(inv.ravel(), weights=weights, minlength=u.shape[0])


def gauss_hermite(order: int, dim: int = 1) -> GaussQuadrature:
    """Tensor Gauss-Hermite rule for ``gamma`` in probabilists' convention.

    ``numpy.polynomial.hermite_e`` works with the weight ``exp(-x**2/2)``
    directly, so no ``sqrt(2)`` node rescaling is needed; only the weights are
    divided by ``sqrt(2*pi)`` to make them sum to one. (The physicists' rule
    ``hermgauss`` would need nodes ``sqrt(2)*x`` and weights ``w/sqrt(pi)``.)
    """
    if order < 1:
        raise ValueError("order must be positive")
    if not 1 <= dim <= MAX_TENSOR_DIM:
        raise ValueError(
            f"tensor Gauss-Hermite supports 1 <= dim <= {MAX_TENSOR_DIM}; use Monte Carlo for dim={dim}"
        )
    x, w = np.polynomial.hermite_e.hermegauss(order)
    w = w / math.sqrt(2.0 * math.pi)
    grids = np.meshgrid(*([x] * dim), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=-1)
    wgrids = np.meshgrid(*([w] * dim), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
    return GaussQuadrature("gh", dim, nodes, weights, order=order)


def monte_carlo(samples: int, dim: int = 1, seed: int = 0) -> GaussQuadrature:
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    nodes = rng.standard_normal((samples, dim))
    weights = np.full(samples, 1.0 / samples)
    return GaussQuadrature("mc", dim, nodes, weights, samples=samples, seed=seed)


QuadSpec = Union[str, dict, GaussQuadrature]


def parse_quadrature(spec: QuadSpec, dim: int) -> GaussQuadrature:
    """Build a rule from ``"gh:64"``, ``"mc:10000:7"`` or the JSON dict form."""
    if isinstance(spec, GaussQuadrature):
        if spec.dim != dim:
            return parse_quadrature(spec.spec(), dim)
        return spec
    if isinstance(spec, str):
        parts = spec.split(":")
        if parts[0] == "gh" and len(parts) == 2:
            spec = {"mode": "gh", "order": int(parts[1])}
        elif parts[0] == "mc" and len(parts) in (2, 3):
            spec = {"mode": "mc", "samples": int(parts[1]), "seed": int(parts[2]) if len(parts) == 3 else 0}
        else:
            raise ValueError(f"bad quadrature spec {spec!r}")
    mode = spec.get("mode")
    if mode == "gh":
        return gauss_hermite(int(spec["order"]), dim)
    if mode == "mc":
        return monte_carlo(int(spec["samples"]), dim, int(spec.get("seed", 0)))
    raise ValueError(f"bad quadrature mode {mode!r}")
