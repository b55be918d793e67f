"""Radial geometry backends: hyperbolic plane and Euclidean plane.

Both backends describe rotationally symmetric surfaces through a single
radial volume weight w(r): integrals reduce to ``c * int f(r) w(r) dr``
(the constant angular factor is dropped throughout, consistently on both
sides of every estimate).  The hyperbolic backend uses w(r) = sinh(r),
the Euclidean comparison backend w(r) = r.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import numpy.typing as npt

from .errors import ConfigurationError, DomainError

#: A complex (or real) radial profile sampled on the nodes of a RadialGrid.
RadialField = npt.NDArray


class GeometryBackend(enum.Enum):
    """Which rotationally symmetric surface the radial coordinate lives on."""

    HYPERBOLIC2 = "hyperbolic2"
    EUCLIDEAN2 = "euclidean2"


def volume_weight(backend: GeometryBackend, r):
    """Radial volume weight w(r): sinh(r) on the hyperbolic plane, r on the flat one.

    Accepts scalars or arrays; raises DomainError for negative radii.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("volume_weight: radius must be nonnegative")
    if backend is GeometryBackend.HYPERBOLIC2:
        out = np.sinh(r)
    else:
        out = r.copy()
    return out if out.ndim else float(out)


def morawetz_weight_gradient(backend: GeometryBackend, r):
    """Radial derivative a'(r) of the potential solving Laplace(a) = 1.

    The regular-at-origin solution has a'(r) = tanh(r/2) on the hyperbolic
    plane and a'(r) = r/2 on the Euclidean plane; a'(0) = 0 in both cases
    and |a'| <= 1 on the hyperbolic backend.
    """
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("morawetz_weight_gradient: radius must be nonnegative")
    if backend is GeometryBackend.HYPERBOLIC2:
        out = np.tanh(r / 2.0)
    else:
        out = r / 2.0
    return out if out.ndim else float(out)


def weight_antiderivative(backend: GeometryBackend, r):
    """Exact antiderivative W(r) = int_0^r w(t) dt, used for quadrature cells."""
    r = np.asarray(r, dtype=float)
    if backend is GeometryBackend.HYPERBOLIC2:
        out = np.cosh(r) - 1.0
    else:
        out = 0.5 * r * r
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class RadialGrid:
    """Uniform radial mesh on (0, r_max) with quadrature against w(r) dr.

    Nodes sit at r_k = k*h, k = 1..n, h = r_max/(n+1); the origin and the
    truncation radius are excluded (the operator stencil imposes a zero-flux
    closure at the origin and a Dirichlet condition at r_max).  Each node
    carries the exact w-mass of its cell, so the weights sum to
    int_0^{r_max} w(r) dr to machine precision and the rule is second order
    on smooth integrands.
    """

    backend: GeometryBackend
    r_max: float
    n: int
    nodes: npt.NDArray[np.float64] = field(repr=False)
    quad_weights: npt.NDArray[np.float64] = field(repr=False)

    @property
    def h(self) -> float:
        return self.r_max / (self.n + 1)

    def integrate(self, values: RadialField) -> complex | float:
        """Quadrature of a sampled profile against w(r) dr."""
        return np.sum(self.quad_weights * values)

    def weight_values(self) -> npt.NDArray[np.float64]:
        """w(r) at the nodes."""
        return volume_weight(self.backend, self.nodes)


def make_grid(backend: GeometryBackend, r_max: float, n: int) -> RadialGrid:
    """Build the uniform grid with exact-cell quadrature weights.

    Cell boundaries are midpoints between nodes, extended to 0 and r_max at
    the ends, so the cells partition [0, r_max] and the weights telescope to
    the exact integral of w.
    """
    if r_max <= 0:
        raise ConfigurationError("make_grid: r_max must be positive")
    if n < 16:
        raise ConfigurationError("make_grid: need at least 16 nodes")
    h = r_max / (n + 1)
    nodes = h * np.arange(1, n + 1, dtype=float)
    edges = np.empty(n + 1)
    edges[0] = 0.0
    edges[1:-1] = nodes[:-1] + 0.5 * h
    edges[-1] = r_max
    cumulative = weight_antiderivative(backend, edges)
    weights = np.diff(cumulative)
    nodes.flags.writeable = False
    weights.flags.writeable = False
    grid = RadialGrid(backend=backend, r_max=float(r_max), n=int(n),
                      nodes=nodes, quad_weights=weights)
    total = float(np.sum(weights))
    exact = weight_antiderivative(backend, r_max)
    if not math.isclose(total, exact, rel_tol=1e-10):
        raise ConfigurationError(
            f"make_grid: quadrature mass {total!r} != {exact!r}")
    return grid
