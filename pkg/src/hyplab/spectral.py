"""Discrete radial Laplace-Beltrami operator and its functional calculus.

The operator is the finite-volume discretization of L = -(1/w) d/dr (w d/dr)
on the grid nodes, with a zero-flux closure at the origin (regularity of
radial functions) and a Dirichlet condition at r_max.  It is represented by
its full eigendecomposition, orthonormal in the w-weighted inner product, so
every function of the operator (heat flow, fractional powers, Schroedinger
propagator) is exact on the basis.
"""

from __future__ import annotations

import hashlib
import os
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np
import numpy.typing as npt
from scipy.linalg import eigh_tridiagonal

from .errors import DomainError, EigensolverError, EvaluationError
from .geometry import GeometryBackend, RadialField, RadialGrid, make_grid, volume_weight

_CACHE_ENV = "HYPLAB_CACHE_DIR"
_CACHE_MAGIC = 7.2588861e10  # arbitrary sentinel so stale files are rejected


def _matvec(mat: npt.NDArray[np.float64], f: npt.NDArray) -> npt.NDArray:
    """Real matrix times possibly-complex vector without the complex upcast.

    Complex input is viewed as an (n, 2) real array of (re, im) pairs so the
    product runs as a real GEMM; real input goes straight through.
    """
    f = np.asarray(f)
    if not np.iscomplexobj(f):
        return mat @ f
    ri = np.ascontiguousarray(f, dtype=complex).view(np.float64).reshape(-1, 2)
    return (mat @ ri).view(complex).reshape(-1)


@dataclass(frozen=True)
class SpectralOperator:
    """Symmetric discrete -Laplacian with full eigenpairs.

    ``eigenvectors[:, k]`` is the k-th mode, orthonormal in
    <f, g> = sum(quad_weights * f * conj(g)).
    """

    grid: RadialGrid
    eigenvalues: npt.NDArray[np.float64] = field(repr=False)
    eigenvectors: npt.NDArray[np.float64] = field(repr=False)
    # tridiagonal stencil of the raw finite-volume operator, kept so the
    # discretization can be applied and checked independently of the basis
    edge_weights: npt.NDArray[np.float64] = field(repr=False)

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    # -- inner product and transforms -------------------------------------

    def inner(self, f: RadialField, g: RadialField) -> complex:
        """w-weighted inner product <f, g>."""
        return complex(np.sum(self.grid.quad_weights * f * np.conj(g)))

    def norm(self, f: RadialField) -> float:
        """w-weighted L2 norm."""
        return float(np.sqrt(np.sum(self.grid.quad_weights * np.abs(f) ** 2)))

    def to_coefficients(self, f: RadialField) -> npt.NDArray:
        """Expand f over the eigenbasis: c_k = <f, v_k>."""
        return _matvec(self.eigenvectors.T, self.grid.quad_weights * f)

    def from_coefficients(self, coeffs: npt.NDArray) -> RadialField:
        return _matvec(self.eigenvectors, coeffs)

    # -- operator applications ---------------------------------------------

    def apply_stencil(self, f: RadialField) -> RadialField:
        """Apply -Laplacian through the raw tridiagonal stencil (no basis)."""
        c = self.edge_weights
        n = self.n
        out = np.empty_like(np.asarray(f, dtype=complex))
        flux = np.empty(n + 1, dtype=complex)
        flux[0] = 0.0  # zero-flux closure at the origin
        flux[1:n] = c[1:n] * (f[1:] - f[:-1])
        flux[n] = c[n] * (0.0 - f[-1])  # Dirichlet at r_max
        out[:] = -(flux[1:] - flux[:-1]) / self.grid.quad_weights
        return out

    def apply_spectral_function(self, g: Callable[[npt.NDArray], npt.NDArray],
                                f: RadialField) -> RadialField:
        """Return g(-Laplacian) f = sum_k g(lambda_k) <f, v_k> v_k."""
        gl = np.asarray(g(self.eigenvalues), dtype=complex)
        if not np.all(np.isfinite(gl)):
            bad = int(np.flatnonzero(~np.isfinite(gl))[0])
            raise EvaluationError(
                f"spectral function is not finite at mode k={bad} "
                f"(lambda={self.eigenvalues[bad]!r})")
        if np.all(gl.imag == 0.0):
            gl = gl.real
        return self.from_coefficients(gl * self.to_coefficients(f))

    def sobolev_norm(self, f: RadialField, sigma: float,
                     homogeneous: bool = False) -> float:
        """H^sigma norm via the eigenbasis: (sum (1+lambda)^sigma |c_k|^2)^(1/2).

        The homogeneous flag switches the symbol to lambda^sigma.
        """
        if not -2.0 <= sigma <= 2.0:
            raise DomainError("sobolev_norm: sigma must lie in [-2, 2]")
        coeffs = self.to_coefficients(f)
        symbol = self.eigenvalues if homogeneous else 1.0 + self.eigenvalues
        return float(np.sqrt(np.sum(symbol ** sigma * np.abs(coeffs) ** 2)))

    def content_hash(self) -> str:
        """SHA-256 over the eigenpairs; identifies the calculus an artifact used."""
        digest = hashlib.sha256()
        digest.update(self.eigenvalues.tobytes())
        digest.update(self.eigenvectors.tobytes())
        return digest.hexdigest()


def build_operator(grid: RadialGrid) -> SpectralOperator:
    """Discretize -(1/w)(w f')' on the grid and diagonalize it.

    Edge conductances c_k = w(r_k + h/2)/h make the quadratic form
    sum c_k |f_{k+1} - f_k|^2 (+ Dirichlet edge), so the operator is exactly
    self-adjoint in the quadrature inner product.  The symmetrized
    tridiagonal problem is solved densely; eigenvectors come back
    orthonormal in the w-weighted inner product.
    """
    n = grid.n
    h = grid.h
    mu = grid.quad_weights
    # edge_weights[k] is the conductance of the edge left of node k (1-based);
    # index 0 is the origin edge, index n the Dirichlet edge at r_max.
    edge_r = np.concatenate(([0.0], grid.nodes + 0.5 * h))
    edge_r[-1] = grid.r_max - 0.5 * h
    c = volume_weight(grid.backend, edge_r) / h
    c[0] = 0.0  # zero-flux at the origin

    diag = (c[:-1] + c[1:]) / mu
    off = -c[1:-1] / np.sqrt(mu[:-1] * mu[1:])
    try:
        vals, vecs = eigh_tridiagonal(diag, off)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigensolverError(f"eigendecomposition failed: {exc}") from exc
    vecs = vecs / np.sqrt(mu)[:, None]

    residual = _eigen_residual_sample(diag, off, mu, vals, vecs)
    if residual > 1e-8:
        raise EigensolverError(
            "eigendecomposition residual too large", residuals=residual)

    vals.flags.writeable = False
    vecs.flags.writeable = False
    c.flags.writeable = False
    return SpectralOperator(grid=grid, eigenvalues=vals, eigenvectors=vecs,
                            edge_weights=c)


def _eigen_residual_sample(diag, off, mu, vals, vecs) -> float:
    """Max relative residual ||L v - lambda v|| over a few modes."""
    n = len(diag)
    idx = sorted({0, n // 2, n - 1})
    worst = 0.0
    for k in idx:
        v = vecs[:, k]
        lv = diag * (v * mu)
        lv[:-1] += off * np.sqrt(mu[:-1] * mu[1:]) * v[1:]
        lv[1:] += off * np.sqrt(mu[:-1] * mu[1:]) * v[:-1]
        lv /= mu
        res = np.sqrt(np.sum(mu * (lv - vals[k] * v) ** 2))
        worst = max(worst, res / max(vals[k], 1.0))
    return worst


# -- eigenpair cache --------------------------------------------------------

_BACKEND_CODE = {GeometryBackend.HYPERBOLIC2: 1.0, GeometryBackend.EUCLIDEAN2: 2.0}
_CODE_BACKEND = {v: k for k, v in _BACKEND_CODE.items()}


def cache_path(backend: GeometryBackend, r_max: float, n: int,
               cache_dir: str | os.PathLike | None = None) -> Path:
    """File the eigenpairs for (backend, r_max, n) are cached under."""
    base = Path(cache_dir or os.environ.get(_CACHE_ENV, "."))
    return base / f"eigen_{backend.value}_rmax{r_max:g}_n{n}.bin"


def save_eigenpairs(op: SpectralOperator, path: str | os.PathLike) -> Path:
    """Write eigenpairs as little-endian float64: magic, key triple, data."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    grid = op.grid
    header = struct.pack(
        "<4d", _CACHE_MAGIC, _BACKEND_CODE[grid.backend], grid.r_max, float(grid.n))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(op.eigenvalues.astype("<f8").tobytes())
        fh.write(op.eigenvectors.astype("<f8").tobytes())
    return path


def load_eigenpairs(path: str | os.PathLike) -> SpectralOperator:
    """Rebuild a SpectralOperator from a cache file written by save_eigenpairs."""
    path = Path(path)
    with open(path, "rb") as fh:
        magic, code, r_max, n_f = struct.unpack("<4d", fh.read(32))
        if magic != _CACHE_MAGIC or code not in _CODE_BACKEND:
            raise EigensolverError(f"not an eigenpair cache: {path}")
        n = int(n_f)
        vals = np.frombuffer(fh.read(8 * n), dtype="<f8").copy()
        vecs = np.frombuffer(fh.read(8 * n * n), dtype="<f8").reshape(n, n).copy()
    backend = _CODE_BACKEND[code]
    grid = make_grid(backend, r_max, n)
    edge_r = np.concatenate(([0.0], grid.nodes + 0.5 * grid.h))
    edge_r[-1] = grid.r_max - 0.5 * grid.h
    c = volume_weight(backend, edge_r) / grid.h
    c[0] = 0.0
    for arr in (vals, vecs, c):
        arr.flags.writeable = False
    return SpectralOperator(grid=grid, eigenvalues=vals, eigenvectors=vecs,
                            edge_weights=c)


def build_or_load(backend: GeometryBackend, r_max: float, n: int,
                  cache_dir: str | os.PathLike | None = None,
                  write: bool = True) -> SpectralOperator:
    """Build the operator, going through the on-disk cache when available."""
    path = cache_path(backend, r_max, n, cache_dir)
    if path.exists():
        try:
            return load_eigenpairs(path)
        except (EigensolverError, ValueError, OSError):
            pass  # fall through and rebuild
    op = build_operator(make_grid(backend, r_max, n))
    if write:
        try:
            save_eigenpairs(op, path)
        except OSError:
            pass  # cache directory may be read-only; the operator still works
    return op
