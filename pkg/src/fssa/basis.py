"""Finite function bases on [0, 1] and coefficient representations of curves.

Two basis families are supported: cubic (or any degree >= 1) B-splines with
boundary knots of full multiplicity, and an orthonormal step-function basis
on a regular grid whose Gram matrix is exactly the identity.  Everything
downstream works purely on coefficient matrices, so the only numerical
contact with the function space happens here: evaluation, Gram matrices,
inner products and least-squares projection of sampled curves.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.interpolate import BSpline

from .errors import ConfigurationError, DimensionError, ProjectionError

__all__ = [
    "BasisSystem",
    "FunctionalTimeSeries",
    "build_basis",
    "gram_matrix",
    "project_samples",
    "gcv_select_dof",
    "inner_product",
]


@dataclass(frozen=True)
class BasisSystem:
    """A finite basis of the function space on [0, 1].

    Attributes
    ----------
    kind : str
        ``"bspline"`` or ``"orthonormal_grid"``.
    d : int
        Number of basis functions.
    degree : int
        Polynomial degree (B-spline only; 0 for the step basis).
    knots : ndarray
        Full knot vector with boundary knots of multiplicity ``degree + 1``
        (B-spline only; cell edges for the step basis).
    """

    kind: str
    d: int
    degree: int
    knots: np.ndarray = field(repr=False)

    def evaluate(self, points) -> np.ndarray:
        """Evaluate all basis functions at ``points``; returns (m, d)."""
        s = np.atleast_1d(np.asarray(points, dtype=float))
        if s.size and (s.min() < 0.0 or s.max() > 1.0):
            raise ConfigurationError("evaluation points must lie in [0, 1]")
        if self.kind == "bspline":
            return BSpline.design_matrix(s, self.knots, self.degree).toarray()
        # step functions scaled by sqrt(n); point 1.0 belongs to the last cell
        n = self.d
        cells = np.minimum((s * n).astype(int), n - 1)
        out = np.zeros((s.size, n))
        out[np.arange(s.size), cells] = np.sqrt(n)
        return out

    @property
    def gram(self) -> np.ndarray:
        """Cached Gram matrix of the basis (see :func:`gram_matrix`)."""
        cached = getattr(self, "_gram", None)
        if cached is None:
            cached = gram_matrix(self)
            object.__setattr__(self, "_gram", cached)
        return cached


@dataclass(frozen=True)
class FunctionalTimeSeries:
    """A series of curves stored as columns of a coefficient matrix.

    ``coef`` has shape (d, N): column ``t`` holds the basis coefficients of
    the ``t``-th curve, so ``curve_t(s) = sum_i coef[i, t] * basis_i(s)``.
    """

    basis: BasisSystem
    coef: np.ndarray

    def __post_init__(self):
        coef = np.ascontiguousarray(np.asarray(self.coef, dtype=float))
        object.__setattr__(self, "coef", coef)
        if coef.ndim != 2 or coef.shape[0] != self.basis.d:
            raise DimensionError(
                f"coefficient matrix must be ({self.basis.d}, N), got {coef.shape}"
            )
        if coef.shape[1] < 1:
            raise DimensionError("need at least one curve")
        if not np.all(np.isfinite(coef)):
            raise DimensionError("coefficients must be finite")

    @property
    def N(self) -> int:
        return self.coef.shape[1]

    def evaluate(self, points) -> np.ndarray:
        """Sample every curve at ``points``; returns (len(points), N)."""
        return self.basis.evaluate(points) @ self.coef


def build_basis(kind: str, d: int, degree: int = 3, interior_knots=None) -> BasisSystem:
    """Construct a basis system.

    Parameters
    ----------
    kind : {"bspline", "orthonormal_grid"}
    d : int
        Basis dimension (>= 2).  For B-splines ``d = #interior + degree + 1``.
    degree : int
        B-spline degree (>= 1); ignored for the step basis.
    interior_knots : array_like, optional
        Strictly inside (0, 1), non-decreasing.  Defaults to ``d - degree - 1``
        equally spaced knots.
    """
    if d < 2:
        raise ConfigurationError("basis dimension must satisfy d >= 2")
    if kind == "orthonormal_grid":
        edges = np.linspace(0.0, 1.0, d + 1)
        return BasisSystem(kind=kind, d=int(d), degree=0, knots=edges)
    if kind != "bspline":
        raise ConfigurationError(f"unknown basis kind: {kind!r}")
    if degree < 1:
        raise ConfigurationError("B-spline degree must be >= 1")
    n_interior = d - degree - 1
    if n_interior < 0:
        raise ConfigurationError(f"d={d} too small for degree {degree}")
    if interior_knots is None:
        interior = np.linspace(0.0, 1.0, n_interior + 2)[1:-1]
    else:
        interior = np.asarray(interior_knots, dtype=float)
        if interior.size != n_interior:
            raise ConfigurationError(
                f"d={d}, degree={degree} requires {n_interior} interior knots, "
                f"got {interior.size}"
            )
        if interior.size:
            if interior.min() <= 0.0 or interior.max() >= 1.0:
                raise ConfigurationError("interior knots must lie strictly inside (0, 1)")
            if np.any(np.diff(interior) < 0):
                raise ConfigurationError("interior knots must be non-decreasing")
    knots = np.concatenate([np.zeros(degree + 1), interior, np.ones(degree + 1)])
    return BasisSystem(kind="bspline", d=int(d), degree=int(degree), knots=knots)


def gram_matrix(basis: BasisSystem) -> np.ndarray:
    """Matrix of pairwise inner products ``int_0^1 basis_i(s) basis_j(s) ds``.

    For B-splines the integral is done with per-knot-interval Gauss-Legendre
    quadrature using ``degree + 1`` nodes, which is exact for the product of
    two splines.  The step basis is orthonormal by construction.
    """
    if basis.kind == "orthonormal_grid":
        return np.eye(basis.d)
    breaks = np.unique(basis.knots)
    nodes, weights = leggauss(basis.degree + 1)
    lo, hi = breaks[:-1], breaks[1:]
    half = 0.5 * (hi - lo)
    # affine map of the reference nodes into every interval, flattened
    s = (half[:, None] * (nodes[None, :] + 1.0) + lo[:, None]).ravel()
    w = (half[:, None] * weights[None, :]).ravel()
    design = basis.evaluate(s)
    gram = design.T @ (w[:, None] * design)
    return 0.5 * (gram + gram.T)


def project_samples(grid, values, basis: BasisSystem) -> FunctionalTimeSeries:
    """Least-squares fit of sampled curves into the basis.

    Parameters
    ----------
    grid : array_like, shape (n,)
        Strictly increasing sample points in [0, 1].
    values : array_like, shape (n, N)
        Column ``t`` holds the samples of curve ``t`` on ``grid``.

    Returns
    -------
    FunctionalTimeSeries
        Coefficients minimizing the residual sum of squares per curve; a
        single factorization of the (n, d) design matrix is shared by all
        curves.
    """
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    if grid.ndim != 1 or values.shape[0] != grid.size:
        raise DimensionError("values must have one row per grid point")
    if np.any(np.diff(grid) <= 0):
        raise ConfigurationError("grid must be strictly increasing")
    if grid.size < basis.d:
        raise ProjectionError(
            f"underdetermined fit: {grid.size} samples for {basis.d} coefficients"
        )
    design = basis.evaluate(grid)
    coef, _, rank, _ = np.linalg.lstsq(design, values, rcond=None)
    if rank < basis.d:
        raise ProjectionError(
            f"singular fit: design matrix rank {rank} < d = {basis.d}"
        )
    return FunctionalTimeSeries(basis=basis, coef=coef)


def gcv_select_dof(grid, values, candidate_ds, degree: int = 3) -> int:
    """Pick a B-spline dimension by generalized cross-validation.

    Scores each candidate ``d`` with the mean over curves of
    ``(RSS_t / n) / (1 - d / n)**2`` and returns the minimizer; ties break
    toward the smaller dimension.
    """
    candidates = [int(d) for d in candidate_ds]
    if not candidates:
        raise ConfigurationError("need at least one candidate dimension")
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if values.ndim == 1:
        values = values[:, None]
    n = grid.size
    best_d, best_score = None, np.inf
    for d in sorted(set(candidates)):
        if d > n:
            raise ConfigurationError(f"candidate d={d} exceeds n={n} samples")
        basis = build_basis("bspline", d, degree=degree)
        fts = project_samples(grid, values, basis)
        resid = values - basis.evaluate(grid) @ fts.coef
        rss = np.sum(resid**2, axis=0)
        score = np.mean(rss / n) / (1.0 - d / n) ** 2
        if score < best_score:
            best_d, best_score = d, score
    return best_d


def inner_product(f, g, gram) -> float:
    """Function-space inner product of two coefficient vectors: ``f' G g``."""
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.shape != g.shape or f.ndim != 1 or f.size != gram.shape[0]:
        raise DimensionError("coefficient vectors must both have length d")
    return float(f @ gram @ g)
