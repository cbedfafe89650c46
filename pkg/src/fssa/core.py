"""Singular spectrum analysis of a functional time series.

The series of curves is embedded into lagged vectors of length ``L``;  the
trajectory operator mapping weight vectors to combinations of lagged vectors
is then decomposed into eigentriples ``(sqrt(lam_i), psi_i, v_i)``.  All of
this happens in coefficient space: a lagged vector lives in the product
function space and is represented on the product basis whose ``k``-th element
places basis function ``q_k`` in slot ``r_k``, with the flat index layout
``k = (q_k - 1) * L + r_k``.  On that basis the eigenproblem for the lag
covariance operator becomes the generalized symmetric problem

    S0 c = lam * G_L c,

where ``G_L`` is the block Gram matrix of the product basis and ``S0`` the
matrix of lag covariances.  Solving it with a Cholesky-whitened symmetric
eigensolver gives real, descending eigenvalues and G-orthonormal eigenvector
coefficients directly.

Grouped rank-one terms of the decomposition are materialized as arrays of
coefficient cells, projected onto Hankel structure by anti-diagonal averaging
and read back off as new coefficient series.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .basis import BasisSystem, FunctionalTimeSeries
from .errors import (
    ConfigurationError,
    DegenerateSeriesError,
    DimensionError,
    WindowLengthError,
)

__all__ = [
    "Embedding",
    "Decomposition",
    "Grouping",
    "GroupedOperator",
    "embed",
    "build_normal_matrices",
    "decompose",
    "elementary_operator",
    "group_operator",
    "hankelize",
    "reconstruct",
    "anti_diagonal_counts",
]

# eigenvalues below RANK_TOL * lam_1 are treated as numerically zero
RANK_TOL = 1e-12


@dataclass(frozen=True)
class Embedding:
    """Lagged-vector view of a functional time series.

    ``W`` has shape (d, N) with ``W[q, t] = <curve_t, basis_q>``;  cell
    ``(l, j)`` of the trajectory is curve ``l + j - 1``, so no lagged copies
    are stored.
    """

    fts: FunctionalTimeSeries
    L: int
    K: int
    W: np.ndarray = field(repr=False)

    def lagged_coef_matrix(self) -> np.ndarray:
        """Stacked (L*d, K) matrix with row ``(q-1)L + r`` equal to
        ``W[q, r : r + K]``; its column ``j`` represents lagged vector ``j``
        in the dual pairing with the product basis."""
        windows = np.lib.stride_tricks.sliding_window_view(self.W, self.K, axis=1)
        return windows.reshape(self.fts.basis.d * self.L, self.K)


@dataclass(frozen=True)
class Decomposition:
    """Eigentriples of the trajectory operator.

    Attributes
    ----------
    eigvals : ndarray, shape (r,)
        Descending positive eigenvalues ``lam_i``.
    psi : ndarray, shape (L*d, r)
        Column ``i`` holds the product-basis coefficients of the ``i``-th
        left singular function, G-orthonormalized.
    v : ndarray, shape (K, r)
        Right singular vectors, Euclidean-orthonormal.  Signs are fixed so
        the largest-magnitude entry of each ``v_i`` is positive.
    """

    basis: BasisSystem
    L: int
    K: int
    eigvals: np.ndarray
    psi: np.ndarray = field(repr=False)
    v: np.ndarray = field(repr=False)

    @property
    def r(self) -> int:
        return self.eigvals.size

    @property
    def N(self) -> int:
        return self.L + self.K - 1

    @property
    def singular_values(self) -> np.ndarray:
        return np.sqrt(self.eigvals)

    def psi_blocks(self) -> np.ndarray:
        """View of ``psi`` as (d, L, r): ``[:, l, i]`` is the coefficient
        vector of slot ``l`` of left singular function ``i``."""
        return self.psi.reshape(self.basis.d, self.L, self.r)


@dataclass(frozen=True)
class Grouping:
    """Ordered disjoint sets of 1-based eigentriple indices."""

    groups: tuple[tuple[int, ...], ...]
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        object.__setattr__(self, "groups", groups)
        if self.labels is not None:
            labels = tuple(str(x) for x in self.labels)
            if len(labels) != len(groups):
                raise ConfigurationError("one label per group required")
            object.__setattr__(self, "labels", labels)
        seen: set[int] = set()
        for g in groups:
            if not g:
                raise ConfigurationError("groups must be non-empty")
            if seen.intersection(g):
                raise ConfigurationError("groups must be disjoint")
            seen.update(g)

    def validate(self, r: int) -> None:
        for g in self.groups:
            for i in g:
                if not 1 <= i <= r:
                    raise ConfigurationError(
                        f"eigentriple index {i} outside 1..{r}"
                    )

    def group_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return tuple(f"g{q + 1}" for q in range(len(self.groups)))


@dataclass(frozen=True)
class GroupedOperator:
    """A member of the operator space as an array of coefficient cells.

    ``blocks`` has shape (d, L, K); ``blocks[:, l, j]`` is the coefficient
    vector of the function sitting in cell ``(l, j)``.
    """

    basis: BasisSystem
    blocks: np.ndarray = field(repr=False)

    def __post_init__(self):
        blocks = np.asarray(self.blocks, dtype=float)
        object.__setattr__(self, "blocks", blocks)
        if blocks.ndim != 3 or blocks.shape[0] != self.basis.d:
            raise DimensionError("blocks must have shape (d, L, K)")
        if not np.all(np.isfinite(blocks)):
            raise DimensionError("operator cells must be finite")

    @property
    def L(self) -> int:
        return self.blocks.shape[1]

    @property
    def K(self) -> int:
        return self.blocks.shape[2]

    def frobenius_norm(self) -> float:
        """Operator Frobenius norm: sqrt of the summed squared function
        norms of all cells (uses the basis Gram matrix)."""
        gram = self.basis.gram
        return float(np.sqrt(np.einsum("ilk,ij,jlk->", self.blocks, gram, self.blocks)))


def embed(fts: FunctionalTimeSeries, L: int) -> Embedding:
    """Window the series with length ``L``; ``K = N - L + 1`` lagged vectors."""
    N = fts.N
    if not 2 <= L <= N // 2:
        raise WindowLengthError(f"window length must satisfy 2 <= L <= N/2 (L={L}, N={N})")
    W = fts.basis.gram @ fts.coef
    return Embedding(fts=fts, L=int(L), K=N - int(L) + 1, W=W)


def build_normal_matrices(emb: Embedding) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the product-basis Gram ``G_L`` and lag covariance ``S0``.

    ``G_L`` is the Kronecker lift of the basis Gram onto the flat index
    layout; ``S0[i, j] = sum_m W[q_i, r_i + m - 1] * W[q_j, r_j + m - 1]``,
    i.e. the Gram matrix of the rows of the stacked lagged matrix.
    """
    gram = emb.fts.basis.gram
    G_L = np.kron(gram, np.eye(emb.L))
    U = emb.lagged_coef_matrix()
    S0 = U @ U.T
    return G_L, 0.5 * (S0 + S0.T)


def decompose(fts: FunctionalTimeSeries, L: int, r: int | None = None) -> Decomposition:
    """Compute the eigentriples of the trajectory operator.

    Solves the generalized symmetric problem ``S0 c = lam G_L c`` (Cholesky
    whitening inside the LAPACK driver), normalizes ``c' G_L c = 1``, drops
    eigenvalues below ``RANK_TOL * lam_1`` (tiny negatives clamped to zero)
    and keeps at most ``min(L*d, K)`` of them, or ``r`` if given.  Right
    singular vectors come from pairing the lagged matrix with each ``psi``
    and dividing by the singular value.
    """
    emb = embed(fts, L)
    d = fts.basis.d
    Ld, K = d * emb.L, emb.K
    r_max = min(Ld, K)
    if r is not None:
        if not 1 <= r <= r_max:
            raise ConfigurationError(f"r must lie in 1..min(L*d, K) = {r_max}")
        n_request = r
    else:
        n_request = r_max

    G_L, S0 = build_normal_matrices(emb)
    try:
        if n_request < Ld:
            lam, C = scipy.linalg.eigh(S0, G_L, subset_by_index=[Ld - n_request, Ld - 1])
        else:
            lam, C = scipy.linalg.eigh(S0, G_L)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSeriesError(f"basis Gram matrix is not positive definite: {exc}")

    lam = lam[::-1]
    C = C[:, ::-1]
    lam = np.maximum(lam, 0.0)
    if lam.size == 0 or lam[0] <= 0.0:
        raise DegenerateSeriesError("all eigenvalues below tolerance; series has no energy")
    keep = min(int(np.count_nonzero(lam > RANK_TOL * lam[0])), n_request)
    lam, C = lam[:keep].copy(), np.ascontiguousarray(C[:, :keep])

    U = emb.lagged_coef_matrix()
    V = (U.T @ C) / np.sqrt(lam)[None, :]
    # joint sign flip: largest-magnitude entry of each right vector positive
    flip = V[np.abs(V).argmax(axis=0), np.arange(keep)] < 0
    V[:, flip] *= -1.0
    C[:, flip] *= -1.0
    return Decomposition(basis=fts.basis, L=emb.L, K=K, eigvals=lam, psi=C, v=V)


def elementary_operator(dec: Decomposition, i: int) -> GroupedOperator:
    """Rank-one term ``i`` (1-based) of the trajectory decomposition."""
    if not 1 <= i <= dec.r:
        raise ConfigurationError(f"eigentriple index {i} outside 1..{dec.r}")
    return group_operator(dec, [i])


def group_operator(dec: Decomposition, index_set) -> GroupedOperator:
    """Sum of the elementary operators with the given 1-based indices.

    Accumulated as one rank-``|I|`` product: cell ``(l, j)`` equals
    ``sum_i sqrt(lam_i) * v_i[j] * psi_i`` restricted to slot ``l``.
    """
    idx = sorted({int(i) for i in index_set})
    if not idx:
        raise ConfigurationError("index set must be non-empty")
    if idx[0] < 1 or idx[-1] > dec.r:
        raise ConfigurationError(f"indices must lie in 1..{dec.r}")
    sel = np.asarray(idx) - 1
    scaled = dec.psi_blocks()[:, :, sel] * np.sqrt(dec.eigvals[sel])[None, None, :]
    blocks = np.einsum("qli,ji->qlj", scaled, dec.v[:, sel])
    return GroupedOperator(basis=dec.basis, blocks=blocks)


def anti_diagonal_counts(L: int, K: int) -> np.ndarray:
    """Number of cells on each anti-diagonal ``l + j = t + 1``, t = 1..N."""
    N = L + K - 1
    t = np.arange(1, N + 1)
    return np.minimum.reduce([t, np.full(N, L), np.full(N, K), N - t + 1])


def hankelize(op: GroupedOperator) -> GroupedOperator:
    """Project onto Hankel operators by averaging cells per anti-diagonal.

    Averaging acts directly on the coefficient vectors, which is the same as
    averaging the functions themselves since the basis representation is
    linear.  The result is the closest Hankel operator in Frobenius norm.
    """
    d, L, K = op.blocks.shape
    N = L + K - 1
    sums = np.zeros((d, N))
    for l in range(L):
        sums[:, l : l + K] += op.blocks[:, l, :]
    means = sums / anti_diagonal_counts(L, K)[None, :]
    blocks = np.empty_like(op.blocks)
    for l in range(L):
        blocks[:, l, :] = means[:, l : l + K]
    return GroupedOperator(basis=op.basis, blocks=blocks)


def reconstruct(dec: Decomposition, grouping: Grouping | list) -> list[FunctionalTimeSeries]:
    """Turn each group of eigentriples back into a series of curves.

    For every group the grouped operator is Hankelized and curve ``t`` read
    off its anti-diagonal ``l + j = t + 1``.  The loop below streams that
    computation: the anti-diagonal sums are accumulated lag by lag and
    divided by the cell counts, so the full (d, L, K) array is never formed.
    """
    if not isinstance(grouping, Grouping):
        grouping = Grouping(groups=tuple(tuple(g) for g in grouping))
    grouping.validate(dec.r)
    N = dec.N
    counts = anti_diagonal_counts(dec.L, dec.K)
    blocks = dec.psi_blocks()
    out: list[FunctionalTimeSeries] = []
    for g in grouping.groups:
        sel = np.asarray(sorted(g)) - 1
        scaled = blocks[:, :, sel] * np.sqrt(dec.eigvals[sel])[None, None, :]
        vt = dec.v[:, sel].T
        sums = np.zeros((dec.basis.d, N))
        for l in range(dec.L):
            sums[:, l : l + dec.K] += scaled[:, l, :] @ vt
        out.append(FunctionalTimeSeries(basis=dec.basis, coef=sums / counts[None, :]))
    return out
