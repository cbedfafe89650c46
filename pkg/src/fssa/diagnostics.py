"""Separability measures and grouping-support summaries.

The weighted correlation between two reconstructed series measures how close
they are to being separable components: each curve pair is weighted by the
number of trajectory cells it occupies, ``w_t = min(t, L, N - t + 1)``.
Eigentriple summaries bundle everything an analyst looks at while grouping:
scree percentages, right singular vectors with their dominant frequencies,
left singular functions evaluated per lag, and per-lag norm profiles.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .basis import FunctionalTimeSeries
from .core import Decomposition
from .errors import DegenerateSeriesError, DimensionError, WindowLengthError

__all__ = [
    "WCorrelationMatrix",
    "EigentripleSummary",
    "w_inner",
    "wcor_matrix",
    "eigentriple_summary",
]


@dataclass(frozen=True)
class WCorrelationMatrix:
    values: np.ndarray
    labels: tuple[str, ...]


@dataclass(frozen=True)
class EigentripleSummary:
    """Per-component diagnostics of a decomposition.

    ``psi_curves[i, l]`` samples slot ``l`` of left singular function ``i``
    on ``render_grid`` (the within-window view);  ``lag_norms[i, l]`` is the
    function norm of that slot (the across-window view).
    """

    singular_values: np.ndarray
    percentages: np.ndarray
    v: np.ndarray = field(repr=False)
    dominant_freqs: np.ndarray
    render_grid: np.ndarray = field(repr=False)
    psi_curves: np.ndarray = field(repr=False)
    lag_norms: np.ndarray = field(repr=False)


def _curve_inner_products(a: FunctionalTimeSeries, b: FunctionalTimeSeries) -> np.ndarray:
    if a.basis is not b.basis and (
        a.basis.kind != b.basis.kind
        or a.basis.d != b.basis.d
        or not np.array_equal(a.basis.knots, b.basis.knots)
    ):
        raise DimensionError("series must share one basis system")
    if a.N != b.N:
        raise DimensionError(f"series lengths differ: {a.N} != {b.N}")
    return np.einsum("it,ij,jt->t", a.coef, a.basis.gram, b.coef)


def trajectory_weights(N: int, L: int) -> np.ndarray:
    """Cell-occupancy weights ``min(t, L, N - t + 1)`` for t = 1..N."""
    if not 2 <= L <= N // 2:
        raise WindowLengthError(f"window length must satisfy 2 <= L <= N/2 (L={L}, N={N})")
    t = np.arange(1, N + 1)
    return np.minimum.reduce([t, np.full(N, L), N - t + 1]).astype(float)


def w_inner(fts_a: FunctionalTimeSeries, fts_b: FunctionalTimeSeries, L: int) -> float:
    """Weighted inner product ``sum_t w_t <a_t, b_t>`` of two series."""
    inner = _curve_inner_products(fts_a, fts_b)
    return float(trajectory_weights(fts_a.N, L) @ inner)


def wcor_matrix(reconstructed: list[FunctionalTimeSeries], L: int,
                labels=None) -> WCorrelationMatrix:
    """Weighted correlation matrix of reconstructed components.

    Entry ``(i, j)`` is ``w_inner(i, j) / sqrt(w_inner(i, i) w_inner(j, j))``;
    the diagonal is exactly one.  A component with zero weighted norm has no
    defined correlation and raises.
    """
    m = len(reconstructed)
    if m < 2:
        raise DimensionError("need at least two series")
    inner = np.empty((m, m))
    for i in range(m):
        for j in range(i, m):
            inner[i, j] = inner[j, i] = w_inner(reconstructed[i], reconstructed[j], L)
    norms = np.sqrt(np.diag(inner))
    bad = np.flatnonzero(norms == 0.0)
    if bad.size:
        raise DegenerateSeriesError(
            f"w-correlation undefined: component(s) {bad.tolist()} have zero norm"
        )
    values = np.clip(inner / np.outer(norms, norms), -1.0, 1.0)
    np.fill_diagonal(values, 1.0)
    if labels is None:
        labels = tuple(f"g{i + 1}" for i in range(m))
    return WCorrelationMatrix(values=values, labels=tuple(labels))


def dominant_frequency(x: np.ndarray) -> float:
    """Location of the periodogram peak of ``x`` over frequencies j/K.

    The zero-frequency bin carries the squared mean, so a constant series
    reports frequency 0 rather than an arbitrary noise bin.
    """
    x = np.asarray(x, dtype=float)
    K = x.size
    power = np.abs(np.fft.rfft(x)) ** 2 / K
    n_bins = K // 2 + 1  # rfft already stops at the folding frequency
    return float(np.argmax(power[:n_bins]) / K)


def eigentriple_summary(dec: Decomposition, render_grid) -> EigentripleSummary:
    """Collect the grouping diagnostics for every retained eigentriple."""
    render_grid = np.asarray(render_grid, dtype=float)
    lam = dec.eigvals
    percentages = 100.0 * lam / lam.sum()
    freqs = np.array([dominant_frequency(dec.v[:, i]) for i in range(dec.r)])
    design = dec.basis.evaluate(render_grid)
    blocks = dec.psi_blocks()
    psi_curves = np.einsum("mq,qli->ilm", design, blocks)
    gram = dec.basis.gram
    lag_norms = np.sqrt(np.einsum("qli,qp,pli->il", blocks, gram, blocks))
    return EigentripleSummary(
        singular_values=np.sqrt(lam),
        percentages=percentages,
        v=dec.v.copy(),
        dominant_freqs=freqs,
        render_grid=render_grid,
        psi_curves=psi_curves,
        lag_norms=lag_norms,
    )
