"""Synthetic benchmark: periodic signal plus noise, scored curve recovery.

Generates curves ``Y_t(s_i) = m_t(s_i) + X_t(s_i)`` on a fixed grid, where
``m_t`` is a deterministic periodic component and ``X_t`` is either Gaussian
white noise or a first-order functional autoregression driven by Brownian
paths through a parabolic integral kernel.  Each benchmark cell smooths the
samples with a 15-dof cubic B-spline basis, extracts the two leading
eigentriples functionally, runs a discrete multivariate SSA baseline at the
same rank, and reports the mean root-mean-square recovery error of the
periodic component.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .basis import build_basis, project_samples
from .core import anti_diagonal_counts, decompose, reconstruct
from .errors import ConfigurationError, DimensionError, WindowLengthError

__all__ = [
    "SimConfig",
    "BenchmarkReport",
    "KERNEL_SQ_INTEGRAL",
    "parabolic_kernel",
    "gen_periodic",
    "gen_noise",
    "rmse",
    "mssa_reconstruct",
    "run_benchmark",
]

# Closed form of the double integral of the squared parabolic kernel
# (2 - (2s-1)^2 - (2u-1)^2)^2 over the unit square; the acceptance suite
# re-derives it by numerical double quadrature before trusting it.
KERNEL_SQ_INTEGRAL = 88.0 / 45.0

SMOOTHING_DOF = 15


@dataclass(frozen=True)
class SimConfig:
    """One noise-generation configuration.

    ``setting`` is ``"gwn"`` (i.i.d. Gaussian samples, sd ``sigma``) or
    ``"far1"`` (autoregression with dependence strength ``hs_norm``,
    Brownian innovations, ``burn_in`` discarded steps).

    ``calibration`` fixes how ``hs_norm`` scales the parabolic kernel:
    ``"hs"`` (default) sets the squared Hilbert-Schmidt norm of the integral
    operator to ``hs_norm`` via ``gamma0 = sqrt(hs_norm / (88/45))``;
    ``"peak"`` sets the kernel's maximum value to ``hs_norm`` via
    ``gamma0 = hs_norm / 2``.  The reference error values the acceptance
    suite pins are only reproducible under the peak scaling, so benchmark
    cells default to it (see :func:`run_benchmark`); direct use here keeps
    the Hilbert-Schmidt default.
    """

    N: int
    omega: float
    setting: str = "gwn"
    n: int = 100
    sigma: float = 0.1
    hs_norm: float = 0.0
    calibration: str = "hs"
    seed: int = 0
    burn_in: int = 100

    def __post_init__(self):
        if self.setting not in ("gwn", "far1"):
            raise ConfigurationError(f"unknown setting {self.setting!r}")
        if self.calibration not in ("hs", "peak"):
            raise ConfigurationError(f"unknown calibration {self.calibration!r}")
        if not 0.0 <= self.hs_norm < 1.0:
            raise ConfigurationError("stationarity requires 0 <= hs_norm < 1")
        if self.n < 2 or self.N < 4:
            raise ConfigurationError("need n >= 2 grid points and N >= 4 curves")

    @property
    def gamma0(self) -> float:
        if self.calibration == "hs":
            return float(np.sqrt(self.hs_norm / KERNEL_SQ_INTEGRAL))
        return self.hs_norm / 2.0


def gen_periodic(N: int, grid, omega: float) -> np.ndarray:
    """Periodic component ``exp(s^2) cos(2 pi w t) + cos(4 pi s) sin(2 pi w t)``
    evaluated at every grid point and t = 1..N; shape (n, N)."""
    s = np.asarray(grid, dtype=float)[:, None]
    t = np.arange(1, N + 1)[None, :]
    phase = 2.0 * np.pi * omega * t
    return np.exp(s**2) * np.cos(phase) + np.cos(4.0 * np.pi * s) * np.sin(phase)


def parabolic_kernel(s, u) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    u = np.asarray(u, dtype=float)
    return 2.0 - (2.0 * s - 1.0) ** 2 - (2.0 * u - 1.0) ** 2


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    w = np.zeros_like(grid)
    w[:-1] += 0.5 * np.diff(grid)
    w[1:] += 0.5 * np.diff(grid)
    return w


def brownian_paths(rng: np.random.Generator, grid: np.ndarray, count: int) -> np.ndarray:
    """Independent standard Brownian paths sampled on ``grid``; shape
    (n, count).  Increment variances are the grid gaps, the first being the
    gap from 0, so a grid starting at 0 yields paths that start at 0."""
    steps = np.diff(grid, prepend=0.0)
    increments = rng.standard_normal((grid.size, count)) * np.sqrt(steps)[:, None]
    return np.cumsum(increments, axis=0)


def gen_noise(cfg: SimConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Draw the stochastic term of the model; shape (n, N).

    The autoregression iterates ``X_t = gamma0 * Op(X_{t-1}) + eps_t`` from
    zero, where ``Op`` applies the parabolic kernel by trapezoid quadrature
    on the grid and ``gamma0`` follows the configured calibration; the
    first ``burn_in`` columns are discarded.
    """
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    grid = np.linspace(0.0, 1.0, cfg.n)
    if cfg.setting == "gwn":
        return rng.normal(0.0, cfg.sigma, size=(cfg.n, cfg.N))
    quad = _trapezoid_weights(grid)
    op = cfg.gamma0 * parabolic_kernel(grid[:, None], grid[None, :]) * quad[None, :]
    eps = brownian_paths(rng, grid, cfg.burn_in + cfg.N)
    x = np.zeros(cfg.n)
    out = np.empty((cfg.n, cfg.N))
    for t in range(cfg.burn_in + cfg.N):
        x = op @ x + eps[:, t]
        if t >= cfg.burn_in:
            out[:, t - cfg.burn_in] = x
    return out


def rmse(Y, Yhat) -> float:
    """Root mean square error over all (grid point, time) entries."""
    Y = np.asarray(Y, dtype=float)
    Yhat = np.asarray(Yhat, dtype=float)
    if Y.shape != Yhat.shape:
        raise DimensionError(f"shape mismatch: {Y.shape} vs {Yhat.shape}")
    return float(np.sqrt(np.mean((Y - Yhat) ** 2)))


def mssa_reconstruct(values, L: int, rank: int) -> np.ndarray:
    """Discrete multivariate SSA baseline on raw samples.

    Stacks the per-variable (L, K) trajectory matrices side by side into one
    (L, n*K) matrix, so all variables share the window-length left singular
    vectors, truncates the SVD to ``rank`` and maps back by diagonal
    averaging within each variable's block.
    """
    values = np.asarray(values, dtype=float)
    n, N = values.shape
    if not 2 <= L <= N // 2:
        raise WindowLengthError(f"window length must satisfy 2 <= L <= N/2 (L={L}, N={N})")
    if rank < 1:
        raise ConfigurationError("rank must be >= 1")
    K = N - L + 1
    windows = np.lib.stride_tricks.sliding_window_view(values, K, axis=1)
    traj = np.ascontiguousarray(windows.transpose(1, 0, 2).reshape(L, n * K))
    max_rank = min(traj.shape)
    if rank > max_rank:
        warnings.warn(f"rank {rank} clipped to the trajectory rank bound {max_rank}")
        rank = max_rank
    U, s, Vt = np.linalg.svd(traj, full_matrices=False)
    low_rank = ((U[:, :rank] * s[:rank]) @ Vt[:rank]).reshape(L, n, K)
    out = np.zeros((n, N))
    for l in range(L):
        out[:, l : l + K] += low_rank[l]
    return out / anti_diagonal_counts(L, K)[None, :]


@dataclass(frozen=True)
class BenchmarkReport:
    """Mean recovery errors per (setting, omega, N, L, method) cell."""

    rows: tuple[dict, ...]
    reps: int
    seed: int

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["setting", "omega", "N", "L", "method", "mean_rmse", "reps", "seed"])
        for row in self.rows:
            writer.writerow([
                row["setting"], repr(float(row["omega"])), row["N"], row["L"],
                row["method"], repr(float(row["mean_rmse"])), self.reps, self.seed,
            ])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(
            {"reps": self.reps, "seed": self.seed, "rows": list(self.rows)},
            indent=2,
        )

    def mean_rmse(self, setting: str, omega: float, N: int, L: int, method: str) -> float:
        for row in self.rows:
            if (row["setting"], row["omega"], row["N"], row["L"], row["method"]) == (
                setting, omega, N, L, method,
            ):
                return row["mean_rmse"]
        raise KeyError((setting, omega, N, L, method))


def _normalize_cell(cell: dict) -> dict:
    known = {"setting", "omega", "N", "L", "hs_norm", "sigma", "n", "calibration"}
    unknown = set(cell) - known
    if unknown:
        raise ConfigurationError(f"unknown cell keys: {sorted(unknown)}")
    try:
        out = {
            "setting": str(cell["setting"]),
            "omega": float(cell["omega"]),
            "N": int(cell["N"]),
            "L": int(cell["L"]),
            "hs_norm": float(cell.get("hs_norm", 0.0)),
            "sigma": float(cell.get("sigma", 0.1)),
            "n": int(cell.get("n", 100)),
            # reference error values are only reproducible under peak scaling
            "calibration": str(cell.get("calibration", "peak")),
        }
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed benchmark cell {cell!r}: {exc}")
    if not 2 <= out["L"] <= out["N"] // 2:
        raise WindowLengthError(
            f"cell (N={out['N']}, L={out['L']}): window length must satisfy 2 <= L <= N/2"
        )
    return out


def _setting_label(cell: dict) -> str:
    if cell["setting"] == "gwn":
        return "gwn"
    label = f"far1:{cell['hs_norm']:g}"
    if cell["calibration"] != "peak":
        label += f":{cell['calibration']}"
    return label


def _run_rep(cell: dict, master_seed: int, cell_index: int, rep_index: int,
             rank: int) -> tuple[float, float]:
    """One paired replicate: same draw scored by both methods.

    Per-rep seeds come from ``SeedSequence(master_seed, spawn_key=(cell,
    rep))``, so results are independent of execution order and worker count.
    """
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(cell_index, rep_index))
    rng = np.random.default_rng(seq)
    cfg = SimConfig(N=cell["N"], omega=cell["omega"], setting=cell["setting"],
                    n=cell["n"], sigma=cell["sigma"], hs_norm=cell["hs_norm"],
                    calibration=cell["calibration"])
    grid = np.linspace(0.0, 1.0, cfg.n)
    m = gen_periodic(cfg.N, grid, cfg.omega)
    Y = m + gen_noise(cfg, rng)

    basis = build_basis("bspline", SMOOTHING_DOF)
    fts = project_samples(grid, Y, basis)
    dec = decompose(fts, cell["L"], r=rank)
    recon = reconstruct(dec, [list(range(1, dec.r + 1))])[0]
    err_fssa = rmse(m, recon.evaluate(grid))
    err_mssa = rmse(m, mssa_reconstruct(Y, cell["L"], rank))
    return err_fssa, err_mssa


def run_benchmark(cells, reps: int, seed: int, rank: int = 2,
                  workers: int = 1) -> BenchmarkReport:
    """Score curve recovery for every cell and both methods.

    Each replicate draws one dataset and scores the functional and discrete
    reconstructions against the true periodic component on the sampling
    grid.  Dependent-noise cells default to ``calibration="peak"`` (the
    scaling that matches the reference values in the acceptance suite); pass
    ``calibration="hs"`` in a cell for the Hilbert-Schmidt scaling.
    Replicates are independent work units; means are accumulated in
    replicate order, so reports are bit-identical for a fixed seed whatever
    ``workers`` is.
    """
    cells = [_normalize_cell(dict(c)) for c in cells]
    if reps < 1:
        raise ConfigurationError("reps must be >= 1")
    rows: list[dict] = []
    with ProcessPoolExecutor(max_workers=workers) if workers > 1 else _serial() as pool:
        for ci, cell in enumerate(cells):
            futures = [
                pool.submit(_run_rep, cell, seed, ci, rep, rank) for rep in range(reps)
            ]
            pairs = [f.result() for f in futures]
            for method, col in (("FSSA", 0), ("MSSA", 1)):
                rows.append({
                    "setting": _setting_label(cell),
                    "omega": cell["omega"],
                    "N": cell["N"],
                    "L": cell["L"],
                    "method": method,
                    "mean_rmse": float(np.mean([p[col] for p in pairs])),
                })
    return BenchmarkReport(rows=tuple(rows), reps=reps, seed=seed)


class _SerialFuture:
    def __init__(self, value):
        self._value = value

    def result(self):
        return self._value


class _serial:
    """Minimal in-process stand-in for ProcessPoolExecutor."""

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        return False

    def submit(self, fn, *args):
        return _SerialFuture(fn(*args))
