import numpy as np
import pytest

from fssa import FunctionalTimeSeries, build_basis, project_samples


@pytest.fixture
def spline15():
    """Cubic B-spline basis with 15 degrees of freedom (benchmark default)."""
    return build_basis("bspline", 15)


def random_fts(rng, d=6, N=40, kind="bspline", scale=1.0):
    basis = build_basis(kind, d)
    coef = scale * rng.standard_normal((d, N))
    return FunctionalTimeSeries(basis, coef)


def smooth_periodic_fts(omega=0.1, N=100, n=100, d=15):
    """Noiseless periodic curves projected onto the cubic spline basis."""
    from fssa.simulation import gen_periodic

    grid = np.linspace(0.0, 1.0, n)
    values = gen_periodic(N, grid, omega)
    return grid, values, project_samples(grid, values, build_basis("bspline", d))


def weekly_values(N=112, n=24, noise_sd=0.02, seed=11):
    """Synthetic intraday-style data: slow mean profile plus weekly harmonics
    (frequencies 1/7, 2/7, 3/7) and a weak monthly cycle, lightly noised.

    Designed so the eigentriples group as {1}, {2,3}, {4,5}, {6,7}, {8,9}.
    """
    rng = np.random.default_rng(seed)
    s = np.linspace(0.0, 1.0, n)[:, None]
    t = np.arange(1, N + 1)[None, :]
    mean = 3.0 + 1.2 * np.sin(np.pi * s)
    vals = np.broadcast_to(mean, (n, N)).copy()
    for freq, amp in ((1 / 7, 1.0), (2 / 7, 0.6), (3 / 7, 0.4)):
        a = amp * (1.0 + 0.3 * np.cos(np.pi * s))
        b = amp * (0.8 + 0.3 * s)
        vals += a * np.cos(2 * np.pi * freq * t) + b * np.sin(2 * np.pi * freq * t)
    a_m = 0.25 * (1.0 + 0.2 * s)
    vals += a_m * np.cos(2 * np.pi * t / 28.0) + 0.25 * 0.9 * np.sin(2 * np.pi * t / 28.0)
    vals += noise_sd * rng.standard_normal((n, N))
    return np.linspace(0.0, 1.0, n), vals
