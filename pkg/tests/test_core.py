import numpy as np
import pytest

from fssa import (
    ConfigurationError,
    DegenerateSeriesError,
    FunctionalTimeSeries,
    GroupedOperator,
    Grouping,
    WindowLengthError,
    build_basis,
    build_normal_matrices,
    decompose,
    elementary_operator,
    embed,
    group_operator,
    hankelize,
    project_samples,
    reconstruct,
)
from fssa.core import anti_diagonal_counts

from conftest import random_fts, smooth_periodic_fts


# ---------------------------------------------------------------------------
# oracles
# ---------------------------------------------------------------------------

def quadrature_inner(basis, f, g, n_pts=20_001):
    s = np.linspace(0.0, 1.0, n_pts)
    design = basis.evaluate(s)
    return np.trapezoid((design @ f) * (design @ g), s)


def brute_force_s0(fts, L):
    """Lag covariance matrix assembled entry by entry from quadrature inner
    products of curves with basis functions (independent of the W shortcut)."""
    d, N = fts.coef.shape
    K = N - L + 1
    eye = np.eye(d)
    pair = np.empty((d, N))  # pair[q, t] = <curve_t, basis_q> by quadrature
    for q in range(d):
        for t in range(N):
            pair[q, t] = quadrature_inner(fts.basis, fts.coef[:, t], eye[q])
    S0 = np.empty((L * d, L * d))
    for i in range(L * d):
        qi, ri = divmod(i, L)
        for j in range(L * d):
            qj, rj = divmod(j, L)
            S0[i, j] = sum(
                pair[qi, ri + m] * pair[qj, rj + m] for m in range(K)
            )
    return S0


def stacked_trajectory(coef, L):
    """Explicit (d*L, K) stacked trajectory built by plain loops, rows in
    the flat layout k = q * L + r."""
    d, N = coef.shape
    K = N - L + 1
    out = np.empty((d * L, K))
    for q in range(d):
        for r in range(L):
            for j in range(K):
                out[q * L + r, j] = coef[q, r + j]
    return out


def dual_matrix(fts, L):
    """K x K matrix of lagged-vector inner products."""
    M = fts.coef.T @ fts.basis.gram @ fts.coef
    K = fts.N - L + 1
    out = np.empty((K, K))
    for j in range(K):
        for jp in range(K):
            out[j, jp] = sum(M[l + j, l + jp] for l in range(L))
    return out


def trajectory_cells(fts, L):
    """cell (l, j) of the trajectory is curve l + j (0-based)."""
    d, N = fts.coef.shape
    K = N - L + 1
    cells = np.empty((d, L, K))
    for l in range(L):
        cells[:, l, :] = fts.coef[:, l : l + K]
    return cells


def random_hankel_operator(basis, L, K, rng, scale=1.0):
    g = scale * rng.standard_normal((basis.d, L + K - 1))
    blocks = np.empty((basis.d, L, K))
    for l in range(L):
        blocks[:, l, :] = g[:, l : l + K]
    return GroupedOperator(basis=basis, blocks=blocks)


# ---------------------------------------------------------------------------
# embedding
# ---------------------------------------------------------------------------

class TestEmbed:
    @pytest.mark.parametrize("N,L,K", [(10, 4, 7), (365, 28, 338), (448, 45, 404)])
    def test_lag_count(self, N, L, K):
        rng = np.random.default_rng(0)
        fts = random_fts(rng, d=4, N=N)
        emb = embed(fts, L)
        assert emb.K == K

    def test_w_is_gram_times_coef(self):
        rng = np.random.default_rng(1)
        fts = random_fts(rng, d=5, N=24)
        emb = embed(fts, 6)
        np.testing.assert_array_equal(emb.W, fts.basis.gram @ fts.coef)

    @pytest.mark.parametrize("L", [1, 0, 6, 50])
    def test_window_bounds(self, L):
        rng = np.random.default_rng(2)
        fts = random_fts(rng, d=4, N=10)
        with pytest.raises(WindowLengthError):
            embed(fts, L)

    def test_stacked_matrix_layout(self):
        rng = np.random.default_rng(3)
        fts = random_fts(rng, d=4, N=14, kind="orthonormal_grid")
        emb = embed(fts, 5)
        np.testing.assert_allclose(
            emb.lagged_coef_matrix(), stacked_trajectory(fts.coef, 5), atol=0
        )


class TestNormalMatrices:
    def test_orthonormal_gram_lift_is_identity(self):
        rng = np.random.default_rng(4)
        fts = random_fts(rng, d=4, N=12, kind="orthonormal_grid")
        G_L, _ = build_normal_matrices(embed(fts, 3))
        np.testing.assert_array_equal(G_L, np.eye(12))

    def test_single_direction_constant_series(self):
        # curves equal one unit-norm basis function: within that block every
        # lag covariance entry is K, the rest vanish
        basis = build_basis("orthonormal_grid", 2)
        coef = np.vstack([np.ones(10), np.zeros(10)])
        fts = FunctionalTimeSeries(basis, coef)
        emb = embed(fts, 4)
        _, S0 = build_normal_matrices(emb)
        np.testing.assert_array_equal(S0[:4, :4], np.full((4, 4), emb.K))
        assert np.all(S0[4:, :] == 0) and np.all(S0[:, 4:] == 0)

    def test_matches_brute_force_quadrature(self):
        rng = np.random.default_rng(5)
        basis = build_basis("bspline", 3, degree=2)
        fts = FunctionalTimeSeries(basis, rng.standard_normal((3, 6)))
        # N=6, L=2 is the smallest legal window for this length
        _, S0 = build_normal_matrices(embed(fts, 2))
        np.testing.assert_allclose(S0, brute_force_s0(fts, 2), atol=1e-9)


# ---------------------------------------------------------------------------
# decomposition
# ---------------------------------------------------------------------------

class TestDecompose:
    def test_constant_series_analytic(self):
        basis = build_basis("orthonormal_grid", 5)
        f = np.array([0.5, 0.1, -0.3, 0.2, 0.7])
        f /= np.linalg.norm(f)
        fts = FunctionalTimeSeries(basis, np.tile(f[:, None], (1, 12)))
        dec = decompose(fts, 4)
        L, K = 4, 9
        assert dec.r == 1
        assert dec.eigvals[0] == pytest.approx(L * K, rel=1e-12)
        np.testing.assert_allclose(
            dec.psi_blocks()[:, :, 0], np.tile((f / np.sqrt(L))[:, None], (1, L)),
            atol=1e-10,
        )
        np.testing.assert_allclose(dec.v[:, 0], np.full(K, 1 / np.sqrt(K)), atol=1e-10)

    def test_noiseless_harmonic_is_rank_two(self):
        _, values, fts = smooth_periodic_fts(omega=0.1, N=100)
        dec = decompose(fts, 20)
        above = np.flatnonzero(dec.eigvals > 1e-8 * dec.eigvals[0])
        assert above.size == 2
        # harmonic pair carries near-equal eigenvalues
        assert dec.eigvals[1] / dec.eigvals[0] > 0.9
        # oracle: numerical rank of the explicitly stacked trajectory
        sv = np.linalg.svd(stacked_trajectory(fts.coef, 20), compute_uv=False)
        assert np.count_nonzero(sv**2 > 1e-8 * sv[0] ** 2) == 2

    def test_matches_plain_svd_on_orthonormal_basis(self):
        # with an orthonormal basis the functional decomposition must agree
        # with a matrix SVD of the stacked trajectory of the coefficients
        for seed in range(3):
            rng = np.random.default_rng(seed)
            fts = random_fts(rng, d=6, N=30, kind="orthonormal_grid")
            dec = decompose(fts, 7)
            sv = np.linalg.svd(stacked_trajectory(fts.coef, 7), compute_uv=False)
            np.testing.assert_allclose(dec.singular_values, sv[: dec.r], rtol=1e-6)

    def test_orthonormality_invariants(self):
        rng = np.random.default_rng(7)
        fts = random_fts(rng, d=7, N=36)
        dec = decompose(fts, 8)
        G_L = np.kron(fts.basis.gram, np.eye(8))
        np.testing.assert_allclose(dec.psi.T @ G_L @ dec.psi, np.eye(dec.r), atol=1e-8)
        np.testing.assert_allclose(dec.v.T @ dec.v, np.eye(dec.r), atol=1e-8)

    def test_eigen_residual(self):
        rng = np.random.default_rng(8)
        fts = random_fts(rng, d=15, N=200, scale=2.0)
        dec = decompose(fts, 40)
        G_L, S0 = build_normal_matrices(embed(fts, 40))
        resid = S0 @ dec.psi - G_L @ dec.psi * dec.eigvals[None, :]
        norms = np.linalg.norm(resid, axis=0)
        scale = dec.eigvals[0] * np.linalg.norm(dec.psi, axis=0)
        assert np.all(norms <= 1e-8 * scale)

    def test_dual_factorization(self):
        rng = np.random.default_rng(9)
        fts = random_fts(rng, d=4, N=40)
        L = 6
        dec = decompose(fts, L)
        dual = np.linalg.eigvalsh(dual_matrix(fts, L))[::-1]
        np.testing.assert_allclose(
            dec.eigvals, dual[: dec.r], rtol=0, atol=1e-7 * dec.eigvals[0]
        )
        # applying the trajectory to each right vector returns the scaled psi
        cells = trajectory_cells(fts, L)
        for i in range(dec.r):
            applied = np.einsum("qlj,j->ql", cells, dec.v[:, i])
            np.testing.assert_allclose(
                applied, np.sqrt(dec.eigvals[i]) * dec.psi_blocks()[:, :, i],
                atol=1e-8 * np.sqrt(dec.eigvals[0]),
            )

    def test_energy_conservation(self):
        rng = np.random.default_rng(10)
        fts = random_fts(rng, d=5, N=30)
        L = 6
        dec = decompose(fts, L)
        gram = fts.basis.gram
        total = 0.0
        for l in range(L):
            for j in range(fts.N - L + 1):
                y = fts.coef[:, l + j]
                total += y @ gram @ y
        assert dec.eigvals.sum() == pytest.approx(total, rel=1e-8)

    def test_sign_convention(self):
        rng = np.random.default_rng(11)
        fts = random_fts(rng, d=6, N=40)
        dec = decompose(fts, 10)
        peak = np.abs(dec.v).argmax(axis=0)
        assert np.all(dec.v[peak, np.arange(dec.r)] > 0)

    def test_requested_rank(self):
        rng = np.random.default_rng(12)
        fts = random_fts(rng, d=6, N=40)
        dec = decompose(fts, 10, r=3)
        assert dec.r == 3
        full = decompose(fts, 10)
        np.testing.assert_allclose(dec.eigvals, full.eigvals[:3], rtol=1e-9)

    def test_rank_out_of_range(self):
        rng = np.random.default_rng(13)
        fts = random_fts(rng, d=4, N=20)
        with pytest.raises(ConfigurationError):
            decompose(fts, 5, r=100)

    def test_zero_series_degenerate(self):
        basis = build_basis("bspline", 5)
        fts = FunctionalTimeSeries(basis, np.zeros((5, 20)))
        with pytest.raises(DegenerateSeriesError):
            decompose(fts, 4)


# ---------------------------------------------------------------------------
# elementary / grouped operators
# ---------------------------------------------------------------------------

class TestOperators:
    @pytest.fixture
    def setup(self):
        rng = np.random.default_rng(20)
        fts = random_fts(rng, d=4, N=24)
        return fts, decompose(fts, 5)

    def test_singleton_group_equals_elementary(self, setup):
        _, dec = setup
        np.testing.assert_array_equal(
            group_operator(dec, [3]).blocks, elementary_operator(dec, 3).blocks
        )

    def test_elementary_operators_sum_to_trajectory(self, setup):
        fts, dec = setup
        total = sum(elementary_operator(dec, i + 1).blocks for i in range(dec.r))
        np.testing.assert_allclose(total, trajectory_cells(fts, 5), atol=1e-8)

    def test_elementary_is_rank_one(self, setup):
        _, dec = setup
        for i in (1, dec.r):
            flat = elementary_operator(dec, i).blocks.reshape(-1, dec.K)
            sv = np.linalg.svd(flat, compute_uv=False)
            assert sv[1] <= 1e-10 * sv[0]

    def test_group_additivity(self, setup):
        _, dec = setup
        combined = group_operator(dec, [1, 2, 4]).blocks
        np.testing.assert_allclose(
            combined,
            group_operator(dec, [1, 4]).blocks + group_operator(dec, [2]).blocks,
            atol=1e-12,
        )

    def test_full_group_is_trajectory(self, setup):
        fts, dec = setup
        full = group_operator(dec, range(1, dec.r + 1)).blocks
        np.testing.assert_allclose(full, trajectory_cells(fts, 5), atol=1e-8)

    def test_errors(self, setup):
        _, dec = setup
        with pytest.raises(ConfigurationError):
            group_operator(dec, [])
        with pytest.raises(ConfigurationError):
            group_operator(dec, [0])
        with pytest.raises(ConfigurationError):
            elementary_operator(dec, dec.r + 1)


# ---------------------------------------------------------------------------
# hankelization
# ---------------------------------------------------------------------------

class TestHankelize:
    def test_two_by_two(self):
        basis = build_basis("orthonormal_grid", 3)
        rng = np.random.default_rng(30)
        blocks = rng.standard_normal((3, 2, 2))
        out = hankelize(GroupedOperator(basis=basis, blocks=blocks)).blocks
        np.testing.assert_array_equal(out[:, 0, 0], blocks[:, 0, 0])
        np.testing.assert_array_equal(out[:, 1, 1], blocks[:, 1, 1])
        mid = 0.5 * (blocks[:, 0, 1] + blocks[:, 1, 0])
        np.testing.assert_allclose(out[:, 0, 1], mid)
        np.testing.assert_allclose(out[:, 1, 0], mid)

    def test_fixes_hankel_input(self):
        rng = np.random.default_rng(31)
        op = random_hankel_operator(build_basis("bspline", 5), 4, 9, rng)
        np.testing.assert_array_equal(hankelize(op).blocks, op.blocks)

    def test_idempotent_and_linear(self):
        rng = np.random.default_rng(32)
        basis = build_basis("bspline", 5)
        x = GroupedOperator(basis, rng.standard_normal((5, 4, 9)))
        y = GroupedOperator(basis, rng.standard_normal((5, 4, 9)))
        hx = hankelize(x)
        np.testing.assert_allclose(hankelize(hx).blocks, hx.blocks, atol=1e-12)
        combo = GroupedOperator(basis, 2.0 * x.blocks - 0.7 * y.blocks)
        np.testing.assert_allclose(
            hankelize(combo).blocks,
            2.0 * hx.blocks - 0.7 * hankelize(y).blocks,
            atol=1e-12,
        )

    def test_projection_beats_random_hankel_competitors(self):
        rng = np.random.default_rng(33)
        basis = build_basis("bspline", 4)
        op = GroupedOperator(basis, rng.standard_normal((4, 5, 8)))
        proj = hankelize(op)
        best = GroupedOperator(basis, op.blocks - proj.blocks).frobenius_norm()
        for _ in range(20):
            competitor = random_hankel_operator(basis, 5, 8, rng, scale=0.5)
            other = GroupedOperator(
                basis, op.blocks - (proj.blocks + competitor.blocks)
            ).frobenius_norm()
            assert best <= other


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

class TestReconstruct:
    def test_full_rank_identity(self):
        for seed in range(5):
            rng = np.random.default_rng(seed)
            fts = random_fts(rng, d=rng.integers(3, 8), N=int(rng.integers(20, 60)))
            L = int(rng.integers(2, fts.N // 2 + 1))
            dec = decompose(fts, L)
            rec = reconstruct(dec, [list(range(1, dec.r + 1))])[0]
            np.testing.assert_allclose(rec.coef, fts.coef, atol=1e-8)

    def test_constant_series_first_component(self):
        basis = build_basis("orthonormal_grid", 4)
        f = np.array([1.0, -2.0, 0.5, 0.2])
        fts = FunctionalTimeSeries(basis, np.tile(f[:, None], (1, 16)))
        dec = decompose(fts, 5)
        rec = reconstruct(dec, [[1]])[0]
        np.testing.assert_allclose(rec.coef, fts.coef, atol=1e-10)

    def test_noiseless_harmonic_pair_recovery(self):
        grid, values, fts = smooth_periodic_fts(omega=0.1, N=100)
        dec = decompose(fts, 20)
        rec = reconstruct(dec, [[1, 2]])[0]
        err = rec.evaluate(grid) - fts.evaluate(grid)
        assert np.sqrt(np.mean(err**2)) <= 1e-6

    def test_matches_hankelized_operator_readoff(self):
        rng = np.random.default_rng(40)
        fts = random_fts(rng, d=5, N=30)
        dec = decompose(fts, 6)
        groups = [[1, 3], [2]]
        recs = reconstruct(dec, groups)
        for g, rec in zip(groups, recs):
            hank = hankelize(group_operator(dec, g)).blocks
            # curve t sits on anti-diagonal l + j = t (0-based); read l = 0 / K-side
            for t in range(fts.N):
                l = min(t, dec.L - 1)
                np.testing.assert_allclose(
                    rec.coef[:, t], hank[:, l, t - l], atol=1e-10
                )

    def test_grouping_validation(self):
        rng = np.random.default_rng(41)
        fts = random_fts(rng, d=4, N=20)
        dec = decompose(fts, 4)
        with pytest.raises(ConfigurationError):
            reconstruct(dec, [[1, 2], [2, 3]])
        with pytest.raises(ConfigurationError):
            reconstruct(dec, [[0]])
        with pytest.raises(ConfigurationError):
            reconstruct(dec, [[dec.r + 1]])

    def test_grouping_type(self):
        g = Grouping(groups=((1, 2), (3,)), labels=("pair", "trend"))
        assert g.group_labels() == ("pair", "trend")
        with pytest.raises(ConfigurationError):
            Grouping(groups=((1,), (1,)))
        with pytest.raises(ConfigurationError):
            Grouping(groups=((),))
        with pytest.raises(ConfigurationError):
            Grouping(groups=((1,),), labels=("a", "b"))


def test_anti_diagonal_counts():
    counts = anti_diagonal_counts(2, 2)
    np.testing.assert_array_equal(counts, [1, 2, 1])
    counts = anti_diagonal_counts(4, 7)
    np.testing.assert_array_equal(counts, [1, 2, 3, 4, 4, 4, 4, 3, 2, 1])
