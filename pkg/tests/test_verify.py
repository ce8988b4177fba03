"""Both verification criteria, their agreement, and the Monte Carlo oracle."""
import numpy as np
import pytest

from designforge import (
    Design,
    MultiIndex,
    base_s1,
    mc_moment_oracle,
    sphere_monomial_moment,
    verify_gegenbauer,
    verify_monomials,
)


def random_rotation(dim, seed):
    rng = np.random.default_rng(seed)
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def rotated(design, seed):
    pts = np.asarray(design.points, dtype=float) @ random_rotation(design.ambient_dim, seed).T
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return Design(ambient_dim=design.ambient_dim, degree=design.degree, points=pts)


def corrupted(design, delta=1e-3):
    """Move one point a distance delta along the sphere (exactly tangential;
    a radial nudge plus renormalization would shrink the effective shift)."""
    pts = np.asarray(design.points, dtype=float).copy()
    p = pts[0] / np.linalg.norm(pts[0])
    for e in np.eye(design.ambient_dim):
        u = e - (e @ p) * p
        if np.linalg.norm(u) > 0.5:
            u /= np.linalg.norm(u)
            break
    pts[0] = np.cos(delta) * p + np.sin(delta) * u
    return Design(ambient_dim=design.ambient_dim, degree=design.degree, points=pts)


class TestVerifyMonomials:
    def test_triangle_passes_degree_two(self):
        report = verify_monomials(base_s1(2), 2, 1e-12)
        assert report.passed and report.max_abs_residual < 1e-15

    def test_triangle_fails_degree_three(self):
        report = verify_monomials(base_s1(2), 3, 1e-9)
        assert not report.passed
        assert report.worst_monomial.degree == 3

    def test_single_point_fails_degree_one(self):
        d = Design(ambient_dim=3, degree=1, points=np.array([[1.0, 0.0, 0.0]]))
        report = verify_monomials(d, 1, 1e-9)
        assert not report.passed
        assert report.max_abs_residual == pytest.approx(1.0)

    def test_monotone_in_degree(self):
        d = base_s1(7)
        residuals = [verify_monomials(d, t, 1e-9).max_abs_residual for t in range(1, 9)]
        assert all(a <= b + 1e-18 for a, b in zip(residuals, residuals[1:]))

    @pytest.mark.parametrize("t", range(1, 13))
    def test_polygon_passes_t_fails_t_plus_one(self, t):
        gon = base_s1(t)
        assert verify_monomials(gon, t, 1e-12).passed
        assert not verify_monomials(gon, t + 1, 5e-17).passed


class TestVerifyGegenbauer:
    def test_square_passes_degree_three(self):
        report = verify_gegenbauer(base_s1(3), 3, 1e-12)
        assert report.passed

    def test_square_fails_degree_four_at_degree_four(self):
        report = verify_gegenbauer(base_s1(3), 4, 1e-9)
        assert not report.passed
        assert report.worst_degree == 4

    def test_antipodal_pair_passes_degree_one(self):
        d = Design(ambient_dim=3, degree=1, points=np.array([[0, 0, 1.0], [0, 0, -1.0]]))
        assert verify_gegenbauer(d, 1, 1e-12).passed

    def test_ambient_one_unsupported(self):
        d = Design(ambient_dim=1, degree=1, points=np.array([[1.0], [-1.0]]))
        with pytest.raises(ValueError):
            verify_gegenbauer(d, 1, 1e-9)


class TestAgreementAndInvariance:
    @pytest.mark.parametrize("n,t", [(2, 3), (3, 2), (3, 3), (4, 2)])
    def test_methods_agree_on_built_designs(self, built, n, t):
        design, _ = built(n, t)
        a = verify_monomials(design, t, 1e-9)
        b = verify_gegenbauer(design, t, 1e-9)
        assert a.passed and b.passed

    @pytest.mark.parametrize("n,t", [(2, 3), (3, 2)])
    def test_both_methods_detect_corruption(self, built, n, t):
        design, _ = built(n, t)
        bad = corrupted(design)
        assert not verify_monomials(bad, t, 1e-9).passed
        assert not verify_gegenbauer(bad, t, 1e-9).passed

    def test_rotation_keeps_monomial_verdict(self, built):
        design, _ = built(2, 4)
        tol = 1e-9
        assert verify_monomials(design, 4, tol).passed
        for seed in (1, 2, 3):
            spun = rotated(design, seed)
            report = verify_monomials(spun, 4, 10 * tol)
            assert report.passed, report.max_abs_residual

    def test_rotation_leaves_gegenbauer_residual_unchanged(self, built):
        design, _ = built(3, 3)
        base = verify_gegenbauer(design, 3, 1e-9).max_abs_residual
        spun = verify_gegenbauer(rotated(design, 7), 3, 1e-9).max_abs_residual
        assert abs(base - spun) < 1e-12


class TestMonteCarloOracle:
    def test_deterministic_for_fixed_seed(self):
        a = mc_moment_oracle(3, MultiIndex((2, 0, 0)), 10_000, seed=5)
        b = mc_moment_oracle(3, MultiIndex((2, 0, 0)), 10_000, seed=5)
        assert a == b

    def test_second_moment_within_three_sigma(self):
        est, se = mc_moment_oracle(3, MultiIndex((2, 0, 0)), 200_000, seed=11)
        assert abs(est - 1 / 3) <= 3 * se

    def test_odd_moment_within_three_sigma(self):
        est, se = mc_moment_oracle(3, MultiIndex((1, 0, 0)), 200_000, seed=12)
        assert abs(est) <= 3 * se

    def test_mixed_moment_matches_closed_form(self):
        alpha = MultiIndex((2, 2, 0, 0))
        est, se = mc_moment_oracle(4, alpha, 200_000, seed=13)
        exact = float(sphere_monomial_moment(4, alpha))
        assert abs(est - exact) <= 3 * se

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            mc_moment_oracle(3, MultiIndex((2, 0)), 100, seed=0)
        with pytest.raises(ValueError):
            mc_moment_oracle(2, MultiIndex((2, 0)), 0, seed=0)
