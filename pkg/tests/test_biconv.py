import numpy as np
import pytest

from bifreemax import (
    AffineNormalization,
    BivariateCDF,
    InvalidCDFError,
    ProjectionPairLaw,
    bifree_max_convolve,
    free_max_convolve,
    marginals,
    max_stable_residual,
    merge_grids,
    nfold,
    nth_root,
    projection_indicator_cdf,
    psi_ratio,
    validate_bi,
    wedge_moment_closed_form,
)
from helpers import random_bivariate_cdf


def product_cdf(xb, u, yb, v):
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return BivariateCDF(xb, yb, u[:, None] * v[None, :])


class TestPsiRatio:
    def test_product_cdf_gives_one(self):
        F = product_cdf([0, 1], [0.4, 1.0], [0, 1], [0.5, 1.0])
        psi = psi_ratio(F).values
        assert np.all(psi[np.isfinite(psi)] == 1.0)

    def test_infinity_sentinel(self):
        F = BivariateCDF([0, 1], [0, 1], [[0.0, 0.4], [0.5, 1.0]])
        psi = psi_ratio(F).values
        assert np.isinf(psi[0, 0])

    def test_undefined_sentinel(self):
        F = BivariateCDF([0, 1], [0, 1], [[0.0, 0.0], [0.0, 1.0]])
        psi = psi_ratio(F).values
        assert np.isnan(psi[0, 0])

    def test_projection_pair_cell(self):
        # four-atom joint law of a commuting projection pair with
        # (p, q, r) = (0.6, 0.7, 0.5): F(0,0) = 1-p-q+r = 0.2
        F = BivariateCDF([0, 1], [0, 1], [[0.2, 0.4], [0.3, 1.0]])
        psi = psi_ratio(F).values
        assert psi[0, 0] == pytest.approx(0.4 * 0.3 / 0.2, abs=1e-12)

    def test_finite_values_dominate_marginals(self):
        rng = np.random.default_rng(21)
        for _ in range(30):
            F = random_bivariate_cdf(rng)
            psi = psi_ratio(F).values
            f1 = F.cdf[:, -1][:, None]
            f2 = F.cdf[-1, :][None, :]
            finite = np.isfinite(psi)
            assert np.all(psi[finite] >= np.maximum(f1, f2)[finite] - 1e-12)


class TestBifreeMaxConvolve:
    def test_products_stay_products(self):
        F = product_cdf([0, 1], [0.8, 1.0], [0, 1], [0.9, 1.0])
        G = product_cdf([0, 1], [0.7, 1.0], [0, 1], [0.6, 1.0])
        H = bifree_max_convolve(F, G)
        h1 = np.maximum(0.0, np.array([0.8, 1.0]) + np.array([0.7, 1.0]) - 1.0)
        h2 = np.maximum(0.0, np.array([0.9, 1.0]) + np.array([0.6, 1.0]) - 1.0)
        assert np.allclose(H.cdf, h1[:, None] * h2[None, :])

    def test_identity_element(self):
        F = BivariateCDF([0, 1], [0, 1], [[0.3, 0.6], [0.5, 1.0]])
        G = BivariateCDF([-5.0], [-5.0], [[1.0]])  # point mass below F
        H = bifree_max_convolve(F, G)
        Fm, _ = merge_grids(F, G)
        assert np.max(np.abs(H.cdf - Fm.cdf)) < 1e-15

    def test_projection_cell_matches_transform_oracle(self):
        law = ProjectionPairLaw(0.6, 0.7, 0.5)
        law2 = ProjectionPairLaw(0.8, 0.5, 0.45)
        H = bifree_max_convolve(projection_indicator_cdf(law),
                                projection_indicator_cdf(law2))
        expected = wedge_moment_closed_form(law, law2)
        assert H.cdf[0, 0] == pytest.approx(expected, abs=1e-12)
        assert H.cdf[0, 0] == pytest.approx(0.1097561, abs=5e-8)

    def test_zero_marginal_cell_is_zero(self):
        F = BivariateCDF([0, 1], [0, 1], [[0.3, 0.6], [0.5, 1.0]])
        G = BivariateCDF([0, 1], [0, 1], [[0.2, 0.4], [0.3, 1.0]])
        H = bifree_max_convolve(F, G)
        # H1(0) = (0.6 + 0.4 - 1)_+ = 0 forces the whole first row to 0
        assert np.all(H.cdf[0, :] == 0.0)

    def test_invalid_inputs_rejected(self):
        bad = BivariateCDF([0, 1], [0, 1], [[0.5, 0.9], [0.9, 1.0]])
        good = BivariateCDF([0, 1], [0, 1], [[0.3, 0.6], [0.5, 1.0]])
        with pytest.raises(InvalidCDFError):
            bifree_max_convolve(bad, good)

    def test_psi_additivity(self):
        rng = np.random.default_rng(22)
        for _ in range(30):
            F = random_bivariate_cdf(rng)
            G = random_bivariate_cdf(rng)
            H = bifree_max_convolve(F, G)
            Fm, Gm = merge_grids(F, G)
            pf = psi_ratio(Fm).values
            pg = psi_ratio(Gm).values
            ph = psi_ratio(H).values
            mask = np.isfinite(pf) & np.isfinite(pg) & np.isfinite(ph)
            assert np.max(np.abs(ph[mask] - (pf[mask] + pg[mask] - 1.0))) < 1e-9

    def test_commutative_bitwise(self):
        rng = np.random.default_rng(23)
        for _ in range(20):
            F = random_bivariate_cdf(rng)
            G = random_bivariate_cdf(rng)
            assert np.array_equal(bifree_max_convolve(F, G).cdf,
                                  bifree_max_convolve(G, F).cdf)

    def test_marginal_consistency_bitwise(self):
        rng = np.random.default_rng(24)
        for _ in range(20):
            F = random_bivariate_cdf(rng)
            G = random_bivariate_cdf(rng)
            H = bifree_max_convolve(F, G)
            H1, H2 = marginals(H)
            F1, F2 = marginals(F)
            G1, G2 = marginals(G)
            e1 = free_max_convolve(F1, G1)
            e2 = free_max_convolve(F2, G2)
            assert np.array_equal(H1.values, e1.evaluate(H1.breaks))
            assert np.array_equal(H2.values, e2.evaluate(H2.breaks))

    def test_monotone_degradation(self):
        rng = np.random.default_rng(25)
        for _ in range(20):
            F = random_bivariate_cdf(rng)
            G = random_bivariate_cdf(rng)
            H = bifree_max_convolve(F, G)
            h1 = H.cdf[:, -1][:, None]
            h2 = H.cdf[-1, :][None, :]
            assert np.all(H.cdf <= np.minimum(h1, h2) + 1e-12)


class TestNfold:
    def test_one_fold_is_identity(self):
        F = BivariateCDF([0, 1], [0, 1], [[0.3, 0.6], [0.5, 1.0]])
        assert nfold(F, 1) is F

    def test_two_fold_equals_pairwise(self):
        rng = np.random.default_rng(26)
        for _ in range(20):
            F = random_bivariate_cdf(rng)
            assert np.array_equal(nfold(F, 2).cdf,
                                  bifree_max_convolve(F, F).cdf)

    def test_closed_form_matches_iteration(self):
        rng = np.random.default_rng(27)
        for n in (3, 4, 5):
            F = random_bivariate_cdf(rng)
            iterated = F
            for _ in range(n - 1):
                iterated = bifree_max_convolve(iterated, F)
            assert np.max(np.abs(nfold(F, n).cdf - iterated.cdf)) < 1e-9

    def test_product_three_fold(self):
        u = np.array([0.9, 1.0])
        v = np.array([0.85, 1.0])
        F = product_cdf([0, 1], u, [0, 1], v)
        H = nfold(F, 3)
        expected = (np.maximum(0.0, 3 * u - 2)[:, None]
                    * np.maximum(0.0, 3 * v - 2)[None, :])
        assert np.allclose(H.cdf, expected)

    def test_rejects_bad_n(self):
        F = BivariateCDF([0.0], [0.0], [[1.0]])
        with pytest.raises(ValueError):
            nfold(F, 0)


class TestNthRoot:
    def test_product_two_root(self):
        u = np.array([0.4, 1.0])
        v = np.array([0.6, 1.0])
        F = product_cdf([0, 1], u, [0, 1], v)
        res = nth_root(F, 2)
        assert res.ok
        expected = (((u + 1) / 2)[:, None]) * (((v + 1) / 2)[None, :])
        assert np.allclose(res.candidate.cdf, expected)
        back = nfold(res.candidate, 2)
        assert np.max(np.abs(back.cdf - F.cdf)) < 1e-12

    def test_point_mass_fixed_point(self):
        F = BivariateCDF([2.0], [3.0], [[1.0]])
        for n in (1, 2, 7):
            res = nth_root(F, n)
            assert res.ok
            assert res.candidate.cdf.tolist() == [[1.0]]

    def test_projection_round_trip(self):
        F = projection_indicator_cdf(ProjectionPairLaw(0.6, 0.7, 0.5))
        H = nfold(F, 2)
        res = nth_root(H, 2)
        assert res.ok
        assert np.max(np.abs(res.candidate.cdf - F.cdf)) < 1e-12

    def test_root_then_nfold_recovers_input(self):
        rng = np.random.default_rng(28)
        for n in (2, 3, 5):
            for _ in range(10):
                F = random_bivariate_cdf(rng)
                res = nth_root(F, n)
                if not res.ok:
                    continue
                back = nfold(res.candidate, n)
                assert np.max(np.abs(back.cdf - F.cdf)) < 1e-9

    def test_failure_reported_not_raised(self, fixture_cdf):
        res = nth_root(fixture_cdf, 2)
        assert not res.ok
        assert any("rectangle" in v for v in res.violations)


class TestMaxStableResidual:
    def test_n1_identity_norm(self):
        F = BivariateCDF([0, 1], [0, 1], [[0.3, 0.6], [0.5, 1.0]])
        assert max_stable_residual(F, 1, AffineNormalization.identity()) == 0.0

    def test_point_mass_fixed_point(self):
        F = BivariateCDF([0.0], [0.0], [[1.0]])
        for n in (1, 2, 5):
            assert max_stable_residual(F, n, AffineNormalization.identity()) == 0.0

    def test_product_not_stable(self):
        u = np.array([0.6, 1.0])
        v = np.array([0.7, 1.0])
        F = product_cdf([0, 1], u, [0, 1], v)
        res = max_stable_residual(F, 2, AffineNormalization.identity())
        # brute force on the shared grid
        h = (np.maximum(0.0, 2 * u - 1)[:, None]
             * np.maximum(0.0, 2 * v - 1)[None, :])
        expected = np.max(np.abs(h - F.cdf))
        assert res == pytest.approx(expected, abs=1e-15)
        assert res > 0.0


@pytest.fixture
def fixture_cdf():
    from pathlib import Path
    from bifreemax import load_bi_json
    return load_bi_json(Path(__file__).parent / "fixtures" / "not_two_divisible_3x3.json")
