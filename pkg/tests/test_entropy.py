import math

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.integrate import quad

from prolatekit.entropy import (
    BallFunction,
    CauchyData,
    ball_volume,
    chi_ball,
    entropy_corpus,
    entropy_operator_blocks,
    entropy_report,
    gaussian,
    gaussian_poly,
    general_radius_report,
    legendre_coefficient_function,
    legendre_mode,
    sector_function,
    sphere_area,
    wave_entropy,
    zero_function,
)
from prolatekit.errors import ParameterError, ToleranceFailure, UnsupportedError
from prolatekit.prolate1d import (
    angle_operator_nystrom,
    assemble_prolate_matrix,
    commutation_certificate,
    prolate_eigenpairs,
)
from prolatekit.sectors import SpectralSector


class TestEntropyReport:
    def test_characteristic_function_exact_values(self):
        rep = entropy_report(chi_ball(1))
        assert rep.born == pytest.approx(2 * math.pi, rel=1e-13)
        assert rep.parabolic == pytest.approx(math.pi * 4 / 3, rel=1e-13)
        assert rep.legendre == 0.0
        assert rep.prolate == pytest.approx(math.pi * 2 / 3, rel=1e-13)
        assert rep.balance_residual < 1e-12
        rep.check()

    @pytest.mark.parametrize("n", [0, 1, 3, 6])
    def test_legendre_mode_eigenvalue(self, n):
        rep = entropy_report(legendre_mode(n))
        assert rep.legendre == pytest.approx(math.pi * n * (n + 1), rel=1e-12, abs=1e-12)
        assert rep.born == pytest.approx(math.pi, rel=1e-12)

    def test_gaussian_against_adaptive_quadrature_oracle(self):
        a = 0.5
        f = lambda x: math.exp(-a * x * x)
        df = lambda x: -2 * a * x * math.exp(-a * x * x)
        opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
        born = math.pi * quad(lambda x: f(x) ** 2, -1, 1, **opts)[0]
        parabolic = math.pi * quad(lambda x: (1 - x * x) * f(x) ** 2, -1, 1, **opts)[0]
        legendre = math.pi * quad(lambda x: (1 - x * x) * df(x) ** 2, -1, 1, **opts)[0]
        prolate = math.pi * quad(lambda x: (1 - x * x) * df(x) ** 2 + x * x * f(x) ** 2, -1, 1, **opts)[0]
        rep = entropy_report(gaussian(1, a))
        assert rep.born == pytest.approx(born, abs=1e-10)
        assert rep.parabolic == pytest.approx(parabolic, abs=1e-10)
        assert rep.legendre == pytest.approx(legendre, abs=1e-10)
        assert rep.prolate == pytest.approx(prolate, abs=1e-10)

    def test_radial_gaussian_d3_against_oracle(self):
        a = 1.0
        area = sphere_area(3)
        opts = dict(epsabs=1e-13, epsrel=1e-13, limit=200)
        born = math.pi * area * quad(lambda r: math.exp(-2 * a * r * r) * r**2, 0, 1, **opts)[0]
        rep = entropy_report(gaussian(3, a))
        assert rep.born == pytest.approx(born, rel=1e-12)

    def test_balance_identity_on_corpus(self):
        corpus = entropy_corpus(seed=1, n_random=60)
        for f in corpus:
            rep = entropy_report(f)
            assert rep.balance_residual < rep.balance_scale, rep.description

    def test_entropy_inequalities(self):
        for f in entropy_corpus(seed=2, n_random=30):
            rep = entropy_report(f)
            assert rep.born >= -1e-12 and rep.parabolic >= -1e-12
            assert rep.legendre >= -1e-12 and rep.prolate >= -1e-12
            assert rep.parabolic <= rep.born + 1e-10 * (rep.born + 1)
            assert rep.prolate >= rep.legendre - rep.born - 1e-10 * (rep.born + 1)

    def test_normalized_values(self):
        rep = entropy_report(chi_ball(1))
        norm = rep.normalized()
        assert norm["born"] == pytest.approx(math.pi, rel=1e-12)

    def test_coefficient_route_matches_pointwise_route(self):
        # the same function through the sector forms and through the 1d grid
        sector = SpectralSector(1, 0, 1.0)
        coeffs = np.array([0.7, -0.3, 0.15, 0.05])
        rep_forms = entropy_report(sector_function(sector, coeffs))
        # convert to interval samples: phi_n(r) on even reflection
        from prolatekit.sectors import SectorBasis

        grid = np.linspace(1e-4, 0.999, 5)
        vals, _ = SectorBasis(sector).tables(3, grid, order=1)
        f_vals = coeffs @ vals
        # Born entropy over (-1,1) of the even extension = 2 * (0,1) integral
        from prolatekit.numerics import gauss_rule, shifted_rule

        rule = shifted_rule(gauss_rule("legendre", 60), 0.0, 1.0)
        vals_q, ders_q = SectorBasis(sector).tables(3, rule.nodes, order=1)
        fq, dfq = coeffs @ vals_q, coeffs @ ders_q
        born = math.pi * float(rule.weights @ fq**2)
        legendre = math.pi * float(rule.weights @ ((1 - rule.nodes**2) * dfq**2))
        assert rep_forms.born == pytest.approx(born, rel=1e-12)
        assert rep_forms.legendre == pytest.approx(legendre, rel=1e-11)

    def test_invalid_functions(self):
        with pytest.raises(ParameterError):
            gaussian(1, -1.0)
        with pytest.raises(ParameterError):
            BallFunction(3, "legendre_mode", params={"n": 2})
        with pytest.raises(ParameterError):
            BallFunction(1, "sector_coefficients")


class TestWaveEntropy:
    @pytest.mark.parametrize("d", range(2, 8))
    def test_flat_ball_equality(self, d):
        rep = wave_entropy(CauchyData(chi_ball(d), zero_function(d), d))
        expected = 2 * math.pi * ball_volume(d) * (d - 1) / 2.0
        assert rep.entropy == pytest.approx(expected, rel=1e-10)
        assert rep.lower_bound_slack == pytest.approx(0.0, abs=1e-10)
        assert rep.cross_residual < 1e-10 * max(rep.entropy, 1.0)

    def test_flat_wave_is_parabolic_entropy(self):
        g = gaussian(3, 1.0)
        rep = wave_entropy(CauchyData(zero_function(3), g, 3))
        assert rep.entropy == pytest.approx(entropy_report(g).parabolic, rel=1e-12)

    def test_lower_bound_over_random_pairs(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            d = int(rng.integers(2, 4))
            f = sector_function(SpectralSector(d, int(rng.integers(0, 3)), 1.0), rng.standard_normal(6))
            g = sector_function(SpectralSector(d, int(rng.integers(0, 3)), 1.0), rng.standard_normal(6))
            rep = wave_entropy(CauchyData(f, g, d))
            assert rep.lower_bound_slack >= -1e-9
            assert rep.cross_residual < 1e-10 * max(abs(rep.entropy), 1.0)

    def test_d1_momentum_projection(self):
        g = sector_function(SpectralSector(1, 0, 1.0), np.array([1.0, 0.4, 0.0, 0.0]))
        rep = wave_entropy(CauchyData(chi_ball(1), g, 1))
        assert rep.momentum_projected
        g0 = sector_function(SpectralSector(1, 0, 1.0), np.array([0.0, 0.4, 0.0, 0.0]))
        rep0 = wave_entropy(CauchyData(chi_ball(1), g0, 1))
        assert not rep0.momentum_projected
        assert rep.entropy == pytest.approx(rep0.entropy, rel=1e-12)

    def test_d1_closed_form_nonzero_mean_refused(self):
        with pytest.raises(UnsupportedError):
            wave_entropy(CauchyData(chi_ball(1), gaussian(1, 1.0), 1))

    def test_d1_odd_closed_form_allowed(self):
        g = gaussian_poly(1, [0.0, 1.0], 1.0)  # odd, zero mean
        rep = wave_entropy(CauchyData(chi_ball(1), g, 1))
        assert not rep.momentum_projected
        assert rep.entropy == pytest.approx(entropy_report(g).parabolic, rel=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            CauchyData(chi_ball(2), zero_function(3), 2)


class TestEntropyBlocks:
    @pytest.mark.parametrize("d", [1, 2, 3, 5, 7])
    def test_field_block_zero_mode_shift(self, d):
        blocks = entropy_operator_blocks(SpectralSector(d, 0, 1.0), 12)
        assert blocks.min_field_eigenvalue == pytest.approx(math.pi * (d - 1), abs=1e-9)
        assert blocks.min_field_eigenvalue >= -1e-10

    def test_momentum_block_range(self):
        blocks = entropy_operator_blocks(SpectralSector(3, 1, 1.0), 16)
        eigs = blocks.momentum_eigenvalues / math.pi
        assert np.all(eigs >= -1e-12) and np.all(eigs <= 1.0 + 1e-12)

    def test_positive_semidefinite(self):
        blocks = entropy_operator_blocks(SpectralSector(3, 2, 1.0), 16)
        assert blocks.min_field_eigenvalue >= -1e-10
        assert blocks.min_momentum_eigenvalue >= -1e-10


class TestGeneralRadius:
    def test_unit_radii_reduce_to_balance(self):
        f = gaussian(1, 1.0)
        gen = general_radius_report(f, 1.0, 1.0)
        rep = entropy_report(f)
        assert gen.prolate == pytest.approx(rep.prolate, rel=1e-12)
        assert gen.residual < 1e-10 * gen.scale

    @pytest.mark.parametrize("radii", [(2.0, 0.5), (0.5, 2.0), (3.0, 1.0)])
    @pytest.mark.parametrize("d", [1, 2, 3])
    def test_identity_for_gaussian(self, radii, d):
        gen = general_radius_report(gaussian(d, 1.0), *radii)
        assert gen.residual < 1e-10 * gen.scale
        assert gen.ok

    def test_dilation_covariance(self):
        # prolate entropy of the dilated function w.r.t. (lam, band) equals
        # that of the original w.r.t. (1, lam*band): change-of-variables oracle
        lam, band = 2.0, 0.5
        a = 1.0
        gen = general_radius_report(gaussian(1, a), lam, band)
        # delta_lam^{-1} f for f = exp(-a x^2) is lam^{1/2} exp(-a lam^2 x^2)
        pulled = gaussian_poly(1, [math.sqrt(lam)], a * lam**2)
        unit = general_radius_report(pulled, 1.0, lam * band)
        assert gen.prolate == pytest.approx(unit.prolate, rel=1e-11)

    def test_chi_tag_is_zero_mode(self):
        gen = general_radius_report(chi_ball(3), 2.0, 0.5)
        assert gen.legendre == 0.0
        assert gen.residual < 1e-10 * gen.scale

    def test_rejects_coefficient_functions_and_bad_radii(self):
        with pytest.raises(UnsupportedError):
            general_radius_report(legendre_mode(2), 2.0, 1.0)
        with pytest.raises(ParameterError):
            general_radius_report(gaussian(1, 1.0), -1.0, 1.0)


class TestConcentrationEntropyCorrespondence:
    def test_lower_entropy_means_higher_concentration(self):
        # over the even-sector eigenfunctions at c=1: prolate entropy
        # pi*alpha_k strictly increases while concentration strictly decreases
        pm = assemble_prolate_matrix(1.0, 64)
        rep = commutation_certificate(pm, angle_operator_nystrom(1.0, 200), k_max=22)
        even = rep.parities == 0
        entropies = math.pi * rep.alphas[even][:10]
        concentrations = rep.lambdas[even][:10]
        assert np.all(np.diff(entropies) > 0)
        assert np.all(np.diff(concentrations) < 0)
        # eigenfunction entropy via the report equals pi * alpha_k
        eig = prolate_eigenpairs(pm, 4)
        psi = legendre_coefficient_function(eig.coefficients[:, 2])
        rep2 = entropy_report(psi)
        assert rep2.prolate == pytest.approx(math.pi * eig.eigenvalues[2], rel=1e-10)

    def test_corpus_includes_pswf_vectors(self):
        pm = assemble_prolate_matrix(1.0, 48)
        eig = prolate_eigenpairs(pm, 8)
        for k in range(8):
            rep = entropy_report(legendre_coefficient_function(eig.coefficients[:, k]))
            assert rep.balance_residual < rep.balance_scale


class TestToleranceFailurePath:
    def test_check_raises_on_forged_report(self):
        from prolatekit.entropy import EntropyReport

        bad = EntropyReport(1, "forged", 1.0, 1.0, 1.0, 3.0, 1.0)
        with pytest.raises(ToleranceFailure):
            bad.check()
