import math

import mpmath
import numpy as np
import pytest
from numpy.testing import assert_allclose

from prolatekit.errors import ParameterError, UnsupportedError
from prolatekit.prolate1d import (
    angle_operator_nystrom,
    assemble_prolate_matrix,
    commutation_certificate,
    prolate_eigenpairs,
)
from prolatekit.sectors import (
    SectorBasis,
    SpectralSector,
    assemble_radial_forms,
    hermiticity_witness,
    nd_commutation_certificate,
    radial_basis,
    sector_eigenpairs,
    sector_hankel_nystrom,
    sector_radial_rule,
)

RESIDUAL_FLOOR = 5e-13

ALL_SECTORS = [(1, 0), (1, 1), (2, 0), (2, 3), (3, 0), (3, 1), (4, 2), (5, 0), (6, 1), (7, 0)]


class TestSectorType:
    def test_validation(self):
        with pytest.raises(ParameterError):
            SpectralSector(0, 0, 1.0)
        with pytest.raises(ParameterError):
            SpectralSector(8, 0, 1.0)
        with pytest.raises(ParameterError):
            SpectralSector(1, 2, 1.0)
        with pytest.raises(ParameterError):
            SpectralSector(3, 51, 1.0)
        with pytest.raises(ParameterError):
            SpectralSector(3, 0, 0.0)

    def test_scaling_dimension(self):
        assert SpectralSector(3, 0, 1.0).scaling_dimension == 1.0
        assert SpectralSector(1, 0, 1.0).scaling_dimension == 0.0


class TestRadialBasis:
    def test_constant_mode(self):
        value, deriv = radial_basis(SpectralSector(4, 0, 1.0), 0)
        r = np.linspace(0.0, 1.0, 7)
        vals = value(r)
        assert np.max(np.abs(vals - vals[0])) < 1e-14
        assert np.max(np.abs(deriv(r))) < 1e-14

    def test_linear_mode_d3(self):
        value, _ = radial_basis(SpectralSector(3, 1, 1.0), 0)
        r = np.linspace(0.0, 1.0, 9)
        vals = value(r)
        ratio = vals[1:] / r[1:]
        assert np.max(np.abs(ratio - ratio[0])) < 1e-12
        assert vals[0] == 0.0

    @pytest.mark.parametrize("d,ell", ALL_SECTORS)
    def test_orthonormality_against_quadrature_oracle(self, d, ell):
        # independent route: mpmath-checked entry plus a dense Gauss-Jacobi
        # Gram built from the evaluation handles
        sector = SpectralSector(d, ell, 1.0)
        basis = SectorBasis(sector)
        from scipy.special import roots_jacobi

        s, w = roots_jacobi(40, 0.0, (d - 2) / 2.0)
        r = np.sqrt(0.5 * (1.0 + s))
        vals, _ = basis.tables(15, r, order=1)
        weights = w * 2.0 ** (-(d - 2) / 2.0) / 4.0
        gram = (vals * weights) @ vals.T
        assert np.max(np.abs(gram - np.eye(16))) < 1e-12

    def test_single_entry_against_mpmath(self):
        sector = SpectralSector(3, 2, 1.0)
        value, _ = radial_basis(sector, 3)
        with mpmath.workdps(30):
            norm = mpmath.quad(lambda r: float(value(np.array([float(r)]))[0]) ** 2 * r**2, [0, 1])
        assert float(norm) == pytest.approx(1.0, abs=1e-12)

    def test_derivative_by_finite_differences(self):
        sector = SpectralSector(5, 2, 1.0)
        value, deriv = radial_basis(sector, 4)
        r = np.array([0.2, 0.5, 0.9])
        h = 1e-6
        approx = (value(r + h) - value(r - h)) / (2 * h)
        assert_allclose(deriv(r), approx, rtol=1e-7, atol=1e-7)


class TestRadialForms:
    @pytest.mark.parametrize("d,ell", ALL_SECTORS)
    def test_invariants(self, d, ell):
        c = 1.5
        forms = assemble_radial_forms(SpectralSector(d, ell, c), 16)
        for mat in (forms.mass, forms.L_form, forms.M_form, forms.R2_form, forms.W_form):
            assert np.array_equal(mat, mat.T)
        assert np.max(np.abs(forms.mass - np.eye(16))) < 1e-12
        # exact form identity (machine zero): r^2 = 1 - (1 - r^2)
        dev = forms.W_form - forms.L_form - c**2 * (forms.mass - forms.M_form)
        assert np.max(np.abs(dev)) < 1e-13 * max(np.max(np.abs(forms.W_form)), 1.0)
        for mat in (forms.L_form, forms.M_form, forms.R2_form, forms.W_form):
            eigs = np.linalg.eigvalsh(mat)
            assert eigs[0] >= -1e-10 * max(np.linalg.norm(mat, 2), 1.0)

    @pytest.mark.parametrize("d", range(1, 8))
    def test_zero_mode(self, d):
        forms = assemble_radial_forms(SpectralSector(d, 0, 1.0), 12)
        spec, _ = sector_eigenpairs(forms, "L")
        assert spec.eigenvalues[0] < 1e-12
        vec = spec.eigenvectors[:, 0]
        vec = vec / vec[0]
        assert_allclose(vec, np.eye(12)[:, 0], atol=1e-10)

    @pytest.mark.parametrize("parity", [0, 1])
    def test_d1_matches_interval_module(self, parity):
        forms = assemble_radial_forms(SpectralSector(1, parity, 1.0), 32)
        spec, _ = sector_eigenpairs(forms, "W")
        eig = prolate_eigenpairs(assemble_prolate_matrix(1.0, 64), 40)
        expected = eig.eigenvalues[eig.parities == parity]
        assert np.max(np.abs(spec.eigenvalues[:10] - expected[:10])) < 1e-10

    def test_sandwich_per_sector(self):
        c = 2.0
        forms = assemble_radial_forms(SpectralSector(3, 1, c), 20)
        w_eigs, _ = sector_eigenpairs(forms, "W")
        l_eigs, _ = sector_eigenpairs(forms, "L")
        assert np.all(w_eigs.eigenvalues >= l_eigs.eigenvalues - 1e-9)
        assert np.all(w_eigs.eigenvalues <= l_eigs.eigenvalues + c**2 + 1e-9)

    def test_centrifugal_monotonicity(self):
        lowest = []
        for ell in range(11):
            forms = assemble_radial_forms(SpectralSector(3, ell, 1.0), 16)
            lowest.append(sector_eigenpairs(forms, "W")[0].eigenvalues[0])
        assert np.all(np.diff(lowest) > 0)

    def test_spectra_stable_under_doubling(self):
        a = sector_eigenpairs(assemble_radial_forms(SpectralSector(3, 0, 1.0), 24), "W")[0]
        b = sector_eigenpairs(assemble_radial_forms(SpectralSector(3, 0, 1.0), 48), "W")[0]
        assert np.max(np.abs(a.eigenvalues[:6] - b.eigenvalues[:6])) < 1e-10

    def test_size_errors(self):
        with pytest.raises(ParameterError):
            assemble_radial_forms(SpectralSector(3, 0, 1.0), 3)
        with pytest.raises(ParameterError):
            assemble_radial_forms(SpectralSector(3, 0, 1.0), 300)


def folded_angle_matrix(c, n_quad, parity):
    """Even/odd restriction of the sinc-kernel angle operator, mapped to
    (0,1): kernel sin(c(x-y))/pi(x-y) -+ sin(c(x+y))/pi(x+y)."""
    rule, measure = sector_radial_rule(1, n_quad)
    x = rule.nodes

    def sinc_kernel(u):
        return (c / math.pi) * np.sinc(c * u / math.pi)

    sign = 1.0 if parity == 0 else -1.0
    fold = sinc_kernel(np.subtract.outer(x, x)) + sign * sinc_kernel(np.add.outer(x, x))
    half = np.sqrt(measure)
    return half[:, None] * fold * half[None, :]


class TestSectorHankel:
    @pytest.mark.parametrize("parity", [0, 1])
    def test_d1_square_is_folded_angle_operator(self, parity):
        h = sector_hankel_nystrom(SpectralSector(1, parity, 1.0), 200)
        target = folded_angle_matrix(1.0, 200, parity)
        assert np.linalg.norm(h.matrix @ h.matrix - target) < 1e-10

    def test_d3_kernel_finite_at_origin(self):
        c = 1.0
        h = sector_hankel_nystrom(SpectralSector(3, 0, c), 64)
        # unweighted kernel value near p=r=0 approaches c^{3/2} sqrt(2/pi) j_0(0)
        rule, measure = sector_radial_rule(3, 64)
        k00 = h.matrix[0, 0] / measure[0]
        assert k00 == pytest.approx(c**1.5 * math.sqrt(2 / math.pi), rel=1e-3)

    @pytest.mark.parametrize("c", [1.0, 4.0])
    def test_square_spectrum_in_unit_interval(self, c):
        for ell in (0, 1):
            h = sector_hankel_nystrom(SpectralSector(3, ell, c), 200)
            eigs = np.linalg.eigvalsh(h.matrix @ h.matrix)
            assert eigs[-1] < 1.0
            assert eigs[0] > -1e-13

    def test_even_dimension_unsupported(self):
        with pytest.raises(UnsupportedError):
            sector_hankel_nystrom(SpectralSector(2, 0, 1.0), 32)
        with pytest.raises(UnsupportedError):
            sector_hankel_nystrom(SpectralSector(5, 0, 1.0), 32)


class TestNdCommutation:
    @pytest.mark.parametrize("ell", [0, 1, 2])
    def test_d3_alignment(self, ell):
        sector = SpectralSector(3, ell, 1.0)
        forms = assemble_radial_forms(sector, 48)
        hankel = sector_hankel_nystrom(sector, 200)
        rep = nd_commutation_certificate(forms, hankel, k_max=8)
        assert rep.max_residual < 1e-6
        assert rep.ordering_observed

    def test_refinement_or_floor(self):
        sector = SpectralSector(3, 0, 1.0)
        base = nd_commutation_certificate(
            assemble_radial_forms(sector, 48), sector_hankel_nystrom(sector, 200), k_max=8
        ).max_residual
        refined = nd_commutation_certificate(
            assemble_radial_forms(sector, 96), sector_hankel_nystrom(sector, 400), k_max=8
        ).max_residual
        assert refined <= max(base / 4.0, RESIDUAL_FLOOR)

    def test_d1_sector_equals_interval_certificate(self):
        sector = SpectralSector(1, 0, 1.0)
        rep = nd_commutation_certificate(
            assemble_radial_forms(sector, 32), sector_hankel_nystrom(sector, 200), k_max=6
        )
        full = commutation_certificate(
            assemble_prolate_matrix(1.0, 64), angle_operator_nystrom(1.0, 200), k_max=12
        )
        even = full.lambdas_rayleigh[full.parities == 0]
        assert_allclose(rep.lambdas[:4], even[:4], atol=1e-10)
        assert rep.max_residual < 1e-8

    def test_sector_mismatch(self):
        forms = assemble_radial_forms(SpectralSector(3, 0, 1.0), 16)
        hankel = sector_hankel_nystrom(SpectralSector(3, 1, 1.0), 64)
        with pytest.raises(ParameterError):
            nd_commutation_certificate(forms, hankel)

    def test_legendre_does_not_commute(self):
        # at c=1 the d=1 witness is comfortably above the threshold
        sector = SpectralSector(1, 0, 1.0)
        rep = nd_commutation_certificate(
            assemble_radial_forms(sector, 48), sector_hankel_nystrom(sector, 200),
            k_max=6, operator="L",
        )
        assert rep.max_residual > 1e-2


class TestHermiticityWitness:
    def test_d1_mixed(self):
        for parity in (0, 1):
            w = hermiticity_witness(SpectralSector(1, parity, 1.0), 32, 200)
            assert w.max_asymmetry < 1e-8

    @pytest.mark.parametrize("ell", [0, 1])
    def test_d3_mixed_with_refinement(self, ell):
        base = hermiticity_witness(SpectralSector(3, ell, 1.0), 32, 200)
        assert base.max_asymmetry < 1e-6
        refined = hermiticity_witness(SpectralSector(3, ell, 1.0), 64, 400)
        assert refined.max_asymmetry <= max(base.max_asymmetry / 2.0, RESIDUAL_FLOOR)

    def test_legendre_hermitian_on_ball_pairs(self):
        w = hermiticity_witness(SpectralSector(3, 0, 1.0), 32, 200, operator="L", pairs="ball")
        assert w.max_asymmetry < 1e-6

    def test_bad_arguments(self):
        with pytest.raises(ParameterError):
            hermiticity_witness(SpectralSector(3, 0, 1.0), 16, 64, operator="Q")
        with pytest.raises(ParameterError):
            hermiticity_witness(SpectralSector(3, 0, 1.0), 16, 64, pairs="nope")
        with pytest.raises(UnsupportedError):
            hermiticity_witness(SpectralSector(2, 0, 1.0), 16, 64)
