"""
Tests for lattice service
"""
from io import StringIO

import numpy as np
import pytest
from django.core.cache import cache
from django.core.management import call_command
from scipy.special import spherical_jn

from lattice.models import LatticeFamily, LatticeSpec
from lattice.services import LatticeService
from polariton_core.exceptions import (
    AnisotropyError,
    ConvergenceError,
    EmptyShellError,
    NormalizationError,
)


def rotation_x_90():
    return np.array([[1.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]])


def rotation_z_90():
    return np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])


class TestLatticeSites:
    """Test suite for site enumeration"""

    def test_simple_cubic_nearest_neighbours(self):
        """Test SC first shell has six sites"""
        sites = LatticeService.lattice_sites(LatticeSpec(), 1.0)
        assert len(sites) == 6

    def test_square_layer_nearest_neighbours(self):
        """Test square layer first shell has four in-plane sites"""
        sites = LatticeService.lattice_sites(LatticeSpec(family=LatticeFamily.SQUARE2D), 1.0)
        assert len(sites) == 4
        assert np.all(sites[:, 2] == 0)

    def test_simple_cubic_two_shells(self):
        """Test SC up to 1.5 holds 6 + 12 sites"""
        assert len(LatticeService.lattice_sites(LatticeSpec(), 1.5)) == 18

    def test_fcc_two_shells(self):
        """Test FCC up to the cube edge holds 12 + 6 sites"""
        sites = LatticeService.lattice_sites(LatticeSpec(family=LatticeFamily.FCC), 1.0)
        assert len(sites) == 18

    def test_inversion_symmetric_without_duplicates(self):
        """Test the site set is closed under r -> -r and has no repeats"""
        sites = LatticeService.lattice_sites(LatticeSpec(family=LatticeFamily.BCC), 3.0)
        as_set = {tuple(np.round(site, 9)) for site in sites}
        assert len(as_set) == len(sites)
        assert all(tuple(np.round(-site, 9)) in as_set for site in sites)

    def test_cutoff_below_lattice_constant(self):
        """Test cutoff below a raises empty-shell error"""
        with pytest.raises(EmptyShellError):
            LatticeService.lattice_sites(LatticeSpec(a=2.0), 1.0)

    def test_non_orthonormal_basis_rejected(self):
        """Test a skewed orientation basis is rejected"""
        with pytest.raises(NormalizationError):
            LatticeSpec(orientation_basis=np.array([[1, 0, 0], [1, 1, 0], [0, 0, 1]]))


class TestDipoleSums:
    """Test suite for direct dipole sums"""

    def test_traceless_and_symmetric(self):
        """Test every sum is traceless and symmetric"""
        for family in (LatticeFamily.SC, LatticeFamily.FCC, LatticeFamily.BCC):
            total = LatticeService.dipole_sum_3d(LatticeSpec(family=family), [0.3, 0.1, 0.2], 4.0)
            assert abs(np.trace(total)) < 1e-12
            assert np.allclose(total, total.T, atol=1e-14)

    def test_simple_cubic_zero_wavevector_vanishes(self):
        """Test cubic symmetry cancels the k=0 sum shell by shell"""
        spec = LatticeSpec()
        for r_cut in (1.0, 2.0, 3.3, 5.0):
            total = LatticeService.dipole_sum_3d(spec, [0, 0, 0], r_cut)
            assert np.max(np.abs(total)) < 1e-12

    def test_zero_wavevector_flags_shape_dependence(self):
        """Test the k=0 bulk result carries the shape flag"""
        result = LatticeService.dipole_shell_sums(LatticeSpec(), [0, 0, 0], 3.0)
        assert result.shape_dependent
        assert np.allclose(result.extrapolated, result.partials[-1])

    def test_point_group_invariance(self):
        """Test rotating k and the orientation basis together leaves the sum unchanged"""
        k = np.array([0.2, 0.05, 0.3])
        reference = LatticeService.dipole_sum_3d(LatticeSpec(), k, 4.0)
        for rotation in (rotation_x_90(), rotation_z_90()):
            spec = LatticeSpec(orientation_basis=np.eye(3) @ rotation.T)
            rotated = LatticeService.dipole_sum_3d(spec, rotation @ k, 4.0)
            assert np.allclose(rotated, reference, atol=1e-10)

    def test_long_wavelength_direction_structure(self):
        """Test SC sum at |k|a=0.05 matches the closed-form transverse/longitudinal ratio"""
        spec = LatticeSpec()
        result = LatticeService.dipole_shell_sums(spec, [0, 0, 0.05], 40.0)
        limit = result.extrapolated
        ratio = limit[0, 0] / limit[2, 2]
        assert abs(ratio / -0.5 - 1) < 0.02
        closed = LatticeService.longwave_dipole_sum(spec, [0, 0, 1])
        assert np.allclose(limit, closed, rtol=0, atol=0.03 * np.max(np.abs(closed)))

    def test_normalization_to_structure_tensor(self):
        """Test sum times 3/(4 pi) approaches 3 k k - I"""
        result = LatticeService.dipole_shell_sums(LatticeSpec(), [0, 0, 0.1], 30.0)
        scaled = result.extrapolated * 3 / (4 * np.pi)
        assert np.allclose(scaled, np.diag([-1.0, -1.0, 2.0]), atol=0.05)

    def test_fcc_matches_closed_form(self):
        """Test the FCC sum approaches the v-factor closed form"""
        spec = LatticeSpec(family=LatticeFamily.FCC)
        result = LatticeService.dipole_shell_sums(spec, [0, 0, 0.1], 15.0)
        closed = LatticeService.longwave_dipole_sum(spec, [0, 0, 1])
        assert np.allclose(result.extrapolated, closed, atol=0.03 * np.max(np.abs(closed)))

    def test_continuum_tail_closed_form(self):
        """Test the limit adds the 4 pi rho (3 k k - I) j1(kR)/(kR) tail to the last partial"""
        spec = LatticeSpec()
        result = LatticeService.dipole_shell_sums(spec, [0, 0, 0.1], 10.0)
        tail = 4 * np.pi * np.diag([-1.0, -1.0, 2.0]) * spherical_jn(1, 1.0)
        assert np.allclose(LatticeService.continuum_tail(spec, [0, 0, 0.1], 10.0), tail, atol=1e-14)
        assert np.allclose(result.extrapolated - result.partials[-1], tail, atol=1e-12)

    def test_partials_sequence(self):
        """Test checkpoints are increasing and end at the cutoff"""
        result = LatticeService.dipole_shell_sums(LatticeSpec(), [0, 0, 0.1], 6.0, checkpoints=5)
        assert np.all(np.diff(result.radii) > 0)
        assert result.radii[-1] == pytest.approx(6.0)
        assert result.partials.shape == (len(result.radii), 3, 3)

    def test_square_layer_matches_mu(self):
        """Test the square-layer out-of-plane sum equals 16 pi mu / 3"""
        cache.clear()
        spec = LatticeSpec(family=LatticeFamily.SQUARE2D)
        result = LatticeService.dipole_shell_sums(spec, [0, 0, 0], 60.0)
        mu = LatticeService.mu_2d(1e-6).value
        assert not result.shape_dependent
        assert result.extrapolated[2, 2] == pytest.approx(16 * np.pi * mu / 3, rel=5e-3)
        assert result.extrapolated[0, 0] == pytest.approx(-8 * np.pi * mu / 3, rel=5e-3)


class TestStructureFactors:
    """Test suite for closed-form structure factors"""

    def test_longwave_along_z(self):
        """Test k along z gives diag(-1/3, -1/3, 2/3)"""
        factor = LatticeService.f_longwave_3d([0, 0, 1])
        assert np.allclose(factor.f, np.diag([-1 / 3, -1 / 3, 2 / 3]), atol=1e-15)
        assert factor.f_perp == pytest.approx(-1 / 3)
        assert factor.f_par == pytest.approx(2 / 3)

    def test_longwave_body_diagonal(self):
        """Test k along (1,1,1) has zero diagonal and 1/3 off-diagonals"""
        factor = LatticeService.f_longwave_3d(np.ones(3) / np.sqrt(3))
        assert np.allclose(np.diag(factor.f), 0, atol=1e-15)
        assert np.allclose(factor.f[~np.eye(3, dtype=bool)], 1 / 3)
        assert np.allclose(np.linalg.eigvalsh(factor.f), [-1 / 3, -1 / 3, 2 / 3])

    def test_longwave_eigenvalues_any_direction(self):
        """Test eigenvalues and trace for random directions"""
        rng = np.random.default_rng(7)
        for _ in range(10):
            k = rng.normal(size=3)
            factor = LatticeService.f_longwave_3d(k / np.linalg.norm(k))
            assert abs(np.trace(factor.f)) < 1e-12
            assert np.allclose(np.linalg.eigvalsh(factor.f), [-1 / 3, -1 / 3, 2 / 3])

    def test_longwave_rejects_non_unit(self):
        """Test non-unit directions raise normalization error"""
        with pytest.raises(NormalizationError):
            LatticeService.f_longwave_3d([0, 0, 2])

    def test_layer_matches_longwave_z(self):
        """Test layer factor equals the bulk factor along the normal"""
        layer = LatticeService.f_layer()
        assert np.array_equal(layer.f, LatticeService.f_longwave_3d([0, 0, 1]).f)
        assert np.trace(layer.f) == pytest.approx(0.0, abs=1e-15)
        assert layer.k_hat is None

    def test_split_examples(self):
        """Test split on the long-wavelength, zero and Dicke-limit tensors"""
        z = np.array([0.0, 0.0, 1.0])
        f_perp, f_par = LatticeService.split_transverse_longitudinal(LatticeService.f_longwave_3d(z).f, z)
        assert (f_perp, f_par) == (pytest.approx(-1 / 3), pytest.approx(2 / 3))
        assert LatticeService.split_transverse_longitudinal(np.zeros((3, 3)), z) == (0.0, 0.0)
        f_perp, f_par = LatticeService.split_transverse_longitudinal(-np.eye(3), z)
        assert (f_perp, f_par) == (pytest.approx(-1.0), pytest.approx(-1.0))

    def test_split_anisotropy(self):
        """Test non-degenerate transverse eigenvalues raise anisotropy error"""
        with pytest.raises(AnisotropyError) as excinfo:
            LatticeService.split_transverse_longitudinal(np.diag([0.1, 0.2, -0.3]), [0, 0, 1])
        assert len(excinfo.value.eigenvalues) == 2

    def test_structure_factor_from_sum(self):
        """Test the summed SC lattice reproduces f_perp = -1/3"""
        factor = LatticeService.structure_factor(LatticeSpec(), [0, 0, 0.1], 25.0)
        assert factor.f_perp == pytest.approx(-1 / 3, abs=0.02)
        assert factor.f_par == pytest.approx(2 / 3, abs=0.04)

    def test_v_factors(self):
        """Test volume-per-site factors of the cubic families"""
        assert LatticeService.lattice_v_factor('sc') == 1.0
        assert LatticeService.lattice_v_factor('fcc') == pytest.approx(2 ** -0.5)
        assert LatticeService.lattice_v_factor('bcc') == pytest.approx(4 * 3 ** -1.5)


class TestMu:
    """Test suite for the square-layer constant"""

    @pytest.fixture(autouse=True)
    def clear_cache(self):
        cache.clear()

    def test_value(self):
        """Test 4 pi mu is about 6.78"""
        estimate = LatticeService.mu_2d(1e-4)
        assert 4 * np.pi * estimate.value == pytest.approx(6.78, abs=0.01)
        assert 2.255 <= 4 * np.pi * estimate.value / 3 <= 2.265
        assert estimate.error_bound <= 1e-4 * estimate.value

    def test_partial_sums_monotone(self):
        """Test partial sums grow with the cutoff"""
        values = [LatticeService.mu_partial_sum(m) for m in (1, 2, 4, 8, 16, 32)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_tail_bounds_bracket(self):
        """Test the tail bounds bracket the difference to a much larger cutoff"""
        small, large = 20, 640
        gap = LatticeService.mu_partial_sum(large) - LatticeService.mu_partial_sum(small)
        lower, upper = LatticeService.mu_tail_bounds(small)
        far_lower, far_upper = LatticeService.mu_tail_bounds(large)
        assert lower <= gap + far_upper
        assert gap + far_lower <= upper

    def test_tight_tolerance_stable(self):
        """Test successive tolerances agree within their bounds"""
        coarse = LatticeService.mu_2d(1e-6)
        fine = LatticeService.mu_2d(1e-7)
        assert abs(coarse.value - fine.value) <= coarse.error_bound + fine.error_bound
        assert fine.cutoff >= coarse.cutoff

    def test_iteration_cap(self, settings):
        """Test exhausting the cutoff cap raises with the partial value"""
        settings.MU_MAX_CUTOFF = 32
        with pytest.raises(ConvergenceError) as excinfo:
            LatticeService.mu_2d(1e-9)
        assert excinfo.value.partial == pytest.approx(6.78 / (4 * np.pi), abs=0.01)


class TestLatticeSumCommand:
    """Test suite for the lattice-sum command"""

    def test_csv_output(self):
        """Test CSV header and the trailing extrapolated row"""
        out = StringIO()
        call_command('lattice_sum', k='0,0,0.1', r_cut=5.0, checkpoints=4, stdout=out)
        lines = out.getvalue().strip().splitlines()
        assert lines[0] == 'r_cut,S_xx,S_yy,S_zz,S_xy,S_xz,S_yz,extrapolated'
        assert lines[-1].endswith('True')
        assert all(line.endswith('False') for line in lines[1:-1])
