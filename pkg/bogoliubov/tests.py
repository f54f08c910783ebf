"""
Tests for the symplectic diagonalization service
"""
import numpy as np
import pytest
from scipy.optimize import bisect

from bogoliubov.services import BogoliubovService
from hamiltonians.models import CouplingSet, ModeKind, ModeLabel, QuadraticBosonForm
from hamiltonians.services import HamiltonianService
from polariton_core.exceptions import PhaseDomainError, StabilityError


def single_mode(omega, pairing):
    """omega a+a + (pairing/2)(aa + a+a+)"""
    return QuadraticBosonForm(labels=[ModeLabel(ModeKind.MATTER, 1)], A=[[omega]], B=[[pairing]])


def free_form(frequencies):
    n = len(frequencies)
    labels = [ModeLabel(ModeKind.PHOTON, i + 1) for i in range(n)]
    return QuadraticBosonForm(labels=labels, A=np.diag(frequencies), B=np.zeros((n, n)))


class TestSymplecticSpectrum:
    """Test suite for normal-mode frequencies and the transform"""

    def test_diagonal_form(self):
        """Test B = 0 returns the diagonal of A"""
        result = BogoliubovService.symplectic_spectrum(free_form([2.0, 0.5]))
        assert result.stable
        assert np.allclose(result.frequencies, [0.5, 2.0])

    def test_identity_permutation(self):
        """Test B = 0 with ascending A gives the identity transform"""
        result = BogoliubovService.symplectic_spectrum(free_form([0.5, 1.0, 2.0]))
        assert np.allclose(result.transform, np.eye(6), atol=1e-14)

    def test_squeezing_term(self):
        """Test omega a+a + (lambda/2)(aa + h.c.) gives sqrt(omega^2 - lambda^2)"""
        result = BogoliubovService.symplectic_spectrum(single_mode(1.0, 0.6))
        assert result.frequencies[0] == pytest.approx(0.8, rel=1e-12)

    def test_matter_block(self):
        """Test the dipole-renormalized matter oscillator at eta = 0.5, f = -1/3"""
        K = 0.25 * (-1 / 3)
        result = BogoliubovService.symplectic_spectrum(single_mode(1.0 + 2 * K, 2 * K))
        assert result.frequencies[0] == pytest.approx(np.sqrt(2 / 3), rel=1e-12)

    def test_unstable_pairing(self):
        """Test pairing stronger than the frequency is unstable"""
        result = BogoliubovService.symplectic_spectrum(single_mode(1.0, 1.5))
        assert not result.stable
        assert len(result.unstable_modes) == 1
        assert result.unstable_modes[0].imag == pytest.approx(np.sqrt(1.25), rel=1e-10)
        assert result.transform is None

    @pytest.mark.parametrize('eta', [0.1, 0.5, 0.8])
    def test_symplectic_condition(self, eta):
        """Test T^H Sigma T = Sigma and T diagonalizes the dynamical matrix"""
        form = HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=1.3, eta=eta))
        result = BogoliubovService.symplectic_spectrum(form)
        T, metric = result.transform, result.metric
        assert np.allclose(T.conj().T @ metric @ T, metric, atol=1e-9)
        expected = np.diag(np.concatenate([result.frequencies, -result.frequencies]))
        assert np.allclose(np.linalg.solve(T, form.dynamical_matrix @ T), expected, atol=1e-9)

    def test_pairing(self, coupling_factory):
        """Test eigenvalues of the dynamical matrix come in +- pairs"""
        result = BogoliubovService.symplectic_spectrum(HamiltonianService.build_layer_2d(coupling_factory(layer=True)))
        assert result.pairing_error < 1e-10

    def test_degenerate_blocks(self, coupling_factory):
        """Test the two transverse polariton pairs are reported as degenerate blocks"""
        result = BogoliubovService.symplectic_spectrum(HamiltonianService.build_bulk_3d(coupling_factory(eta=0.4)))
        assert len(result.degenerate_blocks) == 2
        assert all(len(block) == 2 for block in result.degenerate_blocks)
        assert result.transform is not None

    def test_relabeling_invariance(self, coupling_factory):
        """Test permuting the modes leaves the spectrum unchanged"""
        form = HamiltonianService.build_bulk_3d(coupling_factory(eta=0.6, omega_k=(0.7,)))
        order = [4, 2, 0, 3, 1]
        permuted = QuadraticBosonForm(
            labels=[form.labels[i] for i in order],
            A=np.array(form.A)[np.ix_(order, order)],
            B=np.array(form.B)[np.ix_(order, order)],
        )
        assert np.allclose(
            BogoliubovService.symplectic_spectrum(form).frequencies,
            BogoliubovService.symplectic_spectrum(permuted).frequencies,
            rtol=1e-12,
        )

    def test_zero_mode_omits_transform(self):
        """Test a zero mode is clipped to 0 and flagged"""
        form = HamiltonianService.build_dicke_like(CouplingSet.bulk(omega_k=1.0, eta=0.5))
        result = BogoliubovService.symplectic_spectrum(form)
        assert result.zero_modes == 1
        assert result.frequencies[0] == 0.0
        assert result.degenerate

    def test_instability_onset(self):
        """Test the bulk form loses stability at eta_c = sqrt(3)/2"""
        def stability(eta):
            form = HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=1.0, eta=eta))
            return 1.0 if BogoliubovService.symplectic_spectrum(form).stable else -1.0

        onset = bisect(stability, 0.5, 1.0, xtol=1e-10)
        assert onset == pytest.approx(np.sqrt(3) / 2, abs=1e-8)


class TestMatterPrediagonalize:
    """Test suite for the matter-first diagonalization"""

    @pytest.mark.parametrize('omega_k,eta', [(0.4, 0.2), (1.0, 0.5), (2.2, 0.85)])
    def test_spectrum_preserved(self, omega_k, eta):
        """Test both paths give the same spectrum"""
        form = HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=omega_k, eta=eta))
        reduced = BogoliubovService.matter_prediagonalize(form)
        assert np.allclose(
            BogoliubovService.symplectic_spectrum(form).frequencies,
            BogoliubovService.symplectic_spectrum(reduced).frequencies,
            rtol=1e-10,
        )

    def test_matter_frequencies_and_coupling(self):
        """Test matter modes sit at omega_tilde and the coupling is eta' sqrt(omega_k omega_tilde)"""
        params = CouplingSet.bulk(omega_k=1.0, eta=0.5)
        reduced = BogoliubovService.matter_prediagonalize(HamiltonianService.build_bulk_3d(params))
        matter = list(reduced.matter_indices)
        A, B = np.array(reduced.A), np.array(reduced.B)
        diagonal = np.real(np.diag(A - B))[matter]
        assert np.allclose(diagonal, [np.sqrt(2 / 3)] * 2 + [params.omega_tilde_par], rtol=1e-12)
        assert params.eta_prime == pytest.approx(0.6123724356957945, rel=1e-12)
        coupling = abs(A[0, matter[0]])
        assert coupling == pytest.approx(params.eta_prime * np.sqrt(params.omega_tilde_perp), rel=1e-10)

    def test_identity_without_coupling(self):
        """Test eta = 0 leaves the form unchanged"""
        form = HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=1.0, eta=0.0))
        reduced = BogoliubovService.matter_prediagonalize(form)
        assert np.allclose(reduced.A, form.A, atol=1e-14)
        assert np.allclose(reduced.B, form.B, atol=1e-14)

    def test_layer_form(self, coupling_factory):
        """Test the layer form also keeps its spectrum"""
        form = HamiltonianService.build_layer_2d(coupling_factory(layer=True, eta=0.45))
        reduced = BogoliubovService.matter_prediagonalize(form)
        assert np.allclose(
            BogoliubovService.symplectic_spectrum(form).frequencies,
            BogoliubovService.symplectic_spectrum(reduced).frequencies,
            rtol=1e-10,
        )

    def test_condensed_form_rejected(self):
        """Test the condensed form raises"""
        form = HamiltonianService.build_condensed_3d(CouplingSet.bulk(eta=1.0))
        with pytest.raises(PhaseDomainError):
            BogoliubovService.matter_prediagonalize(form)

    def test_soft_matter_mode(self):
        """Test a softened matter mode points to the condensed builder"""
        form = HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=1.0, eta=0.5), np.diag([-2.0, -2.0, 4.0]))
        with pytest.raises(PhaseDomainError):
            BogoliubovService.matter_prediagonalize(form)


class TestGroundStateCheck:
    """Test suite for the zero-point shift"""

    def test_free_form(self):
        """Test a free form has no shift"""
        assert BogoliubovService.ground_state_check(free_form([1.0, 2.0])) == pytest.approx(0.0, abs=1e-14)

    def test_coupled_forms_lower_the_energy(self):
        """Test the shift is nonpositive on a grid of bulk forms"""
        for omega_k in (0.3, 1.0, 2.5):
            for eta in (0.1, 0.4, 0.8):
                form = HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=omega_k, eta=eta))
                assert BogoliubovService.ground_state_check(form) <= 1e-12

    def test_dicke_below_critical(self):
        """Test the Dicke-like shift just below eta = 0.5 is finite and negative"""
        form = HamiltonianService.build_dicke_like(CouplingSet.bulk(omega_k=1.0, eta=0.499))
        shift = BogoliubovService.ground_state_check(form)
        assert -1.0 < shift < 0.0

    def test_unstable_form(self):
        """Test an unstable form raises"""
        with pytest.raises(StabilityError):
            BogoliubovService.ground_state_check(single_mode(1.0, 1.5))
