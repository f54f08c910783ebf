"""
Tests for the Hamiltonian builders
"""
import json
from pathlib import Path

import numpy as np
import pytest
from django.conf import settings

from bogoliubov.services import BogoliubovService
from hamiltonians.models import CouplingSet, ModeKind, ModelKind, Phase, QuadraticBosonForm
from hamiltonians.serializers import ModelConfigSerializer
from hamiltonians.services import HamiltonianService
from lattice.services import LatticeService
from polariton_core.exceptions import (
    DomainError,
    MalformedFormError,
    PhaseDomainError,
    ShapeError,
    SoftModeError,
)

CONFIG_DIR = Path(settings.BASE_DIR) / 'configs'


def quartic_branches(omega_k, omega_tilde, eta_prime):
    """Roots of s^2 - s(w_k^2 + w~^2(1 + 4 eta'^2)) + w_k^2 w~^2 via numpy"""
    b = omega_k ** 2 + omega_tilde ** 2 * (1 + 4 * eta_prime ** 2)
    roots = np.roots([1.0, -b, omega_k ** 2 * omega_tilde ** 2])
    return np.sqrt(np.sort(np.clip(roots.real, 0, None)))


def spectrum(form):
    return BogoliubovService.symplectic_spectrum(form).frequencies


class TestRenormalizedFrequency:
    """Test suite for omega_tilde"""

    def test_uncoupled(self):
        """Test eta = 0 leaves omega0"""
        assert HamiltonianService.renormalized_frequency(1.3, 0.0, -1 / 3) == pytest.approx(1.3)

    def test_softening_point(self):
        """Test omega_tilde vanishes at eta = sqrt(3)/2 for f = -1/3"""
        value = HamiltonianService.renormalized_frequency(1.0, np.sqrt(3) / 2, -1 / 3)
        assert value == pytest.approx(0.0, abs=1e-7)

    def test_intermediate_coupling(self):
        """Test eta = 0.5 and f = -1/3 gives sqrt(2/3)"""
        value = HamiltonianService.renormalized_frequency(1.0, 0.5, -1 / 3)
        assert value == pytest.approx(0.816496580927726, rel=1e-12)

    def test_negative_radicand(self):
        """Test past the softening point raises"""
        with pytest.raises(SoftModeError):
            HamiltonianService.renormalized_frequency(1.0, 1.0, -1 / 3)


class TestCouplingSet:
    """Test suite for coupling parameters"""

    def test_eta_prime_relation(self, coupling_factory):
        """Test eta' omega_tilde_perp = eta omega0"""
        params = coupling_factory(eta=0.5, omega0=1.7)
        assert params.eta_prime * params.omega_tilde_perp == pytest.approx(0.5 * 1.7, rel=1e-12)
        assert params.eta_prime == pytest.approx(0.5 / np.sqrt(2 / 3), rel=1e-12)

    def test_coupling_per_mode(self, coupling_factory):
        """Test g_k^2 omega_k = eta^2 omega0 for every cavity mode"""
        params = coupling_factory(layer=True, eta=0.4)
        for g, omega in zip(params.g_k, params.omega_k):
            assert g ** 2 * omega == pytest.approx(0.16, rel=1e-12)

    def test_layer_keeps_chi(self, coupling_factory):
        """Test the layer trait keeps chi apart from eta"""
        params = coupling_factory(layer=True, eta=0.4)
        assert params.chi == 0.3
        assert params.omega_tilde_perp == pytest.approx(np.sqrt(1 - 4 * 0.09 / 3), rel=1e-12)

    def test_phase_tag(self):
        """Test coupling above sqrt(3)/2 is tagged condensed"""
        assert CouplingSet.bulk(eta=0.8).phase == Phase.NORMAL
        assert CouplingSet.bulk(eta=1.0).phase == Phase.CONDENSED
        assert CouplingSet.bulk(eta=5.0, f_perp=0.0, f_par=0.0).phase == Phase.NORMAL

    def test_eta_prime_inversion(self):
        """Test eta -> eta' -> eta is the identity below criticality"""
        for eta in (0.05, 0.3, 0.6, 0.85):
            eta_prime = CouplingSet.bulk(eta=eta).eta_prime
            recovered = HamiltonianService.eta_from_eta_prime(eta_prime, -1 / 3)
            assert recovered == pytest.approx(eta, rel=1e-12)

    def test_unreachable_eta_prime(self):
        """Test positive f_perp bounds eta'"""
        with pytest.raises(DomainError):
            HamiltonianService.eta_from_eta_prime(2.0, 0.5)

    def test_rejects_nonpositive_frequency(self):
        """Test nonpositive frequencies raise"""
        with pytest.raises(DomainError):
            CouplingSet.bulk(omega_k=0.0)

    def test_rabi_frequency(self):
        """Test Omega_R = eta omega0"""
        params = CouplingSet.bulk(eta=0.5, omega0=2.0)
        assert params.rabi_frequency == pytest.approx(1.0)


class TestQuadraticBosonForm:
    """Test suite for form validation"""

    def test_rejects_asymmetric_pairing(self, coupling_factory):
        """Test an asymmetric B raises"""
        form = HamiltonianService.build_dicke_like(coupling_factory())
        B = np.array(form.B)
        B[0, 1] += 1e-3
        with pytest.raises(MalformedFormError):
            QuadraticBosonForm(labels=form.labels, A=form.A, B=B)

    def test_rejects_non_hermitian(self, coupling_factory):
        """Test a non-Hermitian A raises"""
        form = HamiltonianService.build_dicke_like(coupling_factory())
        A = np.array(form.A)
        A[0, 1] += 1e-3
        with pytest.raises(MalformedFormError):
            QuadraticBosonForm(labels=form.labels, A=A, B=form.B)

    def test_rejects_shape_mismatch(self, coupling_factory):
        """Test label count must match the matrices"""
        form = HamiltonianService.build_dicke_like(coupling_factory())
        with pytest.raises(ShapeError):
            QuadraticBosonForm(labels=form.labels[:1], A=form.A, B=form.B)

    def test_arrays_are_read_only(self, coupling_factory):
        """Test stored matrices cannot be modified"""
        form = HamiltonianService.build_bulk_3d(coupling_factory())
        with pytest.raises(ValueError):
            form.A[0, 0] = 2.0


class TestBulkForm:
    """Test suite for the 3D bulk Hamiltonian"""

    def test_free_spectrum(self):
        """Test eta = 0 and f = 0 decouple every mode"""
        params = CouplingSet.bulk(omega_k=1.4, eta=0.0, f_perp=0.0, f_par=0.0)
        form = HamiltonianService.build_bulk_3d(params, np.zeros((3, 3)))
        assert np.allclose(spectrum(form), [1.0, 1.0, 1.0, 1.4, 1.4], atol=1e-14)

    def test_coefficients(self, coupling_factory):
        """Test photon, matter, coupling and pairing coefficients"""
        params = coupling_factory(omega_k=(1.5,), eta=0.5)
        form = HamiltonianService.build_bulk_3d(params)
        coupling = 0.5 * np.sqrt(1.5)
        assert form.A[0, 0] == pytest.approx(1.5)
        assert form.A[0, 2] == pytest.approx(1j * coupling)
        assert form.B[0, 2] == pytest.approx(1j * coupling)
        # matter xx coefficient eta^2 omega0 (1 + f_perp), doubled in A and B
        assert form.B[2, 2] == pytest.approx(2 * 0.25 * (1 - 1 / 3))
        assert form.A[2, 2] == pytest.approx(1.0 + 2 * 0.25 * (1 - 1 / 3))
        assert form.B[4, 4] == pytest.approx(2 * 0.25 * (2 / 3))

    def test_longitudinal_decouples(self, coupling_factory):
        """Test the orientation along k has no light-matter entries"""
        form = HamiltonianService.build_bulk_3d(coupling_factory(eta=0.7))
        assert np.all(form.A[:2, 4] == 0)
        assert np.all(form.B[:2, 4] == 0)
        assert form.labels[4].kind == ModeKind.MATTER

    @pytest.mark.parametrize('omega_k,eta', [(0.3, 0.2), (1.0, 0.5), (2.5, 0.8), (1.2, 0.86)])
    def test_matches_closed_form(self, omega_k, eta):
        """Test the spectrum equals both transverse polariton branches plus the longitudinal mode"""
        params = CouplingSet.bulk(omega_k=omega_k, eta=eta)
        lp, up = quartic_branches(omega_k, params.omega_tilde_perp, params.eta_prime)
        expected = np.sort([lp, lp, up, up, params.omega_tilde_par])
        assert np.allclose(spectrum(HamiltonianService.build_bulk_3d(params)), expected, rtol=1e-10, atol=1e-12)

    def test_direction_invariance(self, coupling_factory):
        """Test rotating k_hat onto x leaves the spectrum unchanged"""
        params = coupling_factory(eta=0.6, omega_k=(0.9,))
        along_z = HamiltonianService.build_bulk_3d(params)
        along_x = HamiltonianService.build_bulk_3d(params, LatticeService.f_longwave_3d([1.0, 0.0, 0.0]))
        assert np.allclose(spectrum(along_z), spectrum(along_x), rtol=1e-12)

    def test_longitudinal_independent_of_omega_k(self):
        """Test the longitudinal frequency stays at omega_tilde_par across omega_k"""
        expected = np.sqrt(1 + 4 * 0.78 ** 2 * 2 / 3)
        for omega_k in (0.2, 1.0, 3.0):
            frequencies = spectrum(HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=omega_k, eta=0.78)))
            assert np.min(np.abs(frequencies - expected)) < 1e-12

    def test_needs_single_mode(self):
        """Test several mode frequencies raise for the bulk form"""
        with pytest.raises(ShapeError):
            HamiltonianService.build_bulk_3d(CouplingSet(omega_k=(1.0, 2.0), eta=0.2, chi=0.2))


class TestLayerForm:
    """Test suite for the planar-cavity layer Hamiltonian"""

    def test_odd_modes_unshifted(self, coupling_factory):
        """Test each bare cavity frequency stays in the spectrum"""
        form = HamiltonianService.build_layer_2d(coupling_factory(layer=True, eta=0.5))
        frequencies = spectrum(form)
        for omega_n in (0.8, 1.6, 2.4):
            assert np.min(np.abs(frequencies - omega_n)) < 1e-12
        odd = form.indices(ModeKind.PHOTON_ODD)
        off_diagonal = np.array(form.A)[np.ix_(odd, range(form.n_modes))]
        off_diagonal[np.arange(len(odd)), odd] = 0
        assert np.all(off_diagonal == 0)

    def test_single_mode_reduces_to_bulk_branches(self):
        """Test K_max = 1 reproduces the single-mode closed form"""
        params = CouplingSet.layer((1.1,), eta=0.4, chi=0.3)
        form = HamiltonianService.build_layer_2d(params, 1)
        lp, up = quartic_branches(1.1, params.omega_tilde_perp, params.eta_prime)
        frequencies = spectrum(form)
        for value in (lp, up, 1.1, params.omega_tilde_par):
            assert np.min(np.abs(frequencies - value)) < 1e-10

    def test_free_layer(self):
        """Test eta = 0 leaves cavity modes and renormalized matter frequencies"""
        params = CouplingSet.layer((0.8, 1.6), eta=0.0, chi=0.3)
        frequencies = spectrum(HamiltonianService.build_layer_2d(params))
        expected = [0.8] * 4 + [1.6] * 4 + [params.omega_tilde_perp] * 2 + [params.omega_tilde_par]
        assert np.allclose(frequencies, np.sort(expected), atol=1e-12)

    def test_cavity_ladder(self):
        """Test one supplied frequency extends to n omega_1"""
        form = HamiltonianService.build_layer_2d(CouplingSet.layer((0.5,), eta=0.2), 3)
        assert form.metadata['modes'] == (0.5, 1.0, 1.5)
        assert form.n_modes == 3 * 4 + 3

    def test_out_of_plane_matter_decoupled(self, coupling_factory):
        """Test the orientation along the layer normal has no photon entries"""
        form = HamiltonianService.build_layer_2d(coupling_factory(layer=True))
        normal = form.n_modes - 1
        assert np.all(np.array(form.A)[form.photon_indices, normal] == 0)

    def test_rejects_zero_modes(self, coupling_factory):
        """Test K_max below 1 raises"""
        with pytest.raises(DomainError):
            HamiltonianService.build_layer_2d(coupling_factory(layer=True), 0)


class TestDickeLikeForm:
    """Test suite for the single-mode Dicke-like Hamiltonian"""

    def test_uncoupled(self):
        """Test eta = 0 leaves omega_k and omega0"""
        form = HamiltonianService.build_dicke_like(CouplingSet.bulk(omega_k=1.3, eta=0.0))
        assert np.allclose(spectrum(form), [1.0, 1.3])

    def test_quartic(self):
        """Test eta = 0.3 at resonance matches the closed-form quartic"""
        form = HamiltonianService.build_dicke_like(CouplingSet.bulk(omega_k=1.0, eta=0.3))
        roots = np.roots([1.0, -2.0, 1 - 4 * 0.09])
        assert np.allclose(spectrum(form), np.sqrt(np.sort(roots.real)), rtol=1e-10)

    def test_critical_softening(self):
        """Test the lower frequency vanishes at eta = 0.5"""
        form = HamiltonianService.build_dicke_like(CouplingSet.bulk(omega_k=1.0, eta=0.5))
        assert spectrum(form)[0] == pytest.approx(0.0, abs=1e-6)

    def test_no_self_terms(self):
        """Test there is no photon pairing and no matter self term"""
        form = HamiltonianService.build_dicke_like(CouplingSet.bulk(omega_k=1.0, eta=0.3))
        assert form.B[0, 0] == 0
        assert form.B[1, 1] == 0


class TestBareHopfieldForm:
    """Test suite for the Hopfield model without dipole-dipole terms"""

    def test_no_softening(self):
        """Test the lowest frequency stays positive up to eta = 10"""
        for eta in (0.5, 1.0, 2.0, 5.0, 10.0):
            result = BogoliubovService.symplectic_spectrum(
                HamiltonianService.build_bare_hopfield(CouplingSet.bulk(omega_k=1.0, eta=eta))
            )
            assert result.stable
            assert result.frequencies[0] > 1e-3

    def test_free_limit(self):
        """Test eta = 0 is the free spectrum"""
        form = HamiltonianService.build_bare_hopfield(CouplingSet.bulk(omega_k=2.0, eta=0.0))
        assert np.allclose(spectrum(form), [1.0, 1.0, 1.0, 2.0, 2.0])

    def test_no_dipole_term(self):
        """Test the matter dipole coefficient is zero"""
        form = HamiltonianService.build_bare_hopfield(CouplingSet.bulk(eta=1.0))
        assert np.all(form.matter_dipole == 0)
        assert form.kind == ModelKind.BARE_HOPFIELD


class TestCondensedForm:
    """Test suite for the condensed-phase Hamiltonian"""

    def test_rejects_normal_phase(self):
        """Test coupling at or below eta_c raises"""
        with pytest.raises(PhaseDomainError):
            HamiltonianService.build_condensed_3d(CouplingSet.bulk(eta=0.8))
        with pytest.raises(PhaseDomainError):
            HamiltonianService.build_condensed_3d(CouplingSet.bulk(eta=2.0, f_perp=0.0, f_par=0.0))

    def test_matter_diagonal(self):
        """Test the matter frequency at f_perp = -1/3, eta = 1 is 7/6"""
        form = HamiltonianService.build_condensed_3d(CouplingSet.bulk(eta=1.0))
        assert form.metadata['matter_frequency'] == pytest.approx(7 / 6)
        assert form.metadata['sum_b2_over_n'] == pytest.approx(0.125)
        assert form.phase == Phase.CONDENSED

    def test_transverse_sector_only(self):
        """Test the form holds two transverse photons and two transverse orientations"""
        form = HamiltonianService.build_condensed_3d(CouplingSet.bulk(eta=1.0))
        assert [(label.kind, label.index) for label in form.labels] == [
            (ModeKind.PHOTON, 1), (ModeKind.PHOTON, 2), (ModeKind.MATTER, 1), (ModeKind.MATTER, 2),
        ]

    def test_goldstone_mode(self):
        """Test the orientation orthogonal to the condensate carries a zero mode"""
        result = BogoliubovService.symplectic_spectrum(HamiltonianService.build_condensed_3d(CouplingSet.bulk(eta=1.2)))
        assert result.stable
        assert result.zero_modes == 1
        assert result.frequencies[0] == 0.0

    def test_continuity_at_critical_coupling(self):
        """Test upper branches meet sqrt(omega_k^2 + 3) from both sides of eta_c"""
        eta_c = np.sqrt(3) / 2
        omega_k = 0.8
        below = spectrum(HamiltonianService.build_bulk_3d(CouplingSet.bulk(omega_k=omega_k, eta=eta_c - 1e-13)))
        above = spectrum(HamiltonianService.build_condensed_3d(CouplingSet.bulk(omega_k=omega_k, eta=eta_c + 1e-13)))
        upper = np.sqrt(omega_k ** 2 + 3)
        assert np.allclose(above[2:], upper, atol=1e-6)
        assert np.min(np.abs(below - upper)) < 1e-6
        assert np.all(above[:2] < 1e-6)
        assert below[0] < 1e-6

    def test_dicke_limit(self):
        """Test f_perp = -1 reproduces the superradiant Dicke excitation pair"""
        eta, omega_k = 0.8, 1.2
        form = HamiltonianService.build_condensed_3d(CouplingSet.bulk(omega_k=omega_k, eta=eta, f_perp=-1.0, f_par=2.0))
        a = 16 * eta ** 4
        root = np.sqrt((a - omega_k ** 2) ** 2 + 4 * omega_k ** 2)
        expected = np.sqrt([(omega_k ** 2 + a - root) / 2, (omega_k ** 2 + a + root) / 2])
        frequencies = spectrum(form)
        for value in expected:
            assert np.min(np.abs(frequencies - value)) < 1e-10


class TestModelConfigSerializer:
    """Test suite for model documents"""

    def test_eta_prime_document(self):
        """Test eta' = 1.83 resolves to eta near 0.783"""
        serializer = ModelConfigSerializer(data=json.loads((CONFIG_DIR / 'renormalized_hopfield.json').read_text()))
        assert serializer.is_valid(), serializer.errors
        config = serializer.save()
        assert config.coupling.eta == pytest.approx(0.7828, abs=1e-4)
        assert config.phase == Phase.NORMAL

    def test_layer_document(self):
        """Test the layer example builds with three cavity modes"""
        serializer = ModelConfigSerializer(data=json.loads((CONFIG_DIR / 'layer_2d.json').read_text()))
        assert serializer.is_valid(), serializer.errors
        form = HamiltonianService.build(serializer.save())
        assert form.n_modes == 15
        assert form.kind == ModelKind.LAYER_2D

    def test_condensed_document(self):
        """Test the condensed example is tagged and built in the condensed phase"""
        serializer = ModelConfigSerializer(data=json.loads((CONFIG_DIR / 'condensed_3d.json').read_text()))
        assert serializer.is_valid(), serializer.errors
        form = HamiltonianService.build(serializer.save())
        assert form.phase == Phase.CONDENSED

    def test_rejects_both_couplings(self):
        """Test eta and eta_prime together are rejected"""
        serializer = ModelConfigSerializer(data={'model': 'dicke', 'eta': 0.2, 'eta_prime': 0.3})
        assert not serializer.is_valid()

    def test_rejects_mode_list_outside_layer(self):
        """Test a frequency list is only allowed for the layer model"""
        serializer = ModelConfigSerializer(data={'model': 'dicke', 'eta': 0.2, 'omega_k': [1.0, 2.0]})
        assert not serializer.is_valid()
        assert 'omega_k' in serializer.errors

    def test_rejects_unknown_model(self):
        """Test an unknown model name is rejected"""
        serializer = ModelConfigSerializer(data={'model': 'jaynes', 'eta': 0.2})
        assert not serializer.is_valid()
        assert 'model' in serializer.errors
