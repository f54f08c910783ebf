"""
Tests for the condensed-phase mean field
"""
from io import StringIO

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from hamiltonians.models import CouplingSet, Phase
from lattice.services import LatticeService
from meanfield.models import CondensateParams
from meanfield.services import MeanFieldService
from polariton_core.exceptions import ConvergenceError, DomainError

ETA_C = MeanFieldService.critical_eta(-1 / 3)


def bulk(eta, f_perp=-1 / 3, omega_k=1.0):
    return CouplingSet.bulk(omega_k=omega_k, eta=eta, f_perp=f_perp)


class TestCondensateParameters:
    """Test suite for the closed-form condensate"""

    def test_sum_at_unit_coupling(self):
        """Test eta = 1, f_perp = -1/3 gives sum B^2/N = 0.125"""
        params = MeanFieldService.condensate_parameters(1.0, -1 / 3)
        assert params.sum_b2_over_n == pytest.approx(0.125, rel=1e-14)
        assert params.n_tilde_over_n == pytest.approx(0.875, rel=1e-14)
        assert params.phase == Phase.CONDENSED

    def test_direction_convention(self):
        """Test B lies along the first transverse axis with a positive sign"""
        params = MeanFieldService.condensate_parameters(1.2, -1 / 3)
        b = params.b_over_sqrt_n
        assert b[0] > 0
        assert b[1] == 0.0 and b[2] == 0.0

    def test_photon_shift_relation(self):
        """Test A = 2 g~ sum_alpha B_alpha e_lambda,alpha"""
        params = MeanFieldService.condensate_parameters(1.5, -1.0, omega_k=0.7)
        expected = 2 * params.g_tilde * params.b_over_sqrt_n[:2]
        assert np.allclose(params.a_over_sqrt_n, expected, atol=1e-12)

    def test_limits(self):
        """Test the sum vanishes at eta_c and approaches 1/2 at strong coupling"""
        assert MeanFieldService.condensate_parameters(ETA_C, -1 / 3).sum_b2_over_n == 0.0
        assert MeanFieldService.condensate_parameters(1e4, -1 / 3).sum_b2_over_n == pytest.approx(0.5, abs=1e-8)

    def test_normal_phase(self):
        """Test couplings below eta_c return the trivial solution"""
        params = MeanFieldService.condensate_parameters(0.5, -1 / 3)
        assert params.phase == Phase.NORMAL
        assert not np.any(params.vector)

    def test_bare_hopfield_trivial(self):
        """Test f_perp = 0 has no condensate"""
        assert MeanFieldService.condensate_parameters(3.0, 0.0).phase == Phase.NORMAL


class TestStationarity:
    """Test suite for the stationarity system"""

    def test_trivial_solution(self):
        """Test A = B = 0 is stationary at any coupling"""
        params = CondensateParams.trivial(1.0)
        assert MeanFieldService.stationarity_residual(params, bulk(1.0)) == 0.0

    @pytest.mark.parametrize('f_perp', [-1 / 3, -1.0])
    @pytest.mark.parametrize('eta', [0.9, 1.0, 1.5, 3.0])
    def test_closed_form_is_stationary(self, eta, f_perp):
        """Test the closed-form condensate has residual below 1e-10"""
        params = MeanFieldService.condensate_parameters(eta, f_perp)
        assert params.phase == Phase.CONDENSED
        assert MeanFieldService.stationarity_residual(params, bulk(eta, f_perp)) < 1e-10

    def test_perturbation_detected(self):
        """Test scaling B by 1.01 breaks stationarity"""
        params = MeanFieldService.condensate_parameters(1.0, -1 / 3)
        perturbed = CondensateParams.from_amplitudes(
            params.a_over_sqrt_n, 1.01 * params.b_over_sqrt_n, params.g_tilde / np.sqrt(params.n_tilde_over_n)
        )
        assert MeanFieldService.stationarity_residual(perturbed, bulk(1.0)) > 1e-3

    def test_structure_factor_argument(self):
        """Test the long-wavelength lattice factor gives a stationary condensate"""
        factor = LatticeService.f_longwave_3d([0.0, 0.0, 1.0])
        params = MeanFieldService.condensate_parameters(1.0, -1 / 3)
        assert MeanFieldService.stationarity_residual(params, bulk(1.0), factor) < 1e-10

    def test_solver_recovers_closed_form(self):
        """Test the numerical solve started near the condensate lands on it"""
        params = MeanFieldService.condensate_parameters(1.0, -1 / 3)
        start = params.vector * np.array([0.9, 1.0, 1.1, 1.0, 1.0])
        solved = MeanFieldService.solve_stationarity(bulk(1.0), start)
        assert solved.sum_b2_over_n == pytest.approx(0.125, abs=1e-8)

    def test_bare_hopfield_multistart(self):
        """Test f_perp = 0 only admits the trivial solution"""
        coupling = CouplingSet.bulk(omega_k=1.0, eta=1.5, f_perp=0.0, f_par=0.0)
        points = MeanFieldService.multistart_stationary_points(coupling, starts=50, seed=0)
        assert len(points) == 1
        assert points[0].sum_b2_over_n == pytest.approx(0.0, abs=1e-8)
        assert points[0].phase == Phase.NORMAL

    def test_failed_solve(self):
        """Test a negative tolerance can never be met"""
        with pytest.raises(ConvergenceError) as excinfo:
            MeanFieldService.solve_stationarity(bulk(1.0), [0.3, 0.1, 0.2, 0.1, 0.1], tolerance=-1.0)
        assert excinfo.value.error_bound is not None


class TestOrderParameter:
    """Test suite for the order parameter"""

    def test_values(self):
        """Test zero below and at eta_c and sqrt(0.125) at eta = 1"""
        assert MeanFieldService.order_parameter(0.5, -1 / 3) == 0.0
        assert MeanFieldService.order_parameter(ETA_C, -1 / 3) == 0.0
        assert MeanFieldService.order_parameter(1.0, -1 / 3) == pytest.approx(np.sqrt(0.125), rel=1e-12)

    def test_continuous_and_increasing(self):
        """Test the order parameter starts at zero and increases past eta_c"""
        etas = np.linspace(ETA_C + 1e-12, 3.0, 200)
        values = np.array([MeanFieldService.order_parameter(eta, -1 / 3) for eta in etas])
        assert values[0] < 1e-5
        assert np.all(np.diff(values) > 0)

    def test_requires_negative_f_perp(self):
        """Test f_perp >= 0 raises"""
        with pytest.raises(DomainError):
            MeanFieldService.order_parameter(1.0, 0.0)


class TestFieldExpectations:
    """Test suite for mean field amplitudes"""

    def test_normal_phase(self):
        """Test all means vanish below eta_c"""
        fields = MeanFieldService.field_expectations(MeanFieldService.condensate_parameters(0.5, -1 / 3), bulk(0.5))
        assert not np.any(fields.d_mean) and not np.any(fields.pperp_mean) and not np.any(fields.eperp_mean)

    @pytest.mark.parametrize('f_perp', [-1 / 3, -1.0])
    @pytest.mark.parametrize('eta', [0.9, 1.0, 1.5, 3.0])
    def test_electric_field_vanishes(self, eta, f_perp):
        """Test <E_perp> = 0 while <D> = <P_perp> is finite"""
        params = MeanFieldService.condensate_parameters(eta, f_perp)
        fields = MeanFieldService.field_expectations(params, bulk(eta, f_perp))
        assert np.max(np.abs(fields.eperp_mean)) < 1e-12
        assert np.allclose(fields.d_mean, fields.pperp_mean, atol=1e-12)
        assert fields.d_mean[0] > 0


class TestMatterResonance:
    """Test suite for the transverse matter frequency across the transition"""

    def test_both_sides(self):
        """Test the resonance vanishes at eta_c and is 7/9 squared at eta = 1"""
        assert MeanFieldService.matter_resonance(0.5, -1 / 3) == pytest.approx(np.sqrt(2 / 3))
        assert MeanFieldService.matter_resonance(ETA_C, -1 / 3) < 1e-7
        assert MeanFieldService.matter_resonance(1.0, -1 / 3) ** 2 == pytest.approx(7 / 9)


class TestPhaseDiagramCommand:
    """Test suite for the phase-diagram command"""

    def test_csv(self):
        """Test header, row count and both phases"""
        out = StringIO()
        call_command('phase_diagram', range='0:2:21', stdout=out)
        lines = out.getvalue().strip().splitlines()
        assert lines[0] == 'eta,order_parameter,omega_tilde_perp,phase'
        assert len(lines) == 22
        assert lines[1].endswith(',normal')
        assert lines[-1].endswith(',condensed')

    def test_positive_f_perp_rejected(self):
        """Test a nonnegative f_perp exits with the configuration code"""
        with pytest.raises(CommandError) as excinfo:
            call_command('phase_diagram', f_perp=0.1, stdout=StringIO())
        assert excinfo.value.returncode == 2
