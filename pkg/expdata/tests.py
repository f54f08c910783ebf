"""
Tests for measurement input and output and model scoring
"""
import json
from io import StringIO
from pathlib import Path

import numpy as np
import pytest
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError

from expdata.models import MeasurementSet
from expdata.services import ExpDataService
from hamiltonians.models import ModelKind, Phase
from polariton_core.exceptions import (
    DomainError,
    EmptyDatasetError,
    MeasurementParseError,
    MeasurementValidationError,
)

SAMPLE_FILE = Path(settings.BASE_DIR) / 'expdata' / 'fixtures' / 'synthetic_lower_polariton.csv'
PHOTON_GRID_EV = np.linspace(0.3, 4.0, 25)


@pytest.fixture
def csv_file(tmp_path):
    def write(text):
        path = tmp_path / 'data.csv'
        path.write_text(text)
        return path
    return write


@pytest.fixture
def synthetic():
    return ExpDataService.synthesize_measurements(PHOTON_GRID_EV, eta_prime=1.83, omega0_ev=1.83)


class TestMeasurementSet:
    """Test suite for the measurement value type"""

    def test_sorted_on_creation(self, measurement_factory):
        """Test rows are sorted by photon energy"""
        data = measurement_factory(omega_k_ev=(2.0, 1.0, 1.5), omega_lp_ev=(0.41, 0.35, 0.39))
        assert data.omega_k_ev == (1.0, 1.5, 2.0)
        assert data.omega_lp_ev == (0.35, 0.39, 0.41)

    def test_reduced_view(self, measurement_factory):
        """Test energies divide by omega0"""
        data = measurement_factory()
        assert np.allclose(data.omega_k_reduced, np.array([1.0, 1.5, 2.0]) / 1.83)

    def test_rejects_nonpositive_energy(self, measurement_factory):
        """Test zero energies raise"""
        with pytest.raises(MeasurementValidationError):
            measurement_factory(omega_lp_ev=(0.0, 0.39, 0.41))

    def test_rejects_empty(self, measurement_factory):
        """Test an empty set raises"""
        with pytest.raises(EmptyDatasetError):
            measurement_factory(omega_k_ev=(), omega_lp_ev=())


class TestLoadMeasurements:
    """Test suite for reading measurement CSV files"""

    def test_two_rows(self, csv_file):
        """Test two well-formed rows load as a set of two"""
        data = ExpDataService.load_measurements(csv_file('omega_k_eV,omega_LP_eV\n1.0,0.25\n2.0,0.44\n'))
        assert len(data) == 2
        assert data.sigma_ev is None
        assert data.omega0_ev == settings.DEFAULT_OMEGA0_EV

    def test_header_only(self, csv_file):
        """Test a header without rows raises"""
        with pytest.raises(EmptyDatasetError):
            ExpDataService.load_measurements(csv_file('omega_k_eV,omega_LP_eV\n'))

    def test_parse_error_line(self, csv_file):
        """Test a non-numeric field reports its line"""
        with pytest.raises(MeasurementParseError) as excinfo:
            ExpDataService.load_measurements(csv_file('omega_k_eV,omega_LP_eV\n1.0,0.25\n2.0,abc\n'))
        assert excinfo.value.line == 3

    def test_missing_column(self, csv_file):
        """Test a header without the polariton column raises on line 1"""
        with pytest.raises(MeasurementParseError) as excinfo:
            ExpDataService.load_measurements(csv_file('omega_k_eV,energy\n1.0,0.25\n'))
        assert excinfo.value.line == 1

    def test_nonpositive_energy(self, csv_file):
        """Test a negative energy is a validation error"""
        with pytest.raises(MeasurementValidationError):
            ExpDataService.load_measurements(csv_file('omega_k_eV,omega_LP_eV\n1.0,-0.25\n'))

    @pytest.mark.parametrize('text', ['nan', 'inf', '-inf'])
    def test_nonfinite_energy(self, csv_file, text):
        """Test nan and inf are rejected with the offending line"""
        with pytest.raises(MeasurementValidationError) as excinfo:
            ExpDataService.load_measurements(csv_file(f'omega_k_eV,omega_LP_eV\n1.0,0.25\n2.0,{text}\n'))
        assert excinfo.value.line == 3
        assert 'Line 3' in str(excinfo.value)

    def test_nonfinite_sigma(self, csv_file):
        """Test an infinite uncertainty is rejected"""
        with pytest.raises(MeasurementValidationError) as excinfo:
            ExpDataService.load_measurements(csv_file('omega_k_eV,omega_LP_eV,sigma_eV\n1.0,0.25,inf\n'))
        assert excinfo.value.line == 2

    def test_unsorted_rows(self, csv_file):
        """Test rows come back sorted by photon energy"""
        data = ExpDataService.load_measurements(csv_file('omega_k_eV,omega_LP_eV\n2.0,0.44\n1.0,0.25\n'))
        assert data.omega_k_ev == (1.0, 2.0)

    def test_sample_file_round_trip(self, tmp_path):
        """Test the shipped sample saves back to identical bytes"""
        data = ExpDataService.load_measurements(SAMPLE_FILE)
        assert len(data) == 6
        target = ExpDataService.save_measurements(data, tmp_path / 'copy.csv')
        assert target.read_bytes() == SAMPLE_FILE.read_bytes()

    def test_synthetic_round_trip(self, tmp_path, synthetic):
        """Test generated data survives save and load"""
        target = ExpDataService.save_measurements(synthetic, tmp_path / 'synthetic.csv')
        loaded = ExpDataService.load_measurements(target)
        assert loaded.omega_lp_ev == synthetic.omega_lp_ev


class TestInferEta:
    """Test suite for the eta' inversion"""

    def test_reference_value(self):
        """Test eta' = 1.83 maps to eta near 0.783"""
        assert ExpDataService.infer_eta_from_eta_prime(1.83) == pytest.approx(0.783, abs=0.005)

    def test_small_coupling(self):
        """Test eta' -> 0 gives eta -> 0"""
        assert ExpDataService.infer_eta_from_eta_prime(0.0) == 0.0
        assert ExpDataService.infer_eta_from_eta_prime(1e-8) == pytest.approx(1e-8, rel=1e-12)

    def test_round_trip(self):
        """Test eta -> eta' -> eta below eta_c"""
        for eta in np.linspace(0.01, 0.86, 30):
            eta_prime = eta / np.sqrt(1 - 4 * eta ** 2 / 3)
            assert ExpDataService.infer_eta_from_eta_prime(eta_prime) == pytest.approx(eta, rel=1e-12)

    def test_domain(self):
        """Test nonnegative f_perp and negative eta' raise"""
        with pytest.raises(DomainError):
            ExpDataService.infer_eta_from_eta_prime(1.0, 0.0)
        with pytest.raises(DomainError):
            ExpDataService.infer_eta_from_eta_prime(-1.0)


class TestModelResiduals:
    """Test suite for scoring models against data"""

    def test_self_consistency(self, synthetic):
        """Test data generated by the renormalized model scores zero against it"""
        report = ExpDataService.model_residuals(synthetic, ModelKind.RENORMALIZED_HOPFIELD)
        assert report.rmse == pytest.approx(0.0, abs=1e-14)
        assert report.n == len(PHOTON_GRID_EV)

    def test_other_models_disagree(self, synthetic):
        """Test the Dicke-like and bare models leave finite residuals"""
        for model in (ModelKind.DICKE, ModelKind.BARE_HOPFIELD):
            assert ExpDataService.model_residuals(synthetic, model).rmse > 1e-3

    def test_dicke_is_condensed(self, synthetic):
        """Test the Dicke-like points are annotated with the condensed phase"""
        report = ExpDataService.model_residuals(synthetic, ModelKind.DICKE)
        assert set(report.frame['phase']) == {Phase.CONDENSED.value}

    def test_ranking(self, synthetic):
        """Test the renormalized model ranks first on its own data"""
        ranking = ExpDataService.rank_models(synthetic)
        assert ranking[0].model == ModelKind.RENORMALIZED_HOPFIELD
        assert ranking[0].rmse < min(report.rmse for report in ranking[1:])

    def test_ranking_with_noise(self):
        """Test the ranking survives small measurement noise"""
        noisy = ExpDataService.synthesize_measurements(PHOTON_GRID_EV, noise_ev=0.005, seed=3)
        assert ExpDataService.rank_models(noisy)[0].model == ModelKind.RENORMALIZED_HOPFIELD

    def test_linear_units(self, synthetic):
        """Test residuals in eV are omega0 times reduced residuals"""
        shifted = MeasurementSet(
            omega_k_ev=synthetic.omega_k_ev,
            omega_lp_ev=tuple(np.array(synthetic.omega_lp_ev) * 1.01),
            omega0_ev=synthetic.omega0_ev,
        )
        report = ExpDataService.model_residuals(shifted, ModelKind.BARE_HOPFIELD)
        predicted = report.frame['model_LP_eV'].to_numpy() / shifted.omega0_ev
        reduced = shifted.omega_lp_reduced - predicted
        assert np.allclose(report.frame['residual_eV'].to_numpy(), shifted.omega0_ev * reduced, rtol=1e-12, atol=1e-15)

    def test_sample_file_ranking(self):
        """Test the shipped sample ranks the renormalized model first"""
        data = ExpDataService.load_measurements(SAMPLE_FILE)
        ranking = ExpDataService.rank_models(data)
        assert ranking[0].model == ModelKind.RENORMALIZED_HOPFIELD
        assert ranking[0].rmse < 1e-3

    def test_unsupported_model(self, measurement_factory):
        """Test the layer model cannot be scored"""
        with pytest.raises(DomainError):
            ExpDataService.model_residuals(measurement_factory(), ModelKind.LAYER_2D)


class TestFitCommand:
    """Test suite for the fit command"""

    def test_summary(self):
        """Test the residual table and the JSON summary"""
        out = StringIO()
        call_command('fit', data=str(SAMPLE_FILE), model='renormalized-hopfield', eta_prime=1.83, omega0_ev=1.83, stdout=out)
        lines = out.getvalue().strip().splitlines()
        assert 'residual_eV' in lines[0]
        summary = json.loads(lines[-1])
        assert set(summary) == {'rmse', 'max_abs', 'n'}
        assert summary['n'] == 6
        assert summary['rmse'] < 1e-3

    def test_residual_csv(self, tmp_path):
        """Test --output writes the residual table"""
        target = tmp_path / 'residuals.csv'
        call_command('fit', data=str(SAMPLE_FILE), model='dicke', output=str(target), stdout=StringIO())
        assert target.read_text().splitlines()[0] == 'omega_k_eV,omega_LP_eV,model_LP_eV,residual_eV,phase'

    def test_missing_file(self, tmp_path):
        """Test a missing data file exits with the configuration code"""
        with pytest.raises(CommandError) as excinfo:
            call_command('fit', data=str(tmp_path / 'absent.csv'), stdout=StringIO())
        assert excinfo.value.returncode == 2

    def test_malformed_file(self, csv_file):
        """Test a parse error exits with the configuration code"""
        with pytest.raises(CommandError) as excinfo:
            call_command('fit', data=str(csv_file('omega_k_eV,omega_LP_eV\n1.0,x\n')), stdout=StringIO())
        assert excinfo.value.returncode == 2
