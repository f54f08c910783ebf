"""
Tests for run documents, the command base class and error mapping
"""
import json
from io import StringIO
from pathlib import Path

import pytest
from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from rest_framework.exceptions import ValidationError

from polariton_core.commands import NumericCommand
from polariton_core.exceptions import (
    ConfigurationError,
    ConvergenceError,
    MeasurementParseError,
    command_exception_handler,
)
from polariton_core.serializers import RunConfigSerializer

CONFIG_DIR = Path(settings.BASE_DIR) / 'configs'


@pytest.fixture
def run_document(tmp_path):
    def write(document):
        path = tmp_path / 'run.json'
        path.write_text(json.dumps(document))
        return path
    return write


def run(path):
    out = StringIO()
    call_command('run', config=str(path), stdout=out)
    return out.getvalue()


class TestCommandExceptionHandler:
    """Test suite for the exit-code mapping"""

    def test_configuration_errors(self):
        """Test configuration and DRF validation errors exit with 2"""
        for exc in (ConfigurationError('bad'), MeasurementParseError('bad', line=4), ValidationError('bad')):
            assert command_exception_handler(exc, 'test').returncode == 2

    def test_numeric_errors(self):
        """Test numerical failures exit with 3"""
        mapped = command_exception_handler(ConvergenceError('stuck', error_bound=1e-3), 'test')
        assert mapped.returncode == 3
        assert 'ConvergenceError' in str(mapped)

    def test_command_error_passes_through(self):
        """Test an already mapped error is returned unchanged"""
        exc = CommandError('done', returncode=5)
        assert command_exception_handler(exc, 'test') is exc

    def test_unknown_errors_reraise(self):
        """Test errors outside the hierarchy propagate"""
        with pytest.raises(KeyError):
            command_exception_handler(KeyError('x'), 'test')


class TestParseAxis:
    """Test suite for min:max:samples flags"""

    def test_valid(self):
        """Test a well-formed axis"""
        assert NumericCommand.parse_axis('0.1:3:200') == (0.1, 3.0, 200)

    @pytest.mark.parametrize('text', ['0:1', '0:1:x', '0:1:1', '1:1:10', '2:1:10'])
    def test_invalid(self, text):
        """Test malformed axes raise a configuration error"""
        with pytest.raises(ConfigurationError):
            NumericCommand.parse_axis(text)


class TestRunConfigSerializer:
    """Test suite for run document validation"""

    def test_dispersion_options(self):
        """Test a dispersion document becomes subcommand options"""
        serializer = RunConfigSerializer(data=json.loads((CONFIG_DIR / 'run_dispersion.json').read_text()))
        assert serializer.is_valid(), serializer.errors
        options = serializer.validated_data['options']
        assert options['model'] == 'renormalized-hopfield'
        assert options['eta_prime'] == 1.83
        assert options['wk'] == '0.1:3.0:200'
        assert options['csv_only'] is True
        assert options['output'] is None

    def test_scan_options(self):
        """Test a coupling scan carries its axis name and range"""
        serializer = RunConfigSerializer(data={
            'command': 'scan-coupling',
            'model': {'model': 'dicke', 'omega_k': 1.2},
            'axis': {'name': 'eta', 'min': 0.0, 'max': 1.0, 'samples': 11},
        })
        assert serializer.is_valid(), serializer.errors
        options = serializer.validated_data['options']
        assert options['axis'] == 'eta'
        assert options['range'] == '0.0:1.0:11'
        assert options['omega_k'] == 1.2

    @pytest.mark.parametrize('axis', [
        {'name': 'omega_k', 'min': 0.1, 'max': 3.0, 'samples': 1},
        {'name': 'omega_k', 'min': 3.0, 'max': 0.1, 'samples': 10},
        {'name': 'eta', 'min': 0.0, 'max': 1.0, 'samples': 10},
    ])
    def test_invalid_axis(self, axis):
        """Test too few samples, reversed bounds and a foreign axis are rejected"""
        serializer = RunConfigSerializer(data={
            'command': 'dispersion',
            'model': {'model': 'renormalized-hopfield', 'eta': 0.3},
            'axis': axis,
        })
        assert not serializer.is_valid()

    def test_invalid_model_document(self):
        """Test model document errors surface under 'model'"""
        serializer = RunConfigSerializer(data={
            'command': 'dispersion',
            'model': {'model': 'renormalized-hopfield', 'eta': 0.3, 'eta_prime': 0.3},
        })
        assert not serializer.is_valid()
        assert 'model' in serializer.errors

    def test_critical_model_restriction(self):
        """Test the critical command rejects models without a scan"""
        serializer = RunConfigSerializer(data={'command': 'critical', 'model': {'model': 'layer-2d'}})
        assert not serializer.is_valid()

    def test_fit_needs_measurements(self):
        """Test a fit document without a measurements section is rejected"""
        serializer = RunConfigSerializer(data={'command': 'fit'})
        assert not serializer.is_valid()
        assert 'measurements' in serializer.errors

    def test_lattice_sum_takes_no_axis(self):
        """Test an axis on a lattice document is rejected"""
        serializer = RunConfigSerializer(data={
            'command': 'lattice-sum',
            'axis': {'name': 'omega_k', 'min': 0.1, 'max': 3.0, 'samples': 10},
        })
        assert not serializer.is_valid()
        assert 'axis' in serializer.errors

    def test_lattice_defaults(self):
        """Test a lattice document without a section uses the default lattice"""
        serializer = RunConfigSerializer(data={'command': 'lattice-sum'})
        assert serializer.is_valid(), serializer.errors
        options = serializer.validated_data['options']
        assert options['family'] == 'sc'
        assert options['k'] == '0.0,0.0,0.05'
        assert 'checkpoints' not in options

    def test_missing_output_directory(self, tmp_path):
        """Test outputs must land in an existing directory"""
        serializer = RunConfigSerializer(data={
            'command': 'dispersion',
            'model': {'model': 'renormalized-hopfield', 'eta': 0.3},
            'outputs': {'csv': str(tmp_path / 'absent' / 'out.csv')},
        })
        assert not serializer.is_valid()
        assert 'outputs' in serializer.errors


class TestRunCommand:
    """Test suite for the run dispatcher"""

    def test_critical_dicke(self):
        """Test the shipped critical document prints the Dicke threshold"""
        assert run(CONFIG_DIR / 'run_critical.json').strip() == '0.50000000'

    def test_critical_bare(self, run_document):
        """Test the bare model has no critical coupling"""
        path = run_document({'command': 'critical', 'model': {'model': 'bare-hopfield'}})
        assert run(path).strip() == 'none'

    def test_dispersion_rows(self):
        """Test the shipped dispersion document yields both branches on every sample"""
        lines = run(CONFIG_DIR / 'run_dispersion.json').strip().splitlines()
        assert lines[0] == 'param,branch,phase,omega_over_omega0'
        assert len(lines) == 401

    def test_dispersion_reproducible(self, tmp_path, run_document):
        """Test two runs of one document write identical bytes"""
        target = tmp_path / 'curve.csv'
        path = run_document({
            'command': 'dispersion',
            'model': {'model': 'renormalized-hopfield', 'eta_prime': 1.83},
            'axis': {'name': 'omega_k', 'min': 0.1, 'max': 3.0, 'samples': 50},
            'outputs': {'csv': str(target)},
        })
        run(path)
        first = target.read_bytes()
        run(path)
        assert target.read_bytes() == first

    def test_phase_diagram(self, run_document):
        """Test a phase diagram document dispatches with its eta range"""
        path = run_document({
            'command': 'phase-diagram',
            'model': {'model': 'condensed-3d', 'eta': 1.0},
            'axis': {'name': 'eta', 'min': 0.0, 'max': 2.0, 'samples': 5},
        })
        lines = run(path).strip().splitlines()
        assert lines[0] == 'eta,order_parameter,omega_tilde_perp,phase'
        assert len(lines) == 6

    def test_lattice_sum(self, run_document):
        """Test a lattice document dispatches to the shell sums"""
        path = run_document({
            'command': 'lattice-sum',
            'lattice': {'family': 'sc', 'k': [0.0, 0.0, 0.1], 'r_cut': 6.0, 'checkpoints': 3},
        })
        lines = run(path).strip().splitlines()
        assert lines[0] == 'r_cut,S_xx,S_yy,S_zz,S_xy,S_xz,S_yz,extrapolated'
        assert lines[-1].endswith('True')

    def test_verify_algebra(self, run_document):
        """Test an algebra document dispatches to the identity checks"""
        path = run_document({'command': 'verify-algebra', 'algebra': {'n_max': [1, 2], 'max_sites': 2}})
        output = run(path)
        assert 'FAIL' not in output
        assert output.strip().splitlines()[-1].startswith('All ')

    def test_fit(self, run_document):
        """Test a measurements document dispatches to the model scoring"""
        sample = Path(settings.BASE_DIR) / 'expdata' / 'fixtures' / 'synthetic_lower_polariton.csv'
        path = run_document({
            'command': 'fit',
            'measurements': {'data': str(sample), 'model': 'bare-hopfield', 'eta_prime': 1.83},
        })
        summary = json.loads(run(path).strip().splitlines()[-1])
        assert summary['n'] == 6

    def test_fit_missing_file_exit_code(self, tmp_path, run_document):
        """Test a fit document naming an absent file exits with 2"""
        path = run_document({'command': 'fit', 'measurements': {'data': str(tmp_path / 'absent.csv')}})
        with pytest.raises(CommandError) as excinfo:
            run(path)
        assert excinfo.value.returncode == 2

    def test_invalid_document_exit_code(self, run_document):
        """Test a validation failure exits with 2"""
        path = run_document({
            'command': 'dispersion',
            'model': {'model': 'renormalized-hopfield', 'eta': 0.3},
            'axis': {'name': 'omega_k', 'min': 0.1, 'max': 3.0, 'samples': 1},
        })
        with pytest.raises(CommandError) as excinfo:
            run(path)
        assert excinfo.value.returncode == 2

    def test_unreadable_document_exit_code(self, tmp_path):
        """Test missing files and broken JSON exit with 2"""
        broken = tmp_path / 'broken.json'
        broken.write_text('{"command": ')
        for path in (tmp_path / 'absent.json', broken):
            with pytest.raises(CommandError) as excinfo:
                run(path)
            assert excinfo.value.returncode == 2

    def test_numeric_failure_exit_code(self, run_document):
        """Test a failure inside the dispatched command keeps its exit code"""
        path = run_document({
            'command': 'dispersion',
            'model': {'model': 'condensed-3d', 'eta': 0.5},
            'axis': {'name': 'omega_k', 'min': 0.1, 'max': 3.0, 'samples': 10},
        })
        with pytest.raises(CommandError) as excinfo:
            run(path)
        assert excinfo.value.returncode == 3
