"""
Serializers for run documents
"""
from pathlib import Path

from rest_framework import serializers

from dispersion.models import Axis
from expdata.services import SCORED_MODELS
from hamiltonians.models import ModelKind
from hamiltonians.serializers import ModelConfigSerializer
from lattice.models import LatticeFamily


class RunCommand:
    DISPERSION = 'dispersion'
    SCAN_COUPLING = 'scan-coupling'
    CRITICAL = 'critical'
    PHASE_DIAGRAM = 'phase-diagram'
    LATTICE_SUM = 'lattice-sum'
    VERIFY_ALGEBRA = 'verify-algebra'
    FIT = 'fit'

    choices = [DISPERSION, SCAN_COUPLING, CRITICAL, PHASE_DIAGRAM, LATTICE_SUM, VERIFY_ALGEBRA, FIT]


# Axis names each command accepts; None means the command takes no axis
COMMAND_AXES = {
    RunCommand.DISPERSION: [Axis.OMEGA_K],
    RunCommand.SCAN_COUPLING: [Axis.ETA, Axis.ETA_PRIME],
    RunCommand.PHASE_DIAGRAM: [Axis.ETA],
    RunCommand.CRITICAL: None,
    RunCommand.LATTICE_SUM: None,
    RunCommand.VERIFY_ALGEBRA: None,
    RunCommand.FIT: None,
}

# Section of the document each command reads besides outputs
COMMAND_SECTIONS = {
    RunCommand.DISPERSION: 'model',
    RunCommand.SCAN_COUPLING: 'model',
    RunCommand.CRITICAL: 'model',
    RunCommand.PHASE_DIAGRAM: 'model',
    RunCommand.LATTICE_SUM: 'lattice',
    RunCommand.VERIFY_ALGEBRA: 'algebra',
    RunCommand.FIT: 'measurements',
}

CRITICAL_MODELS = [ModelKind.RENORMALIZED_HOPFIELD, ModelKind.DICKE, ModelKind.BARE_HOPFIELD]


class AxisSerializer(serializers.Serializer):
    """Serializer for a sampled axis"""
    name = serializers.ChoiceField(choices=Axis.choices)
    min = serializers.FloatField()
    max = serializers.FloatField()
    samples = serializers.IntegerField(min_value=2)

    def validate(self, attrs):
        if not attrs['min'] < attrs['max']:
            raise serializers.ValidationError('Axis needs min < max')
        return attrs

    @staticmethod
    def as_flag(attrs):
        return f"{attrs['min']!r}:{attrs['max']!r}:{attrs['samples']}"


class OutputsSerializer(serializers.Serializer):
    """Serializer for output paths; a null CSV path means stdout"""
    csv = serializers.CharField(required=False, allow_null=True, default=None)
    svg = serializers.CharField(required=False, allow_null=True, default=None)
    csv_only = serializers.BooleanField(default=False)

    def _writable(self, value):
        if value is not None and not Path(value).parent.exists():
            raise serializers.ValidationError(f"Output directory does not exist: {Path(value).parent}")
        return value

    def validate_csv(self, value):
        return self._writable(value)

    def validate_svg(self, value):
        return self._writable(value)


class LatticeSectionSerializer(serializers.Serializer):
    """Serializer for the lattice-sum inputs"""
    family = serializers.ChoiceField(choices=LatticeFamily.choices, default=LatticeFamily.SC)
    a = serializers.FloatField(default=1.0, min_value=1e-12)
    k = serializers.ListField(child=serializers.FloatField(), min_length=3, max_length=3, default=[0.0, 0.0, 0.05])
    r_cut = serializers.FloatField(default=40.0, min_value=1e-12)
    checkpoints = serializers.IntegerField(required=False, min_value=2)


class AlgebraSectionSerializer(serializers.Serializer):
    """Serializer for the verify-algebra inputs"""
    n_max = serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1, default=[1, 2, 3])
    max_sites = serializers.IntegerField(default=3, min_value=1)


class MeasurementSectionSerializer(serializers.Serializer):
    """Serializer for the fit inputs"""
    data = serializers.CharField()
    model = serializers.ChoiceField(choices=[str(kind) for kind in SCORED_MODELS],
                                    default=ModelKind.RENORMALIZED_HOPFIELD)
    eta_prime = serializers.FloatField(required=False, min_value=0.0)
    omega0_ev = serializers.FloatField(required=False, min_value=1e-12)
    epsilon_m = serializers.FloatField(required=False, min_value=1e-12)
    f_perp = serializers.FloatField(default=-1 / 3, max_value=-1e-12)

    def validate_data(self, value):
        if not Path(value).exists():
            raise serializers.ValidationError(f"Measurement file not found: {value}")
        return value


class RunConfigSerializer(serializers.Serializer):
    """
    Serializer for a run document: the subcommand, the section it reads
    (model document, lattice, algebra or measurements), an optional axis
    and the output paths.
    validated_data['options'] holds the keyword options for the subcommand.
    """
    command = serializers.ChoiceField(choices=RunCommand.choices)
    model = serializers.DictField(required=False)
    lattice = LatticeSectionSerializer(required=False)
    algebra = AlgebraSectionSerializer(required=False)
    measurements = MeasurementSectionSerializer(required=False)
    axis = AxisSerializer(required=False)
    outputs = OutputsSerializer(required=False)
    include_longitudinal = serializers.BooleanField(default=False)

    def validate_model(self, value):
        """Commands that sweep or locate the coupling may omit eta"""
        document = dict(value)
        if 'eta' not in document and 'eta_prime' not in document:
            document['eta'] = 0.0
        serializer = ModelConfigSerializer(data=document)
        if not serializer.is_valid():
            raise serializers.ValidationError(serializer.errors)
        return dict(value)

    def validate(self, attrs):
        command = attrs['command']
        section = COMMAND_SECTIONS[command]
        if section == 'model' and 'model' not in attrs:
            raise serializers.ValidationError({'model': f"'{command}' needs a model document"})
        if section == 'measurements' and 'measurements' not in attrs:
            raise serializers.ValidationError({'measurements': "'fit' needs a measurements section"})

        allowed = COMMAND_AXES[command]
        axis = attrs.get('axis')
        if allowed is None and axis is not None:
            raise serializers.ValidationError({'axis': f"'{command}' takes no axis"})
        if allowed is not None and axis is not None and axis['name'] not in allowed:
            raise serializers.ValidationError({'axis': f"'{command}' samples along {', '.join(allowed)}"})
        if command == RunCommand.CRITICAL and attrs['model']['model'] not in CRITICAL_MODELS:
            raise serializers.ValidationError({'model': f"'critical' supports {', '.join(CRITICAL_MODELS)}"})

        attrs['options'] = self._command_options(attrs)
        return attrs

    def _command_options(self, attrs):
        command = attrs['command']
        outputs = attrs.get('outputs') or {'csv': None, 'svg': None, 'csv_only': False}

        if command == RunCommand.LATTICE_SUM:
            lattice = attrs.get('lattice') or LatticeSectionSerializer().to_internal_value({})
            options = {
                'family': lattice['family'],
                'a': lattice['a'],
                'k': ','.join(repr(float(value)) for value in lattice['k']),
                'r_cut': lattice['r_cut'],
                'output': outputs['csv'],
            }
            if 'checkpoints' in lattice:
                options['checkpoints'] = lattice['checkpoints']
            return options
        if command == RunCommand.VERIFY_ALGEBRA:
            algebra = attrs.get('algebra') or AlgebraSectionSerializer().to_internal_value({})
            return {'n_max': list(algebra['n_max']), 'max_sites': algebra['max_sites']}
        if command == RunCommand.FIT:
            measurements = dict(attrs['measurements'])
            measurements['output'] = outputs['csv']
            return measurements

        document = attrs['model']
        axis = attrs.get('axis')
        axis_flag = AxisSerializer.as_flag(axis) if axis is not None else None
        omega_k = document.get('omega_k', 1.0)
        single_omega_k = float(omega_k[0] if isinstance(omega_k, (list, tuple)) else omega_k)

        if command == RunCommand.CRITICAL:
            return {
                'model': document['model'],
                'f_perp': document.get('f_perp', -1 / 3),
                'omega_k': single_omega_k,
            }
        if command == RunCommand.PHASE_DIAGRAM:
            options = {
                'f_perp': document.get('f_perp', -1 / 3),
                'omega0': document.get('omega0', 1.0),
                'output': outputs['csv'],
            }
            if axis_flag is not None:
                options['range'] = axis_flag
            return options

        options = {
            'model': document['model'],
            'omega0': document.get('omega0', 1.0),
            'f_perp': document.get('f_perp', -1 / 3),
            'f_par': document.get('f_par', 2 / 3),
            'k_max': document.get('K_max', 1),
            'include_longitudinal': attrs['include_longitudinal'],
            'output': outputs['csv'],
            'svg': outputs['svg'],
            'csv_only': outputs['csv_only'],
        }
        for key in ('eta', 'eta_prime', 'chi'):
            if key in document:
                options[key] = document[key]
        if command == RunCommand.DISPERSION:
            if axis_flag is not None:
                options['wk'] = axis_flag
        else:
            options['omega_k'] = single_omega_k
            if axis is not None:
                options['axis'] = axis['name']
                options['range'] = axis_flag
        return options
