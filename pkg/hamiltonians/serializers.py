"""
Serializers for model documents
"""
from rest_framework import serializers

from .models import CouplingSet, ModelConfig, ModelKind, Phase
from .services import HamiltonianService
from polariton_core.exceptions import DomainError


class FrequencyListField(serializers.Field):
    """Accepts a positive number or a list of positive numbers"""

    default_error_messages = {
        'invalid': 'Expected a positive number or a list of positive numbers.',
    }

    def to_internal_value(self, data):
        values = data if isinstance(data, (list, tuple)) else [data]
        if not values:
            self.fail('invalid')
        try:
            values = tuple(float(value) for value in values)
        except (TypeError, ValueError):
            self.fail('invalid')
        if any(value <= 0 for value in values):
            self.fail('invalid')
        return values

    def to_representation(self, value):
        return list(value)


class ModelConfigSerializer(serializers.Serializer):
    """Serializer for a model document; save() returns a ModelConfig"""
    model = serializers.ChoiceField(choices=ModelKind.choices)
    omega0 = serializers.FloatField(default=1.0, min_value=1e-12)
    omega_k = FrequencyListField(default=(1.0,))
    eta = serializers.FloatField(required=False, min_value=0.0)
    eta_prime = serializers.FloatField(required=False, min_value=0.0)
    chi = serializers.FloatField(required=False, min_value=0.0)
    f_perp = serializers.FloatField(default=-1 / 3, min_value=-1.0, max_value=2 / 3)
    f_par = serializers.FloatField(default=2 / 3, min_value=-1 / 3, max_value=2.0)
    K_max = serializers.IntegerField(default=1, min_value=1)
    phase = serializers.ChoiceField(choices=Phase.choices, required=False)

    def validate(self, attrs):
        """Exactly one of eta and eta_prime; derive eta when only eta_prime is given"""
        if ('eta' in attrs) == ('eta_prime' in attrs):
            raise serializers.ValidationError("Give exactly one of 'eta' and 'eta_prime'")

        if 'eta_prime' in attrs:
            try:
                attrs['eta'] = HamiltonianService.eta_from_eta_prime(attrs['eta_prime'], attrs['f_perp'])
            except DomainError as exc:
                raise serializers.ValidationError({'eta_prime': str(exc)})

        if attrs['model'] != ModelKind.LAYER_2D and len(attrs['omega_k']) != 1:
            raise serializers.ValidationError({'omega_k': 'Only the layer model takes several mode frequencies'})
        if 'chi' in attrs and attrs['model'] != ModelKind.LAYER_2D:
            raise serializers.ValidationError({'chi': 'chi is independent of eta only for the layer model'})

        if attrs['model'] == ModelKind.CONDENSED_3D:
            attrs['phase'] = Phase.CONDENSED
        return attrs

    def create(self, validated_data):
        coupling = CouplingSet(
            omega0=validated_data['omega0'],
            omega_k=validated_data['omega_k'],
            chi=validated_data.get('chi', validated_data['eta']),
            eta=validated_data['eta'],
            f_perp=validated_data['f_perp'],
            f_par=validated_data['f_par'],
        )
        phase = validated_data.get('phase', coupling.phase)
        return ModelConfig(
            kind=validated_data['model'],
            coupling=coupling,
            phase=phase,
            k_max=validated_data['K_max'],
        )
