"""
Serializers for measurement rows
"""
import numpy as np
from rest_framework import serializers

PARSE_CODES = {'invalid', 'required', 'null', 'max_string_length'}


def _finite(value, name):
    if not np.isfinite(value):
        raise serializers.ValidationError(f"{name} must be finite, got {value}", code='nonfinite')
    return value


class MeasurementRowSerializer(serializers.Serializer):
    """Serializer for one row of a measurement CSV"""
    omega_k_eV = serializers.FloatField()
    omega_LP_eV = serializers.FloatField()
    sigma_eV = serializers.FloatField(required=False, allow_null=True)

    def validate_omega_k_eV(self, value):
        """Validate photon energy is finite and positive"""
        if _finite(value, 'Photon energy') <= 0:
            raise serializers.ValidationError('Photon energy must be positive', code='nonpositive')
        return value

    def validate_omega_LP_eV(self, value):
        """Validate polariton energy is finite and positive"""
        if _finite(value, 'Polariton energy') <= 0:
            raise serializers.ValidationError('Polariton energy must be positive', code='nonpositive')
        return value

    def validate_sigma_eV(self, value):
        if value is not None and _finite(value, 'Uncertainty') < 0:
            raise serializers.ValidationError('Uncertainty must be nonnegative', code='negative')
        return value

    def is_parse_failure(self):
        """True when a field could not be read as a number at all"""
        return any(
            detail.code in PARSE_CODES
            for details in self.errors.values()
            for detail in details
        )
