"""
Sampled dispersion curves
"""
from dataclasses import dataclass
from django.db import models
import numpy as np
import pandas as pd

from polariton_core.exceptions import ConfigurationError

CURVE_COLUMNS = ['param', 'branch', 'phase', 'omega_over_omega0']


class Branch(models.TextChoices):
    LP = 'LP', 'Lower polariton'
    UP = 'UP', 'Upper polariton'
    LONG = 'LONG', 'Longitudinal'

    @staticmethod
    def cavity(n):
        return f"cavity-{n}"


class Axis(models.TextChoices):
    OMEGA_K = 'omega_k', 'Photon frequency over omega0'
    ETA = 'eta', 'Light-matter coupling'
    ETA_PRIME = 'eta_prime', 'Renormalized coupling'


@dataclass(frozen=True)
class AxisSpec:
    name: str
    minimum: float
    maximum: float
    samples: int

    def __post_init__(self):
        if self.name not in Axis.values:
            raise ConfigurationError(f"Unknown axis: {self.name}")
        if self.samples < 2:
            raise ConfigurationError(f"An axis needs at least 2 samples, got {self.samples}")
        if not self.minimum < self.maximum:
            raise ConfigurationError(f"Axis needs min < max, got {self.minimum} and {self.maximum}")

    @property
    def values(self):
        return np.linspace(self.minimum, self.maximum, self.samples)


@dataclass(frozen=True)
class BranchSample:
    param: float
    branch: str
    phase: str
    omega: float


@dataclass(frozen=True)
class DispersionCurve:
    """Branch frequencies over one parameter axis, in units of omega0"""
    axis: str
    model: str
    samples: tuple

    @property
    def branches(self):
        seen = []
        for sample in self.samples:
            if sample.branch not in seen:
                seen.append(sample.branch)
        return seen

    @property
    def is_empty(self):
        return not self.samples

    def branch(self, name):
        return [sample for sample in self.samples if sample.branch == name]

    def to_frame(self):
        return pd.DataFrame(
            [(s.param, s.branch, s.phase, s.omega) for s in self.samples],
            columns=CURVE_COLUMNS,
        )
