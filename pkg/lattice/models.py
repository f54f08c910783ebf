"""
Lattice geometry and structure-factor value types
"""
from dataclasses import dataclass, field
from django.conf import settings
from django.db import models
import numpy as np

from polariton_core.exceptions import DomainError, NormalizationError


class LatticeFamily(models.TextChoices):
    SC = 'sc', 'Simple cubic'
    FCC = 'fcc', 'Face-centred cubic'
    BCC = 'bcc', 'Body-centred cubic'
    SQUARE2D = 'square2d', 'Square layer'


# Site offsets inside the conventional cell, in units of the lattice constant
CELL_BASIS = {
    LatticeFamily.SC: ((0.0, 0.0, 0.0),),
    LatticeFamily.FCC: ((0.0, 0.0, 0.0), (0.5, 0.5, 0.0), (0.5, 0.0, 0.5), (0.0, 0.5, 0.5)),
    LatticeFamily.BCC: ((0.0, 0.0, 0.0), (0.5, 0.5, 0.5)),
    LatticeFamily.SQUARE2D: ((0.0, 0.0, 0.0),),
}

# Nearest-neighbour distance in units of the lattice constant
NEAREST_NEIGHBOUR = {
    LatticeFamily.SC: 1.0,
    LatticeFamily.FCC: 2 ** -0.5,
    LatticeFamily.BCC: 3 ** 0.5 / 2,
    LatticeFamily.SQUARE2D: 1.0,
}


def _frozen(array):
    array = np.array(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class LatticeSpec:
    """
    Lattice family, lattice constant and the orthonormal dipole basis.
    Rows of orientation_basis are the unit vectors e_alpha in lab coordinates.
    """
    family: str = LatticeFamily.SC
    a: float = 1.0
    orientation_basis: np.ndarray = field(default_factory=lambda: np.eye(3))

    def __post_init__(self):
        if self.family not in LatticeFamily.values:
            raise DomainError(f"Unknown lattice family: {self.family}")
        if not self.a > 0:
            raise DomainError(f"Lattice constant must be positive, got {self.a}")
        basis = np.asarray(self.orientation_basis, dtype=float)
        if basis.shape != (3, 3):
            raise DomainError(f"Orientation basis must be 3x3, got {basis.shape}")
        deviation = np.max(np.abs(basis @ basis.T - np.eye(3)))
        if deviation > settings.ORTHONORMAL_TOLERANCE:
            raise NormalizationError(f"Orientation basis is not orthonormal (deviation {deviation:.2e})")
        object.__setattr__(self, 'orientation_basis', _frozen(basis))

    @property
    def is_layer(self):
        return self.family == LatticeFamily.SQUARE2D

    @property
    def nearest_neighbour(self):
        return NEAREST_NEIGHBOUR[LatticeFamily(self.family)] * self.a


@dataclass(frozen=True)
class StructureFactor:
    """Dimensionless dipole tensor f with its transverse/longitudinal split"""
    f: np.ndarray
    f_perp: float
    f_par: float
    k_hat: np.ndarray = None

    def __post_init__(self):
        object.__setattr__(self, 'f', _frozen(self.f))
        if self.k_hat is not None:
            object.__setattr__(self, 'k_hat', _frozen(self.k_hat))


@dataclass(frozen=True)
class DipoleSumResult:
    """Shell-partial dipole sums with the tail-corrected limit"""
    radii: np.ndarray
    partials: np.ndarray
    extrapolated: np.ndarray
    shape_dependent: bool = False


@dataclass(frozen=True)
class MuEstimate:
    """Certified value of the square-layer constant mu"""
    value: float
    error_bound: float
    cutoff: int
