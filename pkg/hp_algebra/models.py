"""
Operator-set value types for the degenerate two-level algebra and its boson map
"""
from dataclasses import dataclass, field
import numpy as np

# Site basis order: |+1>, |+2>, |+3>, |->
GROUND = 3
ORIENTATIONS = (0, 1, 2)


@dataclass(frozen=True)
class SiteOperatorSet:
    """4x4 matrices of one site with a threefold-degenerate excited level"""
    sigma_minus: tuple
    sigma_plus: tuple
    sigma_x: tuple
    sigma_y: tuple
    sigma_z: np.ndarray

    @property
    def s_plus(self):
        return self.sigma_plus

    @property
    def s_minus(self):
        return self.sigma_minus

    @property
    def s_z(self):
        return self.sigma_z / 2


@dataclass(frozen=True)
class TruncatedBosonSet:
    """
    Bosonic modes on the Fock space truncated at total occupation n_max.
    states[i] is the occupation tuple of basis vector i.
    """
    n_modes: int
    n_max: int
    states: tuple
    annihilators: tuple

    @property
    def dimension(self):
        return len(self.states)

    @property
    def creators(self):
        return tuple(b.conj().T for b in self.annihilators)

    @property
    def total_occupation(self):
        return np.array([sum(state) for state in self.states])

    def index(self, occupation):
        return self.states.index(tuple(occupation))

    def projector_below(self, level):
        """Diagonal projector onto states with total occupation < level"""
        return np.diag((self.total_occupation < level).astype(float))


@dataclass(frozen=True)
class MappedSpinOperators:
    """Boson images of S+, S-, Sz together with the physical-subspace isometry"""
    bosons: TruncatedBosonSet
    s_plus: tuple
    s_minus: tuple
    s_z: np.ndarray
    physical: np.ndarray


@dataclass(frozen=True)
class CollectiveModes:
    """Fourier modes b_{k,alpha} of a periodic chain"""
    bosons: TruncatedBosonSet
    n_sites: int
    k: float
    matrices: tuple


@dataclass(frozen=True)
class AlgebraCheck:
    relation: str
    deviation: float
    passed: bool


@dataclass
class AlgebraReport:
    """Ordered list of relation checks"""
    checks: list = field(default_factory=list)

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.passed]

    def add(self, relation, deviation, tolerance):
        deviation = float(deviation)
        self.checks.append(AlgebraCheck(relation, deviation, deviation <= tolerance))

    def extend(self, other):
        self.checks.extend(other.checks)
        return self
