"""
Mean-field condensate parameters in the thermodynamic limit
"""
from dataclasses import dataclass
import numpy as np

from hamiltonians.models import Phase


def _frozen(values):
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class CondensateParams:
    """
    Operator shifts a = a~ + i A, b = b~ - B scaled by sqrt(N).
    a_over_sqrt_n is indexed by polarization, b_over_sqrt_n by orientation.
    """
    sum_b2_over_n: float
    a_over_sqrt_n: np.ndarray
    b_over_sqrt_n: np.ndarray
    g_tilde: float
    n_tilde_over_n: float
    phase: str = Phase.NORMAL

    def __post_init__(self):
        object.__setattr__(self, 'a_over_sqrt_n', _frozen(self.a_over_sqrt_n))
        object.__setattr__(self, 'b_over_sqrt_n', _frozen(self.b_over_sqrt_n))

    @classmethod
    def from_amplitudes(cls, a, b, g_k, tolerance=1e-10):
        """Derived fields for given shifts; g_k is the bare coupling eta sqrt(omega0/omega_k)"""
        b = np.asarray(b, dtype=float)
        total = float(b @ b)
        n_tilde = 1.0 - total
        phase = Phase.CONDENSED if total > tolerance else Phase.NORMAL
        return cls(
            sum_b2_over_n=total,
            a_over_sqrt_n=a,
            b_over_sqrt_n=b,
            g_tilde=g_k * np.sqrt(max(n_tilde, 0.0)),
            n_tilde_over_n=n_tilde,
            phase=phase,
        )

    @classmethod
    def trivial(cls, g_k):
        return cls.from_amplitudes(np.zeros(2), np.zeros(3), g_k)

    @property
    def order_parameter(self):
        return float(np.sqrt(self.sum_b2_over_n))

    @property
    def vector(self):
        return np.concatenate([self.a_over_sqrt_n, self.b_over_sqrt_n])


@dataclass(frozen=True)
class FieldExpectations:
    """Mean displacement, transverse polarization and electric field per polarization"""
    d_mean: np.ndarray
    pperp_mean: np.ndarray
    eperp_mean: np.ndarray
