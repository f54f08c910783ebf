"""
Normal-mode solution of a quadratic bosonic form
"""
from dataclasses import dataclass
import numpy as np


@dataclass(frozen=True)
class SymplecticSpectrum:
    """
    frequencies: ascending, nonnegative, one per mode
    transform: T = [[U, V*], [V, U*]] with T^H Sigma T = Sigma, or None when the
    eigenproblem is defective (zero modes) or the form is unstable
    degenerate_blocks: index groups of frequencies equal within tolerance
    """
    frequencies: np.ndarray
    stable: bool
    unstable_modes: tuple = ()
    transform: np.ndarray = None
    degenerate_blocks: tuple = ()
    zero_modes: int = 0
    pairing_error: float = 0.0

    @property
    def degenerate(self):
        return self.transform is None and self.stable

    @property
    def lowest(self):
        return float(self.frequencies[0])

    @property
    def n_modes(self):
        return len(self.frequencies)

    @property
    def metric(self):
        """Sigma = diag(+I, -I)"""
        n = self.n_modes
        return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
