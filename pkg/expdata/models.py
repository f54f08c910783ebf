"""
Measured lower-polariton data and model residual reports
"""
from dataclasses import dataclass, field
import numpy as np
import pandas as pd

from polariton_core.exceptions import EmptyDatasetError, MeasurementValidationError

MEASUREMENT_COLUMNS = ['omega_k_eV', 'omega_LP_eV']
SIGMA_COLUMN = 'sigma_eV'
RESIDUAL_COLUMNS = ['omega_k_eV', 'omega_LP_eV', 'model_LP_eV', 'residual_eV', 'phase']


@dataclass(frozen=True)
class MeasurementSet:
    """
    Photon energies and measured lower-polariton energies in eV, sorted by
    photon energy, with the material parameters used to score models.
    """
    omega_k_ev: tuple
    omega_lp_ev: tuple
    sigma_ev: tuple = None
    omega0_ev: float = 1.83
    epsilon_m: float = 1.96
    eta_prime: float = 1.83
    source: str = ''

    def __post_init__(self):
        photon = np.asarray(self.omega_k_ev, dtype=float)
        polariton = np.asarray(self.omega_lp_ev, dtype=float)
        if photon.shape != polariton.shape or photon.ndim != 1:
            raise MeasurementValidationError(
                f"Photon and polariton energies differ in length: {photon.shape} vs {polariton.shape}"
            )
        if photon.size == 0:
            raise EmptyDatasetError(f"No measurements in {self.source or 'dataset'}")
        if np.any(photon <= 0) or np.any(polariton <= 0) or not np.all(np.isfinite(photon + polariton)):
            raise MeasurementValidationError('Energies must be positive and finite')
        if not self.omega0_ev > 0 or not self.epsilon_m > 0 or self.eta_prime < 0:
            raise MeasurementValidationError(
                f"Invalid material parameters: omega0={self.omega0_ev} eps_m={self.epsilon_m} eta'={self.eta_prime}"
            )

        order = np.argsort(photon, kind='stable')
        object.__setattr__(self, 'omega_k_ev', tuple(float(value) for value in photon[order]))
        object.__setattr__(self, 'omega_lp_ev', tuple(float(value) for value in polariton[order]))
        if self.sigma_ev is not None:
            sigma = np.asarray(self.sigma_ev, dtype=float)
            if sigma.shape != photon.shape or np.any(sigma < 0):
                raise MeasurementValidationError('Uncertainties must be nonnegative, one per row')
            object.__setattr__(self, 'sigma_ev', tuple(float(value) for value in sigma[order]))

    def __len__(self):
        return len(self.omega_k_ev)

    @property
    def omega_k_reduced(self):
        return np.array(self.omega_k_ev) / self.omega0_ev

    @property
    def omega_lp_reduced(self):
        return np.array(self.omega_lp_ev) / self.omega0_ev

    def to_frame(self):
        frame = pd.DataFrame({'omega_k_eV': self.omega_k_ev, 'omega_LP_eV': self.omega_lp_ev})
        if self.sigma_ev is not None:
            frame[SIGMA_COLUMN] = self.sigma_ev
        return frame


@dataclass(frozen=True)
class ResidualReport:
    """Per-point model energies and residuals (measured - model) in eV"""
    model: str
    eta: float
    frame: pd.DataFrame = field(compare=False)
    rmse: float
    max_abs: float
    n: int

    def summary(self):
        return {'rmse': self.rmse, 'max_abs': self.max_abs, 'n': self.n}
