"""
Service layer for measured lower-polariton data: CSV input and output,
synthetic data and model scoring
"""
from django.conf import settings
from pathlib import Path
import numpy as np
import pandas as pd
import logging

from .models import MEASUREMENT_COLUMNS, RESIDUAL_COLUMNS, SIGMA_COLUMN, MeasurementSet, ResidualReport
from .serializers import MeasurementRowSerializer
from dispersion.models import Branch
from dispersion.services import DispersionService
from hamiltonians.models import ModelKind, Phase
from hamiltonians.services import HamiltonianService
from polariton_core.exceptions import (
    ConfigurationError,
    DomainError,
    EmptyDatasetError,
    MeasurementParseError,
    MeasurementValidationError,
    PhaseDomainError,
    SoftModeError,
)

logger = logging.getLogger('expdata')

SCORED_MODELS = (ModelKind.RENORMALIZED_HOPFIELD, ModelKind.DICKE, ModelKind.BARE_HOPFIELD)


class ExpDataService:
    """Service class for measurement data and model comparison"""

    @staticmethod
    def load_measurements(path, omega0_ev=None, epsilon_m=None, eta_prime=None):
        """
        Read a CSV with header omega_k_eV,omega_LP_eV[,sigma_eV].
        Line numbers in errors count the header as line 1.
        """
        path = Path(path)
        if not path.exists():
            raise ConfigurationError(f"Measurement file not found: {path}")
        try:
            frame = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
        except pd.errors.EmptyDataError as exc:
            raise MeasurementParseError(f"{path} has no header", line=1) from exc
        except pd.errors.ParserError as exc:
            raise MeasurementParseError(f"{path} is not valid CSV: {exc}") from exc

        missing = [column for column in MEASUREMENT_COLUMNS if column not in frame.columns]
        if missing:
            raise MeasurementParseError(f"{path} header lacks {', '.join(missing)}", line=1)
        if frame.empty:
            raise EmptyDatasetError(f"{path} has a header but no rows")

        has_sigma = SIGMA_COLUMN in frame.columns
        photon, polariton, sigma = [], [], []
        for index, row in frame.iterrows():
            line = index + 2
            document = {column: row[column] for column in MEASUREMENT_COLUMNS}
            if has_sigma:
                document[SIGMA_COLUMN] = row[SIGMA_COLUMN] or None
            serializer = MeasurementRowSerializer(data=document)
            if not serializer.is_valid():
                if serializer.is_parse_failure():
                    raise MeasurementParseError(f"Line {line}: {dict(serializer.errors)}", line=line)
                raise MeasurementValidationError(f"Line {line}: {dict(serializer.errors)}", line=line)
            photon.append(serializer.validated_data['omega_k_eV'])
            polariton.append(serializer.validated_data['omega_LP_eV'])
            sigma.append(serializer.validated_data.get(SIGMA_COLUMN))

        if has_sigma and any(value is None for value in sigma):
            raise MeasurementValidationError(f"{path}: sigma_eV must be given on every row or on none")

        data = MeasurementSet(
            omega_k_ev=tuple(photon),
            omega_lp_ev=tuple(polariton),
            sigma_ev=tuple(sigma) if has_sigma else None,
            omega0_ev=settings.DEFAULT_OMEGA0_EV if omega0_ev is None else omega0_ev,
            epsilon_m=settings.DEFAULT_EPSILON_M if epsilon_m is None else epsilon_m,
            eta_prime=settings.DEFAULT_ETA_PRIME if eta_prime is None else eta_prime,
            source=str(path),
        )
        logger.info(f"Measurements loaded: {path} | rows={len(data)}")
        return data

    @staticmethod
    def save_measurements(data, path):
        """Write the set in the load format; floats use their shortest round-trip text"""
        path = Path(path)
        if not path.parent.exists():
            raise ConfigurationError(f"Output directory does not exist: {path.parent}")
        data.to_frame().to_csv(path, index=False, lineterminator='\n')
        logger.info(f"Measurements saved: {path} | rows={len(data)}")
        return path

    @staticmethod
    def infer_eta_from_eta_prime(eta_prime, f_perp=-1 / 3):
        """eta = eta' / sqrt(1 - 4 eta'^2 f_perp)"""
        if f_perp >= 0:
            raise DomainError(f"Inverting eta' needs f_perp < 0, got {f_perp}")
        if eta_prime < 0:
            raise DomainError(f"eta' must be nonnegative, got {eta_prime}")
        return HamiltonianService.eta_from_eta_prime(eta_prime, f_perp)

    @staticmethod
    def model_lower_polariton(model, omega_k, eta, f_perp=-1 / 3):
        """Lower branch in reduced units and its phase at one photon frequency"""
        if model not in SCORED_MODELS:
            raise DomainError(f"Scoring supports {', '.join(SCORED_MODELS)}, got {model}")
        rows = DispersionService.evaluate_point(model, omega_k, eta, f_perp=f_perp)
        branch, phase, omega = next(row for row in rows if row[0] == Branch.LP)
        return omega, phase

    @staticmethod
    def synthesize_measurements(omega_k_ev, model=ModelKind.RENORMALIZED_HOPFIELD, eta_prime=None,
                                omega0_ev=None, epsilon_m=None, f_perp=-1 / 3, noise_ev=0.0,
                                sigma_ev=None, seed=0):
        """Lower-polariton energies generated from a model, with optional Gaussian noise"""
        omega0_ev = settings.DEFAULT_OMEGA0_EV if omega0_ev is None else omega0_ev
        eta_prime = settings.DEFAULT_ETA_PRIME if eta_prime is None else eta_prime
        eta = ExpDataService.infer_eta_from_eta_prime(eta_prime, f_perp)
        photon = np.asarray(omega_k_ev, dtype=float)
        polariton = np.array([
            ExpDataService.model_lower_polariton(model, value / omega0_ev, eta, f_perp)[0] * omega0_ev
            for value in photon
        ])
        if noise_ev > 0:
            polariton = polariton + np.random.default_rng(seed).normal(0.0, noise_ev, polariton.shape)
        sigma = None if sigma_ev is None else tuple(np.full(photon.shape, sigma_ev))
        return MeasurementSet(
            omega_k_ev=tuple(photon),
            omega_lp_ev=tuple(polariton),
            sigma_ev=sigma,
            omega0_ev=omega0_ev,
            epsilon_m=settings.DEFAULT_EPSILON_M if epsilon_m is None else epsilon_m,
            eta_prime=eta_prime,
            source=f"synthetic:{model}",
        )

    @staticmethod
    def model_residuals(data, model, f_perp=-1 / 3):
        """
        Score one model against the data at eta inferred from the set's eta'.
        Every model is evaluated at that same eta, in the phase it predicts
        there; points where the model has no lower branch are annotated and
        left out of the statistics.
        """
        eta = ExpDataService.infer_eta_from_eta_prime(data.eta_prime, f_perp)
        rows = []
        for photon, measured in zip(data.omega_k_ev, data.omega_lp_ev):
            try:
                omega, phase = ExpDataService.model_lower_polariton(model, photon / data.omega0_ev, eta, f_perp)
                predicted = omega * data.omega0_ev
            except (PhaseDomainError, SoftModeError) as exc:
                logger.warning(f"{model} has no lower branch at omega_k={photon} eV: {exc}")
                predicted, phase = np.nan, 'undefined'
            rows.append((photon, measured, predicted, measured - predicted, str(phase)))

        frame = pd.DataFrame(rows, columns=RESIDUAL_COLUMNS)
        condensed = int((frame['phase'] == Phase.CONDENSED.value).sum())
        if condensed:
            logger.warning(f"{model} is condensed at eta={eta:.4f}: {condensed} point(s) use the condensed-phase branch")
        scored = frame['residual_eV'].dropna().to_numpy()
        if scored.size == 0:
            raise EmptyDatasetError(f"No point of {data.source or 'the dataset'} could be scored against {model}")
        rmse = float(np.sqrt(np.mean(scored ** 2)))
        max_abs = float(np.max(np.abs(scored)))
        logger.info(f"Residuals for {model}: eta={eta:.6f} rmse={rmse:.4e} eV max_abs={max_abs:.4e} eV n={scored.size}")
        return ResidualReport(model=str(model), eta=eta, frame=frame, rmse=rmse, max_abs=max_abs, n=int(scored.size))

    @staticmethod
    def rank_models(data, models=SCORED_MODELS, f_perp=-1 / 3):
        """Reports for several models, best RMSE first"""
        reports = [ExpDataService.model_residuals(data, model, f_perp) for model in models]
        return sorted(reports, key=lambda report: report.rmse)
