"""
Service layer for the condensed-phase mean field: operator shifts,
stationarity of the linear terms, order parameter and field expectations
"""
from django.conf import settings
from scipy.optimize import root
import numpy as np
import logging

from .models import CondensateParams, FieldExpectations
from hamiltonians.models import CouplingSet, Phase
from hamiltonians.services import HamiltonianService
from polariton_core.exceptions import ConvergenceError, DomainError

logger = logging.getLogger('meanfield')

START_HALF_WIDTH_A = 1.0
START_HALF_WIDTH_B = 0.35


def _bare_coupling(coupling):
    return coupling.eta * np.sqrt(coupling.omega0 / coupling.single_omega_k)


class MeanFieldService:
    """Service class for mean-field analysis above the critical coupling"""

    @staticmethod
    def critical_eta(f_perp):
        if f_perp >= 0:
            return None
        return 1.0 / (2.0 * np.sqrt(-f_perp))

    @staticmethod
    def condensate_parameters(eta, f_perp, omega_k=1.0, omega0=1.0):
        """
        Nontrivial solution sum B^2/N = (1 + 1/(4 eta^2 f_perp))/2 and
        A = 2 g~ sum_alpha B_alpha e_lambda,alpha, with B along the first
        transverse axis and the positive root. The trivial solution is
        returned at and below eta_c.
        """
        coupling = CouplingSet.bulk(omega_k=omega_k, eta=eta, omega0=omega0, f_perp=f_perp)
        g_k = _bare_coupling(coupling)
        eta_c = MeanFieldService.critical_eta(f_perp)
        if eta_c is None or eta <= eta_c:
            return CondensateParams.trivial(g_k)

        total = 0.5 * (1.0 + 1.0 / (4.0 * eta ** 2 * f_perp))
        polarizations = HamiltonianService.transverse_polarizations(np.array([0.0, 0.0, 1.0]))
        b = np.sqrt(total) * polarizations[0]
        g_tilde = g_k * np.sqrt(1.0 - total)
        a = 2.0 * g_tilde * (polarizations @ b)
        return CondensateParams.from_amplitudes(a, b, g_k)

    @staticmethod
    def stationarity_equations(params, coupling, f=None):
        """
        Coefficients of the terms linear in the shifted operators, per
        polarization then per orientation, divided by sqrt(N):
            w_k (2 g~ e b - a)
            2 g~ w_k (e^T a - b (a.e b)/n) + 4 w0 n [eta^2 (b (b.P b)/n - P b)
                + chi^2 (b (b.f b)/n - f b)] - w0 b
        with P = e^T e and n = 1 - |b|^2.
        """
        f, k_hat = HamiltonianService.structure_tensor(coupling, f)
        e = HamiltonianService.transverse_polarizations(k_hat)
        omega_k, omega0 = coupling.single_omega_k, coupling.omega0
        a = np.asarray(params.a_over_sqrt_n, dtype=float)
        b = np.asarray(params.b_over_sqrt_n, dtype=float)
        n = 1.0 - float(b @ b)
        g_tilde = _bare_coupling(coupling) * np.sqrt(abs(n))
        projector = e.T @ e

        photon = omega_k * (2.0 * g_tilde * (e @ b) - a)
        matter = 2.0 * g_tilde * omega_k * (e.T @ a - b * (a @ (e @ b)) / n)
        matter += 4.0 * omega0 * n * coupling.eta ** 2 * (b * (b @ projector @ b) / n - projector @ b)
        matter += 4.0 * omega0 * n * coupling.chi ** 2 * (b * (b @ f @ b) / n - f @ b)
        matter -= omega0 * b
        return np.concatenate([photon, matter])

    @staticmethod
    def stationarity_residual(params, coupling, f=None):
        """Max-norm of the linear-term coefficients in units of omega0"""
        equations = MeanFieldService.stationarity_equations(params, coupling, f)
        return float(np.max(np.abs(equations))) / coupling.omega0

    @staticmethod
    def solve_stationarity(coupling, start, f=None, tolerance=None):
        """Root of the stationarity system from one start (a1, a2, b1, b2, b3)"""
        tolerance = settings.ROOT_RESIDUAL_TOLERANCE if tolerance is None else tolerance
        g_k = _bare_coupling(coupling)

        def equations(x):
            return MeanFieldService.stationarity_equations(
                CondensateParams.from_amplitudes(x[:2], x[2:], g_k), coupling, f
            )

        solution = root(equations, np.asarray(start, dtype=float), method='hybr',
                        options={'xtol': settings.MEANFIELD_XTOL})
        params = CondensateParams.from_amplitudes(solution.x[:2], solution.x[2:], g_k)
        residual = MeanFieldService.stationarity_residual(params, coupling, f)
        if residual > tolerance or not params.n_tilde_over_n > 0:
            raise ConvergenceError(
                f"Stationarity solve did not converge from {tuple(start)}: {solution.message}",
                partial=params,
                error_bound=residual,
            )
        return params

    @staticmethod
    def multistart_stationary_points(coupling, f=None, starts=None, seed=None):
        """
        Distinct stationary points, by sum B^2/N, reached from seeded random
        starts. Starts that do not converge are skipped.
        """
        starts = settings.MEANFIELD_STARTS if starts is None else starts
        seed = settings.MEANFIELD_SEED if seed is None else seed
        rng = np.random.default_rng(seed)
        points, failures = {}, 0
        for _ in range(starts):
            start = np.concatenate([
                rng.uniform(-START_HALF_WIDTH_A, START_HALF_WIDTH_A, 2),
                rng.uniform(-START_HALF_WIDTH_B, START_HALF_WIDTH_B, 3),
            ])
            try:
                params = MeanFieldService.solve_stationarity(coupling, start, f)
            except ConvergenceError:
                failures += 1
                continue
            key = round(params.sum_b2_over_n, 8)
            points.setdefault(key, params)

        logger.info(
            f"Multistart: {starts} starts, {failures} unconverged, "
            f"sum B^2/N values {sorted(points)}"
        )
        return tuple(points[key] for key in sorted(points))

    @staticmethod
    def order_parameter(eta, f_perp):
        """sqrt(sum B^2/N), zero at and below eta_c"""
        if f_perp >= 0:
            raise DomainError(f"The order parameter needs f_perp < 0, got {f_perp}")
        return MeanFieldService.condensate_parameters(eta, f_perp).order_parameter

    @staticmethod
    def field_expectations(params, coupling):
        """
        Mean fields per transverse polarization in units of the saturated
        polarization: <D> = A/(2 g_k), <P_perp> = sqrt(n) e B and
        <E_perp> = <D> - <P_perp>.
        """
        e = HamiltonianService.transverse_polarizations(HamiltonianService.structure_tensor(coupling)[1])
        g_k = _bare_coupling(coupling)
        a = np.asarray(params.a_over_sqrt_n, dtype=float)
        b = np.asarray(params.b_over_sqrt_n, dtype=float)
        d_mean = a / (2.0 * g_k) if g_k > 0 else np.zeros_like(a)
        pperp_mean = np.sqrt(max(params.n_tilde_over_n, 0.0)) * (e @ b)
        return FieldExpectations(d_mean=d_mean, pperp_mean=pperp_mean, eperp_mean=d_mean - pperp_mean)

    @staticmethod
    def matter_resonance(eta, f_perp, omega0=1.0):
        """
        Transverse matter frequency: omega0 sqrt(1 + 4 eta^2 f_perp) below eta_c
        and omega0 sqrt(16 eta^4 f_perp^2 - 1) above it.
        """
        eta_c = MeanFieldService.critical_eta(f_perp)
        if eta_c is not None and eta > eta_c:
            return omega0 * np.sqrt(max(16 * eta ** 4 * f_perp ** 2 - 1, 0.0))
        return HamiltonianService.renormalized_frequency(omega0, eta, f_perp)

    @staticmethod
    def phase_diagram(etas, f_perp, omega0=1.0):
        """Rows of (eta, order_parameter, omega_tilde_perp, phase)"""
        rows = []
        for eta in etas:
            params = MeanFieldService.condensate_parameters(eta, f_perp, omega0=omega0)
            rows.append({
                'eta': float(eta),
                'order_parameter': params.order_parameter,
                'omega_tilde_perp': float(MeanFieldService.matter_resonance(eta, f_perp, omega0)) / omega0,
                'phase': str(params.phase),
            })
        logger.info(f"Phase diagram: {len(rows)} points, f_perp={f_perp}")
        return rows
