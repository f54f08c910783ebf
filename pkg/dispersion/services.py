"""
Service layer for closed-form polariton branches, the multimode layer
relation, critical couplings and parameter scans
"""
from django.conf import settings
from scipy.optimize import bisect, brentq
import numpy as np
import logging

from .models import Axis, AxisSpec, Branch, BranchSample, DispersionCurve
from hamiltonians.models import CouplingSet, ModelKind, Phase, renormalized
from hamiltonians.services import HamiltonianService
from polariton_core.exceptions import (
    BracketingError,
    ConvergenceError,
    DomainError,
    PhaseDomainError,
)

logger = logging.getLogger('dispersion')

DICKE_CRITICAL_ETA = 0.5


def _quadratic_roots(b, c):
    """
    Roots of s^2 - b s + c = 0 with b > 0, larger root first-hand and the
    smaller from the product c / s_up so it keeps its sign and precision.
    """
    disc = b * b - 4.0 * c
    if disc < 0:
        if disc < -1e-12 * b * b:
            raise DomainError(f"Negative discriminant {disc:.3e} for b={b!r}, c={c!r}")
        disc = 0.0
    s_up = 0.5 * (b + np.sqrt(disc))
    s_lp = c / s_up if s_up > 0 else 0.0
    return s_lp, s_up


def _branches(s_lp, s_up):
    return float(np.sqrt(max(s_lp, 0.0))), float(np.sqrt(max(s_up, 0.0)))


class DispersionService:
    """Service class for dispersion relations"""

    @staticmethod
    def polariton_branches(omega_k, omega_tilde, eta_prime):
        """
        Nonnegative roots of Omega^4 - Omega^2 (w_k^2 + w~^2 (1 + 4 eta'^2)) + w_k^2 w~^2
        """
        if omega_k <= 0 or omega_tilde < 0 or eta_prime < 0:
            raise DomainError(f"Need omega_k > 0, omega_tilde >= 0, eta' >= 0; got {omega_k}, {omega_tilde}, {eta_prime}")
        b = omega_k ** 2 + omega_tilde ** 2 * (1 + 4 * eta_prime ** 2)
        return _branches(*_quadratic_roots(b, omega_k ** 2 * omega_tilde ** 2))

    @staticmethod
    def normal_branch_squares(model, omega_k, eta, omega0=1.0, f_perp=-1 / 3):
        """
        Signed (Omega_LP^2, Omega_UP^2) of the normal-phase transverse pair.
        Omega_LP^2 turns negative past the softening point.
        """
        if model in (ModelKind.RENORMALIZED_HOPFIELD, ModelKind.CONDENSED_3D):
            omega_tilde_sq = omega0 ** 2 * (1 + 4 * eta ** 2 * f_perp)
            b = omega_k ** 2 + omega_tilde_sq + 4 * eta ** 2 * omega0 ** 2
            c = omega_k ** 2 * omega_tilde_sq
        elif model == ModelKind.DICKE:
            b = omega_k ** 2 + omega0 ** 2
            c = omega_k ** 2 * omega0 ** 2 * (1 - 4 * eta ** 2)
        elif model == ModelKind.BARE_HOPFIELD:
            b = omega_k ** 2 + omega0 ** 2 * (1 + 4 * eta ** 2)
            c = omega_k ** 2 * omega0 ** 2
        else:
            raise DomainError(f"No closed-form transverse pair for {model}")
        return _quadratic_roots(b, c)

    @staticmethod
    def renormalized_hopfield_branches(omega_k, omega0, eta, f_perp):
        """Normal-phase pair written in eta, finite at omega_tilde = 0"""
        s_lp, s_up = DispersionService.normal_branch_squares(
            ModelKind.RENORMALIZED_HOPFIELD, omega_k, eta, omega0, f_perp
        )
        if s_lp < -1e-12 * s_up:
            raise PhaseDomainError(f"eta={eta} is past the softening point for f_perp={f_perp}")
        return _branches(s_lp, s_up)

    @staticmethod
    def dicke_like_branches(omega_k, omega0, eta):
        s_lp, s_up = DispersionService.normal_branch_squares(ModelKind.DICKE, omega_k, eta, omega0)
        if s_lp < -1e-12 * s_up:
            raise PhaseDomainError(f"eta={eta} is above the Dicke critical coupling {DICKE_CRITICAL_ETA}")
        return _branches(s_lp, s_up)

    @staticmethod
    def bare_hopfield_branches(omega_k, omega0, eta):
        return _branches(*DispersionService.normal_branch_squares(ModelKind.BARE_HOPFIELD, omega_k, eta, omega0))

    @staticmethod
    def longitudinal_branch(omega0, eta, f_par):
        """omega0 sqrt(1 + 4 eta^2 f_par), independent of omega_k"""
        return renormalized(omega0, eta, f_par)

    @staticmethod
    def condensed_branch(omega_k, omega0, eta, f_perp):
        """
        Transverse pair above the critical coupling:
        (W^2 - Omega^2)(w_k^2 - Omega^2) = Q Omega^2 with
        W^2 = omega0^2 (16 eta^4 f_perp^2 - 1) and Q = -omega0^2 / f_perp.
        eta equal to eta_c is accepted and joins the normal phase.
        """
        if f_perp >= 0:
            raise PhaseDomainError(f"No condensed phase for f_perp={f_perp} >= 0")
        eta_c = 1.0 / (2.0 * np.sqrt(-f_perp))
        if eta < eta_c * (1 - 1e-14):
            raise PhaseDomainError(f"eta={eta} is below the critical coupling {eta_c:.8f}")

        u = 4 * eta ** 2 * f_perp
        w_sq = max(omega0 ** 2 * (u * u - 1), 0.0)
        q = -omega0 ** 2 / f_perp
        b = w_sq + omega_k ** 2 + q
        roots = _quadratic_roots(b, w_sq * omega_k ** 2)

        for s in roots:
            residual = abs((w_sq - s) * (omega_k ** 2 - s) - q * s) / (b * b)
            if residual > settings.ROOT_RESIDUAL_TOLERANCE:
                raise ConvergenceError(
                    f"Condensed root Omega^2={s!r} fails back-substitution (residual {residual:.2e})",
                    partial=s,
                    error_bound=residual,
                )
        return _branches(*roots)

    @staticmethod
    def dicke_superradiant_branches(omega_k, omega0, eta):
        """
        Excitations of the Dicke model above its transition, with
        mu = 1 / (4 eta^2): Omega^2 = 1/2 [w_k^2 + w0^2/mu^2 -+ sqrt((w0^2/mu^2 - w_k^2)^2 + 4 w_k^2 w0^2)]
        """
        if eta < DICKE_CRITICAL_ETA * (1 - 1e-14):
            raise PhaseDomainError(f"eta={eta} is below the Dicke critical coupling {DICKE_CRITICAL_ETA}")
        scaled = 16 * eta ** 4 * omega0 ** 2
        b = omega_k ** 2 + scaled
        c = omega_k ** 2 * max(scaled - omega0 ** 2, 0.0)
        return _branches(*_quadratic_roots(b, c))

    @staticmethod
    def layer_relation(params, modes, omega):
        """Left-hand side of the layer relation and the sum of its absolute terms"""
        omega_tilde, eta_prime = params.omega_tilde_perp, params.eta_prime
        terms = [(omega ** 2 - omega_tilde ** 2) / (2 * omega_tilde)]
        terms += [2 * eta_prime ** 2 * omega_tilde * omega ** 2 / (w ** 2 - omega ** 2) for w in modes]
        return float(np.sum(terms)), float(np.sum(np.abs(terms)))

    @staticmethod
    def layer_relation_slope(params, modes, omega):
        """d/dOmega of the layer relation; positive away from the poles"""
        omega_tilde, eta_prime = params.omega_tilde_perp, params.eta_prime
        slope = omega / omega_tilde
        slope += sum(4 * eta_prime ** 2 * omega_tilde * omega * w ** 2 / (w ** 2 - omega ** 2) ** 2 for w in modes)
        return float(slope)

    @staticmethod
    def _pole_endpoint(relation, pole, direction, width, offset):
        """
        Point beside a pole where the relation has the sign of that side:
        negative just above a pole, positive just below it. The offset
        shrinks geometrically while a root sits closer to the pole.
        """
        offset = min(offset, 0.25 * width)
        floor = 4 * np.finfo(float).eps * pole
        point = pole + direction * offset
        while (relation(point) < 0) != (direction > 0) and offset / 16 >= floor:
            offset /= 16
            point = pole + direction * offset
        return point

    @staticmethod
    def layer_dispersion_roots(params, modes=None):
        """
        All positive roots of
        (Omega^2 - w~^2)/(2 w~) + 2 eta'^2 w~ sum_n Omega^2/(w_n^2 - Omega^2) = 0.
        The left side increases between poles, so there is one root below the
        first pole, one between each pair and one above the last. At weak
        coupling the roots next to a pole sit about 2 eta'^2 w~^2 w_n/|w~^2 - w_n^2|
        away from it.
        """
        modes = tuple(params.omega_k if modes is None else modes)
        if not modes or modes[0] <= 0 or any(b <= a for a, b in zip(modes, modes[1:])):
            raise DomainError(f"Cavity modes must be positive and strictly increasing, got {modes}")
        omega_tilde = params.omega_tilde_perp
        if omega_tilde == 0:
            raise PhaseDomainError("omega_tilde_perp = 0: the layer relation is singular at the softening point")
        if params.eta_prime == 0:
            return [omega_tilde]

        def relation(omega):
            return DispersionService.layer_relation(params, modes, omega)[0]

        offset = settings.LAYER_POLE_OFFSET * params.omega0
        upper = 2.0 * max(modes[-1], omega_tilde)
        while relation(upper) <= 0:
            upper *= 2.0

        xtol, rtol = 1e-15, 4 * np.finfo(float).eps
        edges = [0.0] + list(modes) + [upper]
        roots, diagnostics = [], []
        for n, (low, high) in enumerate(zip(edges[:-1], edges[1:])):
            width = high - low
            a = DispersionService._pole_endpoint(relation, low, 1, width, offset) if n > 0 else 0.0
            b = DispersionService._pole_endpoint(relation, high, -1, width, offset) if n < len(modes) else high
            g_a, g_b = relation(a), relation(b)
            diagnostics.append({'interval': n, 'low': a, 'high': b, 'g_low': g_a, 'g_high': g_b})
            if g_a >= 0 or g_b <= 0:
                continue
            root = brentq(relation, a, b, xtol=xtol, rtol=rtol, maxiter=500)
            value, scale = DispersionService.layer_relation(params, modes, root)
            slope = DispersionService.layer_relation_slope(params, modes, root)
            tolerance = settings.ROOT_RESIDUAL_TOLERANCE * max(scale, 1.0) + 2 * slope * (xtol + rtol * root)
            if abs(value) > tolerance:
                raise BracketingError(f"Root {root!r} in interval {n} has residual {value:.3e}", diagnostics)
            roots.append(root)

        if len(roots) != len(modes) + 1:
            logger.warning(f"Layer relation: found {len(roots)} roots, expected {len(modes) + 1}")
            raise BracketingError(
                f"Expected {len(modes) + 1} roots between the poles {modes}, found {len(roots)}",
                diagnostics,
            )
        return roots

    @staticmethod
    def critical_coupling(model, f_perp=-1 / 3, omega_k=1.0, omega0=1.0):
        """
        Smallest eta where Omega_LP reaches zero, from a scan of the signed
        Omega_LP^2 followed by bisection. None when no zero is found up to
        CRITICAL_SCAN_MAX_ETA.
        """
        if model not in (ModelKind.RENORMALIZED_HOPFIELD, ModelKind.DICKE, ModelKind.BARE_HOPFIELD):
            raise DomainError(f"critical_coupling is defined for renormalized-hopfield, dicke and bare-hopfield, got {model}")

        def lower_square(eta):
            return DispersionService.normal_branch_squares(model, omega_k, eta, omega0, f_perp)[0]

        grid = np.linspace(0.0, settings.CRITICAL_SCAN_MAX_ETA, settings.CRITICAL_SCAN_POINTS)
        previous = grid[0]
        for eta in grid[1:]:
            value = lower_square(eta)
            if value == 0:
                return float(eta)
            if value < 0:
                critical = bisect(lower_square, previous, eta, xtol=settings.BISECTION_XTOL)
                logger.info(f"Critical coupling for {model}: {critical:.8f}")
                return float(critical)
            previous = eta
        logger.info(f"No critical coupling for {model} up to eta={settings.CRITICAL_SCAN_MAX_ETA}")
        return None

    @staticmethod
    def evaluate_point(model, omega_k, eta, omega0=1.0, f_perp=-1 / 3, f_par=2 / 3,
                       include_longitudinal=False, layer_modes=None, chi=None):
        """(branch, phase, Omega) triples at one parameter value"""
        if model == ModelKind.LAYER_2D:
            params = CouplingSet.layer(layer_modes, eta=eta, chi=chi, omega0=omega0, f_perp=f_perp, f_par=f_par)
            roots = DispersionService.layer_dispersion_roots(params)
            rows = [(Branch.LP, Phase.NORMAL, roots[0])]
            rows += [(Branch.cavity(n), Phase.NORMAL, root) for n, root in enumerate(roots[1:], start=1)]
            if include_longitudinal:
                rows.append((Branch.LONG, Phase.NORMAL, params.omega_tilde_par))
            return rows

        if model == ModelKind.DICKE:
            if eta > DICKE_CRITICAL_ETA:
                lp, up = DispersionService.dicke_superradiant_branches(omega_k, omega0, eta)
                return [(Branch.LP, Phase.CONDENSED, lp), (Branch.UP, Phase.CONDENSED, up)]
            lp, up = DispersionService.dicke_like_branches(omega_k, omega0, eta)
            return [(Branch.LP, Phase.NORMAL, lp), (Branch.UP, Phase.NORMAL, up)]

        if model == ModelKind.BARE_HOPFIELD:
            lp, up = DispersionService.bare_hopfield_branches(omega_k, omega0, eta)
            rows = [(Branch.LP, Phase.NORMAL, lp), (Branch.UP, Phase.NORMAL, up)]
            if include_longitudinal:
                rows.append((Branch.LONG, Phase.NORMAL, omega0))
            return rows

        eta_c = 1.0 / (2.0 * np.sqrt(-f_perp)) if f_perp < 0 else None
        if model == ModelKind.CONDENSED_3D or (eta_c is not None and eta > eta_c):
            lp, up = DispersionService.condensed_branch(omega_k, omega0, eta, f_perp)
            return [(Branch.LP, Phase.CONDENSED, lp), (Branch.UP, Phase.CONDENSED, up)]
        lp, up = DispersionService.renormalized_hopfield_branches(omega_k, omega0, eta, f_perp)
        rows = [(Branch.LP, Phase.NORMAL, lp), (Branch.UP, Phase.NORMAL, up)]
        if include_longitudinal:
            rows.append((Branch.LONG, Phase.NORMAL, DispersionService.longitudinal_branch(omega0, eta, f_par)))
        return rows

    @staticmethod
    def scan(model, axis, omega_k=1.0, eta=None, eta_prime=None, omega0=1.0, f_perp=-1 / 3,
             f_par=2 / 3, include_longitudinal=False, k_max=1, modes=None, chi=None):
        """
        Sample every branch of a model along one axis.
        omega_k axis values are in units of omega0 (the fundamental cavity
        frequency for the layer); the eta_prime axis maps through the bulk
        inversion. Phases are stitched at eta_c, where the point is normal.
        """
        if not isinstance(axis, AxisSpec):
            axis = AxisSpec(*axis)
        if axis.name != Axis.ETA and eta is None:
            if eta_prime is None:
                raise DomainError("A fixed eta or eta_prime is needed off the eta axis")
            eta = HamiltonianService.eta_from_eta_prime(eta_prime, f_perp)

        logger.info(f"Scan started: {model} along {axis.name} [{axis.minimum}, {axis.maximum}] x {axis.samples}")
        samples = []
        for value in axis.values:
            point_omega_k, point_eta = omega_k * omega0, eta
            if axis.name == Axis.OMEGA_K:
                point_omega_k = value * omega0
            elif axis.name == Axis.ETA:
                point_eta = value
            else:
                point_eta = HamiltonianService.eta_from_eta_prime(value, f_perp)

            layer_modes = None
            if model == ModelKind.LAYER_2D:
                if modes is not None and axis.name != Axis.OMEGA_K:
                    layer_modes = tuple(modes)
                else:
                    layer_modes = HamiltonianService.cavity_ladder(point_omega_k, k_max)
            point_chi = point_eta if chi is None else chi

            rows = DispersionService.evaluate_point(
                model, point_omega_k, point_eta, omega0, f_perp, f_par,
                include_longitudinal, layer_modes, point_chi,
            )
            for branch, phase, omega in rows:
                samples.append(BranchSample(float(value), str(branch), str(phase), float(omega) / omega0))

        logger.info(f"Scan completed: {len(samples)} samples")
        return DispersionCurve(axis=axis.name, model=str(model), samples=tuple(samples))
