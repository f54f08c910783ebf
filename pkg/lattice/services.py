"""
Service layer for lattice geometry and dipole-dipole structure factors
Direct shell summation plus the long-wavelength closed forms
"""
from django.conf import settings
from django.core.cache import cache
from scipy.special import spherical_jn
import numpy as np
import logging

from .models import (
    CELL_BASIS,
    DipoleSumResult,
    LatticeFamily,
    LatticeSpec,
    MuEstimate,
    StructureFactor,
)
from polariton_core.exceptions import (
    AnisotropyError,
    ConvergenceError,
    DomainError,
    EmptyShellError,
    NormalizationError,
)

logger = logging.getLogger('lattice')

# Independent components of a symmetric 3x3 tensor, CSV column order
TENSOR_COMPONENTS = ((0, 0), (1, 1), (2, 2), (0, 1), (0, 2), (1, 2))

# Volume per site in units of the nearest-neighbour distance cubed
V_FACTORS = {
    LatticeFamily.SC: 1.0,
    LatticeFamily.FCC: 2 ** -0.5,
    LatticeFamily.BCC: 4 * 3 ** -1.5,
}


def _unit(vector, name='k_hat'):
    vector = np.asarray(vector, dtype=float)
    norm = np.linalg.norm(vector)
    if abs(norm - 1.0) > 1e-12:
        raise NormalizationError(f"{name} must be a unit vector, |{name}| = {norm!r}")
    return vector


def _pack(components):
    """Rebuild symmetric 3x3 tensors from (..., 6) component arrays"""
    components = np.asarray(components)
    tensor = np.zeros(components.shape[:-1] + (3, 3))
    for index, (i, j) in enumerate(TENSOR_COMPONENTS):
        tensor[..., i, j] = components[..., index]
        tensor[..., j, i] = components[..., index]
    return tensor


class LatticeService:
    """Service class for lattice enumeration and dipole sums"""

    @staticmethod
    def lattice_sites(spec, r_cut):
        """
        All sites with 0 < |r| <= r_cut, ordered by shell radius then coordinates.
        The set is inversion symmetric.
        """
        if r_cut < spec.a:
            raise EmptyShellError(f"Cutoff {r_cut} is below the lattice constant {spec.a}")

        reach = int(np.ceil(r_cut / spec.a)) + 1
        span = np.arange(-reach, reach + 1, dtype=float)
        depth = np.array([0.0]) if spec.is_layer else span
        cells = np.stack(np.meshgrid(span, span, depth, indexing='ij'), axis=-1).reshape(-1, 3)
        basis = np.array(CELL_BASIS[LatticeFamily(spec.family)])
        points = (cells[:, None, :] + basis[None, :, :]).reshape(-1, 3) * spec.a

        r2 = np.einsum('ij,ij->i', points, points)
        inside = (r2 > 0) & (r2 <= (r_cut * (1 + 1e-12)) ** 2)
        points, r2 = points[inside], r2[inside]

        order = np.lexsort((points[:, 2], points[:, 1], points[:, 0], np.round(r2, 10)))
        return points[order]

    @staticmethod
    def _dipole_terms(spec, k, sites):
        """Per-site components cos(k.r)/r^3 (delta - 3 r_a r_b) in the orientation basis"""
        r = np.sqrt(np.einsum('ij,ij->i', sites, sites))
        unit = (sites / r[:, None]) @ spec.orientation_basis.T
        weight = np.cos(sites @ np.asarray(k, dtype=float)) / r ** 3
        columns = []
        for i, j in TENSOR_COMPONENTS:
            delta = 1.0 if i == j else 0.0
            columns.append(weight * (delta - 3.0 * unit[:, i] * unit[:, j]))
        return r, np.stack(columns, axis=1)

    @staticmethod
    def dipole_sum_3d(spec, k, r_cut):
        """Raw dimensionless sum S_ab(k, r_cut) over the enclosed sites"""
        sites = LatticeService.lattice_sites(spec, r_cut)
        _, terms = LatticeService._dipole_terms(spec, k, sites)
        return _pack(terms.sum(axis=0))

    @staticmethod
    def site_density(spec):
        """Sites per unit volume (per unit area for the layer)"""
        count = len(CELL_BASIS[LatticeFamily(spec.family)])
        return count / spec.a ** (2 if spec.is_layer else 3)

    @staticmethod
    def continuum_tail(spec, k, radius):
        """
        Continuum estimate of the sum over |r| > radius.
        3D: 4 pi rho (3 k k - I) j1(kR)/(kR); layer at k=0: rho (diag(-pi, -pi, 2 pi))/R.
        """
        k = np.asarray(k, dtype=float)
        k_norm = np.linalg.norm(k)
        rho = LatticeService.site_density(spec)
        basis = spec.orientation_basis

        if spec.is_layer:
            if k_norm > 0:
                return np.zeros((3, 3))
            lab = rho * np.diag([-np.pi, -np.pi, 2 * np.pi]) / radius
            return basis @ lab @ basis.T

        if k_norm == 0:
            return np.zeros((3, 3))
        k_hat = basis @ (k / k_norm)
        x = k_norm * radius
        return 4 * np.pi * rho * (3 * np.outer(k_hat, k_hat) - np.eye(3)) * spherical_jn(1, x) / x

    @staticmethod
    def dipole_shell_sums(spec, k, r_cut, checkpoints=None):
        """
        Shell-partial sums at increasing cutoffs and the tail-corrected limit.

        The limit is the last partial sum plus the continuum tail past r_cut,
        4 pi rho (3 k_hat k_hat - I) j1(kR)/(kR) in 3D, the closed form of the
        integral of the dipole kernel over |r| > R. No Richardson extrapolation
        over the checkpoints is done; the partials are reported for inspection.
        At k = 0 the 3D sum is shape dependent; the flag is set and no tail is added.
        """
        checkpoints = checkpoints or settings.LATTICE_CHECKPOINTS
        sites = LatticeService.lattice_sites(spec, r_cut)
        r, terms = LatticeService._dipole_terms(spec, k, sites)
        running = np.cumsum(terms, axis=0)

        radii = np.unique(np.linspace(spec.a, r_cut, max(int(checkpoints), 2)))
        stops = np.searchsorted(r, radii * (1 + 1e-12), side='right') - 1
        radii, stops = radii[stops >= 0], stops[stops >= 0]
        partials = _pack(running[stops])

        shape_dependent = (not spec.is_layer) and not np.any(np.asarray(k, dtype=float))
        if shape_dependent:
            logger.warning(
                f"Dipole sum at k=0 on {spec.family} depends on the cutoff shape; "
                f"reporting the spherical value at r_cut={r_cut}"
            )
        extrapolated = partials[-1] + LatticeService.continuum_tail(spec, k, r_cut)

        logger.info(f"Dipole sum: {spec.family} | sites={len(r)} | r_cut={r_cut} | k={tuple(np.asarray(k, dtype=float))}")
        return DipoleSumResult(
            radii=radii,
            partials=partials,
            extrapolated=extrapolated,
            shape_dependent=shape_dependent,
        )

    @staticmethod
    def lattice_v_factor(family):
        """Volume per site over the nearest-neighbour distance cubed"""
        try:
            return V_FACTORS[LatticeFamily(family)]
        except KeyError:
            raise DomainError(f"No bulk v factor for {family}")

    @staticmethod
    def longwave_dipole_sum(spec, k_hat):
        """Closed form (4 pi / 3 v) d^-3 (3 k k - I) with k_hat in lab coordinates"""
        k_hat = _unit(k_hat)
        v = LatticeService.lattice_v_factor(spec.family)
        k_b = spec.orientation_basis @ k_hat
        prefactor = 4 * np.pi / (3 * v * spec.nearest_neighbour ** 3)
        return prefactor * (3 * np.outer(k_b, k_b) - np.eye(3))

    @staticmethod
    def structure_factor(spec, k, r_cut):
        """StructureFactor from the tail-corrected direct sum of a bulk lattice"""
        if spec.is_layer:
            raise DomainError("Use f_layer for the square layer")
        k = np.asarray(k, dtype=float)
        if not np.any(k):
            raise DomainError("The long-wavelength structure factor needs an explicit direction, k != 0")
        result = LatticeService.dipole_shell_sums(spec, k, r_cut)
        f = result.extrapolated / (4 * np.pi * LatticeService.site_density(spec))
        f = (f + f.T) / 2
        k_hat = spec.orientation_basis @ (k / np.linalg.norm(k))
        f_perp, f_par = LatticeService.split_transverse_longitudinal(f, k_hat, tol=1e-6)
        return StructureFactor(f=f, f_perp=f_perp, f_par=f_par, k_hat=k_hat)

    @staticmethod
    def f_longwave_3d(k_hat):
        """(3 k k - I)/3 in the orientation basis"""
        k_hat = _unit(k_hat)
        f = (3 * np.outer(k_hat, k_hat) - np.eye(3)) / 3
        return StructureFactor(f=f, f_perp=-1 / 3, f_par=2 / 3, k_hat=k_hat)

    @staticmethod
    def f_layer():
        """Square-layer factor with z the layer normal"""
        return StructureFactor(f=np.diag([-1 / 3, -1 / 3, 2 / 3]), f_perp=-1 / 3, f_par=2 / 3)

    @staticmethod
    def split_transverse_longitudinal(f, k_hat, tol=1e-10):
        """
        f_par = k.f.k; f_perp is the doubly degenerate eigenvalue orthogonal to k
        """
        f = np.asarray(f, dtype=float)
        k_hat = _unit(k_hat)
        f_par = float(k_hat @ f @ k_hat)

        # Rows 1 and 2 of V^T span the plane orthogonal to k_hat
        _, _, vt = np.linalg.svd(k_hat[None, :])
        plane = vt[1:]
        block = plane @ f @ plane.T
        eigenvalues = np.linalg.eigvalsh((block + block.T) / 2)
        if abs(eigenvalues[1] - eigenvalues[0]) > tol:
            raise AnisotropyError(
                f"Transverse eigenvalues differ: {eigenvalues[0]!r} vs {eigenvalues[1]!r}",
                eigenvalues=eigenvalues,
            )
        return float(eigenvalues.mean()), f_par

    @staticmethod
    def mu_partial_sum(cutoff):
        """Sum n^-3 for n <= cutoff plus the quarter-plane sum with both indices <= cutoff"""
        n = np.arange(1, cutoff + 1, dtype=float)
        total = np.sum(n[::-1] ** -3)
        n2 = n ** 2
        chunk = max(1, 4_000_000 // cutoff)
        for start in range(0, cutoff, chunk):
            rows = n2[start:start + chunk]
            total += np.sum((rows[:, None] + n2[None, :]) ** -1.5)
        return float(total)

    @staticmethod
    def mu_tail_bounds(cutoff):
        """Integral lower/upper bounds on the omitted terms"""
        m = float(cutoff)
        b = m + 1.0
        upper = 1 / (2 * m ** 2) + np.sqrt(2) / m
        lower = 1 / (2 * b ** 2) + np.sqrt(2) / b - 2 / (b * (b + np.sqrt(1 + b ** 2)))
        return lower, upper

    @staticmethod
    def mu_2d(tol):
        """
        mu = (3/4pi)[sum n^-3 + sum (nx^2 + ny^2)^-3/2], doubling the cutoff
        until the certified error bound drops below tol * mu
        """
        if not tol > 0:
            raise DomainError(f"Tolerance must be positive, got {tol}")

        cache_key = f"mu_2d:{tol!r}"
        cached = cache.get(cache_key)
        if cached is not None:
            return cached

        prefactor = 3 / (4 * np.pi)
        cutoff = settings.MU_INITIAL_CUTOFF
        value = bound = None
        while cutoff <= settings.MU_MAX_CUTOFF:
            partial = LatticeService.mu_partial_sum(cutoff)
            lower, upper = LatticeService.mu_tail_bounds(cutoff)
            value = prefactor * (partial + (lower + upper) / 2)
            bound = prefactor * (upper - lower) / 2
            logger.debug(f"mu_2d cutoff={cutoff} value={value!r} bound={bound:.3e}")
            if bound <= tol * value:
                estimate = MuEstimate(value=value, error_bound=bound, cutoff=cutoff)
                cache.set(cache_key, estimate)
                logger.info(f"mu_2d converged: {value:.12f} +- {bound:.2e} | cutoff={cutoff}")
                return estimate
            cutoff *= 2

        raise ConvergenceError(
            f"mu_2d did not reach tol={tol} below cutoff {settings.MU_MAX_CUTOFF}",
            partial=value,
            error_bound=bound,
        )
