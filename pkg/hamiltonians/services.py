"""
Service layer assembling the multipolar-gauge Hamiltonians as quadratic forms
"""
import numpy as np
import logging

from .models import (
    CouplingSet,
    ModeKind,
    ModeLabel,
    ModelKind,
    Phase,
    QuadraticBosonForm,
    renormalized,
)
from lattice.models import StructureFactor
from polariton_core.exceptions import DomainError, PhaseDomainError, ShapeError

logger = logging.getLogger('hamiltonians')

Z_AXIS = np.array([0.0, 0.0, 1.0])


class _FormBuilder:
    """Accumulates A, B and c0 term by term"""

    def __init__(self, labels):
        self.labels = tuple(labels)
        n = len(self.labels)
        self.A = np.zeros((n, n), dtype=complex)
        self.B = np.zeros((n, n), dtype=complex)
        self.c0 = 0.0

    def number(self, i, frequency):
        self.A[i, i] += frequency

    def position_squared(self, indices, K):
        """sum K_ab (b_a + b+_a)(b_b + b+_b) for real symmetric K"""
        K = np.asarray(K, dtype=float)
        block = np.ix_(indices, indices)
        self.A[block] += 2 * K
        self.B[block] += 2 * K
        self.c0 += float(np.trace(K))

    def momentum_position(self, i, j, C):
        """-i C (a_i - a+_i)(b_j + b+_j)"""
        if C == 0:
            return
        self.A[i, j] += 1j * C
        self.A[j, i] += -1j * C
        self.B[i, j] += 1j * C
        self.B[j, i] += 1j * C

    def build(self, **kwargs):
        return QuadraticBosonForm(labels=self.labels, A=self.A, B=self.B, c0=self.c0, **kwargs)


class HamiltonianService:
    """Service class for building quadratic bosonic Hamiltonians"""

    @staticmethod
    def renormalized_frequency(omega0, coupling, f):
        """omega0 sqrt(1 + 4 coupling^2 f)"""
        return renormalized(omega0, coupling, f)

    @staticmethod
    def eta_from_eta_prime(eta_prime, f_perp):
        """Invert eta'^2 = eta^2 / (1 + 4 eta^2 f_perp)"""
        radicand = 1.0 - 4.0 * eta_prime ** 2 * f_perp
        if radicand <= 0:
            raise DomainError(f"eta'={eta_prime} is unreachable for f_perp={f_perp}")
        return eta_prime / np.sqrt(radicand)

    @staticmethod
    def cavity_ladder(omega_1, k_max):
        """omega_n = n omega_1 for n = 1..k_max"""
        if k_max < 1:
            raise DomainError(f"K_max must be at least 1, got {k_max}")
        return tuple(n * omega_1 for n in range(1, k_max + 1))

    @staticmethod
    def transverse_polarizations(k_hat):
        """
        Two orthonormal vectors spanning the plane orthogonal to k_hat.
        Axes least aligned with k_hat are used first, so k_hat = z gives x and y.
        """
        k_hat = np.asarray(k_hat, dtype=float)
        order = np.argsort(np.abs(k_hat), kind='stable')
        first = np.eye(3)[order[0]]
        first = first - (first @ k_hat) * k_hat
        first /= np.linalg.norm(first)
        second = np.cross(k_hat, first)
        return np.stack([first, second])

    @staticmethod
    def structure_tensor(params, f=None):
        if f is None:
            return np.diag([params.f_perp, params.f_perp, params.f_par]), Z_AXIS
        if isinstance(f, StructureFactor):
            k_hat = Z_AXIS if f.k_hat is None else np.asarray(f.k_hat, dtype=float)
            return np.asarray(f.f, dtype=float), k_hat
        f = np.asarray(f, dtype=float)
        if f.shape != (3, 3):
            raise ShapeError(f"Structure factor must be 3x3, got {f.shape}")
        return f, Z_AXIS

    @staticmethod
    def build_bulk_3d(params, f=None, kind=ModelKind.RENORMALIZED_HOPFIELD):
        """
        Two photon polarizations and three matter orientations at one k.
        f defaults to diag(f_perp, f_perp, f_par) with k_hat = z.
        """
        f, k_hat = HamiltonianService.structure_tensor(params, f)
        omega_k, omega0 = params.single_omega_k, params.omega0
        polarizations = HamiltonianService.transverse_polarizations(k_hat)

        labels = [ModeLabel(ModeKind.PHOTON, lam) for lam in (1, 2)]
        labels += [ModeLabel(ModeKind.MATTER, alpha) for alpha in (1, 2, 3)]
        builder = _FormBuilder(labels)
        matter = [2, 3, 4]

        for lam in (0, 1):
            builder.number(lam, omega_k)
        for index in matter:
            builder.number(index, omega0)

        dipole = params.chi ** 2 * omega0 * f
        p_squared = params.eta ** 2 * omega0 * (polarizations.T @ polarizations)
        builder.position_squared(matter, p_squared + dipole)

        coupling = params.eta * np.sqrt(omega0 * omega_k)
        for lam in (0, 1):
            for alpha, index in enumerate(matter):
                builder.momentum_position(lam, index, coupling * polarizations[lam, alpha])

        logger.debug(f"Bulk form: omega_k={omega_k} eta={params.eta} chi={params.chi}")
        return builder.build(matter_dipole=dipole, kind=kind, phase=Phase.NORMAL)

    @staticmethod
    def build_bare_hopfield(params):
        """Bulk form without dipole-dipole terms"""
        bare = CouplingSet(
            omega0=params.omega0, omega_k=params.omega_k, chi=0.0, eta=params.eta,
            f_perp=0.0, f_par=0.0,
        )
        return HamiltonianService.build_bulk_3d(bare, np.zeros((3, 3)), kind=ModelKind.BARE_HOPFIELD)

    @staticmethod
    def build_layer_2d(params, k_max=None):
        """
        Even and odd cavity photons for each of the first k_max modes plus three
        matter orientations; z is the layer normal. A single supplied mode
        frequency is extended to the ladder n omega_1.
        """
        modes = params.omega_k
        k_max = len(modes) if k_max is None else k_max
        if k_max < 1:
            raise DomainError(f"K_max must be at least 1, got {k_max}")
        if len(modes) == 1 and k_max > 1:
            modes = HamiltonianService.cavity_ladder(modes[0], k_max)
        if len(modes) < k_max:
            raise ShapeError(f"K_max={k_max} exceeds the {len(modes)} supplied cavity modes")
        modes = modes[:k_max]
        if any(b <= a for a, b in zip(modes, modes[1:])):
            raise DomainError(f"Cavity modes must be strictly increasing, got {modes}")

        labels = []
        for n in range(1, k_max + 1):
            labels += [ModeLabel(ModeKind.PHOTON_EVEN, lam, n) for lam in (1, 2)]
            labels += [ModeLabel(ModeKind.PHOTON_ODD, lam, n) for lam in (1, 2)]
        labels += [ModeLabel(ModeKind.MATTER, alpha) for alpha in (1, 2, 3)]
        builder = _FormBuilder(labels)
        matter = [4 * k_max + alpha for alpha in range(3)]
        omega0 = params.omega0

        for n, omega_n in enumerate(modes):
            for offset in range(4):
                builder.number(4 * n + offset, omega_n)
        for index in matter:
            builder.number(index, omega0)

        in_plane = np.diag([1.0, 1.0, 0.0])
        dipole = params.chi ** 2 * omega0 * np.diag([params.f_perp, params.f_perp, params.f_par])
        builder.position_squared(matter, k_max * params.eta ** 2 * omega0 * in_plane + dipole)

        for n, omega_n in enumerate(modes):
            coupling = params.eta * np.sqrt(omega0 * omega_n)
            for lam in (0, 1):
                builder.momentum_position(4 * n + lam, matter[lam], coupling)

        logger.debug(f"Layer form: K_max={k_max} eta={params.eta} chi={params.chi}")
        return builder.build(
            matter_dipole=dipole,
            kind=ModelKind.LAYER_2D,
            phase=Phase.NORMAL,
            metadata={'modes': tuple(modes)},
        )

    @staticmethod
    def build_dicke_like(params):
        """omega0 b+b + omega_k a+a - i eta sqrt(omega_k omega0)(a+ - a)(b+ + b)"""
        omega_k, omega0 = params.single_omega_k, params.omega0
        builder = _FormBuilder([ModeLabel(ModeKind.PHOTON, 1), ModeLabel(ModeKind.MATTER, 1)])
        builder.number(0, omega_k)
        builder.number(1, omega0)
        builder.momentum_position(0, 1, params.eta * np.sqrt(omega_k * omega0))
        return builder.build(kind=ModelKind.DICKE, phase=Phase.NORMAL)

    @staticmethod
    def build_condensed_3d(params, f_perp=None):
        """
        Transverse sector of the condensed phase, in the thermodynamic limit.

        The shifted operators are expanded to quadratic order with the site
        count taken to infinity, so there is no N argument and no finite-size
        correction. Only the two transverse photon polarizations and the two
        transverse matter orientations appear; the longitudinal matter mode is
        left out and include_longitudinal has no effect on this form.
        The condensate points along the first transverse axis, so orientation 1
        carries the amplitude mode and orientation 2 the Goldstone mode.
        """
        f_perp = params.f_perp if f_perp is None else f_perp
        if f_perp >= 0:
            raise PhaseDomainError(f"No condensed phase for f_perp={f_perp} >= 0")
        eta, omega0, omega_k = params.eta, params.omega0, params.single_omega_k
        eta_c = 1.0 / (2.0 * np.sqrt(-f_perp))
        if not eta > eta_c:
            raise PhaseDomainError(f"eta={eta} is not above the critical coupling {eta_c:.8f}")

        u = 4 * eta ** 2 * f_perp
        s = (u + 1) / (2 * u)
        labels = [ModeLabel(ModeKind.PHOTON, lam) for lam in (1, 2)]
        labels += [ModeLabel(ModeKind.MATTER, alpha) for alpha in (1, 2)]
        builder = _FormBuilder(labels)

        builder.number(0, omega_k)
        builder.number(1, omega_k)
        matter_frequency = omega0 * (1 - u) / 2
        builder.number(2, matter_frequency)
        builder.number(3, matter_frequency)

        shared = eta ** 2 * omega0 * (1 + f_perp) * (u - 1) / (2 * u)
        amplitude = eta ** 2 * omega0 * s * ((3 * u - 1) / (u - 1) - 4 * (1 + f_perp))
        builder.position_squared([2, 3], np.diag([shared + amplitude, shared]))

        base = eta * np.sqrt(omega0 * omega_k)
        builder.momentum_position(0, 2, base * (1 - 2 * s) / np.sqrt(1 - s))
        builder.momentum_position(1, 3, base * np.sqrt(1 - s))

        logger.debug(f"Condensed form: eta={eta} f_perp={f_perp} sumB2/N={s:.6g}")
        return builder.build(
            kind=ModelKind.CONDENSED_3D,
            phase=Phase.CONDENSED,
            metadata={'sum_b2_over_n': s, 'matter_frequency': matter_frequency},
        )

    @staticmethod
    def build(config):
        """Form for a validated ModelConfig"""
        params = config.coupling
        if config.kind == ModelKind.LAYER_2D:
            return HamiltonianService.build_layer_2d(params, config.k_max)
        if config.kind == ModelKind.DICKE:
            return HamiltonianService.build_dicke_like(params)
        if config.kind == ModelKind.BARE_HOPFIELD:
            return HamiltonianService.build_bare_hopfield(params)
        if config.kind == ModelKind.CONDENSED_3D or config.phase == Phase.CONDENSED:
            return HamiltonianService.build_condensed_3d(params)
        return HamiltonianService.build_bulk_3d(params)
