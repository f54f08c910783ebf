"""
Service layer for the two-level operator algebra and the generalized
Holstein-Primakoff boson map, verified as exact matrix identities
"""
from itertools import product
from django.conf import settings
from scipy.special import comb
import numpy as np
import logging

from .models import (
    GROUND,
    ORIENTATIONS,
    AlgebraReport,
    CollectiveModes,
    MappedSpinOperators,
    SiteOperatorSet,
    TruncatedBosonSet,
)
from polariton_core.exceptions import AlgebraViolationError, DomainError, SizeError

logger = logging.getLogger('hp_algebra')

SPIN = 0.5
MAX_FOCK_DIMENSION = 5000


def _norm(matrix):
    return float(np.max(np.abs(matrix))) if np.size(matrix) else 0.0


def _commutator(a, b):
    return a @ b - b @ a


class HPAlgebraService:
    """Service class for building and checking operator algebras"""

    @staticmethod
    def build_site_operators():
        """sigma^-_alpha = |-><+_alpha|, sigma^z = diag(1, 1, 1, -1)"""
        minus = []
        for alpha in ORIENTATIONS:
            matrix = np.zeros((4, 4), dtype=complex)
            matrix[GROUND, alpha] = 1.0
            minus.append(matrix)
        plus = [m.conj().T for m in minus]
        sigma_x = [p + m for p, m in zip(plus, minus)]
        sigma_y = [1j * (m - p) for p, m in zip(plus, minus)]
        sigma_z = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
        return SiteOperatorSet(
            sigma_minus=tuple(minus),
            sigma_plus=tuple(plus),
            sigma_x=tuple(sigma_x),
            sigma_y=tuple(sigma_y),
            sigma_z=sigma_z,
        )

    @staticmethod
    def expected_ladder_norm(m, delta, raising):
        """|c+-|^2 = s(s + delta) - m(m +- delta) for s = 1/2"""
        sign = 1.0 if raising else -1.0
        return SPIN * (SPIN + delta) - m * (m + sign * delta)

    @staticmethod
    def verify_site_algebra(ops, raise_on_failure=True):
        """
        Check adjointness, nilpotency, [Sz, S+-] = +-S+-, saturation S+S+ = 0,
        Hermiticity and the ladder-norm formula on every basis state.
        The ground state carries no orientation; it is paired with the channel under test.
        """
        tolerance = settings.ALGEBRA_TOLERANCE
        report = AlgebraReport()
        s_z = ops.s_z

        for alpha in ORIENTATIONS:
            label = alpha + 1
            s_plus, s_minus = ops.s_plus[alpha], ops.s_minus[alpha]
            report.add(f"S+_{label} = (S-_{label})^dagger", _norm(s_plus - s_minus.conj().T), tolerance)
            report.add(f"(S-_{label})^2 = 0", _norm(s_minus @ s_minus), tolerance)
            report.add(f"[Sz, S+_{label}] - S+_{label} = 0", _norm(_commutator(s_z, s_plus) - s_plus), tolerance)
            report.add(f"[Sz, S-_{label}] + S-_{label} = 0", _norm(_commutator(s_z, s_minus) + s_minus), tolerance)
            report.add(f"sigma_x_{label} Hermitian", _norm(ops.sigma_x[alpha] - ops.sigma_x[alpha].conj().T), tolerance)
            report.add(f"sigma_y_{label} Hermitian", _norm(ops.sigma_y[alpha] - ops.sigma_y[alpha].conj().T), tolerance)
            for beta in ORIENTATIONS:
                report.add(
                    f"S+_{label} S+_{beta + 1} = 0",
                    _norm(s_plus @ ops.s_plus[beta]),
                    tolerance,
                )

        report.add(
            "sigma_z spectrum {-1, 1, 1, 1}",
            _norm(np.sort(np.linalg.eigvalsh(ops.sigma_z)) - np.array([-1.0, 1.0, 1.0, 1.0])),
            tolerance,
        )

        # Ladder norms <m|S-+ S+-|m> against s(s + delta) - m(m +- delta)
        deviation = 0.0
        for alpha in ORIENTATIONS:
            lower_raise = ops.s_minus[alpha] @ ops.s_plus[alpha]
            raise_lower = ops.s_plus[alpha] @ ops.s_minus[alpha]
            for beta in ORIENTATIONS:
                delta = 1.0 if alpha == beta else 0.0
                deviation = max(
                    deviation,
                    abs(lower_raise[beta, beta] - HPAlgebraService.expected_ladder_norm(SPIN, delta, True)),
                    abs(raise_lower[beta, beta] - HPAlgebraService.expected_ladder_norm(SPIN, delta, False)),
                )
            deviation = max(
                deviation,
                abs(lower_raise[GROUND, GROUND] - HPAlgebraService.expected_ladder_norm(-SPIN, 1.0, True)),
                abs(raise_lower[GROUND, GROUND] - HPAlgebraService.expected_ladder_norm(-SPIN, 1.0, False)),
            )
        report.add("|c+-|^2 = s(s+delta) - m(m+-delta)", deviation, tolerance)

        if raise_on_failure and not report.passed:
            failure = report.failures[0]
            raise AlgebraViolationError(
                f"Relation violated: {failure.relation} (deviation {failure.deviation:.3e})",
                relation=failure.relation,
                report=report,
            )
        return report

    @staticmethod
    def truncated_bosons(n_modes, n_max):
        """Fock space of n_modes bosons with total occupation <= n_max"""
        if n_max < 1:
            raise DomainError(f"Truncation level must be at least 1, got {n_max}")
        dimension = int(comb(n_modes + n_max, n_max, exact=True))
        if dimension > MAX_FOCK_DIMENSION:
            raise SizeError(f"Fock space of {n_modes} modes at n_max={n_max} has dimension {dimension}")

        states = sorted(
            (state for state in product(range(n_max + 1), repeat=n_modes) if sum(state) <= n_max),
            key=lambda state: (sum(state), tuple(-n for n in state)),
        )
        mapping = {state: i for i, state in enumerate(states)}

        annihilators = []
        for mode in range(n_modes):
            matrix = np.zeros((dimension, dimension), dtype=complex)
            for state, column in mapping.items():
                if state[mode] == 0:
                    continue
                lowered = list(state)
                lowered[mode] -= 1
                matrix[mapping[tuple(lowered)], column] = np.sqrt(state[mode])
            annihilators.append(matrix)

        return TruncatedBosonSet(
            n_modes=n_modes,
            n_max=n_max,
            states=tuple(states),
            annihilators=tuple(annihilators),
        )

    @staticmethod
    def hp_map_matrices(n_max):
        """
        S+_alpha = b+_alpha sqrt(1 - N), S-_alpha = sqrt(1 - N) b_alpha, Sz = N - 1/2.
        The square root is taken on the diagonal number operator with negative
        arguments clamped to zero.
        """
        bosons = HPAlgebraService.truncated_bosons(len(ORIENTATIONS), n_max)
        total = bosons.total_occupation.astype(float)
        root = np.diag(np.sqrt(np.clip(1.0 - total, 0.0, None))).astype(complex)

        s_plus = tuple(creator @ root for creator in bosons.creators)
        s_minus = tuple(root @ b for b in bosons.annihilators)
        s_z = np.diag(total - SPIN).astype(complex)

        physical = np.zeros((bosons.dimension, 4), dtype=complex)
        for alpha in ORIENTATIONS:
            occupation = [0, 0, 0]
            occupation[alpha] = 1
            physical[bosons.index(occupation), alpha] = 1.0
        physical[bosons.index((0, 0, 0)), GROUND] = 1.0

        return MappedSpinOperators(
            bosons=bosons,
            s_plus=s_plus,
            s_minus=s_minus,
            s_z=s_z,
            physical=physical,
        )

    @staticmethod
    def verify_hp_map(mapped, ops=None):
        """Mapped operators restricted to the physical subspace reproduce the site algebra"""
        ops = ops or HPAlgebraService.build_site_operators()
        tolerance = settings.ALGEBRA_TOLERANCE
        report = AlgebraReport()
        bosons = mapped.bosons
        v = mapped.physical
        leak = np.eye(bosons.dimension) - v @ v.conj().T
        tag = f"n_max={bosons.n_max}"

        for alpha in ORIENTATIONS:
            label = alpha + 1
            for name, image, target in (
                ('S+', mapped.s_plus[alpha], ops.s_plus[alpha]),
                ('S-', mapped.s_minus[alpha], ops.s_minus[alpha]),
            ):
                report.add(f"{tag}: HP {name}_{label} on physical subspace", _norm(v.conj().T @ image @ v - target), tolerance)
                report.add(f"{tag}: HP {name}_{label} closes on physical subspace", _norm(leak @ image @ v), tolerance)
            linear = v.conj().T @ (bosons.annihilators[alpha] - mapped.s_minus[alpha]) @ v
            report.add(f"{tag}: S-_{label} - b_{label} on <=1 excitation", _norm(linear), tolerance)

        report.add(f"{tag}: HP Sz on physical subspace", _norm(v.conj().T @ mapped.s_z @ v - ops.s_z), tolerance)

        below = bosons.projector_below(bosons.n_max)
        identity = np.eye(bosons.dimension)
        deviation = 0.0
        for alpha, b in enumerate(bosons.annihilators):
            for beta, creator in enumerate(bosons.creators):
                expected = identity if alpha == beta else 0.0
                deviation = max(deviation, _norm((_commutator(b, creator) - expected) @ below))
        report.add(f"{tag}: [b_a, b+_b] = delta below truncation", deviation, tolerance)

        fragment = sum(mapped.s_plus[alpha] + mapped.s_minus[alpha] for alpha in ORIENTATIONS) + mapped.s_z
        report.add(f"{tag}: mapped Sx + Sz fragment Hermitian", _norm(fragment - fragment.conj().T), tolerance)
        return report

    @staticmethod
    def linearization_error_by_occupation(n_max):
        """Largest |(S-_alpha - b_alpha)| column entry for each total occupation"""
        mapped = HPAlgebraService.hp_map_matrices(n_max)
        total = mapped.bosons.total_occupation
        errors = {}
        for level in range(n_max + 1):
            columns = total == level
            errors[level] = max(
                _norm((mapped.bosons.annihilators[alpha] - mapped.s_minus[alpha])[:, columns])
                for alpha in ORIENTATIONS
            )
        return errors

    @staticmethod
    def chain_wavevectors(n_sites):
        """Periodic chain momenta 2 pi m / N"""
        return tuple(2 * np.pi * m / n_sites for m in range(n_sites))

    @staticmethod
    def collective_mode_matrices(n_sites, k, n_max=2, bosons=None):
        """b_{k,alpha} = N^-1/2 sum_n exp(-i k n) b_{n,alpha} on a periodic chain"""
        if not 1 <= n_sites <= 4:
            raise SizeError(f"Collective modes are built for 1 to 4 sites, got {n_sites}")
        winding = k * n_sites / (2 * np.pi)
        if abs(winding - round(winding)) > 1e-9:
            raise DomainError(f"k={k} is not a momentum of a {n_sites}-site periodic chain")

        bosons = bosons or HPAlgebraService.truncated_bosons(len(ORIENTATIONS) * n_sites, n_max)
        matrices = []
        for alpha in ORIENTATIONS:
            matrix = sum(
                np.exp(-1j * k * n) * bosons.annihilators[len(ORIENTATIONS) * n + alpha]
                for n in range(n_sites)
            )
            matrices.append(matrix / np.sqrt(n_sites))
        return CollectiveModes(bosons=bosons, n_sites=n_sites, k=k, matrices=tuple(matrices))

    @staticmethod
    def verify_collective(n_sites, n_max=2):
        """Fourier-mode commutators and the number-operator identity"""
        tolerance = settings.ALGEBRA_TOLERANCE
        report = AlgebraReport()
        bosons = HPAlgebraService.truncated_bosons(len(ORIENTATIONS) * n_sites, n_max)
        modes = [
            HPAlgebraService.collective_mode_matrices(n_sites, k, n_max, bosons)
            for k in HPAlgebraService.chain_wavevectors(n_sites)
        ]
        below = bosons.projector_below(n_max)
        identity = np.eye(bosons.dimension)
        tag = f"N={n_sites}"

        deviation = 0.0
        for i, first in enumerate(modes):
            for j, second in enumerate(modes):
                for alpha in ORIENTATIONS:
                    for beta in ORIENTATIONS:
                        expected = identity if (i == j and alpha == beta) else 0.0
                        commutator = _commutator(first.matrices[alpha], second.matrices[beta].conj().T)
                        deviation = max(deviation, _norm((commutator - expected) @ below))
        report.add(f"{tag}: [b_k,a, b+_k',b] = delta delta", deviation, tolerance)

        site_number = sum(creator @ b for creator, b in zip(bosons.creators, bosons.annihilators))
        mode_number = sum(
            m.conj().T @ m for collective in modes for m in collective.matrices
        )
        report.add(f"{tag}: sum_n b+_n b_n = sum_k b+_k b_k", _norm(site_number - mode_number), tolerance)
        return report

    @staticmethod
    def verify_all(n_max_values=(1, 2, 3), max_sites=3):
        """Run every relation check and return one report"""
        report = HPAlgebraService.verify_site_algebra(HPAlgebraService.build_site_operators(), raise_on_failure=False)
        for n_max in n_max_values:
            report.extend(HPAlgebraService.verify_hp_map(HPAlgebraService.hp_map_matrices(n_max)))
        for n_sites in range(1, max_sites + 1):
            report.extend(HPAlgebraService.verify_collective(n_sites))
        logger.info(f"Algebra verification: {len(report.checks)} checks | failures={len(report.failures)}")
        return report
