"""
Service layer for symplectic (Hopfield-Bogoliubov) diagonalization
"""
from django.conf import settings
from scipy import linalg
from scipy.optimize import linear_sum_assignment
import numpy as np
import logging

from .models import SymplecticSpectrum
from hamiltonians.models import Phase, QuadraticBosonForm
from polariton_core.exceptions import PhaseDomainError, StabilityError

logger = logging.getLogger('bogoliubov')


def _metric(n):
    return np.diag(np.concatenate([np.ones(n), -np.ones(n)]))


def _canonical_basis(W):
    """
    Basis of span(W) fixed by the subspace alone: orthonormalize, pick pivot
    rows, then scale so the pivot rows form the identity. Pivots are taken in
    mode-label order.
    """
    Q, _ = np.linalg.qr(W)
    _, _, pivots = linalg.qr(Q.conj().T, pivoting=True)
    rows = np.sort(pivots[:W.shape[1]])
    return Q @ np.linalg.inv(Q[rows, :])


def _symplectic_gram(W, metric):
    """Gram-Schmidt in the indefinite product w^H Sigma w; None on a non-positive norm"""
    basis = []
    for w in W.T:
        for b in basis:
            w = w - (b.conj() @ metric @ w) * b
        norm = float(np.real(w.conj() @ metric @ w))
        if norm <= 0:
            return None
        basis.append(w / np.sqrt(norm))
    return np.stack(basis, axis=1)


def _blocks(frequencies, tolerance):
    """Consecutive runs of frequencies closer than tolerance"""
    blocks, current = [], [0]
    for i in range(1, len(frequencies)):
        if frequencies[i] - frequencies[i - 1] <= tolerance:
            current.append(i)
        else:
            blocks.append(tuple(current))
            current = [i]
    blocks.append(tuple(current))
    return tuple(blocks)


class BogoliubovService:
    """Service class for normal modes of quadratic bosonic forms"""

    @staticmethod
    def symplectic_spectrum(form):
        """
        Eigenvalues of the dynamical matrix [[A, B], [-B*, -A*]].
        Stable when every eigenvalue is real and the set is +- paired; the
        positive branch is returned ascending. Eigenvalues inside the zero-mode
        band are set to zero and the transform is then omitted.
        """
        n = form.n_modes
        D = form.dynamical_matrix
        eigenvalues, vectors = linalg.eig(D)

        scale = max(1.0, float(np.max(np.abs(D))))
        norm = float(np.linalg.norm(D, 2))
        zero_band = max(
            settings.ZERO_MODE_TOLERANCE * scale,
            10.0 * np.sqrt(np.finfo(float).eps) * norm,
        )
        imaginary_tolerance = settings.PAIRING_TOLERANCE * scale

        zero = np.abs(eigenvalues) <= zero_band
        unstable = (~zero) & (np.abs(eigenvalues.imag) > imaginary_tolerance)
        unstable_modes = tuple(complex(value) for value in eigenvalues[unstable] if value.imag > 0)

        real = np.where(zero, 0.0, eigenvalues.real)
        ascending = np.sort(real)
        pairing_error = float(np.max(np.abs(ascending + ascending[::-1]), initial=0.0))
        stable = not np.any(unstable) and pairing_error <= settings.PAIRING_TOLERANCE * scale

        order = np.argsort(real, kind='stable')[::-1][:n][::-1]
        frequencies = np.clip(real[order], 0.0, None)
        zero_modes = int(np.count_nonzero(zero) // 2)
        blocks = _blocks(frequencies, settings.DEGENERACY_TOLERANCE * scale)
        degenerate_blocks = tuple(block for block in blocks if len(block) > 1)

        transform = None
        if stable and zero_modes == 0:
            transform = BogoliubovService._transform(vectors[:, order], blocks, n)
            if transform is None:
                logger.warning(f"Non-positive symplectic norm in a {n}-mode form; transform omitted")
        elif not stable:
            logger.debug(f"Unstable form: {len(unstable_modes)} complex mode(s), pairing error {pairing_error:.2e}")
        if degenerate_blocks:
            logger.debug(f"Degenerate blocks: {degenerate_blocks}")

        return SymplecticSpectrum(
            frequencies=frequencies,
            stable=bool(stable),
            unstable_modes=unstable_modes,
            transform=transform,
            degenerate_blocks=degenerate_blocks,
            zero_modes=zero_modes,
            pairing_error=pairing_error,
        )

    @staticmethod
    def _transform(positive_vectors, blocks, n):
        metric = _metric(n)
        columns = []
        for block in blocks:
            W = _canonical_basis(positive_vectors[:, list(block)])
            W = _symplectic_gram(W, metric)
            if W is None:
                return None
            columns.append(W)
        W = np.concatenate(columns, axis=1)
        U, V = W[:n], W[n:]
        return np.block([[U, V.conj()], [V, U.conj()]])

    @staticmethod
    def matter_prediagonalize(form):
        """
        Diagonalize the matter oscillators with their dipole-dipole terms first.
        The returned form has matter modes at omega_tilde_alpha, rescaled
        light-matter couplings and the same symplectic spectrum.
        """
        if form.phase == Phase.CONDENSED:
            raise PhaseDomainError("The condensed form has no dipole-only matter block")
        matter = list(form.matter_indices)
        n, m = form.n_modes, len(matter)
        block = np.ix_(matter, matter)
        K = form.matter_dipole
        A_mat = form.A[block] - form.B[block] + 2 * K
        B_mat = 2 * K

        sub = QuadraticBosonForm(labels=[form.labels[i] for i in matter], A=A_mat, B=B_mat)
        spectrum = BogoliubovService.symplectic_spectrum(sub)
        if not spectrum.stable or spectrum.zero_modes or spectrum.transform is None:
            raise PhaseDomainError(
                "A matter frequency has softened (omega_tilde^2 <= 0); build the condensed-phase form instead"
            )

        T = spectrum.transform
        U, V = T[:m, :m], T[m:, :m]
        _, assignment = linear_sum_assignment(-np.abs(U) ** 2)
        U, V = U[:, assignment], V[:, assignment]
        omega_tilde = spectrum.frequencies[assignment]
        phases = np.diag(U) / np.abs(np.diag(U))
        U, V = U / phases, V / phases

        full = np.eye(2 * n, dtype=complex)
        rows, cols = np.array(matter), np.array(matter) + n
        full[np.ix_(rows, rows)] = U
        full[np.ix_(rows, cols)] = V.conj()
        full[np.ix_(cols, rows)] = V
        full[np.ix_(cols, cols)] = U.conj()

        transformed = full.conj().T @ form.hamiltonian_matrix @ full
        A_new, B_new = transformed[:n, :n], transformed[:n, n:]
        A_new = (A_new + A_new.conj().T) / 2
        B_new = (B_new + B_new.T) / 2
        c0 = form.c0 + 0.5 * float(np.real(np.trace(A_new) - np.trace(form.A)))

        logger.debug(f"Matter prediagonalization: omega_tilde={tuple(np.round(omega_tilde, 12))}")
        return QuadraticBosonForm(
            labels=form.labels,
            A=A_new,
            B=B_new,
            c0=c0,
            kind=form.kind,
            phase=form.phase,
            metadata={**form.metadata, 'omega_tilde': tuple(float(w) for w in omega_tilde)},
        )

    @staticmethod
    def ground_state_check(form):
        """Zero-point shift 1/2 (sum Omega - tr A) of a stable form"""
        spectrum = BogoliubovService.symplectic_spectrum(form)
        if not spectrum.stable:
            raise StabilityError(f"Form is unstable: {spectrum.unstable_modes}")
        return 0.5 * (float(np.sum(spectrum.frequencies)) - float(np.real(np.trace(form.A))))
