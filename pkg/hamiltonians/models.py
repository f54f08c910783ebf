"""
Coupling parameters and quadratic bosonic forms
"""
from dataclasses import dataclass, field
from django.conf import settings
from django.db import models
import numpy as np

from polariton_core.exceptions import DomainError, MalformedFormError, ShapeError, SoftModeError


class ModelKind(models.TextChoices):
    RENORMALIZED_HOPFIELD = 'renormalized-hopfield', 'Renormalized Hopfield (3D bulk)'
    LAYER_2D = 'layer-2d', '2D layer in a planar cavity'
    DICKE = 'dicke', 'Dicke-like single mode'
    BARE_HOPFIELD = 'bare-hopfield', 'Hopfield without dipole-dipole terms'
    CONDENSED_3D = 'condensed-3d', 'Condensed phase (3D bulk)'


class Phase(models.TextChoices):
    NORMAL = 'normal', 'Normal'
    CONDENSED = 'condensed', 'Condensed'


class ModeKind(models.TextChoices):
    PHOTON = 'photon', 'Photon'
    PHOTON_EVEN = 'photon-even', 'Even cavity photon'
    PHOTON_ODD = 'photon-odd', 'Odd cavity photon'
    MATTER = 'matter', 'Matter'


def renormalized(omega0, coupling, f):
    """omega0 sqrt(1 + 4 coupling^2 f); SoftModeError on a negative radicand"""
    radicand = 1.0 + 4.0 * coupling ** 2 * f
    if radicand < -settings.FORM_SYMMETRY_TOLERANCE:
        raise SoftModeError(
            f"1 + 4 x {coupling}^2 x {f} = {radicand:.6g} < 0: the mode has softened, use the condensed phase"
        )
    return omega0 * np.sqrt(max(radicand, 0.0))


@dataclass(frozen=True)
class ModeLabel:
    """
    kind: photon / photon-even / photon-odd / matter
    index: polarization lambda or orientation alpha, 1-based
    mode: cavity mode number n (0 for bulk)
    """
    kind: str
    index: int
    mode: int = 0

    @property
    def is_matter(self):
        return self.kind == ModeKind.MATTER

    @property
    def is_photon(self):
        return not self.is_matter

    def __str__(self):
        suffix = f",n={self.mode}" if self.mode else ''
        return f"{self.kind}[{self.index}{suffix}]"


@dataclass(frozen=True)
class CouplingSet:
    """
    Frequencies and couplings in reduced units.
    For the bulk lattice chi = eta; the layer keeps them independent.
    omega_k is a tuple: one entry in bulk, the cavity ladder for the layer.
    """
    omega0: float = 1.0
    omega_k: tuple = (1.0,)
    chi: float = 0.0
    eta: float = 0.0
    f_perp: float = -1 / 3
    f_par: float = 2 / 3

    def __post_init__(self):
        omega_k = tuple(float(w) for w in np.atleast_1d(self.omega_k))
        object.__setattr__(self, 'omega_k', omega_k)
        if not self.omega0 > 0:
            raise DomainError(f"omega0 must be positive, got {self.omega0}")
        if not omega_k or min(omega_k) <= 0:
            raise DomainError(f"Mode frequencies must be positive, got {omega_k}")
        if self.eta < 0 or self.chi < 0:
            raise DomainError(f"Couplings must be nonnegative, got eta={self.eta} chi={self.chi}")

    @classmethod
    def bulk(cls, omega_k=1.0, eta=0.0, omega0=1.0, f_perp=-1 / 3, f_par=2 / 3):
        return cls(omega0=omega0, omega_k=(omega_k,), chi=eta, eta=eta, f_perp=f_perp, f_par=f_par)

    @classmethod
    def layer(cls, modes, eta=0.0, chi=None, omega0=1.0, f_perp=-1 / 3, f_par=2 / 3):
        chi = eta if chi is None else chi
        return cls(omega0=omega0, omega_k=tuple(modes), chi=chi, eta=eta, f_perp=f_perp, f_par=f_par)

    @property
    def single_omega_k(self):
        if len(self.omega_k) != 1:
            raise ShapeError(f"Expected one mode frequency, got {len(self.omega_k)}")
        return self.omega_k[0]

    @property
    def g_k(self):
        """g_k = eta sqrt(omega0 / omega_k) per mode"""
        return tuple(self.eta * np.sqrt(self.omega0 / w) for w in self.omega_k)

    @property
    def omega_tilde_perp(self):
        return renormalized(self.omega0, self.chi, self.f_perp)

    @property
    def omega_tilde_par(self):
        return renormalized(self.omega0, self.chi, self.f_par)

    @property
    def eta_prime(self):
        """eta' = eta omega0 / omega_tilde_perp; infinite at the softening point"""
        omega_tilde = self.omega_tilde_perp
        if omega_tilde == 0:
            return float('inf') if self.eta > 0 else 0.0
        return self.eta * self.omega0 / omega_tilde

    @property
    def rabi_frequency(self):
        return self.eta * self.omega0

    @property
    def critical_eta(self):
        """Coupling where omega_tilde_perp vanishes, None when f_perp >= 0"""
        if self.f_perp >= 0:
            return None
        return 1.0 / (2.0 * np.sqrt(-self.f_perp))

    @property
    def phase(self):
        critical = self.critical_eta
        if critical is not None and self.chi > critical:
            return Phase.CONDENSED
        return Phase.NORMAL

    def with_eta(self, eta):
        """Same set at a new coupling; the bulk relation chi = eta is kept"""
        chi = eta if self.chi == self.eta else self.chi
        return CouplingSet(
            omega0=self.omega0, omega_k=self.omega_k, chi=chi, eta=eta,
            f_perp=self.f_perp, f_par=self.f_par,
        )

    def with_omega_k(self, omega_k):
        return CouplingSet(
            omega0=self.omega0, omega_k=omega_k, chi=self.chi, eta=self.eta,
            f_perp=self.f_perp, f_par=self.f_par,
        )


def _frozen(array):
    array = np.array(array, dtype=complex)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class QuadraticBosonForm:
    """
    H = sum A_ij a+_i a_j + 1/2 sum (B_ij a+_i a+_j + h.c.) + c0

    matter_dipole holds the real symmetric coefficient K of the matter
    dipole-dipole term sum K_ab (b_a + b+_a)(b_b + b+_b), already folded into
    A and B. It is what the matter-first diagonalization removes.
    """
    labels: tuple
    A: np.ndarray
    B: np.ndarray
    c0: float = 0.0
    matter_dipole: np.ndarray = None
    kind: str = ''
    phase: str = Phase.NORMAL
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, 'labels', labels)
        n = len(labels)
        A, B = np.asarray(self.A), np.asarray(self.B)
        if A.shape != (n, n) or B.shape != (n, n):
            raise ShapeError(f"A {A.shape} and B {B.shape} do not match {n} mode labels")

        tolerance = settings.FORM_SYMMETRY_TOLERANCE
        scale = max(1.0, float(np.max(np.abs(A), initial=0.0)), float(np.max(np.abs(B), initial=0.0)))
        hermitian = float(np.max(np.abs(A - A.conj().T), initial=0.0))
        symmetric = float(np.max(np.abs(B - B.T), initial=0.0))
        if hermitian > tolerance * scale:
            raise MalformedFormError(f"A is not Hermitian (deviation {hermitian:.3e})")
        if symmetric > tolerance * scale:
            raise MalformedFormError(f"B is not symmetric (deviation {symmetric:.3e})")

        object.__setattr__(self, 'A', _frozen(A))
        object.__setattr__(self, 'B', _frozen(B))
        n_matter = len(self.matter_indices)
        dipole = np.zeros((n_matter, n_matter)) if self.matter_dipole is None else np.array(self.matter_dipole, dtype=float)
        if dipole.shape != (n_matter, n_matter):
            raise ShapeError(f"matter_dipole {dipole.shape} does not match {n_matter} matter modes")
        dipole.setflags(write=False)
        object.__setattr__(self, 'matter_dipole', dipole)

    @property
    def n_modes(self):
        return len(self.labels)

    @property
    def matter_indices(self):
        return tuple(i for i, label in enumerate(self.labels) if label.is_matter)

    @property
    def photon_indices(self):
        return tuple(i for i, label in enumerate(self.labels) if label.is_photon)

    def indices(self, kind):
        return tuple(i for i, label in enumerate(self.labels) if label.kind == kind)

    @property
    def dynamical_matrix(self):
        """[[A, B], [-B*, -A*]]"""
        return np.block([[self.A, self.B], [-self.B.conj(), -self.A.conj()]])

    @property
    def hamiltonian_matrix(self):
        """Hermitian matrix [[A, B], [B*, A*]] of the Nambu form"""
        return np.block([[self.A, self.B], [self.B.conj(), self.A.conj()]])


@dataclass(frozen=True)
class ModelConfig:
    """Validated model document"""
    kind: str
    coupling: CouplingSet
    phase: str = Phase.NORMAL
    k_max: int = 1
