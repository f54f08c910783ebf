"""
Shared factories for value types used across the app test suites
"""
import factory
import pytest

from expdata.models import MeasurementSet
from hamiltonians.models import CouplingSet


class CouplingSetFactory(factory.Factory):
    """Bulk coupling set at omega_k = omega0 = 1, below the critical coupling"""

    class Meta:
        model = CouplingSet

    omega0 = 1.0
    omega_k = (1.0,)
    eta = 0.5
    chi = factory.SelfAttribute('eta')
    f_perp = -1 / 3
    f_par = 2 / 3

    class Params:
        layer = factory.Trait(omega_k=(0.8, 1.6, 2.4), chi=0.3)
        bare = factory.Trait(chi=0.0, f_perp=0.0, f_par=0.0)


class MeasurementSetFactory(factory.Factory):
    """Three lower-polariton points in eV"""

    class Meta:
        model = MeasurementSet

    omega_k_ev = (1.0, 1.5, 2.0)
    omega_lp_ev = (0.35, 0.39, 0.41)
    sigma_ev = None
    omega0_ev = 1.83
    epsilon_m = 1.96
    eta_prime = 1.83
    source = 'factory'


@pytest.fixture
def coupling_factory():
    return CouplingSetFactory


@pytest.fixture
def measurement_factory():
    return MeasurementSetFactory
