"""
Tests for the operator algebra service
"""
from io import StringIO

import numpy as np
import pytest
from django.conf import settings
from django.core.management import call_command

from hp_algebra.models import GROUND
from hp_algebra.services import HPAlgebraService
from polariton_core.exceptions import AlgebraViolationError, DomainError, SizeError


class TestSiteOperators:
    """Test suite for single-site operators"""

    @pytest.fixture
    def ops(self):
        return HPAlgebraService.build_site_operators()

    def test_lowering_action(self, ops):
        """Test sigma^-_1 maps |+1> to |-> and annihilates |+2>"""
        plus_1, plus_2 = np.eye(4)[0], np.eye(4)[1]
        assert np.allclose(ops.sigma_minus[0] @ plus_1, np.eye(4)[GROUND])
        assert np.allclose(ops.sigma_minus[0] @ plus_2, 0)

    def test_sigma_z_on_ground(self, ops):
        """Test sigma^z |-> = -|->"""
        ground = np.eye(4)[GROUND]
        assert np.allclose(ops.sigma_z @ ground, -ground)

    def test_site_algebra_passes(self, ops):
        """Test every site relation holds exactly"""
        report = HPAlgebraService.verify_site_algebra(ops)
        assert report.passed
        assert max(check.deviation for check in report.checks) < 1e-14

    def test_commutator_example(self, ops):
        """Test [Sz, S+_2] - S+_2 vanishes"""
        commutator = ops.s_z @ ops.s_plus[1] - ops.s_plus[1] @ ops.s_z
        assert np.allclose(commutator - ops.s_plus[1], 0, atol=1e-15)

    def test_ladder_norms(self, ops):
        """Test <-|S-_1 S+_1|-> = 1 and <+2|S-_1 S+_1|+2> = 0"""
        product = ops.s_minus[0] @ ops.s_plus[0]
        assert product[GROUND, GROUND] == pytest.approx(1.0)
        assert product[1, 1] == pytest.approx(0.0)
        assert HPAlgebraService.expected_ladder_norm(-0.5, 1.0, True) == pytest.approx(1.0)

    def test_violation_raises(self, ops):
        """Test a corrupted operator set raises naming the relation"""
        broken = list(ops.sigma_plus)
        broken[0] = broken[0] * 2
        corrupted = type(ops)(
            sigma_minus=ops.sigma_minus,
            sigma_plus=tuple(broken),
            sigma_x=ops.sigma_x,
            sigma_y=ops.sigma_y,
            sigma_z=ops.sigma_z,
        )
        with pytest.raises(AlgebraViolationError) as excinfo:
            HPAlgebraService.verify_site_algebra(corrupted)
        assert 'S+_1' in excinfo.value.relation
        assert not excinfo.value.report.passed


class TestHolsteinPrimakoff:
    """Test suite for the boson map"""

    @pytest.mark.parametrize('n_max', [1, 2, 3])
    def test_map_reproduces_site_algebra(self, n_max):
        """Test the mapped operators match the site algebra on the physical subspace"""
        report = HPAlgebraService.verify_hp_map(HPAlgebraService.hp_map_matrices(n_max))
        assert report.passed, report.failures

    def test_raising_on_vacuum(self):
        """Test S+_1 on the vacuum gives occupation (1,0,0) with coefficient 1"""
        mapped = HPAlgebraService.hp_map_matrices(2)
        bosons = mapped.bosons
        vacuum = np.eye(bosons.dimension)[bosons.index((0, 0, 0))]
        result = mapped.s_plus[0] @ vacuum
        assert result[bosons.index((1, 0, 0))] == pytest.approx(1.0)
        assert np.count_nonzero(np.abs(result) > 1e-15) == 1

    def test_sz_on_vacuum(self):
        """Test Sz on the vacuum is -1/2"""
        mapped = HPAlgebraService.hp_map_matrices(1)
        index = mapped.bosons.index((0, 0, 0))
        assert mapped.s_z[index, index] == pytest.approx(-0.5)

    def test_mutually_exclusive_raising(self):
        """Test S+_a S+_b vanishes on the physical subspace"""
        mapped = HPAlgebraService.hp_map_matrices(3)
        for a in range(3):
            for b in range(3):
                assert np.allclose(mapped.s_plus[a] @ mapped.s_plus[b] @ mapped.physical, 0)

    def test_linearization_diagnostic(self):
        """Test linearization is exact up to one excitation and not beyond"""
        errors = HPAlgebraService.linearization_error_by_occupation(3)
        assert errors[0] == 0.0
        assert errors[1] == 0.0
        assert errors[2] > 0.5

    def test_domain_error(self):
        """Test n_max below 1 raises"""
        with pytest.raises(DomainError):
            HPAlgebraService.hp_map_matrices(0)

    def test_truncated_commutator(self):
        """Test [b, b+] equals the identity below the truncation only"""
        bosons = HPAlgebraService.truncated_bosons(2, 2)
        b, creator = bosons.annihilators[0], bosons.creators[0]
        commutator = b @ creator - creator @ b
        below = bosons.projector_below(2)
        assert np.allclose(commutator @ below, below)
        assert not np.allclose(commutator, np.eye(bosons.dimension))


class TestCollectiveModes:
    """Test suite for Fourier modes of a periodic chain"""

    def test_two_site_zero_mode(self):
        """Test b_0 = (b_1 + b_2)/sqrt(2) for two sites"""
        modes = HPAlgebraService.collective_mode_matrices(2, 0.0)
        bosons = modes.bosons
        expected = (bosons.annihilators[0] + bosons.annihilators[3]) / np.sqrt(2)
        assert np.allclose(modes.matrices[0], expected)

    @pytest.mark.parametrize('n_sites', [1, 2, 3])
    def test_commutators_and_number_identity(self, n_sites):
        """Test Fourier-mode commutators and the number identity"""
        report = HPAlgebraService.verify_collective(n_sites)
        assert report.passed, report.failures

    def test_distinct_momenta_commute(self):
        """Test [b_k, b+_k'] vanishes below the truncation for k != k'"""
        k_values = HPAlgebraService.chain_wavevectors(3)
        first = HPAlgebraService.collective_mode_matrices(3, k_values[1])
        second = HPAlgebraService.collective_mode_matrices(3, k_values[2], bosons=first.bosons)
        b, creator = first.matrices[0], second.matrices[0].conj().T
        below = first.bosons.projector_below(2)
        assert np.allclose((b @ creator - creator @ b) @ below, 0, atol=1e-13)

    def test_size_guard(self):
        """Test more than four sites raises"""
        with pytest.raises(SizeError):
            HPAlgebraService.collective_mode_matrices(5, 0.0)

    def test_incompatible_momentum(self):
        """Test a momentum off the chain grid raises"""
        with pytest.raises(DomainError):
            HPAlgebraService.collective_mode_matrices(3, 0.5)


class TestVerifyAlgebraCommand:
    """Test suite for the verify-algebra command"""

    def test_table_passes(self):
        """Test the full table prints PASS rows only"""
        out = StringIO()
        call_command('verify_algebra', stdout=out)
        text = out.getvalue()
        assert 'PASS' in text
        assert 'FAIL' not in text
        assert 'relations hold' in text

    def test_tolerance(self):
        """Test every relation holds within 1e-13"""
        assert settings.ALGEBRA_TOLERANCE == 1e-13
        report = HPAlgebraService.verify_all()
        assert report.passed
        assert max(check.deviation for check in report.checks) <= 1e-13
