"""
Tests for dispersion relations, critical couplings and scans
"""
from io import StringIO
from xml.etree import ElementTree

import numpy as np
import pytest
from django.core.management import call_command
from django.core.management.base import CommandError

from bogoliubov.services import BogoliubovService
from dispersion.models import Axis, AxisSpec, Branch, DispersionCurve
from dispersion.services import DispersionService
from hamiltonians.models import CouplingSet, ModelKind, Phase
from hamiltonians.services import HamiltonianService
from polariton_core.exceptions import (
    ConfigurationError,
    DomainError,
    NoDataError,
    PhaseDomainError,
)
from polariton_core.plotting import emit_plot

ETA_C = np.sqrt(3) / 2
GRID_OMEGA_K = np.linspace(0.2, 3.0, 20)
GRID_ETA = np.linspace(0.0, 0.86, 20)


def bulk_branches(omega_k, eta):
    params = CouplingSet.bulk(omega_k=omega_k, eta=eta)
    lp, up = DispersionService.polariton_branches(omega_k, params.omega_tilde_perp, params.eta_prime)
    return params, lp, up


class TestPolaritonBranches:
    """Test suite for the closed-form transverse pair"""

    def test_uncoupled(self):
        """Test eta' = 0 gives the bare photon and matter lines"""
        assert DispersionService.polariton_branches(0.5, 1.0, 0.0) == pytest.approx((0.5, 1.0))
        assert DispersionService.polariton_branches(2.0, 1.0, 0.0) == pytest.approx((1.0, 2.0))

    def test_resonance_splitting(self):
        """Test the resonant splitting for omega_k = omega_tilde = 1"""
        lp, up = DispersionService.polariton_branches(1.0, 1.0, 0.5)
        assert lp * up == pytest.approx(1.0, rel=1e-12)
        assert lp ** 2 + up ** 2 == pytest.approx(3.0, rel=1e-12)

    def test_soft_matter_mode(self):
        """Test omega_tilde = 0 pins the lower branch to zero"""
        lp, up = DispersionService.polariton_branches(1.0, 0.0, 0.0)
        assert lp == 0.0
        assert up == 1.0

    def test_rejects_nonpositive_photon(self):
        """Test omega_k <= 0 raises"""
        with pytest.raises(DomainError):
            DispersionService.polariton_branches(0.0, 1.0, 0.5)

    def test_root_identities(self):
        """Test product and sum of the squared roots over the coupling grid"""
        for omega_k in GRID_OMEGA_K:
            for eta in GRID_ETA:
                params, lp, up = bulk_branches(omega_k, eta)
                omega_tilde, eta_prime = params.omega_tilde_perp, params.eta_prime
                product = omega_k ** 2 * omega_tilde ** 2
                total = omega_k ** 2 + omega_tilde ** 2 * (1 + 4 * eta_prime ** 2)
                assert lp ** 2 * up ** 2 == pytest.approx(product, rel=1e-10)
                assert lp ** 2 + up ** 2 == pytest.approx(total, rel=1e-10)

    def test_matches_symplectic_spectrum(self):
        """Test the closed form equals the bulk spectrum and the matter-first path"""
        for omega_k in GRID_OMEGA_K:
            for eta in GRID_ETA:
                params, lp, up = bulk_branches(omega_k, eta)
                expected = np.sort([lp, lp, up, up, params.omega_tilde_par])
                form = HamiltonianService.build_bulk_3d(params)
                direct = BogoliubovService.symplectic_spectrum(form).frequencies
                reduced = BogoliubovService.symplectic_spectrum(
                    BogoliubovService.matter_prediagonalize(form)
                ).frequencies
                assert np.allclose(direct, expected, rtol=1e-10, atol=1e-12)
                assert np.allclose(reduced, expected, rtol=1e-10, atol=1e-12)

    def test_eta_form_agrees(self):
        """Test the eta-parametrized form agrees with the eta' form"""
        for omega_k in (0.3, 1.0, 2.7):
            for eta in (0.1, 0.5, 0.85):
                _, lp, up = bulk_branches(omega_k, eta)
                assert DispersionService.renormalized_hopfield_branches(omega_k, 1.0, eta, -1 / 3) == pytest.approx(
                    (lp, up), rel=1e-12
                )

    def test_past_softening_point(self):
        """Test the normal-phase branches refuse couplings above eta_c"""
        with pytest.raises(PhaseDomainError):
            DispersionService.renormalized_hopfield_branches(1.0, 1.0, 1.0, -1 / 3)


class TestModelBranches:
    """Test suite for the Dicke-like, bare and longitudinal branches"""

    def test_dicke_matches_spectrum(self):
        """Test the Dicke-like pair equals the two-mode form spectrum"""
        for eta in (0.1, 0.3, 0.45):
            form = HamiltonianService.build_dicke_like(CouplingSet.bulk(omega_k=1.4, eta=eta))
            frequencies = BogoliubovService.symplectic_spectrum(form).frequencies
            assert np.allclose(DispersionService.dicke_like_branches(1.4, 1.0, eta), frequencies, rtol=1e-10)

    def test_dicke_above_critical(self):
        """Test the normal-phase Dicke pair refuses eta > 0.5"""
        with pytest.raises(PhaseDomainError):
            DispersionService.dicke_like_branches(1.0, 1.0, 0.6)

    def test_bare_hopfield_gap(self):
        """Test the bare model keeps a finite lower branch at any coupling"""
        for eta in (0.5, 1.0, 5.0):
            lp, up = DispersionService.bare_hopfield_branches(1.0, 1.0, eta)
            assert lp > 0
            assert lp * up == pytest.approx(1.0, rel=1e-12)

    def test_longitudinal_branch(self):
        """Test the longitudinal frequency is omega0 sqrt(1 + 4 eta^2 f_par) at every omega_k"""
        axis = AxisSpec(Axis.OMEGA_K, 0.1, 3.0, 50)
        curve = DispersionService.scan(ModelKind.RENORMALIZED_HOPFIELD, axis, eta=0.6, include_longitudinal=True)
        values = [sample.omega for sample in curve.branch(Branch.LONG)]
        assert len(values) == 50
        assert np.ptp(values) < 1e-12
        assert values[0] == pytest.approx(np.sqrt(1 + 4 * 0.36 * 2 / 3), rel=1e-12)

    def test_no_longitudinal_when_condensed(self):
        """Test the condensed phase reports only the transverse pair"""
        rows = DispersionService.evaluate_point(ModelKind.CONDENSED_3D, 1.0, 1.0, include_longitudinal=True)
        assert [branch for branch, _, _ in rows] == [Branch.LP, Branch.UP]
        assert all(phase == Phase.CONDENSED for _, phase, _ in rows)


class TestCondensedBranch:
    """Test suite for the transverse pair above the critical coupling"""

    def test_condensed_polynomial(self):
        """Test eta = 1, f_perp = -1/3 roots of (W^2 - s)(w_k^2 - s) = Q s"""
        omega_k = 1.2
        lp, up = DispersionService.condensed_branch(omega_k, 1.0, 1.0, -1 / 3)
        w_sq, q = 7 / 9, 3.0
        for omega in (lp, up):
            s = omega ** 2
            assert (w_sq - s) * (omega_k ** 2 - s) == pytest.approx(q * s, rel=1e-10)
        assert lp < up

    def test_matches_condensed_form(self):
        """Test the pair appears in the condensed-phase form spectrum"""
        params = CouplingSet.bulk(omega_k=0.9, eta=1.1)
        frequencies = BogoliubovService.symplectic_spectrum(HamiltonianService.build_condensed_3d(params)).frequencies
        for omega in DispersionService.condensed_branch(0.9, 1.0, 1.1, -1 / 3):
            assert np.min(np.abs(frequencies - omega)) < 1e-9

    def test_dicke_limit(self):
        """Test f_perp = -1 reduces to the superradiant Dicke pair"""
        for eta in (0.6, 0.9, 1.4):
            assert DispersionService.condensed_branch(1.3, 1.0, eta, -1.0) == pytest.approx(
                DispersionService.dicke_superradiant_branches(1.3, 1.0, eta), rel=1e-12
            )

    def test_rejects_normal_phase(self):
        """Test eta below eta_c and nonnegative f_perp raise"""
        with pytest.raises(PhaseDomainError):
            DispersionService.condensed_branch(1.0, 1.0, 0.8, -1 / 3)
        with pytest.raises(PhaseDomainError):
            DispersionService.condensed_branch(1.0, 1.0, 2.0, 0.0)

    def test_accepts_critical_coupling(self):
        """Test eta = eta_c joins the normal phase with a zero lower branch"""
        lp, up = DispersionService.condensed_branch(1.0, 1.0, ETA_C, -1 / 3)
        assert lp < 1e-6
        assert up == pytest.approx(2.0, abs=1e-6)

    @pytest.mark.parametrize('omega_k', [0.6, 0.8, 1.0, 1.2, 1.5])
    def test_continuity_at_critical_coupling(self, omega_k):
        """Test every transverse branch is continuous across eta_c"""
        below = DispersionService.renormalized_hopfield_branches(omega_k, 1.0, ETA_C - 1e-13, -1 / 3)
        above = DispersionService.condensed_branch(omega_k, 1.0, ETA_C + 1e-13, -1 / 3)
        assert np.allclose(below, above, atol=1e-6)

    def test_superradiant_dicke_continuity(self):
        """Test the Dicke pair joins its superradiant pair at eta = 0.5"""
        below = DispersionService.dicke_like_branches(1.1, 1.0, 0.5)
        above = DispersionService.dicke_superradiant_branches(1.1, 1.0, 0.5)
        assert np.allclose(below, above, atol=1e-8)


class TestLayerRoots:
    """Test suite for the multimode layer relation"""

    def test_single_mode_closed_form(self):
        """Test one cavity mode reproduces the closed-form pair"""
        params = CouplingSet.layer((1.1,), eta=0.4, chi=0.3)
        roots = DispersionService.layer_dispersion_roots(params)
        expected = DispersionService.polariton_branches(1.1, params.omega_tilde_perp, params.eta_prime)
        assert np.allclose(roots, expected, rtol=1e-10)

    def test_interlacing(self):
        """Test five cavity modes give six roots interlacing the poles"""
        params = CouplingSet.layer(HamiltonianService.cavity_ladder(0.8, 5), eta=0.5, chi=0.3)
        roots = DispersionService.layer_dispersion_roots(params)
        assert len(roots) == 6
        poles = params.omega_k
        assert roots[0] < poles[0]
        for n in range(1, 5):
            assert poles[n - 1] < roots[n] < poles[n]
        assert roots[-1] > poles[-1]

    def test_dense_sign_scan(self):
        """Test three modes at eta' = 0.5, omega_tilde = 1 against a dense sign scan"""
        params = CouplingSet.layer((0.8, 1.6, 2.4), eta=0.5, chi=0.0)
        roots = DispersionService.layer_dispersion_roots(params)
        grid = np.linspace(1e-6, 4.0, 400001)
        modes = np.array(params.omega_k)
        value = (grid ** 2 - 1.0) / 2 + 0.5 * np.sum(grid[:, None] ** 2 / (modes ** 2 - grid[:, None] ** 2), axis=1)
        crossings = grid[1:][(value[:-1] < 0) & (value[1:] > 0)]
        assert len(crossings) == 4
        assert np.allclose(roots, crossings, atol=2e-5)

    @pytest.mark.parametrize('eta_prime', [1e-2, 1e-3, 1e-4, 1e-5, 1e-6])
    def test_weak_coupling(self, eta_prime):
        """Test roots hugging the poles are still found and interlace"""
        params = CouplingSet.layer((0.8, 1.6, 2.4), eta=eta_prime, chi=0.0)
        roots = DispersionService.layer_dispersion_roots(params)
        poles = params.omega_k
        assert len(roots) == len(poles) + 1
        assert roots[0] < poles[0]
        for n in range(1, len(poles)):
            assert poles[n - 1] < roots[n] < poles[n]
        assert roots[-1] > poles[-1]
        assert 0.8 - roots[0] == pytest.approx(2 * eta_prime ** 2 * 0.8 / (1 - 0.64), rel=1e-2)
        assert roots[1] == pytest.approx(1.0, abs=10 * eta_prime ** 2)

    def test_roots_in_layer_spectrum(self, coupling_factory):
        """Test each root is a doubly degenerate mode of the layer form"""
        params = coupling_factory(layer=True, eta=0.45)
        frequencies = BogoliubovService.symplectic_spectrum(HamiltonianService.build_layer_2d(params)).frequencies
        for root in DispersionService.layer_dispersion_roots(params):
            assert np.count_nonzero(np.abs(frequencies - root) < 1e-9) == 2

    def test_uncoupled(self):
        """Test eta' = 0 leaves only the matter frequency"""
        params = CouplingSet.layer((0.8, 1.6), eta=0.0, chi=0.3)
        assert DispersionService.layer_dispersion_roots(params) == [params.omega_tilde_perp]

    def test_soft_matter_mode(self):
        """Test omega_tilde = 0 raises"""
        params = CouplingSet.layer((1.0,), eta=0.3, chi=0.5, f_perp=-1.0, f_par=2.0)
        with pytest.raises(PhaseDomainError):
            DispersionService.layer_dispersion_roots(params)

    def test_unordered_modes(self):
        """Test non-increasing cavity modes raise"""
        with pytest.raises(DomainError):
            DispersionService.layer_dispersion_roots(CouplingSet.layer((1.6, 0.8), eta=0.3))


class TestCriticalCoupling:
    """Test suite for the softening point of the lower branch"""

    def test_renormalized_hopfield(self):
        """Test the bulk model softens at sqrt(3)/2"""
        assert DispersionService.critical_coupling(ModelKind.RENORMALIZED_HOPFIELD) == pytest.approx(ETA_C, abs=1e-6)

    def test_dicke(self):
        """Test the Dicke-like model softens at 0.5"""
        assert DispersionService.critical_coupling(ModelKind.DICKE) == pytest.approx(0.5, abs=1e-6)

    def test_bare_hopfield(self):
        """Test the bare model never softens"""
        assert DispersionService.critical_coupling(ModelKind.BARE_HOPFIELD) is None

    def test_independent_of_photon_frequency(self):
        """Test eta_c does not depend on omega_k"""
        for omega_k in (0.3, 2.0):
            assert DispersionService.critical_coupling(
                ModelKind.RENORMALIZED_HOPFIELD, omega_k=omega_k
            ) == pytest.approx(ETA_C, abs=1e-6)

    def test_stronger_depolarization(self):
        """Test f_perp = -1 moves eta_c to 0.5"""
        assert DispersionService.critical_coupling(ModelKind.RENORMALIZED_HOPFIELD, f_perp=-1.0) == pytest.approx(
            0.5, abs=1e-6
        )

    def test_unsupported_model(self):
        """Test the layer model is rejected"""
        with pytest.raises(DomainError):
            DispersionService.critical_coupling(ModelKind.LAYER_2D)


class TestScan:
    """Test suite for sampled dispersion curves"""

    def test_phase_stitching(self):
        """Test an eta scan through eta_c is continuous with both phases labelled"""
        axis = AxisSpec(Axis.ETA, 0.0, 1.5, 301)
        curve = DispersionService.scan(ModelKind.RENORMALIZED_HOPFIELD, axis, omega_k=1.0)
        lower = curve.branch(Branch.LP)
        assert {sample.phase for sample in lower} == {Phase.NORMAL, Phase.CONDENSED}
        for sample in lower:
            assert sample.phase == (Phase.CONDENSED if sample.param > ETA_C else Phase.NORMAL)
        values = np.array([sample.omega for sample in lower])
        assert np.max(np.abs(np.diff(values))) < 0.1

    def test_lower_branch_nonincreasing(self):
        """Test the lower branch decreases with eta below eta_c"""
        for omega_k in (0.4, 1.0, 2.5):
            curve = DispersionService.scan(ModelKind.RENORMALIZED_HOPFIELD, AxisSpec(Axis.ETA, 0.0, 0.86, 100), omega_k=omega_k)
            values = np.array([sample.omega for sample in curve.branch(Branch.LP)])
            assert np.all(np.diff(values) <= 1e-14)

    def test_uncoupled_lines(self):
        """Test eta = 0 gives the bare photon and matter lines"""
        curve = DispersionService.scan(ModelKind.RENORMALIZED_HOPFIELD, AxisSpec(Axis.OMEGA_K, 0.1, 3.0, 30), eta=0.0)
        for lower, upper in zip(curve.branch(Branch.LP), curve.branch(Branch.UP)):
            assert lower.omega == pytest.approx(min(lower.param, 1.0), rel=1e-12)
            assert upper.omega == pytest.approx(max(upper.param, 1.0), rel=1e-12)

    def test_asymptotes(self):
        """Test at eta' = 1.83 the lower branch starts near zero and approaches omega_tilde"""
        axis = AxisSpec(Axis.OMEGA_K, 0.01, 200.0, 400)
        curve = DispersionService.scan(ModelKind.RENORMALIZED_HOPFIELD, axis, eta_prime=1.83)
        eta = HamiltonianService.eta_from_eta_prime(1.83, -1 / 3)
        omega_tilde = CouplingSet.bulk(eta=eta).omega_tilde_perp
        lower = curve.branch(Branch.LP)
        assert lower[0].omega < 0.01
        assert lower[-1].omega == pytest.approx(omega_tilde, rel=1e-3)

    def test_layer_scan_labels(self):
        """Test a layer scan reports the lower branch and one branch per cavity mode"""
        curve = DispersionService.scan(ModelKind.LAYER_2D, AxisSpec(Axis.OMEGA_K, 0.5, 2.0, 5), eta=0.3, chi=0.2, k_max=3)
        assert curve.branches == [Branch.LP, 'cavity-1', 'cavity-2', 'cavity-3']

    def test_dicke_scan_phases(self):
        """Test the Dicke-like scan switches phase at 0.5"""
        curve = DispersionService.scan(ModelKind.DICKE, AxisSpec(Axis.ETA, 0.0, 1.0, 11), omega_k=1.0)
        phases = [sample.phase for sample in curve.branch(Branch.LP)]
        assert phases[:6] == [Phase.NORMAL] * 6
        assert phases[6:] == [Phase.CONDENSED] * 5

    def test_eta_required_off_coupling_axis(self):
        """Test an omega_k scan needs a coupling"""
        with pytest.raises(DomainError):
            DispersionService.scan(ModelKind.RENORMALIZED_HOPFIELD, AxisSpec(Axis.OMEGA_K, 0.1, 3.0, 10))

    def test_axis_validation(self):
        """Test malformed axes raise"""
        with pytest.raises(ConfigurationError):
            AxisSpec(Axis.ETA, 1.0, 0.5, 10)
        with pytest.raises(ConfigurationError):
            AxisSpec(Axis.ETA, 0.0, 1.0, 1)
        with pytest.raises(ConfigurationError):
            AxisSpec('temperature', 0.0, 1.0, 10)


class TestEmitPlot:
    """Test suite for SVG rendering"""

    def test_branch_elements_and_legend(self, tmp_path):
        """Test one labelled line per branch"""
        curve = DispersionService.scan(ModelKind.RENORMALIZED_HOPFIELD, AxisSpec(Axis.OMEGA_K, 0.1, 3.0, 40), eta=0.5)
        target = emit_plot(curve, tmp_path / 'curve.svg')
        root = ElementTree.parse(target).getroot()
        ids = [element.get('id') for element in root.iter() if (element.get('id') or '').startswith('branch-')]
        assert sorted(ids) == ['branch-LP', 'branch-UP']
        text = ''.join(element.text or '' for element in root.iter() if element.tag.endswith('text'))
        assert 'LP' in text and 'UP' in text

    def test_two_point_curve(self, tmp_path):
        """Test a two-sample curve renders one line"""
        curve = DispersionService.scan(ModelKind.BARE_HOPFIELD, AxisSpec(Axis.OMEGA_K, 0.5, 1.5, 2), eta=0.2)
        single = DispersionCurve(axis=curve.axis, model=curve.model, samples=tuple(curve.branch(Branch.LP)))
        root = ElementTree.parse(emit_plot(single, tmp_path / 'two.svg')).getroot()
        assert len([e for e in root.iter() if e.get('id') == 'branch-LP']) == 1

    def test_reproducible(self, tmp_path):
        """Test identical curves give identical files"""
        curve = DispersionService.scan(ModelKind.DICKE, AxisSpec(Axis.OMEGA_K, 0.1, 2.0, 20), eta=0.3)
        first = emit_plot(curve, tmp_path / 'a.svg').read_bytes()
        second = emit_plot(curve, tmp_path / 'b.svg').read_bytes()
        assert first == second

    def test_empty_curve(self, tmp_path):
        """Test an empty curve raises"""
        with pytest.raises(NoDataError):
            emit_plot(DispersionCurve(axis=Axis.ETA, model='dicke', samples=()), tmp_path / 'empty.svg')


class TestDispersionCommands:
    """Test suite for the dispersion, scan-coupling and critical commands"""

    def test_dispersion_row_count(self):
        """Test the eta' = 1.83 dispersion gives 400 LP and UP rows on an increasing axis"""
        out = StringIO()
        call_command('dispersion', model='renormalized-hopfield', eta_prime=1.83, wk='0.1:3:200', stdout=out)
        lines = out.getvalue().strip().splitlines()
        assert lines[0] == 'param,branch,phase,omega_over_omega0'
        assert len(lines) == 401
        params = [float(line.split(',')[0]) for line in lines[1:] if ',LP,' in line]
        assert len(params) == 200
        assert all(b > a for a, b in zip(params, params[1:]))

    def test_dispersion_reproducible(self):
        """Test identical flags give identical CSV"""
        outputs = []
        for _ in range(2):
            out = StringIO()
            call_command('dispersion', eta=0.5, wk='0.1:3:50', include_longitudinal=True, stdout=out)
            outputs.append(out.getvalue())
        assert outputs[0] == outputs[1]

    def test_dispersion_svg(self, tmp_path):
        """Test --svg writes a plot and --csv-only skips it"""
        call_command('dispersion', eta=0.5, wk='0.1:3:20', svg=str(tmp_path / 'plot.svg'), stdout=StringIO())
        assert (tmp_path / 'plot.svg').exists()
        call_command('dispersion', eta=0.5, wk='0.1:3:20', svg=str(tmp_path / 'skip.svg'), csv_only=True, stdout=StringIO())
        assert not (tmp_path / 'skip.svg').exists()

    def test_dispersion_csv_file(self, tmp_path):
        """Test --output writes the CSV to disk"""
        target = tmp_path / 'curve.csv'
        call_command('dispersion', model='dicke', eta=0.3, wk='0.5:1.5:3', output=str(target), stdout=StringIO())
        assert len(target.read_text().splitlines()) == 7

    def test_scan_coupling(self):
        """Test an eta scan reports both phases"""
        out = StringIO()
        call_command('scan_coupling', range='0:1.5:31', omega_k=1.0, stdout=out)
        text = out.getvalue()
        assert ',normal,' in text and ',condensed,' in text

    @pytest.mark.parametrize('model,expected', [
        ('dicke', '0.50000000'),
        ('renormalized-hopfield', '0.86602540'),
        ('bare-hopfield', 'none'),
    ])
    def test_critical(self, model, expected):
        """Test printed critical couplings"""
        out = StringIO()
        call_command('critical', model=model, stdout=out)
        assert out.getvalue().strip() == expected

    def test_bad_axis_exit_code(self):
        """Test a malformed axis exits with the configuration code"""
        with pytest.raises(CommandError) as excinfo:
            call_command('dispersion', eta=0.5, wk='3:0.1:20', stdout=StringIO())
        assert excinfo.value.returncode == 2

    def test_missing_coupling_exit_code(self):
        """Test a dispersion without eta or eta' exits with the configuration code"""
        with pytest.raises(CommandError) as excinfo:
            call_command('dispersion', stdout=StringIO())
        assert excinfo.value.returncode == 2

    def test_condensed_model_below_critical(self):
        """Test the condensed model below eta_c exits with the numeric code"""
        with pytest.raises(CommandError) as excinfo:
            call_command('dispersion', model='condensed-3d', eta=0.5, wk='0.1:3:5', stdout=StringIO())
        assert excinfo.value.returncode == 3
