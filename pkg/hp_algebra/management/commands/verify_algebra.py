"""
Pass/fail table for every operator identity
"""
import pandas as pd

from hp_algebra.services import HPAlgebraService
from polariton_core.commands import NumericCommand
from polariton_core.exceptions import AlgebraViolationError


class Command(NumericCommand):
    help = 'Verify the two-level operator algebra, the boson map and the collective-mode commutators'

    def add_arguments(self, parser):
        parser.add_argument('--n-max', type=int, nargs='+', default=[1, 2, 3])
        parser.add_argument('--max-sites', type=int, default=3)

    def handle(self, *args, **options):
        report = HPAlgebraService.verify_all(tuple(options['n_max']), options['max_sites'])
        frame = pd.DataFrame(
            [
                {
                    'relation': check.relation,
                    'max_deviation': f"{check.deviation:.3e}",
                    'status': 'PASS' if check.passed else 'FAIL',
                }
                for check in report.checks
            ]
        )
        self.stdout.write(frame.to_string(index=False))
        if not report.passed:
            failure = report.failures[0]
            raise AlgebraViolationError(
                f"{len(report.failures)} relation(s) failed, first: {failure.relation}",
                relation=failure.relation,
                report=report,
            )
        self.stdout.write(f"All {len(report.checks)} relations hold")
