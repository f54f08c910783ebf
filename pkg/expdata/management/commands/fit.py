"""
Residuals of a model against measured lower-polariton energies
"""
import json

from expdata.services import SCORED_MODELS, ExpDataService
from hamiltonians.models import ModelKind
from polariton_core.commands import NumericCommand


class Command(NumericCommand):
    help = 'Score a fixed-parameter model against a measurement CSV and print residuals with a JSON summary'

    def add_arguments(self, parser):
        parser.add_argument('--data', required=True, help='CSV with omega_k_eV,omega_LP_eV[,sigma_eV]')
        parser.add_argument('--model', choices=[str(kind) for kind in SCORED_MODELS],
                            default=ModelKind.RENORMALIZED_HOPFIELD)
        parser.add_argument('--eta-prime', type=float, default=None)
        parser.add_argument('--omega0-ev', type=float, default=None)
        parser.add_argument('--epsilon-m', type=float, default=None)
        parser.add_argument('--f-perp', type=float, default=-1 / 3)
        parser.add_argument('--output', default=None, help='Residual table as CSV')

    def handle(self, *args, **options):
        output = self.check_writable(options['output'])
        data = ExpDataService.load_measurements(
            options['data'],
            omega0_ev=options['omega0_ev'],
            epsilon_m=options['epsilon_m'],
            eta_prime=options['eta_prime'],
        )
        report = ExpDataService.model_residuals(data, options['model'], options['f_perp'])

        self.stdout.write(report.frame.to_string(index=False, float_format=lambda value: f"{value:.6f}"))
        if output is not None:
            self.write_frame(report.frame, output)
        self.stdout.write(json.dumps(report.summary()))
