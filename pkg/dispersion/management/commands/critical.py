"""
Critical coupling where the lower polariton softens
"""
from dispersion.services import DispersionService
from hamiltonians.models import ModelKind
from polariton_core.commands import NumericCommand

CRITICAL_MODELS = [ModelKind.RENORMALIZED_HOPFIELD, ModelKind.DICKE, ModelKind.BARE_HOPFIELD]


class Command(NumericCommand):
    help = "Smallest eta with a vanishing lower polariton, or 'none'"

    def add_arguments(self, parser):
        parser.add_argument('--model', choices=[str(kind) for kind in CRITICAL_MODELS],
                            default=ModelKind.RENORMALIZED_HOPFIELD)
        parser.add_argument('--f-perp', type=float, default=-1 / 3)
        parser.add_argument('--omega-k', type=float, default=1.0, help='Photon frequency in units of omega0')

    def handle(self, *args, **options):
        critical = DispersionService.critical_coupling(
            options['model'], f_perp=options['f_perp'], omega_k=options['omega_k']
        )
        self.stdout.write('none' if critical is None else f"{critical:.8f}")
