"""
Polariton branches against the photon frequency
"""
from dispersion.models import Axis, AxisSpec
from dispersion.services import DispersionService
from hamiltonians.models import ModelKind
from polariton_core.commands import NumericCommand
from polariton_core.plotting import emit_plot


class Command(NumericCommand):
    help = 'Dispersion of every branch along omega_k/omega0, as CSV with an optional SVG plot'

    def add_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument('--wk', default='0.1:3:200', help='omega_k/omega0 axis as min:max:samples')
        parser.add_argument('--include-longitudinal', action='store_true')
        parser.add_argument('--output', default=None, help='CSV path (stdout when omitted)')
        parser.add_argument('--svg', default=None, help='SVG plot path')
        parser.add_argument('--csv-only', action='store_true', help='Skip the plot even when --svg is given')

    def handle(self, *args, **options):
        axis = AxisSpec(Axis.OMEGA_K, *self.parse_axis(options['wk'], '--wk'))
        config = self.model_config(options)
        output = self.check_writable(options['output'])
        svg = None if options['csv_only'] else self.check_writable(options['svg'])

        coupling = config.coupling
        curve = DispersionService.scan(
            config.kind,
            axis,
            eta=coupling.eta,
            omega0=coupling.omega0,
            f_perp=coupling.f_perp,
            f_par=coupling.f_par,
            include_longitudinal=options['include_longitudinal'],
            k_max=config.k_max,
            chi=coupling.chi if config.kind == ModelKind.LAYER_2D else None,
        )
        self.write_frame(curve.to_frame(), output)
        if svg is not None:
            emit_plot(curve, svg)
