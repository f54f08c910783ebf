"""
Polariton branches against the coupling, through the phase transition
"""
from dispersion.models import Axis, AxisSpec
from dispersion.services import DispersionService
from hamiltonians.models import ModelKind
from polariton_core.commands import NumericCommand
from polariton_core.plotting import emit_plot


class Command(NumericCommand):
    help = 'Branches along eta or eta_prime at fixed omega_k, stitched across the critical coupling'

    def add_arguments(self, parser):
        self.add_model_arguments(parser)
        parser.add_argument('--axis', choices=[Axis.ETA, Axis.ETA_PRIME], default=Axis.ETA)
        parser.add_argument('--range', default='0:1.5:301', help='Coupling axis as min:max:samples')
        parser.add_argument('--omega-k', type=float, default=1.0, help='Photon frequency in units of omega0')
        parser.add_argument('--include-longitudinal', action='store_true')
        parser.add_argument('--output', default=None, help='CSV path (stdout when omitted)')
        parser.add_argument('--svg', default=None, help='SVG plot path')
        parser.add_argument('--csv-only', action='store_true', help='Skip the plot even when --svg is given')

    def handle(self, *args, **options):
        axis = AxisSpec(options['axis'], *self.parse_axis(options['range'], '--range'))
        config = self.model_config(options, default_eta=0.0)
        output = self.check_writable(options['output'])
        svg = None if options['csv_only'] else self.check_writable(options['svg'])

        coupling = config.coupling
        curve = DispersionService.scan(
            config.kind,
            axis,
            omega_k=options['omega_k'],
            omega0=coupling.omega0,
            f_perp=coupling.f_perp,
            f_par=coupling.f_par,
            include_longitudinal=options['include_longitudinal'],
            k_max=config.k_max,
            chi=options['chi'] if config.kind == ModelKind.LAYER_2D else None,
        )
        self.write_frame(curve.to_frame(), output)
        if svg is not None:
            emit_plot(curve, svg)
