"""
Shell-partial dipole sums as CSV
"""
import numpy as np
import pandas as pd

from lattice.models import LatticeFamily, LatticeSpec
from lattice.services import TENSOR_COMPONENTS, LatticeService
from polariton_core.commands import NumericCommand
from polariton_core.exceptions import ConfigurationError

AXES = 'xyz'


class Command(NumericCommand):
    help = 'Direct dipole-dipole lattice sum over complete shells, with the tail-corrected limit'

    def add_arguments(self, parser):
        parser.add_argument('--family', choices=LatticeFamily.values, default=LatticeFamily.SC)
        parser.add_argument('--a', type=float, default=1.0, help='Lattice constant')
        parser.add_argument('--k', default='0,0,0.05', help='Wavevector kx,ky,kz in units of 1/a')
        parser.add_argument('--r-cut', type=float, default=40.0)
        parser.add_argument('--checkpoints', type=int, default=None)
        parser.add_argument('--output', default=None, help='CSV path (stdout when omitted)')

    def handle(self, *args, **options):
        try:
            k = np.array([float(part) for part in options['k'].split(',')])
        except ValueError as exc:
            raise ConfigurationError(f"--k must be three comma-separated numbers, got '{options['k']}'") from exc
        if k.shape != (3,):
            raise ConfigurationError('--k needs exactly three components')
        output = self.check_writable(options['output'])

        spec = LatticeSpec(family=options['family'], a=options['a'])
        result = LatticeService.dipole_shell_sums(spec, k, options['r_cut'], options['checkpoints'])

        columns = [f"S_{AXES[i]}{AXES[j]}" for i, j in TENSOR_COMPONENTS]
        rows = []
        for radius, partial in zip(result.radii, result.partials):
            rows.append([radius] + [partial[i, j] for i, j in TENSOR_COMPONENTS] + [False])
        rows.append(
            [options['r_cut']] + [result.extrapolated[i, j] for i, j in TENSOR_COMPONENTS] + [True]
        )
        frame = pd.DataFrame(rows, columns=['r_cut'] + columns + ['extrapolated'])
        self.write_frame(frame, output)
