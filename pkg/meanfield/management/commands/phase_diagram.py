"""
Order parameter and transverse matter resonance across the transition
"""
import numpy as np
import pandas as pd

from meanfield.services import MeanFieldService
from polariton_core.commands import NumericCommand
from polariton_core.exceptions import ConfigurationError

COLUMNS = ['eta', 'order_parameter', 'omega_tilde_perp', 'phase']


class Command(NumericCommand):
    help = 'Mean-field phase diagram along eta as CSV'

    def add_arguments(self, parser):
        parser.add_argument('--f-perp', type=float, default=-1 / 3)
        parser.add_argument('--omega0', type=float, default=1.0)
        parser.add_argument('--range', default='0:2:201', help='eta axis as min:max:samples')
        parser.add_argument('--output', default=None, help='CSV path (stdout when omitted)')

    def handle(self, *args, **options):
        if options['f_perp'] >= 0:
            raise ConfigurationError(f"--f-perp must be negative for a phase transition, got {options['f_perp']}")
        if options['omega0'] <= 0:
            raise ConfigurationError('--omega0 must be positive')
        low, high, samples = self.parse_axis(options['range'], '--range')
        if low < 0:
            raise ConfigurationError('eta must be nonnegative')
        output = self.check_writable(options['output'])

        rows = MeanFieldService.phase_diagram(np.linspace(low, high, samples), options['f_perp'], options['omega0'])
        self.write_frame(pd.DataFrame(rows, columns=COLUMNS), output)
