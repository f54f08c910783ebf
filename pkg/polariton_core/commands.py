"""
Base management command with run logging and exit-code mapping
"""
from django.core.management.base import BaseCommand, CommandError
from django.conf import settings
from pathlib import Path
import logging
import time

from .exceptions import ConfigurationError, command_exception_handler

logger = logging.getLogger('polariton_core')


class NumericCommand(BaseCommand):
    """
    Shared behaviour for every numerical subcommand.
    Logs start, duration and outcome; maps domain errors onto exit codes.
    """
    requires_system_checks = []

    def execute(self, *args, **options):
        command_name = self.__module__.rsplit('.', 1)[-1].replace('_', '-')
        start_time = time.time()
        logger.info(f"Command started: {command_name}")
        try:
            output = super().execute(*args, **options)
        except Exception as exc:
            mapped = command_exception_handler(exc, command_name)
            duration = time.time() - start_time
            logger.info(
                f"Command failed: {command_name} - Exit: {getattr(mapped, 'returncode', 1)} "
                f"- Duration: {duration:.2f}s"
            )
            if mapped is exc:
                raise
            raise mapped from exc
        duration = time.time() - start_time
        logger.info(f"Command completed: {command_name} - Duration: {duration:.2f}s")
        return output

    @staticmethod
    def parse_axis(text, name='axis'):
        """Parse a `min:max:samples` axis flag"""
        parts = text.split(':')
        if len(parts) != 3:
            raise ConfigurationError(f"{name} must look like min:max:samples, got '{text}'")
        try:
            low, high, samples = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigurationError(f"{name} has non-numeric parts: '{text}'") from exc
        if samples < 2:
            raise ConfigurationError(f"{name} needs at least 2 samples")
        if not low < high:
            raise ConfigurationError(f"{name} needs min < max")
        return low, high, samples

    @staticmethod
    def add_model_arguments(parser, default_model='renormalized-hopfield', models=None):
        """Flags shared by every command that evaluates a model"""
        from hamiltonians.models import ModelKind

        parser.add_argument('--model', choices=models or ModelKind.values, default=default_model)
        parser.add_argument('--eta', type=float, default=None, help='Light-matter coupling')
        parser.add_argument('--eta-prime', type=float, default=None, help='Dipole-renormalized coupling')
        parser.add_argument('--chi', type=float, default=None, help='Dipole-dipole coupling (layer model only)')
        parser.add_argument('--omega0', type=float, default=1.0)
        parser.add_argument('--f-perp', type=float, default=-1 / 3)
        parser.add_argument('--f-par', type=float, default=2 / 3)
        parser.add_argument('--k-max', type=int, default=1, help='Cavity modes kept by the layer model')

    @staticmethod
    def model_config(options, default_eta=None):
        """Validate the model flags through ModelConfigSerializer and return a ModelConfig"""
        from hamiltonians.serializers import ModelConfigSerializer

        document = {
            'model': options['model'],
            'omega0': options['omega0'],
            'f_perp': options['f_perp'],
            'f_par': options['f_par'],
            'K_max': options['k_max'],
        }
        for key in ('eta', 'eta_prime', 'chi'):
            if options.get(key) is not None:
                document[key] = options[key]
        if 'eta' not in document and 'eta_prime' not in document and default_eta is not None:
            document['eta'] = default_eta
        serializer = ModelConfigSerializer(data=document)
        serializer.is_valid(raise_exception=True)
        return serializer.save()

    @staticmethod
    def check_writable(path):
        """Ensure the parent directory of an output path exists"""
        if path is None:
            return None
        target = Path(path)
        if not target.parent.exists():
            raise ConfigurationError(f"Output directory does not exist: {target.parent}")
        return target

    def write_frame(self, frame, path=None):
        """Write a DataFrame as CSV to a file or to stdout"""
        text = frame.to_csv(index=False, float_format=settings.CSV_FLOAT_FORMAT, lineterminator='\n')
        if path is None:
            self.stdout.write(text, ending='')
        else:
            Path(path).write_text(text)
            logger.info(f"CSV written: {path} | rows={len(frame)}")


__all__ = ['NumericCommand', 'CommandError']
