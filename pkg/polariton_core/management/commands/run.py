"""
Run a subcommand described by a JSON document
"""
import json
from pathlib import Path

from django.core.management import call_command

from polariton_core.commands import NumericCommand, logger
from polariton_core.exceptions import ConfigurationError
from polariton_core.serializers import RunConfigSerializer


class Command(NumericCommand):
    help = 'Validate a run document and dispatch to the subcommand it names'

    def add_arguments(self, parser):
        parser.add_argument('--config', required=True, help='Path to the run document (JSON)')

    def handle(self, *args, **options):
        path = Path(options['config'])
        if not path.exists():
            raise ConfigurationError(f"Run document not found: {path}")
        try:
            document = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path} is not valid JSON: {exc}") from exc

        serializer = RunConfigSerializer(data=document)
        serializer.is_valid(raise_exception=True)
        command = serializer.validated_data['command']
        run_options = serializer.validated_data['options']
        logger.info(f"Dispatching {path} to {command}")
        call_command(command.replace('-', '_'), stdout=self.stdout, stderr=self.stderr, **run_options)
