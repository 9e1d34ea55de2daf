import logging
from pathlib import Path

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import APIException, ValidationError

from moduli.exceptions import ModuliError
from moduli.schemas import render_report
from moduli.services.linalg_core import Tolerance, moduli_setting

logger = logging.getLogger(__name__)


class ModuliCommand(BaseCommand):
    """
    Shared flags and error handling. Subclasses implement ``run`` and return a
    report dict; ``report['ok']`` false means a residual over tolerance or an
    Unstable verdict, which fails the command unless --allow-unstable is set.
    """

    def add_arguments(self, parser):
        parser.add_argument('--seed', type=int, default=None, help='Seed for randomized steps')
        parser.add_argument('--rank-tol', type=float, default=None, help='Relative rank tolerance')
        parser.add_argument('--residual-tol', type=float, default=None, help='Absolute residual tolerance')
        parser.add_argument('--json-out', type=str, default=None, help='Also write the report to this path')
        parser.add_argument(
            '--allow-unstable',
            action='store_true',
            help='Exit with status 0 even for Unstable verdicts or residuals over tolerance',
        )
        self.add_command_arguments(parser)

    def add_command_arguments(self, parser):
        pass

    def run(self, tol, seed, **options) -> dict:
        raise NotImplementedError

    def handle(self, *args, **options):
        try:
            tol = Tolerance.from_settings(options['rank_tol'], options['residual_tol'])
        except Exception as e:
            raise CommandError(f'Invalid tolerance: {e}')
        seed = options.pop('seed')
        if seed is None:
            seed = moduli_setting('DEFAULT_SEED')

        try:
            report = self.run(tol=tol, seed=seed, **options)
        except ModuliError as e:
            logger.error(f'{self.__class__.__module__}: {e}')
            raise CommandError(str(e))
        except ValidationError as e:
            logger.error(f'Invalid input: {e.detail}')
            raise CommandError(f'[validation_error] {e.detail}')
        except APIException as e:
            logger.error(f'Unreadable input: {e.detail}')
            raise CommandError(f'[parse_error] {e.detail}')

        rendered = render_report(report)
        self.stdout.write(rendered.decode('utf-8'))
        if options['json_out']:
            Path(options['json_out']).write_bytes(rendered)

        ok = bool(report.get('ok', True)) if isinstance(report, dict) else True
        if not ok and not options['allow_unstable']:
            raise CommandError('Unstable verdict or residual over tolerance')
        if ok:
            self.stderr.write(self.style.SUCCESS('Done'))
        else:
            self.stderr.write(self.style.WARNING('Done (unstable or over tolerance, allowed)'))
