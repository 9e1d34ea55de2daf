from django.core.management.base import CommandError

from moduli.management.commands._base import ModuliCommand
from moduli.services.examples import (
    cmd_example_genus0, cmd_example_line_bundles, cmd_example_one_point,
)


class Command(ModuliCommand):
    help = 'Worked instances: line bundles, genus 0 with two points, one point of rank n'

    def add_command_arguments(self, parser):
        parser.add_argument('name', choices=['line_bundles', 'genus0', 'one_point'])
        parser.add_argument('--ell', type=int, default=3, help='Marked points (line_bundles)')
        parser.add_argument('--n', type=int, default=2, help='Rank (genus0, one_point)')
        parser.add_argument('--delta0', type=int, default=0, help='Degree (line_bundles, one_point)')

    def run(self, tol, seed, **options):
        name = options['name']
        if name == 'line_bundles':
            report = cmd_example_line_bundles(options['ell'], options['delta0'])
            report['ok'] = report['cstar_mismatches'] == 0
        elif name == 'genus0':
            report = cmd_example_genus0(options['n'], seed=seed, tol=tol)
            report['ok'] = (
                report['moment_residual'] <= tol.residual_abs
                and report['chart_rank'] == report['expected_rank']
            )
        elif name == 'one_point':
            report = cmd_example_one_point(options['n'], options['delta0'])
        else:
            raise CommandError(f'Unknown example {name}')
        return report
