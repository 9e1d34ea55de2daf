from django.core.management.base import CommandError

from moduli.management.commands._base import ModuliCommand
from moduli.schemas import GMPointSerializer, load
from moduli.services.extended_moduli import random_gm_point, smoothness_hypotheses
from moduli.services.pipeline import gm_checks


class Command(ModuliCommand):
    help = 'Check a GM point against its level equations, or draw a seeded random one'

    def add_command_arguments(self, parser):
        parser.add_argument('action', choices=['check', 'random'])
        parser.add_argument('--point', type=str, help='GM point JSON file (check)')
        parser.add_argument('--n', type=int, default=2, help='Rank (random)')
        parser.add_argument('--genus', type=int, default=0, help='Genus (random)')
        parser.add_argument('--ell', type=int, default=2, help='Number of marked points (random)')
        parser.add_argument('--delta0', type=int, default=None, help='Degree (random)')

    def run(self, tol, seed, **options):
        if options['action'] == 'random':
            pt = random_gm_point(
                options['n'], options['genus'], options['ell'],
                delta0=options['delta0'], seed=seed, tol=tol,
            )
            return {**GMPointSerializer(pt).data, 'seed': seed}

        if not options['point']:
            raise CommandError('gm check needs --point')
        pt = load(options['point'], GMPointSerializer)
        checks = gm_checks(pt, tol)
        checks['smoothness'] = smoothness_hypotheses(pt, seed=seed, tol=tol)
        checks['ok'] = (
            checks['relation_residual'] <= tol.residual_abs
            and checks['level_residual'] <= tol.residual_abs
            and checks['traces']['matches_degree']
            and checks['eigenspaces_match']
        )
        return checks
