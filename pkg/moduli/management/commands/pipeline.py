from moduli.management.commands._base import ModuliCommand
from moduli.schemas import GMPointSerializer, load
from moduli.services.extended_moduli import random_gm_point
from moduli.services.pipeline import cmd_pipeline


class Command(ModuliCommand):
    help = 'GM point to parabolic data to framed verdicts, as one report'

    def add_command_arguments(self, parser):
        parser.add_argument('--point', type=str, help='GM point JSON file (default: seeded random point)')
        parser.add_argument('--n', type=int, default=1)
        parser.add_argument('--genus', type=int, default=0)
        parser.add_argument('--ell', type=int, default=2)

    def run(self, tol, seed, **options):
        if options['point']:
            pt = load(options['point'], GMPointSerializer)
        else:
            pt = random_gm_point(options['n'], options['genus'], options['ell'], seed=seed, tol=tol)
        return cmd_pipeline(pt, tol, seed=seed)
