from moduli.management.commands._base import ModuliCommand
from moduli.schemas import GMPointSerializer, load
from moduli.services.correspondence import correspondence_report
from moduli.services.extended_moduli import random_gm_point


class Command(ModuliCommand):
    help = 'Parabolic data, normalized planes and parabolic degree of a GM point'

    def add_command_arguments(self, parser):
        parser.add_argument('--point', type=str, help='GM point JSON file (default: seeded random point)')
        parser.add_argument('--n', type=int, default=2)
        parser.add_argument('--genus', type=int, default=0)
        parser.add_argument('--ell', type=int, default=2)

    def run(self, tol, seed, **options):
        if options['point']:
            pt = load(options['point'], GMPointSerializer)
        else:
            pt = random_gm_point(options['n'], options['genus'], options['ell'], seed=seed, tol=tol)
        report = correspondence_report(pt, tol)
        off_pattern = max((nf.off_pattern_norm for nf in report['normal_forms']), default=0.0)
        return {
            'delta0': pt.delta0,
            'parabolic': report['parabolic'],
            'pardeg': report['pardeg'],
            'planes': report['planes'],
            'normal_forms': report['normal_forms'],
            'moment_values': [nf.delta_hat for nf in report['normal_forms']],
            'ok': off_pattern <= max(tol.residual_abs, 1e-8),
        }
