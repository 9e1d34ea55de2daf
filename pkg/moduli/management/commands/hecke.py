from moduli.management.commands._base import ModuliCommand
from moduli.schemas import ParabolicDataSerializer, load
from moduli.services.correspondence import hecke_shift, pardeg


class Command(ModuliCommand):
    help = 'Hecke shift of parabolic data at one marked point'

    def add_command_arguments(self, parser):
        parser.add_argument('--parabolic', type=str, required=True, help='Parabolic data JSON file with delta0')
        parser.add_argument('--point', type=int, default=0, help='Marked point to shift at')

    def run(self, tol, seed, **options):
        parabolic, delta0 = load(options['parabolic'], ParabolicDataSerializer)
        shifted, delta0_shifted = hecke_shift(parabolic, delta0, point=options['point'], tol=tol)
        before, after = pardeg(delta0, parabolic), pardeg(delta0_shifted, shifted)
        return {
            'point': options['point'],
            'delta0': delta0,
            'delta0_shifted': delta0_shifted,
            'parabolic': shifted,
            'pardeg_before': before,
            'pardeg_after': after,
            'ok': before == after,
        }
