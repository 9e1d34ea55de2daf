from moduli.management.commands._base import ModuliCommand
from moduli.schemas import GMPointSerializer, load
from moduli.services.extended_moduli import em_moment, relation_residual, solve_delta1


class Command(ModuliCommand):
    help = 'Solve for δ_1 or evaluate the group relation of an extended moduli point'

    def add_command_arguments(self, parser):
        parser.add_argument('action', choices=['solve', 'residual'])
        parser.add_argument('--point', type=str, required=True, help='GM point JSON file')

    def run(self, tol, seed, **options):
        pt = load(options['point'], GMPointSerializer)
        em = pt.em
        if options['action'] == 'solve':
            em = solve_delta1(em, tol)
        residual = relation_residual(em)
        return {
            'action': options['action'],
            'n': em.n,
            'genus': em.genus,
            'ell': em.ell,
            'delta': em_moment(em),
            'relation_residual': residual,
            'ok': residual <= tol.residual_abs,
        }
