import numpy as np

from moduli.management.commands._base import ModuliCommand
from moduli.schemas import PlaneDeltaSerializer, load
from moduli.services.correspondence import level_moment_plane, normal_form
from moduli.services.extended_moduli import level_planes
from moduli.services.linalg_core import frobenius, make_rng, random_hermitian_with_spectrum


class Command(ModuliCommand):
    help = 'Block normal form of a level plane (g, δ)'

    def add_command_arguments(self, parser):
        parser.add_argument('--input', type=str, help='JSON file with "plane" and "delta"')
        parser.add_argument('--n', type=int, default=3, help='Rank of a seeded random pair')
        parser.add_argument('--s', type=int, default=0, help='Eigenvalues at 1/2 in a random δ')
        parser.add_argument('--t', type=int, default=0, help='Eigenvalues at -1/2 in a random δ')

    def run(self, tol, seed, **options):
        if options['input']:
            plane, delta = load(options['input'], PlaneDeltaSerializer)
        else:
            rng = make_rng(seed)
            n, s, t = options['n'], options['s'], options['t']
            interior = rng.uniform(-0.45, 0.45, size=max(n - s - t, 0))
            spectrum = np.concatenate([[0.5] * s, interior, [-0.5] * t])
            delta = random_hermitian_with_spectrum(spectrum, rng)
            plane = level_moment_plane(*level_planes(delta, rng))

        result = normal_form(plane, delta, tol)
        again = normal_form(result.plane, result.delta_hat, tol)
        idempotent = frobenius(again.rho_star - result.rho_star) <= 1e-8 and again.plane.same_as(result.plane, 1e-8)
        return {
            'normal_form': result,
            'idempotent': idempotent,
            'ok': result.off_pattern_norm <= 1e-8 and idempotent,
        }
