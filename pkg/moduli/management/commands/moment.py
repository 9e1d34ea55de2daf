import numpy as np

from moduli.management.commands._base import ModuliCommand
from moduli.schemas import PlaneSerializer, load
from moduli.services.grassmann import (
    hermitian_moment, intersection_dims, moment_left, moment_left_graph, moment_right,
    moment_right_graph, plane_from_graph, plane_to_graph, plucker,
)
from moduli.services.linalg_core import complex_gaussian, frobenius, make_rng


class Command(ModuliCommand):
    help = 'Moment maps of a plane, from the annihilator rows and from the graph formulas'

    def add_command_arguments(self, parser):
        parser.add_argument('--plane', type=str, help='Plane JSON file (default: seeded random graph)')
        parser.add_argument('--m', type=int, default=2, help='First summand dimension for random graphs')
        parser.add_argument('--n', type=int, default=2, help='Second summand dimension for random graphs')
        parser.add_argument('--plucker', action='store_true', help='Include Plücker coordinates')

    def run(self, tol, seed, **options):
        if options['plane']:
            plane = load(options['plane'], PlaneSerializer)
        else:
            gamma = complex_gaussian(make_rng(seed), (options['n'], options['m']))
            plane = plane_from_graph(gamma)

        right, left = moment_right(plane, tol), moment_left(plane, tol)
        s, t = intersection_dims(plane, tol)
        report = {
            'm': plane.m,
            'n': plane.n,
            's': s,
            't': t,
            'moment_right': right,
            'moment_left': left,
            'spectrum_right': np.linalg.eigvalsh(hermitian_moment(right)),
            'spectrum_left': np.linalg.eigvalsh(hermitian_moment(left)),
        }
        residuals = []
        if t == 0:
            gamma = plane_to_graph(plane, tol)
            residuals = [
                frobenius(moment_right_graph(gamma) - right),
                frobenius(moment_left_graph(gamma) - left),
            ]
            report['graph_residuals'] = residuals
        if options['plucker']:
            report['plucker'] = plucker(plane, tol)
        report['ok'] = all(r <= tol.residual_abs for r in residuals)
        return report
