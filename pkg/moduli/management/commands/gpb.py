import numpy as np

from moduli.management.commands._base import ModuliCommand
from moduli.models import Plane, Verdict
from moduli.schemas import GPBundleSerializer, UnitaryPairSerializer, load, load_json
from moduli.services.gpb import (
    compose_planes, degree_bound_ok, gpb_pardeg, gpb_semistable, inequality_chain,
    plucker_compose, unitary_compose, unitary_compose_plane,
)
from moduli.services.grassmann import plucker
from moduli.services.linalg_core import dagger, frobenius

PLUCKER_AGREEMENT = 1e-8


class Command(ModuliCommand):
    help = 'Compose framings over point pairs and check generalized parabolic bundles'

    def add_command_arguments(self, parser):
        parser.add_argument('action', choices=['compose', 'check', 'unitary_compose'])
        parser.add_argument('--input', type=str, required=True, help='GPB or unitary-pair JSON file')

    def run(self, tol, seed, **options):
        action = options['action']
        if action == 'compose':
            return self.compose(options['input'], tol)
        if action == 'check':
            return self.check(options['input'], tol)
        return self.unitary(options['input'], tol)

    def compose(self, path, tol):
        serializer = GPBundleSerializer(data=load_json(path))
        serializer.is_valid(raise_exception=True)
        pairs = serializer.validated_data.get('pairs', [])
        composed, agreement = [], []
        for pair in pairs:
            gp, gq = Plane(**pair['gp']), Plane(**pair['gq'])
            plane = compose_planes(gp, gq, tol)
            via_plucker = plucker_compose(plucker(gp, tol), plucker(gq, tol), tol)
            composed.append(plane)
            agreement.append(plucker(plane.plane, tol).projective_distance(via_plucker))
        return {
            'planes': composed,
            'plucker_distance': agreement,
            'ok': all(d <= PLUCKER_AGREEMENT for d in agreement),
        }

    def check(self, path, tol):
        bundle, witnesses = load(path, GPBundleSerializer)
        record = gpb_semistable(bundle, witnesses, tol)
        chains = [inequality_chain(bundle, wit, tol) for wit in witnesses if wit.n_prime < bundle.n]
        return {
            'n': bundle.n,
            'ell': bundle.ell,
            'delta0': bundle.delta0,
            'pardeg': gpb_pardeg(bundle),
            'record': record,
            'degree_bound_ok': degree_bound_ok(bundle.n, bundle.ell, bundle.delta0),
            'inequality_chains': chains,
            'ok': record.verdict != Verdict.UNSTABLE,
        }

    def unitary(self, path, tol):
        data = load(path, UnitaryPairSerializer)
        rows, D = unitary_compose(data['bp_star'], data['dp_star'], data['bq_star'], data['dq_star'], tol)
        defect = frobenius(rows @ dagger(rows) - np.eye(rows.shape[0]))
        return {
            'rows': rows,
            'D': D,
            'plane': unitary_compose_plane(
                data['bp_star'], data['dp_star'], data['bq_star'], data['dq_star'], tol,
            ),
            'orthonormality_defect': defect,
            'ok': defect <= tol.residual_abs,
        }
