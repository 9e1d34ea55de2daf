from moduli.management.commands._base import ModuliCommand
from moduli.models import Verdict
from moduli.schemas import FramedBundleModelSerializer, load
from moduli.services.correspondence import (
    parabolic_from_model, parabolic_semistable, pardeg, vertex_weights,
)
from moduli.services.framed_bundle import (
    check_semistable, framing_bounds, plane_invariants, pseudo_semistable, slope_bound_check,
)


class Command(ModuliCommand):
    help = 'Framed, pseudo and parabolic (semi)stability of a framed bundle model'

    def add_command_arguments(self, parser):
        parser.add_argument('--model', type=str, required=True, help='Framed bundle model JSON file')
        parser.add_argument(
            '--vertex',
            type=int,
            nargs='+',
            help='Weight-simplex vertex k_i per marked point for the parabolic verdict',
        )

    def run(self, tol, seed, **options):
        model, witnesses = load(options['model'], FramedBundleModelSerializer)
        framed = check_semistable(model, witnesses, tol=tol, seed=seed)
        pseudo = pseudo_semistable(model, witnesses, tol=tol, seed=seed)
        report = {
            'n': model.n,
            'ell': model.ell,
            'delta0': model.delta0,
            'plane_invariants': plane_invariants(model, tol),
            'framing_slack': framing_bounds(model, tol),
            'slope_bounds': slope_bound_check(model),
            'framed': framed,
            'pseudo': pseudo,
        }
        verdict = framed.verdict
        if options['vertex']:
            weights = [vertex_weights(model.n, k) for k in options['vertex']]
            parabolic = parabolic_from_model(model, weights, tol=tol)
            record = parabolic_semistable(model, parabolic, witnesses or [], tol)
            report['parabolic'] = {
                'vertex': options['vertex'],
                'pardeg': pardeg(model.delta0, parabolic),
                'record': record,
            }
        report['verdict'] = verdict
        report['ok'] = verdict != Verdict.UNSTABLE
        return report
