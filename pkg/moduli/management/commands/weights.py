from django.core.management.base import CommandError

from moduli.management.commands._base import ModuliCommand
from moduli.models import Verdict
from moduli.schemas import FramedEncodingSerializer, load
from moduli.services.git_weights import (
    alpha_weight, brute_force_alpha_weight, brute_force_beta_weight, classify_k_stability,
    w_report,
)


class Command(ModuliCommand):
    help = 'Hilbert-Mumford weights of an (α, β) encoding against subspace witnesses'

    def add_command_arguments(self, parser):
        parser.add_argument('--encoding', type=str, required=True, help='Encoding JSON file with witnesses')
        parser.add_argument(
            '--brute-force',
            action='store_true',
            help='Cross-check the closed formulas against coordinate enumeration',
        )

    def run(self, tol, seed, **options):
        enc, witnesses = load(options['encoding'], FramedEncodingSerializer)
        if not witnesses:
            raise CommandError('The encoding file lists no witnesses')

        verdict = Verdict.STABLE
        entries = []
        for wit in witnesses:
            report = w_report(enc, wit, tol)
            contribution = classify_k_stability(report)
            verdict = verdict.combine(contribution)
            entry = {'report': report, 'verdict': contribution}
            if options['brute_force']:
                alpha = [brute_force_alpha_weight(ev, wit.W, tol) for ev in enc.ev]
                beta = [brute_force_beta_weight(b, wit.W, tol) for b in enc.beta]
                entry['brute_force'] = {'alpha': alpha, 'beta': beta}
                # the coordinate weight of α at a point sees m', the rank of ev_i(W)
                expected = [
                    alpha_weight(enc.p, wit.p_prime, enc.n, inv.m_prime) for inv in report.invariants
                ]
                entry['oracle_agrees'] = alpha == expected and beta == report.w_beta
            entries.append(entry)
        return {
            'p': enc.p,
            'n': enc.n,
            'k': enc.k,
            'witnesses': entries,
            'verdict': verdict,
            'ok': verdict != Verdict.UNSTABLE and all(e.get('oracle_agrees', True) for e in entries),
        }
