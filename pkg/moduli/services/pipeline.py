"""
GM point → parabolic data → framed bundle verdicts, as a single report.
"""
import logging
from typing import Optional

from moduli.models import FramedBundleModel, GMPoint, Verdict
from moduli.services.correspondence import correspondence_report, parabolic_semistable
from moduli.services.extended_moduli import (
    eigenspace_identity, gm_level_residual, relation_residual, trace_checks,
)
from moduli.services.framed_bundle import check_semistable, plane_invariants
from moduli.services.linalg_core import Tolerance, resolve_tolerance

logger = logging.getLogger(__name__)


def gm_checks(pt: GMPoint, tol: Optional[Tolerance] = None) -> dict:
    tol = resolve_tolerance(tol)
    eigenspaces = eigenspace_identity(pt, tol)
    return {
        'relation_residual': relation_residual(pt.em),
        'level_residual': gm_level_residual(pt),
        'traces': trace_checks(pt),
        'eigenspaces': eigenspaces,
        'eigenspaces_match': all(
            e['plus_half'] == e['kernel_b'] and e['minus_half'] == e['kernel_d'] for e in eigenspaces
        ),
    }


def cmd_pipeline(pt: GMPoint, tol: Optional[Tolerance] = None, seed=None) -> dict:
    tol = resolve_tolerance(tol)
    checks = gm_checks(pt, tol)
    correspondence = correspondence_report(pt, tol)
    model = FramedBundleModel(
        genus=pt.genus,
        n=pt.n,
        delta0=pt.delta0,
        g=correspondence['planes'],
    )
    framed = check_semistable(model, tol=tol, seed=seed)
    parabolic = parabolic_semistable(model, correspondence['parabolic'], [], tol)

    residuals = {
        'relation': checks['relation_residual'],
        'level': checks['level_residual'],
        'normal_form': max((nf.off_pattern_norm for nf in correspondence['normal_forms']), default=0.0),
    }
    within = all(value <= tol.residual_abs for value in residuals.values())
    if not within:
        logger.warning(f'Pipeline residuals over tolerance: {residuals}')
    verdict = framed.verdict.combine(parabolic.verdict)
    logger.info(f'Pipeline verdict {verdict.value} for n={pt.n}, ℓ={pt.ell}, δ₀={pt.delta0}')
    return {
        'n': pt.n,
        'genus': pt.genus,
        'ell': pt.ell,
        'delta0': pt.delta0,
        'checks': checks,
        'plane_invariants': plane_invariants(model, tol),
        'parabolic': correspondence['parabolic'],
        'pardeg': correspondence['pardeg'],
        'framed': framed,
        'parabolic_verdict': parabolic,
        'verdict': verdict,
        'residuals': residuals,
        'within_tolerance': within,
        'ok': within and verdict != Verdict.UNSTABLE,
    }
