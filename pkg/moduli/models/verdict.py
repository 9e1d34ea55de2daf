from dataclasses import dataclass, field
from typing import Any, List, Optional

from django.db import models


class Verdict(models.TextChoices):
    """
    Stability verdicts. SEMISTABLE comes from non-strict inequalities;
    STRICTLY_SEMISTABLE marks a weight that vanishes exactly.
    """
    STABLE = 'stable', 'Stable'
    SEMISTABLE = 'semistable', 'Semistable'
    STRICTLY_SEMISTABLE = 'strictly_semistable', 'Strictly semistable'
    UNSTABLE = 'unstable', 'Unstable'

    @property
    def severity(self):
        return VERDICT_SEVERITY[self.value]

    def combine(self, other):
        """Worse of two verdicts; Unstable is absorbing."""
        other = Verdict(other)
        return self if self.severity >= other.severity else other

    @property
    def is_semistable(self):
        return self != Verdict.UNSTABLE


VERDICT_SEVERITY = {
    'stable': 0,
    'semistable': 1,
    'strictly_semistable': 2,
    'unstable': 3,
}


class CertificateStatus(models.TextChoices):
    COMPLETE = 'complete', 'Complete'
    INCOMPLETE = 'incomplete_certificate', 'Incomplete certificate'


@dataclass(frozen=True)
class StabilityRecord:
    """Verdict relative to an explicit witness list"""

    verdict: Verdict
    certificate_size: int
    violating_witness: Optional[Any] = None
    violating_index: Optional[int] = None
    status: str = CertificateStatus.COMPLETE
    details: List[dict] = field(default_factory=list)

    @property
    def is_semistable(self):
        return self.verdict.is_semistable
