from .plane import Plane, PluckerVector
from .verdict import Verdict, CertificateStatus, StabilityRecord
from .encoding import FramedEncoding, SubspaceWitness, EchelonInvariants, WeightReport
from .framed_bundle import FramedBundleModel, SubbundleWitness
from .parabolic import PointParabolic, ParabolicData, NormalFormResult
from .em_point import EMPoint, GMPoint
from .gpb_bundle import GPBPlane, GPBundle, DestabilizingCertificate

__all__ = [
    'Plane',
    'PluckerVector',
    'Verdict',
    'CertificateStatus',
    'StabilityRecord',
    'FramedEncoding',
    'SubspaceWitness',
    'EchelonInvariants',
    'WeightReport',
    'FramedBundleModel',
    'SubbundleWitness',
    'PointParabolic',
    'ParabolicData',
    'NormalFormResult',
    'EMPoint',
    'GMPoint',
    'GPBPlane',
    'GPBundle',
    'DestabilizingCertificate',
]
