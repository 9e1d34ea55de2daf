"""
Serializers for every file the moduli commands read or write.

Complex matrices travel as {"rows", "cols", "data": [[re, im], ...]} in
row-major order; exact rationals as {"num", "den"}; floats are written with
12 significant digits.
"""
import dataclasses
import itertools
from fractions import Fraction
from pathlib import Path

import numpy as np
from rest_framework import serializers
from rest_framework.exceptions import ParseError
from rest_framework.parsers import JSONParser
from rest_framework.renderers import JSONRenderer

from moduli.models import (
    DestabilizingCertificate, EMPoint, FramedBundleModel, FramedEncoding, GMPoint,
    GPBPlane, GPBundle, NormalFormResult, ParabolicData, Plane, PluckerVector,
    PointParabolic, StabilityRecord, SubbundleWitness, SubspaceWitness, Verdict,
    WeightReport,
)

SIGNIFICANT_DIGITS = 12


def _real(value):
    return float(f'{float(value):.{SIGNIFICANT_DIGITS}g}')


# ===== FIELDS =====

class RationalField(serializers.Field):
    """Exact rational as {"num", "den"}; integers and "a/b" strings are accepted on input"""

    default_error_messages = {
        'invalid': 'Expected {{"num": int, "den": int}}, an integer or "a/b".',
        'zero_den': 'Denominator must be non-zero.',
    }

    def to_internal_value(self, data):
        if isinstance(data, dict):
            try:
                num, den = int(data['num']), int(data['den'])
            except (KeyError, TypeError, ValueError):
                self.fail('invalid')
            if den == 0:
                self.fail('zero_den')
            return Fraction(num, den)
        if isinstance(data, bool):
            self.fail('invalid')
        if isinstance(data, int):
            return Fraction(data)
        if isinstance(data, str):
            try:
                return Fraction(data)
            except (ValueError, ZeroDivisionError):
                self.fail('invalid')
        self.fail('invalid')

    def to_representation(self, value):
        value = Fraction(value)
        return {'num': value.numerator, 'den': value.denominator}


class CMatrixField(serializers.Field):
    """Complex matrix as {"rows", "cols", "data"} with data a row-major list of [re, im]"""

    default_error_messages = {
        'invalid': 'Expected {{"rows": int, "cols": int, "data": [[re, im], ...]}}.',
        'size': 'Matrix declares {rows}x{cols} but carries {count} entries.',
        'finite': 'Matrix entries must be finite.',
    }

    def to_internal_value(self, data):
        try:
            rows, cols, entries = int(data['rows']), int(data['cols']), data['data']
            values = [complex(float(re), float(im)) for re, im in entries]
        except (KeyError, TypeError, ValueError):
            self.fail('invalid')
        if rows < 0 or cols < 0 or len(values) != rows * cols:
            self.fail('size', rows=rows, cols=cols, count=len(values))
        matrix = np.array(values, dtype=complex).reshape(rows, cols)
        if not np.all(np.isfinite(matrix)):
            self.fail('finite')
        return matrix

    def to_representation(self, value):
        matrix = np.atleast_2d(np.asarray(value, dtype=complex))
        return {
            'rows': matrix.shape[0],
            'cols': matrix.shape[1],
            'data': [[_real(z.real), _real(z.imag)] for z in matrix.ravel()],
        }


class VerdictField(serializers.ChoiceField):
    def __init__(self, **kwargs):
        super().__init__(choices=Verdict.choices, **kwargs)

    def to_representation(self, value):
        return Verdict(value).value


# ===== GEOMETRY =====

class PlaneSerializer(serializers.Serializer):
    m = serializers.IntegerField(min_value=0)
    n = serializers.IntegerField(min_value=0)
    basis = CMatrixField()

    def create(self, validated_data):
        return Plane(**validated_data)


class PluckerVectorSerializer(serializers.Serializer):
    k = serializers.IntegerField(min_value=0)
    ambient = serializers.IntegerField(min_value=0)
    coords = CMatrixField()

    def to_representation(self, instance):
        return {
            'k': instance.k,
            'ambient': instance.ambient,
            'coords': CMatrixField().to_representation(instance.coords.reshape(1, -1)),
        }

    def create(self, validated_data):
        k, ambient = validated_data['k'], validated_data['ambient']
        return PluckerVector(
            k=k,
            coords=validated_data['coords'].ravel(),
            ambient=ambient,
            subsets=tuple(itertools.combinations(range(ambient), k)),
        )


class PlaneDeltaSerializer(serializers.Serializer):
    """A level pair (g, δ) for the normal form"""
    plane = PlaneSerializer()
    delta = CMatrixField()

    def create(self, validated_data):
        return PlaneSerializer().create(validated_data['plane']), validated_data['delta']


# ===== ENCODINGS AND WEIGHTS =====

class SubspaceWitnessSerializer(serializers.Serializer):
    W = CMatrixField()
    n_prime = serializers.IntegerField(min_value=1)
    delta0_prime = serializers.IntegerField()

    def create(self, validated_data):
        return SubspaceWitness(**validated_data)


class FramedEncodingSerializer(serializers.Serializer):
    p = serializers.IntegerField(min_value=1)
    n = serializers.IntegerField(min_value=1)
    ev = serializers.ListField(child=CMatrixField())
    beta = PlaneSerializer(many=True)
    delta0 = serializers.IntegerField()
    genus = serializers.IntegerField(min_value=0, default=0)
    k = serializers.IntegerField(default=1)
    witnesses = SubspaceWitnessSerializer(many=True, required=False)

    def validate(self, attrs):
        if len(attrs['ev']) != len(attrs['beta']):
            raise serializers.ValidationError('ev and beta must have one entry per marked point')
        return attrs

    def create(self, validated_data):
        witnesses = [SubspaceWitness(**w) for w in validated_data.pop('witnesses', [])]
        validated_data['beta'] = [Plane(**b) for b in validated_data['beta']]
        return FramedEncoding(**validated_data), witnesses


class EchelonInvariantsSerializer(serializers.Serializer):
    s_prime = serializers.IntegerField()
    t_prime = serializers.IntegerField()
    r_prime = serializers.IntegerField()
    m_prime = serializers.IntegerField()

    def to_representation(self, instance):
        return instance._asdict()


class WeightReportSerializer(serializers.Serializer):
    p = serializers.IntegerField()
    p_prime = serializers.IntegerField()
    n = serializers.IntegerField()
    n_prime = serializers.IntegerField()
    eta = RationalField()
    w_alpha = serializers.IntegerField()
    w_beta = serializers.ListField(child=serializers.IntegerField())
    w_W = RationalField()
    w_W_k = RationalField()
    w_W_inf = RationalField()
    w_W_A = RationalField()
    invariants = EchelonInvariantsSerializer(many=True)
    t = serializers.ListField(child=serializers.IntegerField())


# ===== FRAMED BUNDLES =====

class SubbundleWitnessSerializer(serializers.Serializer):
    n_prime = serializers.IntegerField(min_value=0)
    delta0_prime = serializers.IntegerField()
    fibers = serializers.ListField(child=CMatrixField())
    fibers_q = serializers.ListField(child=CMatrixField(), required=False, allow_null=True)
    label = serializers.CharField(allow_blank=True, default='')

    def create(self, validated_data):
        return SubbundleWitness(**validated_data)


class FramedBundleModelSerializer(serializers.Serializer):
    genus = serializers.IntegerField(min_value=0)
    n = serializers.IntegerField(min_value=1)
    delta0 = serializers.IntegerField()
    g = PlaneSerializer(many=True)
    split_type = serializers.ListField(child=serializers.IntegerField(), required=False, allow_null=True)
    witnesses = SubbundleWitnessSerializer(many=True, required=False, allow_null=True)

    def create(self, validated_data):
        witnesses = validated_data.pop('witnesses', None)
        if witnesses is not None:
            witnesses = [SubbundleWitness(**w) for w in witnesses]
        validated_data['g'] = [Plane(**g) for g in validated_data['g']]
        return FramedBundleModel(**validated_data), witnesses


class StabilityRecordSerializer(serializers.Serializer):
    verdict = VerdictField()
    certificate_size = serializers.IntegerField()
    violating_index = serializers.IntegerField(allow_null=True)
    status = serializers.CharField()

    def to_representation(self, instance):
        data = super().to_representation(instance)
        violating = instance.violating_witness
        if isinstance(violating, SubbundleWitness):
            violating = violating.describe()
        data['violating_witness'] = violating
        data['details'] = to_data(instance.details)
        return data


# ===== PARABOLIC DATA =====

class PointParabolicSerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=0)
    flag = serializers.ListField(child=CMatrixField())
    weights = serializers.ListField(child=RationalField())

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data['dims'] = instance.dims
        return data

    def create(self, validated_data):
        return PointParabolic(**validated_data)


class ParabolicDataSerializer(serializers.Serializer):
    delta0 = serializers.IntegerField(required=False, default=0)
    points = PointParabolicSerializer(many=True)

    def to_representation(self, instance):
        return {'points': PointParabolicSerializer(instance.points, many=True).data}

    def create(self, validated_data):
        points = [PointParabolic(**p) for p in validated_data['points']]
        return ParabolicData(points=points), validated_data['delta0']


class NormalFormResultSerializer(serializers.Serializer):
    rho_star = CMatrixField()
    block_sizes = serializers.ListField(child=serializers.IntegerField())
    M = CMatrixField()
    delta_hat = CMatrixField()
    stabilizer_blocks = serializers.ListField(child=serializers.IntegerField())
    off_pattern_norm = serializers.FloatField()

    def to_representation(self, instance):
        data = super().to_representation(instance)
        data['off_pattern_norm'] = _real(instance.off_pattern_norm)
        data['transforms'] = {key: CMatrixField().to_representation(value)
                              for key, value in instance.transforms.items()}
        return data


# ===== EXTENDED MODULI =====

class EMPointSerializer(serializers.Serializer):
    n = serializers.IntegerField(min_value=1)
    genus = serializers.IntegerField(min_value=0)
    A = serializers.ListField(child=CMatrixField())
    B = serializers.ListField(child=CMatrixField())
    C = serializers.ListField(child=CMatrixField())
    delta = serializers.ListField(child=CMatrixField(allow_null=True))

    def create(self, validated_data):
        return EMPoint(**validated_data)


class GMPointSerializer(serializers.Serializer):
    em = EMPointSerializer()
    b_star = serializers.ListField(child=CMatrixField())
    d_star = serializers.ListField(child=CMatrixField())
    delta0 = serializers.IntegerField(default=0)

    def create(self, validated_data):
        em = EMPoint(**validated_data.pop('em'))
        return GMPoint(em=em, **validated_data)


# ===== GENERALIZED PARABOLIC BUNDLES =====

class PlanePairSerializer(serializers.Serializer):
    gp = PlaneSerializer()
    gq = PlaneSerializer()


class GPBundleSerializer(serializers.Serializer):
    """
    Either composed ``planes`` in E_p ⊕ E_q or framing ``pairs`` (g^p, g^q)
    that are composed on load.
    """
    genus = serializers.IntegerField(min_value=0)
    n = serializers.IntegerField(min_value=1)
    delta0 = serializers.IntegerField()
    planes = PlaneSerializer(many=True, required=False)
    pairs = PlanePairSerializer(many=True, required=False)
    witnesses = SubbundleWitnessSerializer(many=True, required=False)

    def to_representation(self, instance):
        return {
            'genus': instance.genus,
            'n': instance.n,
            'delta0': instance.delta0,
            'planes': PlaneSerializer([p.plane for p in instance.planes], many=True).data,
        }

    def validate(self, attrs):
        if ('planes' in attrs) == ('pairs' in attrs):
            raise serializers.ValidationError('Give exactly one of "planes" or "pairs"')
        return attrs

    def create(self, validated_data):
        from moduli.services.gpb import compose_planes

        witnesses = [SubbundleWitness(**w) for w in validated_data.pop('witnesses', [])]
        if 'pairs' in validated_data:
            planes = [compose_planes(Plane(**pair['gp']), Plane(**pair['gq']))
                      for pair in validated_data.pop('pairs')]
        else:
            planes = [GPBPlane(plane=Plane(**p)) for p in validated_data.pop('planes')]
        return GPBundle(planes=planes, **validated_data), witnesses


class UnitaryPairSerializer(serializers.Serializer):
    """Annihilator rows (b*, d*) of the two framings over a point pair"""
    bp_star = CMatrixField()
    dp_star = CMatrixField()
    bq_star = CMatrixField()
    dq_star = CMatrixField()

    def create(self, validated_data):
        return dict(validated_data)


class DestabilizingCertificateSerializer(serializers.Serializer):
    weights_V = serializers.ListField(child=serializers.IntegerField())
    weights_framing = serializers.ListField(child=serializers.IntegerField())
    limit_weights = serializers.ListField(child=RationalField())
    common_vector = CMatrixField()
    certifies_instability = serializers.BooleanField(read_only=True)


# ===== REPORTS =====

SERIALIZERS = {
    Plane: PlaneSerializer,
    PluckerVector: PluckerVectorSerializer,
    WeightReport: WeightReportSerializer,
    StabilityRecord: StabilityRecordSerializer,
    PointParabolic: PointParabolicSerializer,
    ParabolicData: ParabolicDataSerializer,
    NormalFormResult: NormalFormResultSerializer,
    GPBundle: GPBundleSerializer,
    DestabilizingCertificate: DestabilizingCertificateSerializer,
    EMPoint: EMPointSerializer,
    GMPoint: GMPointSerializer,
}


def to_data(value):
    """Plain JSON-ready data for a report built from domain objects."""
    serializer = SERIALIZERS.get(type(value))
    if serializer is not None:
        return serializer(value).data
    if isinstance(value, GPBPlane):
        return PlaneSerializer(value.plane).data
    if isinstance(value, Verdict):
        return value.value
    if isinstance(value, Fraction):
        return RationalField().to_representation(value)
    if isinstance(value, np.ndarray):
        return CMatrixField().to_representation(value)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return _real(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_real(value.real), _real(value.imag)]
    if isinstance(value, dict):
        return {str(key): to_data(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_data(item) for item in value]
    if dataclasses.is_dataclass(value):
        return {f.name: to_data(getattr(value, f.name)) for f in dataclasses.fields(value)}
    return value


def render_report(report) -> bytes:
    return JSONRenderer().render(to_data(report))


def load_json(path):
    """Parse a JSON file; malformed input raises ParseError with line and column."""
    path = Path(path)
    if not path.exists():
        raise ParseError(f'File not found: {path}')
    with path.open('rb') as stream:
        return JSONParser().parse(stream)


def load(path, serializer_class):
    serializer = serializer_class(data=load_json(path))
    serializer.is_valid(raise_exception=True)
    return serializer.save()
