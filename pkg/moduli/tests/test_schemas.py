import json
import tempfile
from fractions import Fraction
from pathlib import Path

import numpy as np
from django.test import SimpleTestCase
from rest_framework import serializers
from rest_framework.exceptions import ParseError, ValidationError

from moduli.models import Verdict
from moduli.schemas import (
    CMatrixField, GMPointSerializer, GPBundleSerializer, PlaneSerializer, RationalField,
    load, load_json, render_report, to_data,
)
from moduli.services.extended_moduli import random_gm_point
from moduli.services.grassmann import diagonal_plane, plane_from_graph, plucker


class FieldTests(SimpleTestCase):
    def test_rational_inputs(self):
        field = RationalField()
        self.assertEqual(field.to_internal_value({'num': 3, 'den': 6}), Fraction(1, 2))
        self.assertEqual(field.to_internal_value(-2), Fraction(-2))
        self.assertEqual(field.to_internal_value('7/3'), Fraction(7, 3))
        self.assertEqual(field.to_representation(Fraction(-4, 6)), {'num': -2, 'den': 3})

    def test_rational_rejects_bad_input(self):
        field = RationalField()
        for bad in ({'num': 1, 'den': 0}, True, 0.5, 'half', {'num': 1}):
            with self.assertRaises(serializers.ValidationError):
                field.to_internal_value(bad)

    def test_matrix_layout_is_row_major(self):
        data = {'rows': 2, 'cols': 2, 'data': [[1, 0], [0, 1], [2, -1], [0, 0]]}
        matrix = CMatrixField().to_internal_value(data)
        np.testing.assert_array_equal(matrix, np.array([[1, 1j], [2 - 1j, 0]]))
        self.assertEqual(CMatrixField().to_representation(matrix), {
            'rows': 2, 'cols': 2, 'data': [[1.0, 0.0], [0.0, 1.0], [2.0, -1.0], [0.0, 0.0]],
        })

    def test_matrix_rejects_missing_keys(self):
        with self.assertRaisesMessage(serializers.ValidationError, '"rows": int'):
            CMatrixField().to_internal_value({'rows': 1})

    def test_matrix_size_mismatch(self):
        with self.assertRaises(serializers.ValidationError):
            CMatrixField().to_internal_value({'rows': 2, 'cols': 2, 'data': [[1, 0]]})

    def test_matrix_must_be_finite(self):
        with self.assertRaises(serializers.ValidationError):
            CMatrixField().to_internal_value({'rows': 1, 'cols': 1, 'data': [['nan', 0]]})

    def test_floats_keep_twelve_digits(self):
        self.assertEqual(to_data(1 / 3), 0.333333333333)


class ReportTests(SimpleTestCase):
    def test_domain_objects(self):
        data = to_data({
            'verdict': Verdict.SEMISTABLE,
            'pardeg': Fraction(7, 2),
            'plane': diagonal_plane(1),
            'plucker': plucker(diagonal_plane(1)),
            'flags': (np.bool_(True), np.int64(3)),
        })
        self.assertEqual(data['verdict'], 'semistable')
        self.assertEqual(data['pardeg'], {'num': 7, 'den': 2})
        self.assertEqual(data['plane']['m'], 1)
        self.assertEqual(data['plucker']['coords']['cols'], 2)
        self.assertEqual(data['flags'], [True, 3])

    def test_strictly_semistable_verdict(self):
        self.assertEqual(to_data({'v': Verdict.STRICTLY_SEMISTABLE}), {'v': 'strictly_semistable'})

    def test_render_is_json(self):
        payload = json.loads(render_report({'value': Fraction(1, 3)}))
        self.assertEqual(payload, {'value': {'num': 1, 'den': 3}})


class LoadTests(SimpleTestCase):
    def setUp(self):
        self.directory = tempfile.TemporaryDirectory()
        self.root = Path(self.directory.name)

    def tearDown(self):
        self.directory.cleanup()

    def write(self, name, content):
        path = self.root / name
        path.write_text(content if isinstance(content, str) else json.dumps(content))
        return path

    def test_missing_file(self):
        with self.assertRaises(ParseError):
            load_json(self.root / 'absent.json')

    def test_malformed_json_reports_position(self):
        path = self.write('broken.json', '{\n  "m": 1,\n  "n": \n}')
        with self.assertRaises(ParseError) as ctx:
            load_json(path)
        self.assertIn('line 4', str(ctx.exception.detail))

    def test_plane_round_trip(self):
        plane = plane_from_graph(np.array([[1.0, 2.0], [0.5j, -1.0]]))
        path = self.write('plane.json', PlaneSerializer(plane).data)
        self.assertTrue(load(path, PlaneSerializer).same_as(plane, angle_tol=1e-10))

    def test_invalid_plane_is_rejected(self):
        path = self.write('plane.json', {'m': 1, 'n': 1})
        with self.assertRaises(ValidationError):
            load(path, PlaneSerializer)

    def test_gm_point_file(self):
        point = random_gm_point(2, 1, 2, seed=3)
        path = self.write('gm.json', to_data(point))
        loaded = load(path, GMPointSerializer)
        self.assertEqual(loaded.delta0, point.delta0)
        for a, b in zip(loaded.b_star, point.b_star):
            np.testing.assert_allclose(a, b, atol=1e-11)

    def test_gpb_needs_planes_or_pairs(self):
        path = self.write('gpb.json', {'genus': 0, 'n': 1, 'delta0': 0})
        with self.assertRaises(ValidationError):
            load(path, GPBundleSerializer)

    def test_gpb_pairs_are_composed(self):
        identity = to_data(diagonal_plane(2))
        path = self.write('gpb.json', {
            'genus': 0, 'n': 2, 'delta0': 0, 'pairs': [{'gp': identity, 'gq': identity}],
        })
        bundle, witnesses = load(path, GPBundleSerializer)
        self.assertEqual(witnesses, [])
        self.assertTrue(bundle.planes[0].plane.same_as(diagonal_plane(2)))
