import json
import math
import os

from django.core.exceptions import ValidationError
from django.test import SimpleTestCase

from . import TemporaryOutputMixin
from .. import settings as app_settings
from ..config import (CHARACTERISTICS, CUSTOM, FIG1, FIG2, FIG4, SCENARIO_DEFAULTS, SPECTRAL,
                      ExperimentConfig, eta_for_chi, load_config, merge_defaults, resolve_grid,
                      validate_config)
from ..decoherence import chi


class TestSchema(SimpleTestCase):
    def test_valid(self):
        validate_config({'scenario': CUSTOM, 'system': {'K': 1.0, 'eta': 0.3}, 'n_kicks': 3})

    def test_unknown_scenario(self):
        with self.assertRaises(ValidationError):
            validate_config({'scenario': 'fig9'})

    def test_missing_scenario(self):
        with self.assertRaises(ValidationError):
            validate_config({'system': {'K': 1.0, 'eta': 0.3}})

    def test_unknown_property(self):
        with self.assertRaises(ValidationError):
            validate_config({'scenario': CUSTOM, 'colour': 'red'})

    def test_error_path(self):
        try:
            validate_config({'scenario': CUSTOM, 'grid': {'n_q': 100, 'n_p': 128}})
        except ValidationError as e:
            self.assertIn('Invalid configuration triggered by "#/grid/n_q"', e.message)
        else:
            self.fail('ValidationError not raised')

    def test_negative_eta(self):
        with self.assertRaises(ValidationError):
            validate_config({'scenario': CUSTOM, 'system': {'K': 1.0, 'eta': -0.3}})

    def test_small_ensemble(self):
        with self.assertRaises(ValidationError):
            validate_config({'scenario': CUSTOM, 'trajectories': 100})


class TestDefaults(SimpleTestCase):
    def test_merge(self):
        merged = merge_defaults({'scenario': FIG2, 'system': {'K': 3.0}, 'n_kicks': 5})
        self.assertEqual(merged['system'], {'K': 3.0})
        self.assertEqual(merged['n_kicks'], 5)
        self.assertEqual(merged['pairs'], SCENARIO_DEFAULTS[FIG2]['pairs'])
        self.assertEqual(SCENARIO_DEFAULTS[FIG2]['system'], {'K': 2.0})

    def test_nested_merge(self):
        merged = merge_defaults({'scenario': FIG1, 'deco': {'D': 1e-3}})
        self.assertEqual(merged['deco'], {'D': 1e-3, 'gamma_tau': 0.0, 'nbar': 0.0})

    def test_config_defaults(self):
        config = ExperimentConfig.from_dict({'scenario': CUSTOM, 'system': {'K': 1.0, 'eta': 0.3}})
        self.assertEqual(config.n_kicks, app_settings.DEFAULT_KICKS)
        self.assertEqual(config.window, tuple(app_settings.DEFAULT_WINDOW))
        self.assertEqual(config.cells_per_sigma, app_settings.MIN_CELLS_PER_SIGMA)
        self.assertAlmostEqual(config.system.nu_tau, math.pi / 3)
        self.assertTrue(config.deco.unitary)


class TestResolveGrid(SimpleTestCase):
    window = (-2 * math.pi, 2 * math.pi)

    def test_auto(self):
        spec = resolve_grid(0.3, 0.0, self.window, 8)
        # 8 cells per 0.3 over a width of 4 pi need 335 cells
        self.assertEqual((spec.n_q, spec.n_p), (512, 512))
        self.assertEqual((spec.q_min, spec.p_max), self.window)

    def test_diffusion_widens(self):
        narrow = resolve_grid(0.05, 0.0, self.window, 8)
        wide = resolve_grid(0.05, 0.01, self.window, 8)
        self.assertLess(wide.n_q, narrow.n_q)

    def test_explicit(self):
        spec = resolve_grid(0.3, 0.0, self.window, 2, {'n_q': 128, 'n_p': 256})
        self.assertEqual((spec.n_q, spec.n_p), (128, 256))

    def test_explicit_too_coarse(self):
        with self.assertRaises(ValidationError):
            resolve_grid(0.3, 0.0, self.window, 8, {'n_q': 128, 'n_p': 128})

    def test_too_large(self):
        with self.assertRaises(ValidationError):
            resolve_grid(0.003, 0.0, (-4 * math.pi, 4 * math.pi), 8)


class TestExperimentConfig(SimpleTestCase):
    def test_eta_for_chi(self):
        for value in (0.01, 0.017, 1.0):
            self.assertAlmostEqual(chi(2.0, eta_for_chi(value, 2.0, 4.5e-4), 4.5e-4), value)

    def test_first_pair_eta(self):
        config = ExperimentConfig.from_dict({'scenario': FIG2})
        self.assertEqual(config.system.eta, 0.1)
        self.assertEqual(config.system.K, 2.0)
        self.assertEqual(len(config.pairs), 3)

    def test_missing_eta(self):
        with self.assertRaises(ValidationError):
            ExperimentConfig.from_dict({'scenario': CUSTOM, 'system': {'K': 1.0}})

    def test_empty_pairs(self):
        with self.assertRaises(ValidationError):
            ExperimentConfig(scenario=FIG2, system=ExperimentConfig.from_dict({'scenario': FIG2}).system)

    def test_chi_mismatches(self):
        self.assertEqual(ExperimentConfig.from_dict({'scenario': FIG2}).chi_mismatches(), [])
        config = ExperimentConfig.from_dict({'scenario': FIG2, 'pairs': [[0.04, 4.5e-3], [0.007, 4.5e-5]]})
        mismatches = config.chi_mismatches()
        self.assertEqual([m[:2] for m in mismatches], [(0.007, 4.5e-5)])
        self.assertAlmostEqual(mismatches[0][2], 0.0159, places=4)

    def test_scan_points(self):
        config = ExperimentConfig.from_dict({'scenario': FIG4})
        points = config.scan_points()
        self.assertEqual(len(points), 7)
        self.assertAlmostEqual(chi(2.0, *points[0]), 0.01)
        self.assertAlmostEqual(chi(2.0, *points[-1]), 1.0)
        self.assertTrue(all(D == 4.5e-4 for _, D in points))

    def test_scan_eta_list(self):
        config = ExperimentConfig.from_dict({'scenario': FIG4, 'eta_list': [0.05, 0.02]})
        self.assertEqual(config.scan_points(), [(0.05, 4.5e-4), (0.02, 4.5e-4)])

    def test_as_dict(self):
        config = ExperimentConfig.from_dict({'scenario': FIG2, 'n_kicks': 12})
        data = config.as_dict()
        self.assertEqual(data['n_kicks'], 12)
        self.assertEqual(data['pairs'][0], [0.1, 5.13e-2])
        self.assertEqual(data['grid'], {'n_q': 1024, 'n_p': 1024})
        # resolved configurations are plain JSON
        json.dumps(data)


    def test_unitary_defaults(self):
        config = ExperimentConfig.from_dict({'scenario': FIG1})
        self.assertEqual(config.classical_method, CHARACTERISTICS)
        self.assertEqual(config.n_kicks, 12)
        self.assertEqual(config.grid, {'n_q': 2048, 'n_p': 2048})
        self.assertEqual(config.as_dict()['classical_method'], CHARACTERISTICS)
        self.assertEqual(ExperimentConfig.from_dict({'scenario': FIG2}).classical_method, SPECTRAL)


class TestInvariants(SimpleTestCase):
    def test_semiclassical_eta(self):
        for data in ({'scenario': FIG1, 'system': {'eta': 1.5}},
                     {'scenario': FIG1, 'system': {'eta': 1.0}},
                     {'scenario': FIG2, 'pairs': [[0.1, 5.13e-2], [1.2, 0.5]]},
                     {'scenario': FIG4, 'eta_list': [0.05, 1.1]},
                     {'scenario': FIG4, 'chi_list': [0.1, 1e6]}):
            with self.assertRaises(ValidationError) as context:
                ExperimentConfig.from_dict(data)
            self.assertIn('needs eta < 1', context.exception.message)

    def test_custom_eta(self):
        config = ExperimentConfig.from_dict({'scenario': CUSTOM, 'system': {'K': 1.0, 'eta': 1.5}})
        self.assertEqual(config.system.eta, 1.5)

    def test_characteristics_unitary_only(self):
        with self.assertRaises(ValidationError):
            ExperimentConfig.from_dict({'scenario': FIG1, 'deco': {'D': 1e-3}})
        config = ExperimentConfig.from_dict({'scenario': FIG1, 'deco': {'D': 1e-3},
                                             'classical_method': SPECTRAL})
        self.assertEqual(config.classical_method, SPECTRAL)

    def test_characteristics_scenarios(self):
        with self.assertRaises(ValidationError):
            ExperimentConfig.from_dict({'scenario': FIG2, 'classical_method': CHARACTERISTICS})
        config = ExperimentConfig.from_dict({'scenario': CUSTOM, 'system': {'K': 1.0, 'eta': 0.3},
                                             'classical_method': CHARACTERISTICS})
        self.assertEqual(config.classical_method, CHARACTERISTICS)

    def test_unknown_method(self):
        with self.assertRaises(ValidationError):
            validate_config({'scenario': CUSTOM, 'classical_method': 'leapfrog'})

class TestLoadConfig(TemporaryOutputMixin, SimpleTestCase):
    def _write(self, content):
        path = os.path.join(self.output_dir, 'config.json')
        with open(path, 'w') as f:
            f.write(content)
        return path

    def test_file(self):
        path = self._write(json.dumps({'scenario': CUSTOM, 'system': {'K': 1.0, 'eta': 0.3}}))
        self.assertEqual(load_config(path).system.K, 1.0)

    def test_mapping(self):
        self.assertEqual(load_config({'scenario': FIG1}).system.eta, 0.3)

    def test_missing_file(self):
        with self.assertRaises(ValidationError):
            load_config(os.path.join(self.output_dir, 'missing.json'))

    def test_bad_json(self):
        with self.assertRaises(ValidationError):
            load_config(self._write('{"scenario": '))

    def test_not_an_object(self):
        with self.assertRaises(ValidationError):
            load_config(self._write('[1, 2]'))
