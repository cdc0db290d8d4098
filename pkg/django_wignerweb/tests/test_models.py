import os
from unittest import mock

from django.core.exceptions import ValidationError
from django.test import TestCase

from . import CreateExperimentMixin
from .. import settings as app_settings
from ..exceptions import LeakageError
from ..models import Artifact, Experiment
from ..signals import experiment_status_changed


class TestExperiment(CreateExperimentMixin, TestCase):
    """
    tests for Experiment model
    """
    experiment_model = Experiment

    def test_str(self):
        e = Experiment(name='test')
        self.assertEqual(str(e), 'test')

    def test_default_status(self):
        e = self._create_experiment()
        self.assertEqual(e.status, 'pending')

    def test_default_output_dir(self):
        e = Experiment(name='collapse', scenario='custom')
        self.assertEqual(e.get_output_dir(), os.path.join(app_settings.OUTPUT_DIR, 'collapse'))

    def test_invalid_name(self):
        with self.assertRaises(ValidationError) as context:
            self._create_experiment(name='no spaces/allowed')
        self.assertIn('name', context.exception.message_dict)

    def test_config_none(self):
        e = Experiment(name='test', scenario='fig1_unitary', config=None, output_dir=self.output_dir)
        e.full_clean()
        self.assertEqual(e.config, {})

    def test_invalid_config(self):
        with self.assertRaises(ValidationError) as context:
            self._create_experiment(config={'colour': 'red'})
        self.assertIn('config', context.exception.message_dict)
        self.assertIn('Invalid configuration triggered by', context.exception.message_dict['config'][0])

    def test_grid_too_coarse(self):
        config = dict(self.TEST_CONFIG, cells_per_sigma=8)
        with self.assertRaises(ValidationError) as context:
            self._create_experiment(config=config)
        self.assertIn('config', context.exception.message_dict)

    def test_chi_mismatch(self):
        config = dict(self.TEST_CONFIG, system={'K': 2.0}, pairs=[[0.3, 0.05]])
        with self.assertRaises(ValidationError) as context:
            self._create_experiment(scenario='fig2_collapse', config=config)
        self.assertIn('chi deviates from 0.017', context.exception.message_dict['config'][0])

    def test_semiclassical_eta(self):
        config = dict(self.TEST_CONFIG, system={'K': 2.0, 'eta': 1.5})
        with self.assertRaises(ValidationError) as context:
            self._create_experiment(scenario='fig1_unitary', config=config)
        self.assertIn('needs eta < 1', context.exception.message_dict['config'][0])

    def test_model_fields_win(self):
        e = self._create_experiment(seed=7, config=dict(self.TEST_CONFIG, seed=3))
        cfg = e.get_config()
        self.assertEqual(cfg.seed, 7)
        self.assertEqual(cfg.output_dir, self.output_dir)
        self.assertEqual(cfg.name, 'test-experiment')

    def test_run(self):
        received = []

        def handler(sender, experiment, status, **kwargs):
            received.append(status)

        experiment_status_changed.connect(handler, sender=Experiment)
        self.addCleanup(experiment_status_changed.disconnect, handler, sender=Experiment)
        e = self._create_experiment()
        result = e.run()
        e.refresh_from_db()
        self.assertEqual(e.status, 'completed')
        self.assertEqual(received, ['running', 'completed'])
        self.assertEqual(e.artifacts.count(), len(result.manifest))
        self.assertEqual(e.artifacts.count(), 5)
        self.assertEqual(e.summary['flags'], [])
        self.assertIn('max_distance', e.summary)
        self.assertEqual(e.verify(), [])

    def test_rerun_replaces_artifacts(self):
        e = self._create_experiment()
        e.run()
        e.run()
        self.assertEqual(Artifact.objects.filter(experiment=e).count(), 5)

    def test_verify_tampered(self):
        e = self._create_experiment()
        e.run()
        with open(os.path.join(self.output_dir, 'distance.csv'), 'a') as f:
            f.write('tampered\n')
        self.assertEqual([a.path for a in e.verify()], ['distance.csv'])

    @mock.patch('django_wignerweb.experiments.run_scenario', side_effect=LeakageError('mass at the boundary'))
    def test_failure(self, run_scenario):
        e = self._create_experiment()
        with self.assertRaises(LeakageError):
            e.run()
        e.refresh_from_db()
        self.assertEqual(e.status, 'failed')
        self.assertEqual(e.summary, {'error': 'LeakageError: mass at the boundary'})
        self.assertEqual(e.artifacts.count(), 0)


class TestArtifact(CreateExperimentMixin, TestCase):
    experiment_model = Experiment

    def test_checksum_validation(self):
        e = self._create_experiment()
        a = Artifact(experiment=e, path='distance.csv', kind='series', scenario='custom', checksum='abc')
        with self.assertRaises(ValidationError) as context:
            a.full_clean()
        self.assertIn('checksum', context.exception.message_dict)

    def test_unknown_kind(self):
        e = self._create_experiment()
        a = Artifact(experiment=e, path='movie.mp4', kind='movie', scenario='custom', checksum='0' * 32)
        with self.assertRaises(ValidationError):
            a.full_clean()

    def test_missing_file(self):
        e = self._create_experiment()
        a = Artifact.objects.create(experiment=e, path='missing.csv', kind='series', scenario='custom',
                                    checksum='0' * 32)
        self.assertEqual(str(a), 'missing.csv')
        self.assertFalse(a.verify())
