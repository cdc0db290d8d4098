"""
test utilities shared among test classes
"""
import math
import shutil
import tempfile

import numpy as np

from ..grid import GridSpec, Label, PhaseSpaceGrid, moments, new_coherent_state


class TemporaryOutputMixin(object):
    """
    every test gets its own output directory, removed afterwards
    """
    def setUp(self):
        super().setUp()
        self.output_dir = tempfile.mkdtemp(prefix='wignerweb-test-')
        self.addCleanup(shutil.rmtree, self.output_dir, True)


class GridTestMixin(object):
    def _spec(self, n=128, half_width=2 * math.pi):
        return GridSpec.square(n, -half_width, half_width)

    def _coherent(self, center=(0.0, 0.0), eta=0.3, label=Label.QUANTUM, **kwargs):
        return new_coherent_state(self._spec(**kwargs), center, eta, label)

    def _constant(self, value, label=Label.QUANTUM, **kwargs):
        spec = self._spec(**kwargs)
        return PhaseSpaceGrid(spec, np.full(spec.shape, value), label)

    def assertCentroid(self, grid, expected, places=6):
        (q, p), _ = moments(grid)
        self.assertAlmostEqual(q, expected[0], places=places)
        self.assertAlmostEqual(p, expected[1], places=places)

    def assertVariance(self, grid, expected, delta=1e-8):
        _, (var_q, var_p) = moments(grid)
        self.assertAlmostEqual(var_q, expected, delta=delta)
        self.assertAlmostEqual(var_p, expected, delta=delta)


class CreateExperimentMixin(TemporaryOutputMixin):
    TEST_CONFIG = {
        'system': {'K': 1.0, 'eta': 0.3},
        'n_kicks': 3,
        'window': [-2 * math.pi, 2 * math.pi],
        'grid': {'n_q': 128, 'n_p': 128},
        'cells_per_sigma': 2,
    }

    def _create_experiment(self, **kwargs):
        options = dict(name='test-experiment',
                       scenario='custom',
                       config=dict(self.TEST_CONFIG),
                       output_dir=self.output_dir)
        options.update(kwargs)
        e = self.experiment_model(**options)
        e.full_clean()
        e.save()
        return e
