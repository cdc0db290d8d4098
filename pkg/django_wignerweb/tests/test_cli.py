import io
import json
import math
import os
from unittest import mock

import numpy as np
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase

from . import GridTestMixin, TemporaryOutputMixin
from ..cli import USAGE, cli_main
from ..exceptions import LeakageError
from ..formats import read_ppm, write_grid_snapshot
from ..validation import Check

COMMAND = 'django_wignerweb.management.commands.wignerweb'


class CliTestMixin(object):
    def _cli(self, *argv):
        """
        returns ``(exit status, stdout, stderr)``
        """
        with mock.patch('sys.stdout', new_callable=io.StringIO) as stdout, \
                mock.patch('sys.stderr', new_callable=io.StringIO) as stderr:
            status = cli_main(list(argv))
        return status, stdout.getvalue(), stderr.getvalue()


class TestCli(CliTestMixin, TemporaryOutputMixin, GridTestMixin, SimpleTestCase):
    def test_no_arguments(self):
        status, stdout, _ = self._cli()
        self.assertEqual(status, 1)
        self.assertIn(USAGE, stdout)

    def test_help(self):
        self.assertEqual(self._cli('-h')[0], 0)

    def test_chi(self):
        status, stdout, _ = self._cli('chi', '--K', '2', '--eta', '0.04', '--D', '4.5e-3')
        self.assertEqual(status, 0)
        self.assertEqual(stdout.strip(), '0.017')

    def test_chi_domain(self):
        status, _, stderr = self._cli('chi', '--K', '2', '--eta', '0.04', '--D', '0')
        self.assertEqual(status, 1)
        self.assertIn(USAGE, stderr)

    def test_unknown_subcommand(self):
        self.assertEqual(self._cli('fig9')[0], 1)

    def test_missing_option(self):
        self.assertEqual(self._cli('chi', '--K', '2')[0], 1)

    def test_lyapunov_formulas(self):
        status, stdout, _ = self._cli('lyapunov', '--K', '10', '--no-numeric')
        self.assertEqual(status, 0)
        self.assertIn('formula ensemble: 1.4656', stdout)
        self.assertIn('formula origin: {0:.4f}'.format(math.log(10 * math.sin(math.pi / 3))), stdout)
        self.assertNotIn('numeric', stdout)

    def test_lyapunov_undefined(self):
        status, stdout, _ = self._cli('lyapunov', '--K', '0', '--no-numeric')
        self.assertEqual(status, 0)
        self.assertIn('formula ensemble: undefined', stdout)

    def test_lyapunov_numeric(self):
        status, stdout, _ = self._cli('lyapunov', '--K', '10', '--kicks', '1000', '--orbits', '100')
        self.assertEqual(status, 0)
        self.assertIn('numeric: ', stdout)

    def test_lyapunov_effort(self):
        self.assertEqual(self._cli('lyapunov', '--K', '10', '--kicks', '500')[0], 1)

    def test_render(self):
        source = os.path.join(self.output_dir, 'zeros.bin')
        target = os.path.join(self.output_dir, 'zeros.ppm')
        write_grid_snapshot(self._constant(0.0), source)
        status, stdout, _ = self._cli('render', '--in', source, '--out', target)
        self.assertEqual(status, 0)
        self.assertIn('(signed)', stdout)
        pixels, _ = read_ppm(target)
        self.assertTrue(np.all(pixels == 255))

    def test_render_missing(self):
        status, _, _ = self._cli('render', '--in', os.path.join(self.output_dir, 'missing.bin'),
                                 '--out', os.path.join(self.output_dir, 'out.ppm'))
        self.assertEqual(status, 1)

    def test_simulate(self):
        path = os.path.join(self.output_dir, 'config.json')
        with open(path, 'w') as f:
            json.dump({'system': {'K': 1.0, 'eta': 0.3}, 'n_kicks': 2, 'window': [-2 * math.pi, 2 * math.pi],
                       'grid': {'n_q': 128, 'n_p': 128}, 'cells_per_sigma': 2}, f)
        run_dir = os.path.join(self.output_dir, 'run')
        status, stdout, _ = self._cli('simulate', '--config', path, '--output-dir', run_dir)
        self.assertEqual(status, 0)
        self.assertIn('manifest: ', stdout)
        self.assertTrue(os.path.exists(os.path.join(run_dir, 'manifest.json')))
        self.assertTrue(os.path.exists(os.path.join(run_dir, 'distance.csv')))

    def test_simulate_bad_json(self):
        path = os.path.join(self.output_dir, 'config.json')
        with open(path, 'w') as f:
            f.write('{')
        self.assertEqual(self._cli('simulate', '--config', path)[0], 1)

    def test_invalid_config(self):
        path = os.path.join(self.output_dir, 'config.json')
        with open(path, 'w') as f:
            json.dump({'system': {'K': 1.0, 'eta': -1}}, f)
        status, _, stderr = self._cli('simulate', '--config', path)
        self.assertEqual(status, 1)
        self.assertIn('Invalid configuration triggered by "#/system/eta"', stderr)

    @mock.patch('{0}.run_scenario'.format(COMMAND), side_effect=LeakageError('mass at the boundary'))
    def test_numerical_guard(self, run_scenario):
        status, _, stderr = self._cli('fig1', '--output-dir', self.output_dir, '--kicks', '2')
        self.assertEqual(status, 2)
        self.assertIn('mass at the boundary', stderr)
        cfg = run_scenario.call_args[0][0]
        self.assertEqual(cfg.scenario, 'fig1_unitary')
        self.assertEqual(cfg.n_kicks, 2)

    def test_validate_success(self):
        status, stdout, stderr = self._cli('validate')
        self.assertEqual(status, 0, stderr)
        lines = stdout.strip().splitlines()
        self.assertEqual(len(lines), 9)
        for line in lines:
            self.assertTrue(line.startswith('ok '), line)

    @mock.patch('{0}.run_validation'.format(COMMAND),
                return_value=[Check('first', True, 0.1, 1.0), Check('second', False, 2.0, 1.0)])
    def test_validate_failure(self, run_validation):
        status, stdout, stderr = self._cli('validate')
        self.assertEqual(status, 1)
        self.assertIn('ok     first', stdout)
        self.assertIn('FAIL   second', stdout)
        self.assertIn('1 of 2 oracle checks failed', stderr)
        run_validation.assert_called_once_with(full=False)


class TestCommand(SimpleTestCase):
    def test_call_command(self):
        out = io.StringIO()
        call_command('wignerweb', 'chi', '--K', '2', '--eta', '0.1', '--D', '5.13e-2', stdout=out)
        self.assertEqual(out.getvalue().strip(), '0.017')

    def test_subcommand_required(self):
        with self.assertRaises(CommandError):
            call_command('wignerweb')
