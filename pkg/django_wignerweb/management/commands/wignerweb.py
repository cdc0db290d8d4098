import json
import logging
import math

from django.core.exceptions import ValidationError
from django.core.management.base import BaseCommand, CommandError

from ... import config as scenarios
from ...config import load_config
from ...decoherence import chi
from ...exceptions import DomainError
from ...experiments import run_scenario
from ...formats import SIGNED, UNSIGNED, read_grid_snapshot, write_heatmap
from ...oracles import ENSEMBLE, ORIGIN, lyapunov_estimate, lyapunov_formula, origin_expansion_rate
from ...params import SystemParams
from ...validation import run_validation

FIGURES = {
    'fig1': scenarios.FIG1,
    'fig2': scenarios.FIG2,
    'fig3': scenarios.FIG3,
    'fig4': scenarios.FIG4,
}
LOG_LEVELS = {0: logging.ERROR, 1: logging.WARNING, 2: logging.INFO, 3: logging.DEBUG}


class Command(BaseCommand):
    help = 'Kicked harmonic oscillator: quantum-classical distance experiments and tools'

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='subcommand', title='subcommands', required=True)

        simulate = subparsers.add_parser('simulate', help='run the experiment described by a config file')
        simulate.add_argument('--config', required=True, help='JSON configuration file')
        self._add_run_options(simulate)

        for name, scenario in FIGURES.items():
            figure = subparsers.add_parser(name, help='run the canned {0} scenario'.format(scenario))
            figure.add_argument('--config', help='JSON file overriding the scenario defaults')
            self._add_run_options(figure)

        chi_parser = subparsers.add_parser('chi', help='print chi = K eta^4 / D^(3/2)')
        chi_parser.add_argument('--K', type=float, required=True)
        chi_parser.add_argument('--eta', type=float, required=True)
        chi_parser.add_argument('--D', type=float, required=True)

        lyapunov = subparsers.add_parser('lyapunov', help='closed-form and numerical Lyapunov coefficients')
        lyapunov.add_argument('--K', type=float, required=True)
        lyapunov.add_argument('--nu-tau', type=float, default=math.pi / 3)
        lyapunov.add_argument('--gamma-tau', type=float, default=0.0)
        lyapunov.add_argument('--kicks', type=int, default=10 ** 4)
        lyapunov.add_argument('--orbits', type=int, default=200)
        lyapunov.add_argument('--seed', type=int, default=0)
        lyapunov.add_argument('--no-numeric', action='store_true', help='skip the tangent-map estimate')

        render = subparsers.add_parser('render', help='convert a grid snapshot into a heatmap')
        render.add_argument('--in', dest='source', required=True)
        render.add_argument('--out', dest='target', required=True)
        render.add_argument('--palette', choices=[SIGNED, UNSIGNED], default=None,
                            help='defaults to signed for quantum grids, unsigned for classical ones')

        validate = subparsers.add_parser('validate', help='run the oracle-equivalence suite')
        validate.add_argument('--full', action='store_true', help='reference sizes (slow)')

    @staticmethod
    def _add_run_options(parser):
        parser.add_argument('--output-dir')
        parser.add_argument('--seed', type=int)
        parser.add_argument('--workers', type=int)
        parser.add_argument('--kicks', type=int, dest='n_kicks')

    def handle(self, *args, **options):
        logging.getLogger('django_wignerweb').setLevel(LOG_LEVELS.get(options['verbosity'], logging.DEBUG))
        subcommand = options['subcommand']
        if subcommand in FIGURES or subcommand == 'simulate':
            return self.handle_run(subcommand, options)
        return getattr(self, 'handle_{0}'.format(subcommand))(options)

    def _read(self, path):
        try:
            with open(path) as f:
                return json.load(f)
        except ValueError as e:
            raise ValidationError('"{0}" is not valid JSON: {1}'.format(path, e))
        except OSError as e:
            raise ValidationError('cannot read configuration "{0}": {1}'.format(path, e))

    def handle_run(self, subcommand, options):
        data = self._read(options['config']) if options.get('config') else {}
        if subcommand in FIGURES:
            data['scenario'] = FIGURES[subcommand]
        elif 'scenario' not in data:
            data['scenario'] = scenarios.CUSTOM
        for key in ('output_dir', 'seed', 'workers', 'n_kicks'):
            if options.get(key) is not None:
                data[key] = options[key]
        cfg = load_config(data)
        result = run_scenario(cfg)
        self.stdout.write(json.dumps(result.summary, indent=4))
        self.stdout.write('manifest: {0}'.format(result.manifest.path))

    def handle_chi(self, options):
        try:
            value = chi(options['K'], options['eta'], options['D'])
        except DomainError as e:
            raise CommandError(str(e))
        self.stdout.write('{0:.2g}'.format(value))

    def handle_lyapunov(self, options):
        K, nu_tau, gamma_tau = options['K'], options['nu_tau'], options['gamma_tau']
        for which in (ENSEMBLE, ORIGIN):
            try:
                value = '{0:.4f}'.format(lyapunov_formula(K, nu_tau, gamma_tau, which))
            except DomainError as e:
                value = 'undefined ({0})'.format(e)
            self.stdout.write('formula {0}: {1}'.format(which, value))
        self.stdout.write('origin eigenvalue: {0:.4f}'.format(origin_expansion_rate(K, nu_tau, gamma_tau)))
        if options['no_numeric']:
            return
        try:
            params = SystemParams(K=K, eta=0.1, nu_tau=nu_tau)
            estimate = lyapunov_estimate(params, gamma_tau, options['kicks'], options['orbits'],
                                          options['seed'])
        except ValueError as e:
            raise CommandError(str(e))
        self.stdout.write('numeric: {0:.4f} (drift {1:.2%}, {2})'.format(
            estimate.value, estimate.drift, 'converged' if estimate.converged else 'not converged'))

    def handle_render(self, options):
        try:
            grid, _ = read_grid_snapshot(options['source'])
        except (OSError, ValueError) as e:
            raise CommandError(str(e))
        palette = options['palette'] or (SIGNED if grid.label.value == 'quantum' else UNSIGNED)
        try:
            write_heatmap(grid, options['target'], palette)
        except OSError as e:
            raise CommandError(str(e))
        self.stdout.write('{0} -> {1} ({2})'.format(options['source'], options['target'], palette))

    def handle_validate(self, options):
        checks = run_validation(full=options['full'])
        for check in checks:
            self.stdout.write('{0:<6} {1}: {2:.3e} <= {3:.3e}'.format('ok' if check.passed else 'FAIL',
                                                                      check.name, check.value, check.bound))
        failed = [c for c in checks if not c.passed]
        if failed:
            raise CommandError('{0} of {1} oracle checks failed'.format(len(failed), len(checks)))
