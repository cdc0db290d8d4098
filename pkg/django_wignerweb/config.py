"""
Experiment configuration: JSON schema, canned scenario defaults,
grid resolution policy and the resolved ``ExperimentConfig``
"""
import json
import logging
import math
from collections import OrderedDict
from copy import deepcopy
from dataclasses import dataclass, field

import numpy as np
from django.core.exceptions import ValidationError
from jsonschema import Draft7Validator
from jsonschema.exceptions import best_match

from . import settings as app_settings
from .decoherence import chi
from .grid import GridSpec
from .params import DecoherenceParams, SystemParams
from .utils import chi_deviation, next_power_of_two

logger = logging.getLogger(__name__)

FIG1 = 'fig1_unitary'
FIG2 = 'fig2_collapse'
FIG3 = 'fig3_snapshots'
FIG4 = 'fig4_chi_scan'
CUSTOM = 'custom'
SCENARIOS = (FIG1, FIG2, FIG3, FIG4, CUSTOM)

# (eta, D) pairs at chi = 0.017 for K = 2
COLLAPSE_PAIRS = ((0.1, 5.13e-2), (0.04, 4.5e-3), (0.02, 7e-4), (0.015, 3.25e-4),
                  (0.007, 4.5e-5), (0.005, 1.74e-5), (0.003, 4.5e-6))
DESK_COLLAPSE_PAIRS = COLLAPSE_PAIRS[:3]
SNAPSHOT_PAIRS = ((0.04, 4.5e-3), (0.007, 4.5e-5), (0.003, 4.5e-6))
CHI_SCAN_DIFFUSION = (4.5e-5, 4.5e-4)
COLLAPSE_CHI = 0.017
SEMICLASSICAL = (FIG1, FIG2, FIG3, FIG4)

SPECTRAL = 'spectral'
CHARACTERISTICS = 'characteristics'
CLASSICAL_METHODS = (SPECTRAL, CHARACTERISTICS)

_number = {'type': 'number'}
_positive = {'type': 'number', 'exclusiveMinimum': 0}
_non_negative = {'type': 'number', 'minimum': 0}
_pair = {'type': 'array', 'items': [_positive, _positive], 'minItems': 2, 'maxItems': 2}
_power_of_two = {'type': 'integer', 'enum': [2 ** k for k in range(6, 17)]}

schema = {
    'type': 'object',
    'title': 'Wignerweb experiment',
    'additionalProperties': False,
    'required': ['scenario'],
    'properties': {
        'name': {'type': 'string', 'maxLength': 64},
        'scenario': {'type': 'string', 'enum': list(SCENARIOS)},
        'system': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'K': _non_negative,
                'eta': _positive,
                'nu_tau': _number,
                'tau': _positive,
            },
        },
        'deco': {
            'type': 'object',
            'additionalProperties': False,
            'properties': {
                'D': _non_negative,
                'gamma_tau': _non_negative,
                'nbar': _non_negative,
            },
        },
        'pairs': {'type': 'array', 'items': _pair, 'minItems': 1},
        'eta_list': {'type': 'array', 'items': _positive, 'minItems': 1},
        'chi_list': {'type': 'array', 'items': _positive, 'minItems': 1},
        'chi_target': _positive,
        'n_kicks': {'type': 'integer', 'minimum': 1},
        'center': {'type': 'array', 'items': [_number, _number], 'minItems': 2, 'maxItems': 2},
        'window': {'type': 'array', 'items': [_number, _number], 'minItems': 2, 'maxItems': 2},
        'grid': {
            'type': 'object',
            'additionalProperties': False,
            'required': ['n_q', 'n_p'],
            'properties': {'n_q': _power_of_two, 'n_p': _power_of_two},
        },
        'cells_per_sigma': {'type': 'number', 'minimum': 1},
        'trajectories': {'type': 'integer', 'minimum': 10000},
        'seed': {'type': 'integer', 'minimum': 0},
        'output_dir': {'type': 'string'},
        'workers': {'type': 'integer', 'minimum': 1},
        'peak_normalized': {'type': 'boolean'},
        'classical_method': {'type': 'string', 'enum': list(CLASSICAL_METHODS)},
    },
}

SCENARIO_DEFAULTS = {
    FIG1: {
        'system': {'K': 2.0, 'eta': 0.3},
        'deco': {'D': 0.0, 'gamma_tau': 0.0, 'nbar': 0.0},
        'n_kicks': 12,
        'grid': {'n_q': 2048, 'n_p': 2048},
        'classical_method': CHARACTERISTICS,
    },
    FIG2: {
        'system': {'K': 2.0},
        'pairs': [list(p) for p in DESK_COLLAPSE_PAIRS],
        'chi_target': COLLAPSE_CHI,
        'grid': {'n_q': 1024, 'n_p': 1024},
        'cells_per_sigma': 1.5,
    },
    FIG3: {
        'system': {'K': 2.0},
        'pairs': [list(p) for p in SNAPSHOT_PAIRS],
        'chi_target': COLLAPSE_CHI,
        'cells_per_sigma': 1.5,
        'trajectories': 10 ** 6,
    },
    FIG4: {
        'system': {'K': 2.0},
        'deco': {'D': CHI_SCAN_DIFFUSION[1]},
        'chi_list': [float(c) for c in np.logspace(-2, 0, 7)],
        'grid': {'n_q': 2048, 'n_p': 2048},
        'cells_per_sigma': 1.5,
    },
    CUSTOM: {},
}


def schema_error(error):
    """
    turns a ``jsonschema`` error into a ``ValidationError``
    """
    trigger = '/'.join(str(el) for el in error.path)
    message = 'Invalid configuration triggered by "#/{0}", '\
              'validator says:\n\n{1}'.format(trigger, error.message)
    return ValidationError(message)


def validate_config(data):
    # round trip through json to get rid of ``OrderedDict`` in error messages
    data = json.loads(json.dumps(data))
    error = best_match(Draft7Validator(schema).iter_errors(data))
    if error is not None:
        raise schema_error(error)


def merge_defaults(data):
    """
    canned scenario values underneath the user's own
    """
    merged = deepcopy(SCENARIO_DEFAULTS[data['scenario']])
    for key, value in data.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key].update(value)
        else:
            merged[key] = deepcopy(value)
    return merged


def resolution_width(eta, D):
    """
    finest Gaussian width the grid has to resolve
    """
    return math.sqrt(eta ** 2 + 2 * D)


def resolve_grid(eta, D, window, cells_per_sigma=None, explicit=None):
    """
    smallest power-of-two grid with ``cells_per_sigma`` cells per
    ``resolution_width``; an explicit ``{'n_q', 'n_p'}`` is checked instead
    """
    cells = app_settings.MIN_CELLS_PER_SIGMA if cells_per_sigma is None else cells_per_sigma
    low, high = window
    width = high - low
    sigma = resolution_width(eta, D)
    if explicit:
        n_q, n_p = explicit['n_q'], explicit['n_p']
        resolved = sigma / (width / min(n_q, n_p))
        if resolved < cells:
            raise ValidationError('a {0}x{1} grid resolves sigma={2:.4g} with {3:.2f} cells, '
                                  'at least {4} are required'.format(n_q, n_p, sigma, resolved, cells))
    else:
        n_q = n_p = next_power_of_two(cells * width / sigma)
        if n_q > app_settings.MAX_GRID_SIZE:
            raise ValidationError('eta={0}, D={1} needs a {2}x{2} grid, beyond the maximum '
                                  'of {3}'.format(eta, D, n_q, app_settings.MAX_GRID_SIZE))
    return GridSpec(n_q=n_q, n_p=n_p, q_min=low, q_max=high, p_min=low, p_max=high)


def eta_for_chi(chi_value, K, D):
    """
    inverse of chi = K eta^4 / D^(3/2) at fixed K and D
    """
    return (chi_value * D ** 1.5 / K) ** 0.25


@dataclass
class ExperimentConfig:
    scenario: str
    system: SystemParams
    deco: DecoherenceParams = field(default_factory=DecoherenceParams)
    pairs: tuple = ()
    eta_list: tuple = ()
    chi_list: tuple = ()
    chi_target: float = None
    n_kicks: int = None
    center: tuple = (0.0, 0.0)
    window: tuple = None
    grid: dict = None
    cells_per_sigma: float = None
    trajectories: int = 10 ** 6
    seed: int = 0
    output_dir: str = None
    workers: int = None
    peak_normalized: bool = False
    classical_method: str = SPECTRAL
    name: str = ''

    def __post_init__(self):
        if self.n_kicks is None:
            self.n_kicks = app_settings.DEFAULT_KICKS
        if self.window is None:
            self.window = tuple(app_settings.DEFAULT_WINDOW)
        if self.output_dir is None:
            self.output_dir = app_settings.OUTPUT_DIR
        if self.workers is None:
            self.workers = app_settings.WORKERS
        if self.cells_per_sigma is None:
            self.cells_per_sigma = app_settings.MIN_CELLS_PER_SIGMA
        self.pairs = tuple(tuple(p) for p in self.pairs)
        self.eta_list = tuple(self.eta_list)
        self.chi_list = tuple(self.chi_list)
        self.center = tuple(self.center)
        self.window = tuple(self.window)
        if self.scenario in (FIG2, FIG3) and not self.pairs:
            raise ValidationError('scenario {0} needs a nonempty list of (eta, D) pairs'.format(
                self.scenario))
        if self.scenario == FIG4 and not (self.chi_list or self.eta_list):
            raise ValidationError('scenario {0} needs chi_list or eta_list'.format(self.scenario))
        self._check_semiclassical()
        self._check_classical_method()

    def _check_semiclassical(self):
        if self.scenario not in SEMICLASSICAL:
            return
        etas = [self.system.eta]
        etas.extend(eta for eta, _ in self.pairs)
        etas.extend(self.eta_list)
        if self.scenario == FIG4 and self.chi_list and self.system.K > 0 and self.deco.D > 0:
            etas.extend(eta for eta, _ in self.scan_points())
        large = [eta for eta in etas if eta >= 1]
        if large:
            raise ValidationError('scenario {0} is semiclassical and needs eta < 1, got eta={1}'.format(
                self.scenario, large[0]))

    def _check_classical_method(self):
        if self.classical_method not in CLASSICAL_METHODS:
            raise ValidationError('unknown classical method "{0}"'.format(self.classical_method))
        if self.classical_method != CHARACTERISTICS:
            return
        if self.scenario not in (FIG1, CUSTOM):
            raise ValidationError('exact characteristics are available to {0} and {1} only'.format(
                FIG1, CUSTOM))
        if not self.deco.unitary:
            raise ValidationError('exact characteristics need unitary evolution (D=0, gamma_tau=0); '
                                  'set classical_method to "{0}"'.format(SPECTRAL))

    @classmethod
    def from_dict(cls, data):
        validate_config(data)
        data = merge_defaults(data)
        system = data.get('system', {})
        if 'eta' not in system:
            # sweeps set eta per job, the first point stands in
            system = dict(system, eta=cls._first_eta(data))
        try:
            params = SystemParams(**system)
            deco = DecoherenceParams(**data.get('deco', {}))
        except ValueError as e:
            raise ValidationError(str(e))
        options = {k: v for k, v in data.items() if k not in ('system', 'deco')}
        return cls(system=params, deco=deco, **options)

    @staticmethod
    def _first_eta(data):
        if data.get('pairs'):
            return data['pairs'][0][0]
        if data.get('eta_list'):
            return data['eta_list'][0]
        if data.get('chi_list') and data.get('deco', {}).get('D'):
            return eta_for_chi(data['chi_list'][0], data['system'].get('K', 0) or 1.0, data['deco']['D'])
        raise ValidationError('Invalid configuration triggered by "#/system", validator says:\n\n'
                              '\'eta\' is a required property')

    def as_dict(self):
        """
        fully resolved configuration, embedded in every artifact
        """
        data = OrderedDict([('name', self.name),
                            ('scenario', self.scenario),
                            ('system', self.system.as_dict()),
                            ('deco', self.deco.as_dict()),
                            ('n_kicks', self.n_kicks),
                            ('center', list(self.center)),
                            ('window', list(self.window)),
                            ('cells_per_sigma', self.cells_per_sigma),
                            ('seed', self.seed),
                            ('output_dir', self.output_dir),
                            ('workers', self.workers),
                            ('peak_normalized', self.peak_normalized),
                            ('classical_method', self.classical_method)])
        for key in ('pairs', 'eta_list', 'chi_list'):
            value = getattr(self, key)
            if value:
                data[key] = [list(v) if isinstance(v, tuple) else v for v in value]
        if self.chi_target is not None:
            data['chi_target'] = self.chi_target
        if self.grid:
            data['grid'] = dict(self.grid)
        if self.scenario == FIG3:
            data['trajectories'] = self.trajectories
        return data

    def grid_for(self, eta, D):
        return resolve_grid(eta, D, self.window, self.cells_per_sigma, self.grid)

    def chi_mismatches(self):
        """
        pairs whose chi deviates from ``chi_target`` by more than the tolerance
        """
        if self.chi_target is None:
            return []
        mismatches = []
        for eta, D in self.pairs:
            value = chi(self.system.K, eta, D)
            if chi_deviation(value, self.chi_target) > app_settings.CHI_TOLERANCE:
                mismatches.append((eta, D, value))
        return mismatches

    def scan_points(self):
        """
        (eta, D) points of a chi scan, in config order
        """
        D = self.deco.D
        if self.eta_list:
            return [(eta, D) for eta in self.eta_list]
        if self.system.K <= 0 or D <= 0:
            raise ValidationError('a chi scan needs K > 0 and D > 0')
        return [(eta_for_chi(c, self.system.K, D), D) for c in self.chi_list]


def load_config(source):
    """
    ``source`` is a path to a JSON file or an already parsed mapping
    """
    if isinstance(source, dict):
        data = source
    else:
        try:
            with open(source) as f:
                data = json.load(f, object_pairs_hook=OrderedDict)
        except ValueError as e:
            raise ValidationError('"{0}" is not valid JSON: {1}'.format(source, e))
        except OSError as e:
            raise ValidationError('cannot read configuration "{0}": {1}'.format(source, e))
    if not isinstance(data, dict):
        raise ValidationError('Invalid configuration triggered by "#/", validator says:\n\n'
                              'the configuration must be a JSON object')
    return ExperimentConfig.from_dict(data)
