"""
Quantum-classical distance per kick, peak detection, the
peak-position fit and the separation-time estimate
"""
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np

from . import settings as app_settings
from .exceptions import DegenerateFitError, DomainError, NoPeakFoundError
from .grid import Label, check_label, check_same_spec, negativity_volume, new_coherent_state, riemann_norm
from .params import ChiParams
from .propagators import Characteristics, StepMode, step

logger = logging.getLogger(__name__)

MIN_SERIES_LENGTH = 5
MIN_FIT_POINTS = 3

DistanceRecord = namedtuple('DistanceRecord', 'n distance norm_q norm_cl negativity')
CSV_HEADER = ('n', 'D_n', 'norm_q', 'norm_cl', 'negativity')


@dataclass
class DistanceSeries:
    params: object
    deco: object
    records: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict, repr=False)

    @property
    def chi(self):
        if self.deco.D <= 0:
            return None
        return ChiParams.from_params(self.params, self.deco.D).chi

    @property
    def distances(self):
        return np.array([r.distance for r in self.records])

    @property
    def max_distance(self):
        return float(np.max(self.distances))

    def append(self, record):
        expected = len(self.records)
        if record.n != expected:
            raise ValueError('record n={0} breaks the sequence, expected n={1}'.format(record.n, expected))
        self.records.append(record)

    def renormalized(self, peak_normalized=False):
        """
        D_n / chi, optionally further divided by the height of the first peak
        """
        if self.chi is None:
            raise DomainError('renormalization by chi needs D > 0')
        values = self.distances / self.chi
        if peak_normalized:
            _, height = detect_first_peak(self)
            values = values / (height / self.chi)
        return values

    def metadata(self):
        data = {'params': self.params.as_dict(), 'deco': self.deco.as_dict(), 'chi': self.chi}
        return data

    def __len__(self):
        return len(self.records)


@dataclass(frozen=True)
class PeakFit:
    slope: float
    intercept: float
    residual: float
    points: tuple

    def predict(self, eta):
        return self.slope * math.log(1 / eta) + self.intercept

    def as_dict(self):
        return {'slope': self.slope, 'intercept': self.intercept,
                'residual': self.residual, 'points': [list(p) for p in self.points]}


CollapseReport = namedtuple('CollapseReport', 'spread rescaled_time curves flagged')


def l1_distance(a, b):
    check_same_spec(a, b)
    return float(np.sum(np.abs(a.values - b.values)) * a.spec.cell_area)


def coherent_pair(spec, center, eta):
    """
    identical quantum and classical initial distributions
    """
    quantum = new_coherent_state(spec, center, eta, Label.QUANTUM)
    return quantum, quantum.relabel(Label.CLASSICAL)


def _record(n, quantum, classical):
    return DistanceRecord(n=n,
                          distance=l1_distance(quantum, classical),
                          norm_q=riemann_norm(quantum),
                          norm_cl=riemann_norm(classical),
                          negativity=negativity_volume(quantum))


def evolve_pair(initial, params, deco, n_kicks, snapshot_at=(), classical_density=None):
    """
    evolves the quantum and the classical grid side by side and records
    the distance immediately before every kick n = 0 .. n_kicks;
    grids of the kicks listed in ``snapshot_at`` are kept on the series.

    With ``classical_density`` (the initial density as a callable of
    ``(q, p)``) the unitary classical member follows exact characteristics
    instead of spectral steps.
    """
    quantum, classical = initial
    check_same_spec(quantum, classical)
    check_label(quantum, Label.QUANTUM)
    check_label(classical, Label.CLASSICAL)
    if n_kicks < 0:
        raise ValueError('n_kicks must be >= 0')
    characteristics = None
    if classical_density is not None:
        if not deco.unitary:
            raise ValueError('exact characteristics need unitary evolution (D=0, gamma_tau=0)')
        characteristics = Characteristics(classical.spec, classical_density, params)
    snapshot_at = set(snapshot_at)
    series = DistanceSeries(params, deco)
    for n in range(n_kicks + 1):
        if n > 0:
            quantum = step(quantum, params, StepMode.QUANTUM, deco)
            if characteristics is None:
                classical = step(classical, params, StepMode.CLASSICAL, deco)
            else:
                classical = characteristics.step()
        record = _record(n, quantum, classical)
        if characteristics is not None and abs(record.norm_cl - 1) > app_settings.NORM_TOLERANCE:
            logger.warning('kick %d: classical folds finer than the grid, Riemann norm %.6f', n,
                           record.norm_cl)
        logger.debug('kick %d: D_n=%.6e norm_q=%.12f norm_cl=%.12f', n, record.distance,
                     record.norm_q, record.norm_cl)
        series.append(record)
        if n in snapshot_at:
            series.snapshots[n] = (quantum, classical)
    return series


def _values(series):
    if isinstance(series, DistanceSeries):
        return series.distances
    return np.asarray(series, dtype=float)


def detect_first_peak(series, baseline_factor=None):
    """
    first local maximum rising above ``baseline_factor`` times
    the median of the first three records and above the absolute
    ``WIGNERWEB_PEAK_FLOOR``
    """
    values = _values(series)
    if len(values) < MIN_SERIES_LENGTH:
        raise ValueError('peak detection needs at least {0} records'.format(MIN_SERIES_LENGTH))
    factor = app_settings.PEAK_BASELINE_FACTOR if baseline_factor is None else baseline_factor
    threshold = max(factor * float(np.median(values[:3])), app_settings.PEAK_FLOOR)
    for n in range(1, len(values) - 1):
        if values[n - 1] < values[n] >= values[n + 1] and values[n] > threshold:
            return n, float(values[n])
    raise NoPeakFoundError('no local maximum above {0:.3e} in a series of {1} records'.format(threshold,
                                                                                           len(values)))


def fit_peak_scaling(points):
    """
    least-squares line n_peak = slope * ln(1/eta) + intercept
    """
    points = tuple((float(eta), float(n)) for eta, n in points)
    if len(points) < MIN_FIT_POINTS:
        raise DegenerateFitError('a peak fit needs at least {0} points'.format(MIN_FIT_POINTS))
    x = np.array([math.log(1 / eta) for eta, _ in points])
    y = np.array([n for _, n in points])
    if len(np.unique(x)) < 2:
        raise DegenerateFitError('all points share the same eta')
    design = np.column_stack([x, np.ones_like(x)])
    (slope, intercept), _, _, _ = np.linalg.lstsq(design, y, rcond=None)
    residual = float(np.sqrt(np.mean((design @ (slope, intercept) - y) ** 2)))
    return PeakFit(float(slope), float(intercept), residual, points)


def separation_time(tau, lam, eta):
    """
    (tau / lambda) ln(1/eta), clamped to 0 for eta >= 1
    """
    if lam <= 0:
        raise DomainError('the separation time needs a positive Lyapunov coefficient, got {0}'.format(lam))
    if eta <= 0:
        raise DomainError('eta must be > 0')
    if eta >= 1:
        return 0.0
    return tau / lam * math.log(1 / eta)


def collapse_spread(series_list, peak_normalized=False, s_max=2.0, samples=201):
    """
    compares the renormalized curves on the rescaled time s = n / n_peak
    over [max(1/n_peak), s_max]; the spread is the largest, over s, range
    across curves relative to the largest curve at that same s
    """
    if len(series_list) < 2:
        raise ValueError('a collapse needs at least two curves')
    peaks = [detect_first_peak(series)[0] for series in series_list]
    start = max(1.0 / n for n in peaks)
    s = np.linspace(start, s_max, samples)
    curves = []
    for series, n_peak in zip(series_list, peaks):
        values = series.renormalized(peak_normalized)
        rescaled = np.arange(len(values)) / n_peak
        if rescaled[-1] < s_max:
            raise ValueError('a series of {0} kicks does not reach {1} x n_peak={2}'.format(len(values) - 1,
                                                                                           s_max, n_peak))
        curves.append(np.interp(s, rescaled, values))
    curves = np.array(curves)
    scale = np.max(np.abs(curves), axis=0)
    ptp = np.ptp(curves, axis=0)
    relative = np.divide(ptp, scale, out=np.zeros_like(ptp), where=scale > 0)
    spread = float(np.max(relative))
    flagged = spread > app_settings.COLLAPSE_TOLERANCE
    if flagged:
        logger.warning('collapse spread %.1f%% exceeds %.0f%%', 100 * spread,
                       100 * app_settings.COLLAPSE_TOLERANCE)
    return CollapseReport(spread, s, curves, flagged)
