"""
Scenario runners: each one turns an ``ExperimentConfig`` into
distance series, snapshots, heatmaps and tables inside ``output_dir``,
all listed in the run manifest
"""
import json
import logging
import os
from collections import OrderedDict, namedtuple
from dataclasses import dataclass, field
from multiprocessing import Pool

import numpy as np
from django.core.exceptions import ValidationError

from . import config as scenarios
from .decoherence import chi
from .exceptions import DegenerateFitError, NoPeakFoundError
from .formats import (SIGNED, UNSIGNED, Manifest, write_ensemble_snapshot, write_grid_snapshot, write_heatmap,
                      write_series_csv, write_table_csv)
from .grid import GridSpec, Label, coherent_density, moments, negativity_volume, new_coherent_state
from .observables import (coherent_pair, collapse_spread, detect_first_peak, evolve_pair, fit_peak_scaling,
                          l1_distance, separation_time)
from .oracles import ORIGIN, histogram_ensemble, lyapunov_formula, mc_step, sample_coherent_ensemble
from .params import DecoherenceParams
from .propagators import StepMode, step

logger = logging.getLogger(__name__)

DIFFUSION_DOMINANCE_FACTOR = 20
ENSEMBLE_DISPLAY_SIZE = 1024

Job = namedtuple('Job', 'params deco spec center n_kicks snapshot_at mode classical',
                 defaults=(scenarios.SPECTRAL,))


@dataclass
class ScenarioResult:
    scenario: str
    manifest: Manifest
    summary: dict = field(default_factory=OrderedDict)
    series: list = field(default_factory=list)
    snapshots: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def flag(self, message, *args):
        text = message % args if args else message
        logger.warning(text)
        self.flags.append(text)


def run_job(job):
    """
    one independent evolution; module level so worker processes can pickle it
    """
    logger.info('evolving K=%s eta=%s D=%s gamma_tau=%s on %dx%d for %d kicks', job.params.K, job.params.eta,
                job.deco.D, job.deco.gamma_tau, job.spec.n_q, job.spec.n_p, job.n_kicks)
    if job.mode == StepMode.CLASSICAL:
        grid = new_coherent_state(job.spec, job.center, job.params.eta, Label.CLASSICAL)
        for _ in range(job.n_kicks):
            grid = step(grid, job.params, StepMode.CLASSICAL, job.deco)
        return grid
    initial = coherent_pair(job.spec, job.center, job.params.eta)
    density = None
    if job.classical == scenarios.CHARACTERISTICS:
        density = coherent_density(job.center, job.params.eta)
    return evolve_pair(initial, job.params, job.deco, job.n_kicks, job.snapshot_at, classical_density=density)


def run_jobs(jobs, workers):
    """
    work queue over independent jobs; results come back in job order
    """
    if workers <= 1 or len(jobs) <= 1:
        return [run_job(job) for job in jobs]
    with Pool(min(workers, len(jobs))) as pool:
        return pool.map(run_job, jobs, chunksize=1)


class ArtifactWriter(object):
    """
    writes artifacts into ``output_dir`` and registers them in the manifest
    """
    def __init__(self, cfg):
        self.cfg = cfg
        self.config = cfg.as_dict()
        os.makedirs(cfg.output_dir, exist_ok=True)
        self.manifest = Manifest(cfg.output_dir, cfg.scenario, self.config)

    def path(self, name):
        return os.path.join(self.cfg.output_dir, name)

    def embedded(self, parameters):
        return OrderedDict([('config', self.config)] + list(parameters.items()))

    def series(self, name, series, parameters):
        path = self.path(name)
        write_series_csv(series, path, config=self.config)
        return self.manifest.add(path, 'series', parameters)

    def snapshot(self, name, grid, parameters, palette=SIGNED):
        path = self.path(name + '.bin')
        write_grid_snapshot(grid, path, self.embedded(parameters))
        self.manifest.add(path, 'snapshot', parameters)
        image = self.path(name + '.ppm')
        write_heatmap(grid, image, palette, comment=json.dumps(self.embedded(parameters), sort_keys=True))
        return self.manifest.add(image, 'heatmap', parameters)

    def ensemble(self, name, ens, parameters):
        path = self.path(name)
        write_ensemble_snapshot(ens, path, self.embedded(parameters))
        return self.manifest.add(path, 'ensemble', parameters)

    def table(self, name, header, rows, parameters=None):
        path = self.path(name)
        metadata = OrderedDict([('config', self.config)])
        metadata.update(parameters or {})
        write_table_csv(path, header, rows, metadata)
        return self.manifest.add(path, 'table', parameters)

    def fit(self, name, data):
        path = self.path(name)
        with open(path, 'w') as f:
            json.dump(self.embedded(data), f, indent=4, sort_keys=True)
            f.write('\n')
        return self.manifest.add(path, 'fit', data)

    def finish(self, result):
        result.summary['flags'] = list(result.flags)
        self.manifest.save()
        return result


def _job_parameters(job):
    data = OrderedDict([('K', job.params.K), ('eta', job.params.eta), ('nu_tau', job.params.nu_tau),
                        ('tau', job.params.tau)])
    data.update(job.deco.as_dict())
    data['grid'] = job.spec.as_dict()
    data['classical'] = job.classical
    if job.deco.D > 0:
        data['chi'] = chi(job.params.K, job.params.eta, job.deco.D)
    return data


def _pair_jobs(cfg, points, snapshot_at=(), mode=StepMode.QUANTUM):
    jobs = []
    for eta, D in points:
        params = cfg.system.replace(eta=eta)
        deco = DecoherenceParams(D=D, gamma_tau=cfg.deco.gamma_tau, nbar=cfg.deco.nbar)
        spec = cfg.grid_for(eta, D)
        jobs.append(Job(params, deco, spec, cfg.center, cfg.n_kicks, tuple(snapshot_at), mode))
    return jobs


def run_fig1(cfg):
    """
    unitary separation: distance series, then the quantum and classical
    grids at the first peak
    """
    if not cfg.deco.unitary:
        raise ValidationError('scenario {0} evolves without reservoir, got {1}'.format(cfg.scenario,
                                                                                      cfg.deco.as_dict()))
    writer = ArtifactWriter(cfg)
    result = ScenarioResult(cfg.scenario, writer.manifest)
    spec = cfg.grid_for(cfg.system.eta, 0.0)
    job = Job(cfg.system, cfg.deco, spec, cfg.center, cfg.n_kicks, (), StepMode.QUANTUM, cfg.classical_method)
    series = run_job(job)
    result.series.append(series)
    parameters = _job_parameters(job)
    writer.series('distance.csv', series, parameters)
    summary = result.summary
    summary['max_distance'] = series.max_distance
    summary['separation_time'] = _separation_estimate(cfg)
    try:
        n_peak, value = detect_first_peak(series)
    except NoPeakFoundError:
        result.flag('no distance peak in %d kicks (K=%s)', cfg.n_kicks, cfg.system.K)
        summary['n_peak'] = None
        return writer.finish(result)
    summary['n_peak'], summary['peak_distance'] = n_peak, value
    # deterministic rerun up to the peak to keep only the grids needed
    rerun = run_job(job._replace(n_kicks=n_peak, snapshot_at=(n_peak,)))
    quantum, classical = rerun.snapshots[n_peak]
    result.snapshots[n_peak] = (quantum, classical)
    at_peak = OrderedDict(parameters, kick=n_peak)
    writer.snapshot('quantum_peak', quantum, at_peak, SIGNED)
    writer.snapshot('classical_peak', classical, at_peak, UNSIGNED)
    summary['negativity_quantum'] = negativity_volume(quantum)
    summary['negativity_classical'] = negativity_volume(classical)
    if value <= 1:
        result.flag('first peak D_n=%.3f does not exceed 1', value)
    return writer.finish(result)


def _separation_estimate(cfg):
    K, eta = cfg.system.K, cfg.system.eta
    try:
        rate = lyapunov_formula(K, cfg.system.nu_tau, cfg.deco.gamma_tau, ORIGIN)
        return separation_time(cfg.system.tau, rate, eta)
    except ValueError:
        return None


def run_fig2(cfg):
    """
    chi-collapse: D_n / chi for every (eta, D) pair, first peaks and their
    logarithmic fit against 1/eta
    """
    writer = ArtifactWriter(cfg)
    result = ScenarioResult(cfg.scenario, writer.manifest)
    for eta, D, value in cfg.chi_mismatches():
        result.flag('pair eta=%s D=%s has chi=%.4g, target %.4g', eta, D, value, cfg.chi_target)
    jobs = _pair_jobs(cfg, cfg.pairs)
    series_list = run_jobs(jobs, cfg.workers)
    result.series.extend(series_list)
    peaks = []
    for job, series in zip(jobs, series_list):
        name = 'distance_eta{0:g}.csv'.format(job.params.eta)
        writer.series(name, series, _job_parameters(job))
        try:
            n_peak, value = detect_first_peak(series)
        except NoPeakFoundError as e:
            result.flag('eta=%s: %s', job.params.eta, e)
            continue
        peaks.append((job.params.eta, job.deco.D, series.chi, n_peak, value))
    writer.table('peaks.csv', ('eta', 'D', 'chi', 'n_peak', 'peak_distance', 'peak_over_chi'),
                 [(eta, D, c, n, v, v / c) for eta, D, c, n, v in peaks])
    n_max = min(len(s) for s in series_list)
    rows = [[n] + [float(s.distances[n] / s.chi) for s in series_list] for n in range(n_max)]
    writer.table('collapse.csv', ['n'] + ['eta={0:g}'.format(job.params.eta) for job in jobs], rows)
    summary = result.summary
    summary['pairs'] = [OrderedDict([('eta', eta), ('D', D), ('chi', c), ('n_peak', n), ('peak_distance', v)])
                        for eta, D, c, n, v in peaks]
    try:
        fit = fit_peak_scaling([(eta, n) for eta, _, _, n, _ in peaks])
    except DegenerateFitError as e:
        result.flag('peak fit skipped: %s', e)
        summary['fit'] = None
    else:
        summary['fit'] = fit.as_dict()
        writer.fit('peak_fit.json', fit.as_dict())
    for normalized, key in ((False, 'collapse_spread'), (True, 'collapse_spread_peak_normalized')):
        try:
            report = collapse_spread(series_list, peak_normalized=normalized)
        except (ValueError, NoPeakFoundError) as e:
            result.flag('collapse not measured: %s', e)
            summary[key] = None
            continue
        summary[key] = report.spread
        if report.flagged and not normalized:
            result.flags.append('collapse spread {0:.1%} above tolerance'.format(report.spread))
    return writer.finish(result)


def _classical_variance(grid):
    _, (var_q, var_p) = moments(grid)
    return (var_q + var_p) / 2


def run_fig3(cfg):
    """
    distributions immediately before the last kick: classical for every
    pair (grid evolution when the pair fits on a grid, trajectory ensemble
    otherwise) and the quantum one at the smallest eta that fits
    """
    writer = ArtifactWriter(cfg)
    result = ScenarioResult(cfg.scenario, writer.manifest)
    feasible, ensembles = [], []
    for point in cfg.pairs:
        try:
            feasible.append(_pair_jobs(cfg, [point], mode=StepMode.CLASSICAL)[0])
        except ValidationError as e:
            logger.info('eta=%s D=%s is sampled with trajectories: %s', point[0], point[1], e.messages[0])
            ensembles.append(point)
    quantum_job = None
    if feasible:
        smallest = min(feasible, key=lambda job: job.params.eta)
        quantum_job = smallest._replace(snapshot_at=(cfg.n_kicks,), mode=StepMode.QUANTUM)
        feasible = [quantum_job if job is smallest else job for job in feasible]
    outcomes = run_jobs(feasible, cfg.workers)
    pairs = OrderedDict()
    for job, outcome in zip(feasible, outcomes):
        if job is quantum_job:
            quantum, classical = outcome.snapshots[cfg.n_kicks]
            result.series.append(outcome)
        else:
            classical = outcome
        pairs[(job.params.eta, job.deco.D)] = ('grid', classical, _job_parameters(job))
        if job is quantum_job:
            parameters = OrderedDict(_job_parameters(job), kick=cfg.n_kicks)
            writer.snapshot('quantum_eta{0:g}'.format(job.params.eta), quantum, parameters, SIGNED)
            result.snapshots['quantum'] = quantum
            result.summary['quantum'] = OrderedDict([('eta', job.params.eta), ('D', job.deco.D),
                                                     ('chi', outcome.chi),
                                                     ('distance', l1_distance(quantum, classical)),
                                                     ('negativity', negativity_volume(quantum))])
    display = _display_spec(cfg)
    for eta, D in ensembles:
        params = cfg.system.replace(eta=eta)
        deco = DecoherenceParams(D=D, gamma_tau=cfg.deco.gamma_tau, nbar=cfg.deco.nbar)
        ens = sample_coherent_ensemble(cfg.center, eta, cfg.trajectories, cfg.seed)
        for _ in range(cfg.n_kicks):
            ens = mc_step(ens, params, deco)
        parameters = OrderedDict([('K', params.K), ('eta', eta), ('nu_tau', params.nu_tau),
                                  ('tau', params.tau)])
        parameters.update(deco.as_dict())
        parameters.update([('grid', display.as_dict()), ('chi', chi(params.K, eta, D)),
                           ('trajectories', ens.size), ('seed', cfg.seed)])
        writer.ensemble('ensemble_eta{0:g}.bin'.format(eta), ens, parameters)
        pairs[(eta, D)] = ('ensemble', histogram_ensemble(ens, display), parameters)
    summary = result.summary
    summary['classical'] = []
    accumulated = 2 * cfg.n_kicks
    for (eta, D), (method, classical, parameters) in sorted(pairs.items(), reverse=True):
        parameters = OrderedDict(parameters, kick=cfg.n_kicks, method=method)
        writer.snapshot('classical_eta{0:g}'.format(eta), classical, parameters, UNSIGNED)
        result.snapshots[(eta, D)] = classical
        variance = _classical_variance(classical)
        dominated = variance <= DIFFUSION_DOMINANCE_FACTOR * accumulated * D
        if dominated:
            result.flag('eta=%s D=%s: variance %.3g is diffusion dominated (2D n = %.3g)', eta, D, variance,
                        accumulated * D)
        summary['classical'].append(OrderedDict([('eta', eta), ('D', D), ('method', method),
                                                 ('variance', variance),
                                                 ('diffusion_dominated', dominated)]))
    return writer.finish(result)


def _display_spec(cfg):
    n = cfg.grid or {'n_q': ENSEMBLE_DISPLAY_SIZE, 'n_p': ENSEMBLE_DISPLAY_SIZE}
    low, high = cfg.window
    return GridSpec(n_q=n['n_q'], n_p=n['n_p'], q_min=low, q_max=high, p_min=low, p_max=high)


def chi_scan_slope(points):
    """
    least-squares slope of log(max D_n) against log(chi), restricted to max D_n <= 1
    """
    linear = [(c, d) for c, d in points if 0 < d <= 1]
    if len(set(c for c, _ in linear)) < 2:
        raise DegenerateFitError('fewer than two chi values with max D_n <= 1')
    x = np.log([c for c, _ in linear])
    y = np.log([d for _, d in linear])
    slope, intercept = np.polyfit(x, y, 1)
    return float(slope), float(intercept), len(linear)


def run_fig4(cfg):
    """
    maximum distance against chi at fixed D, chi varied through eta
    """
    if cfg.deco.D <= 0:
        raise ValidationError('scenario {0} needs D > 0'.format(cfg.scenario))
    writer = ArtifactWriter(cfg)
    result = ScenarioResult(cfg.scenario, writer.manifest)
    jobs = _pair_jobs(cfg, cfg.scan_points())
    series_list = run_jobs(jobs, cfg.workers)
    result.series.extend(series_list)
    rows = []
    for job, series in zip(jobs, series_list):
        writer.series('distance_eta{0:g}.csv'.format(job.params.eta), series, _job_parameters(job))
        rows.append((series.chi, job.params.eta, job.deco.D, series.max_distance))
    writer.table('chi_scan.csv', ('chi', 'eta', 'D', 'max_distance'), rows)
    summary = result.summary
    summary['points'] = [OrderedDict(zip(('chi', 'eta', 'D', 'max_distance'), row)) for row in rows]
    try:
        slope, intercept, used = chi_scan_slope([(c, d) for c, _, _, d in rows])
    except DegenerateFitError as e:
        result.flag('slope not measured: %s', e)
        summary['slope'] = None
    else:
        summary['slope'], summary['intercept'], summary['linear_points'] = slope, intercept, used
        fit = OrderedDict([('slope', slope), ('intercept', intercept), ('points', used)])
        writer.fit('chi_fit.json', fit)
    return writer.finish(result)


def run_custom(cfg):
    """
    a single pair evolution with any reservoir; both grids are kept at the last kick
    """
    writer = ArtifactWriter(cfg)
    result = ScenarioResult(cfg.scenario, writer.manifest)
    job = Job(cfg.system, cfg.deco, cfg.grid_for(cfg.system.eta, cfg.deco.D), cfg.center, cfg.n_kicks,
              (cfg.n_kicks,), StepMode.QUANTUM, cfg.classical_method)
    series = run_job(job)
    result.series.append(series)
    parameters = _job_parameters(job)
    writer.series('distance.csv', series, parameters)
    quantum, classical = series.snapshots[cfg.n_kicks]
    result.snapshots[cfg.n_kicks] = (quantum, classical)
    final = OrderedDict(parameters, kick=cfg.n_kicks)
    writer.snapshot('quantum_final', quantum, final, SIGNED)
    writer.snapshot('classical_final', classical, final, UNSIGNED)
    summary = result.summary
    summary['max_distance'] = series.max_distance
    summary['chi'] = series.chi
    summary['separation_time'] = _separation_estimate(cfg)
    try:
        summary['n_peak'], summary['peak_distance'] = detect_first_peak(series)
    except (NoPeakFoundError, ValueError):
        summary['n_peak'] = None
    return writer.finish(result)


RUNNERS = {
    scenarios.FIG1: run_fig1,
    scenarios.FIG2: run_fig2,
    scenarios.FIG3: run_fig3,
    scenarios.FIG4: run_fig4,
    scenarios.CUSTOM: run_custom,
}


def run_scenario(cfg):
    logger.info('running scenario %s into %s', cfg.scenario, cfg.output_dir)
    return RUNNERS[cfg.scenario](cfg)
