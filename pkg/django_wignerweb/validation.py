"""
Oracle-equivalence suite run by ``wignerweb validate``: every check
compares the grid engine with an independent reference and returns a
``Check`` carrying the measured value and the bound it must respect.

The default sizes run in seconds; ``full=True`` uses the reference
sizes (1024 x 1024 grids, 10^6 trajectories).
"""
import logging
import math
from collections import namedtuple

from .config import COLLAPSE_CHI, COLLAPSE_PAIRS, DESK_COLLAPSE_PAIRS
from .decoherence import chi, dissipative_step, dissipative_variance, f_envelope_maximum
from .grid import GridSpec, Label, gaussian_convolve, moments, new_coherent_state, riemann_norm
from .observables import coherent_pair, l1_distance
from .oracles import (coherent_wavefunction, evolve_state_one_kick, histogram_ensemble, lyapunov_estimate,
                      lyapunov_formula, mc_step, sample_coherent_ensemble, sampling_band, wigner_of_state)
from .params import DecoherenceParams, SystemParams
from .propagators import StepMode, rotate, step

logger = logging.getLogger(__name__)

Check = namedtuple('Check', 'name passed value bound')


def _check(name, value, bound):
    passed = bool(value <= bound)
    log = logger.info if passed else logger.error
    log('%s: %.3e (bound %.3e) %s', name, value, bound, 'ok' if passed else 'FAILED')
    return Check(name, passed, float(value), float(bound))


def check_f_envelope():
    return _check('f(y) exp(-y^2) maximum', abs(f_envelope_maximum() - 0.081), 0.001)


def check_chi_pairs():
    """
    desk pairs within 3% of the collapse chi
    """
    worst = max(abs(chi(2.0, eta, D) - COLLAPSE_CHI) / COLLAPSE_CHI for eta, D in DESK_COLLAPSE_PAIRS)
    return _check('chi of the collapse pairs', worst, 0.03)


def check_rotation_period(n=256):
    spec = GridSpec.square(n, -2 * math.pi, 2 * math.pi)
    grid = new_coherent_state(spec, (1.0, 0.5), 0.3)
    rotated = grid
    for _ in range(6):
        rotated = rotate(rotated, math.pi / 3)
    return _check('six pi/3 rotations', l1_distance(grid, rotated), 1e-8)


def check_convolution_semigroup(n=256):
    spec = GridSpec.square(n, -2 * math.pi, 2 * math.pi)
    grid = new_coherent_state(spec, (0.5, -0.5), 0.2)
    twice = gaussian_convolve(gaussian_convolve(grid, 0.01, 0.02), 0.03, 0.01)
    once = gaussian_convolve(grid, 0.04, 0.03)
    return _check('convolution semigroup', l1_distance(twice, once), 1e-10)


def check_dissipative_moments(n=256):
    spec = GridSpec.square(n, -2 * math.pi, 2 * math.pi)
    eta, gamma_tau, nbar = 0.3, 0.2, 1.0
    grid = dissipative_step(new_coherent_state(spec, (1.0, 0.0), eta), gamma_tau, nbar, eta)
    (q_mean, _), (q_var, p_var) = moments(grid)
    expected = dissipative_variance(eta ** 2, gamma_tau, nbar, eta)
    error = max(abs(q_var - expected), abs(p_var - expected), abs(q_mean - math.exp(-gamma_tau / 2)))
    return _check('dissipative Gaussian moments', error, 1e-6)


def check_unitary_oracle(n=256, K=1.0, eta=0.3, kicks=3, window=2 * math.pi):
    """
    grid Wigner evolution against the Wigner function of the split-step evolved state
    """
    spec = GridSpec.square(n, -window, window)
    params = SystemParams(K=K, eta=eta)
    deco = DecoherenceParams()
    grid = new_coherent_state(spec, (0.0, 0.0), eta)
    psi = coherent_wavefunction(spec, (0.0, 0.0), eta)
    worst = 0.0
    for _ in range(kicks):
        grid = step(grid, params, StepMode.QUANTUM, deco)
        psi = evolve_state_one_kick(psi, params)
        worst = max(worst, l1_distance(grid, wigner_of_state(psi, spec)))
    return _check('unitary state oracle', worst, 1e-3)


def check_classical_oracle(n=512, size=10 ** 5, kicks=3, K=2.0, D=4.5e-3, eta=0.3, seed=0,
                           window=2 * math.pi):
    """
    grid classical evolution against a histogram of trajectories; the
    value reported is the L1 distance relative to the sampling band
    """
    spec = GridSpec.square(n, -window, window)
    params = SystemParams(K=K, eta=eta)
    deco = DecoherenceParams(D=D)
    _, grid = coherent_pair(spec, (0.0, 0.0), eta)
    ens = sample_coherent_ensemble((0.0, 0.0), eta, size, seed)
    for _ in range(kicks):
        grid = step(grid, params, StepMode.CLASSICAL, deco)
        ens = mc_step(ens, params, deco)
    histogram = histogram_ensemble(ens, spec)
    return _check('classical trajectory oracle (relative to band)',
                  l1_distance(grid, histogram) / sampling_band(histogram, size), 1.0)


def check_lyapunov(K=10.0, n_kicks=1000, n_orbits=100, seed=0):
    params = SystemParams(K=K, eta=0.1)
    estimate = lyapunov_estimate(params, 0.0, n_kicks, n_orbits, seed)
    expected = lyapunov_formula(K, params.nu_tau, 0.0)
    return _check('Lyapunov coefficient (relative)', abs(estimate.value - expected) / expected, 0.1)


def check_norm_conservation(n=256):
    spec = GridSpec.square(n, -2 * math.pi, 2 * math.pi)
    params = SystemParams(K=2.0, eta=0.3)
    grid = new_coherent_state(spec, (0.3, -0.2), 0.3, Label.CLASSICAL)
    before = riemann_norm(grid)
    after = step(grid, params, StepMode.CLASSICAL, DecoherenceParams())
    return _check('norm conservation per step', abs(riemann_norm(after) - before), 1e-12)


def run_validation(full=False):
    checks = [check_f_envelope(), check_chi_pairs(), check_norm_conservation(), check_rotation_period(),
              check_convolution_semigroup(), check_dissipative_moments()]
    if full:
        checks += [check_unitary_oracle(n=1024, K=2.0, kicks=5, window=4 * math.pi),
                   check_classical_oracle(n=1024, size=10 ** 6, kicks=10, eta=0.3, window=4 * math.pi),
                   check_lyapunov(n_kicks=10 ** 4, n_orbits=200)]
    else:
        checks += [check_unitary_oracle(), check_classical_oracle(), check_lyapunov()]
    return checks


def collapse_pair_chis(K=2.0):
    """
    chi of every collapse (eta, D) pair, in order
    """
    return [(eta, D, chi(K, eta, D)) for eta, D in COLLAPSE_PAIRS]

