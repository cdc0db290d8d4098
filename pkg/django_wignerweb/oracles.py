"""
Independent reference implementations used to validate the grid engine:
pure-state split-step evolution with its Wigner transform, a Monte Carlo
trajectory ensemble, tangent-map Lyapunov estimates and direct quadrature
of the smoothed quantum propagator.
"""
import logging
import math
from collections import namedtuple
from dataclasses import dataclass, field

import numpy as np
from scipy import fft as sp_fft
from scipy import integrate, signal

from . import settings as app_settings
from .decoherence import ou_variance
from .exceptions import (ConvergenceError, DomainError, NumericalGuardError, SpecMismatchError,
                         SupportMarginError)
from .grid import SUPPORT_SIGMAS, Label, PhaseSpaceGrid

logger = logging.getLogger(__name__)

NORM_TOLERANCE = 1e-10
MIN_TRAJECTORIES = 10 ** 4
MIN_LYAPUNOV_KICKS = 10 ** 3
MIN_LYAPUNOV_ORBITS = 10 ** 2
TRANSIENT_KICKS = 200
ISLAND_VARIANCE = 1.0
MAX_RESAMPLING_ROUNDS = 100
CONVERGENCE_DRIFT = 0.05
ORIGIN = 'origin'
ENSEMBLE = 'ensemble'


# ---------------------------------------------------------------------------
# pure states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WaveFunction:
    spec: object
    amplitudes: np.ndarray = field(repr=False)
    eta: float

    def __post_init__(self):
        if self.amplitudes.shape != (self.spec.n_q,):
            raise SpecMismatchError('expected {0} amplitudes, got {1}'.format(self.spec.n_q,
                                                                                self.amplitudes.shape))
        norm = self.norm
        if abs(norm - 1) > NORM_TOLERANCE:
            raise ValueError('wave function norm is {0!r}, expected 1'.format(norm))

    @property
    def hbar_eff(self):
        return 2 * self.eta ** 2

    @property
    def norm(self):
        return float(np.sum(np.abs(self.amplitudes) ** 2) * self.spec.dq)

    @classmethod
    def normalized(cls, spec, amplitudes, eta):
        amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        scale = math.sqrt(np.sum(np.abs(amplitudes) ** 2) * spec.dq)
        return cls(spec, amplitudes / scale, eta)

    def fidelity(self, other):
        return float(abs(np.vdot(self.amplitudes, other.amplitudes)) * self.spec.dq)

    def expectation_q(self):
        return float(np.sum(self.spec.q * np.abs(self.amplitudes) ** 2) * self.spec.dq)


def _check_margin(spec, center, eta):
    margin = SUPPORT_SIGMAS * eta
    if not spec.q_min + margin <= center <= spec.q_max - margin:
        raise SupportMarginError('a packet of width {0} at q={1} needs a margin of {2} '
                                 'to the window edges'.format(eta, center, margin))


def coherent_wavefunction(spec, center, eta):
    q0, p0 = center
    _check_margin(spec, q0, eta)
    hbar = 2 * eta ** 2
    q = spec.q
    amplitudes = np.exp(-(q - q0) ** 2 / (4 * eta ** 2) + 1j * p0 * q / hbar)
    return WaveFunction.normalized(spec, amplitudes, eta)


def cat_wavefunction(spec, q0, eta):
    """
    even superposition of coherent states at (+q0, 0) and (-q0, 0)
    """
    _check_margin(spec, abs(q0), eta)
    q = spec.q
    amplitudes = np.exp(-(q - q0) ** 2 / (4 * eta ** 2)) + np.exp(-(q + q0) ** 2 / (4 * eta ** 2))
    return WaveFunction.normalized(spec, amplitudes, eta)


def _check_state_support(psi):
    spec = psi.spec
    margin = SUPPORT_SIGMAS * psi.eta
    strip = (spec.q < spec.q_min + margin) | (spec.q > spec.q_max - margin)
    mass = float(np.sum(np.abs(psi.amplitudes[strip]) ** 2) * spec.dq)
    if mass > app_settings.LEAKAGE_TOLERANCE:
        raise SupportMarginError('probability {0:.3e} lies within 6 eta of the window edges'.format(mass))


def _momentum_chirp(amplitudes, spec, duration, hbar):
    # free evolution exp(-i t p^2 / 2 hbar) applied in momentum space
    k = 2 * np.pi * sp_fft.fftfreq(spec.n_q, spec.dq)
    spectrum = sp_fft.fft(amplitudes)
    spectrum *= np.exp(-0.5j * duration * hbar * k ** 2)
    return sp_fft.ifft(spectrum)


def harmonic_rotation(psi, angle):
    """
    fractional Fourier transform of ``angle`` by the three-chirp decomposition
    (momentum chirp, position chirp, momentum chirp)
    """
    if abs(angle) > math.pi / 2:
        pieces = int(math.ceil(abs(angle) / (math.pi / 2)))
        for _ in range(pieces):
            psi = harmonic_rotation(psi, angle / pieces)
        return psi
    spec, hbar = psi.spec, psi.hbar_eff
    t = math.tan(angle / 2)
    amplitudes = _momentum_chirp(psi.amplitudes, spec, t, hbar)
    amplitudes = amplitudes * np.exp(-0.5j * math.sin(angle) * spec.q ** 2 / hbar)
    amplitudes = _momentum_chirp(amplitudes, spec, t, hbar)
    return WaveFunction(spec, amplitudes, psi.eta)


def evolve_state_one_kick(psi, params):
    """
    kick phase exp(-i K cos q / hbar_eff) followed by the harmonic rotation by nu_tau
    """
    if psi.eta != params.eta:
        raise SpecMismatchError('wave function eta {0} differs from the system eta {1}'.format(psi.eta,
                                                                                                params.eta))
    _check_state_support(psi)
    kicked = psi.amplitudes * np.exp(-1j * params.K * np.cos(psi.spec.q) / psi.hbar_eff)
    return harmonic_rotation(WaveFunction(psi.spec, kicked, psi.eta), params.nu_tau)


def wigner_of_state(psi, spec):
    """
    W(q, p) = 1/(pi hbar) int ds psi*(q+s) psi(q-s) exp(2ips/hbar),
    evaluated with half-cell lags on a twice-oversampled, zero-padded copy of psi
    """
    source = psi.spec
    if (spec.n_q, spec.q_min, spec.q_max) != (source.n_q, source.q_min, source.q_max):
        raise SpecMismatchError('the q-axis of {0} does not match the wave function sampling'.format(spec))
    n, hbar = spec.n_q, psi.hbar_eff
    fine = signal.resample(psi.amplitudes, 2 * n)
    padded = np.concatenate([np.zeros(2 * n, complex), fine, np.zeros(2 * n, complex)])
    lags = np.arange(-(2 * n - 1), 2 * n)
    centers = 2 * n + 2 * np.arange(n)
    correlation = (np.conj(padded[centers[:, None] + lags[None, :]]) *
                   padded[centers[:, None] - lags[None, :]])
    # drop lags that carry no amplitude anywhere
    weight = np.max(np.abs(correlation), axis=0)
    keep = weight > 1e-18 * weight.max()
    lags, correlation = lags[keep], correlation[:, keep]
    phases = np.exp(1j * np.outer(lags * spec.dq, spec.p) / hbar)
    values = (correlation @ phases).real * spec.dq / (2 * np.pi * hbar)
    return PhaseSpaceGrid(spec, values, Label.QUANTUM)


# ---------------------------------------------------------------------------
# classical ensembles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TrajectoryEnsemble:
    q: np.ndarray = field(repr=False)
    p: np.ndarray = field(repr=False)
    rng_seed: int
    kicks: int = 0

    def __post_init__(self):
        if self.q.shape != self.p.shape or self.q.ndim != 1:
            raise ValueError('q and p must be one-dimensional arrays of equal length')
        if self.size < MIN_TRAJECTORIES:
            raise ValueError('an ensemble needs at least {0} trajectories, got {1}'.format(MIN_TRAJECTORIES,
                                                                                          self.size))
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise NumericalGuardError('ensemble holds non-finite coordinates')

    @property
    def size(self):
        return self.q.shape[0]


def _stream(seed, counter):
    """
    counter-based random stream: one Philox key per (seed, kick)
    """
    key = np.array([seed, counter], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def sample_coherent_ensemble(center, eta, size, seed):
    rng = _stream(seed, 0)
    q = center[0] + eta * rng.standard_normal(size)
    p = center[1] + eta * rng.standard_normal(size)
    return TrajectoryEnsemble(q, p, seed)


def mc_step(ens, params, deco):
    """
    kick, rotation, diffusion noise and (optionally) the
    Ornstein-Uhlenbeck contraction for every trajectory
    """
    rng = _stream(ens.rng_seed, ens.kicks + 1)
    c, s = math.cos(params.nu_tau), math.sin(params.nu_tau)
    p = ens.p + params.K * np.sin(ens.q)
    q, p = c * ens.q + s * p, -s * ens.q + c * p
    if deco.D > 0:
        sigma = math.sqrt(2 * deco.D)
        q = q + sigma * rng.standard_normal(ens.size)
        p = p + sigma * rng.standard_normal(ens.size)
    if deco.gamma_tau > 0:
        contraction = math.exp(-deco.gamma_tau / 2)
        sigma = math.sqrt(ou_variance(deco.gamma_tau, deco.nbar, params.eta))
        q = contraction * q + sigma * rng.standard_normal(ens.size)
        p = contraction * p + sigma * rng.standard_normal(ens.size)
    return TrajectoryEnsemble(q, p, ens.rng_seed, ens.kicks + 1)


def histogram_ensemble(ens, spec):
    """
    density of the ensemble on the grid's own cells (cells centered on the samples)
    """
    edges_q = spec.q_min - spec.dq / 2 + spec.dq * np.arange(spec.n_q + 1)
    edges_p = spec.p_min - spec.dp / 2 + spec.dp * np.arange(spec.n_p + 1)
    counts, _, _ = np.histogram2d(ens.q, ens.p, bins=[edges_q, edges_p])
    return PhaseSpaceGrid(spec, counts / (ens.size * spec.cell_area), Label.CLASSICAL)


def sampling_band(histogram, size):
    """
    3 / sqrt(effective samples per occupied cell)
    """
    occupied = int(np.count_nonzero(histogram.values))
    return 3 * math.sqrt(max(occupied, 1) / size)


# ---------------------------------------------------------------------------
# Lyapunov coefficients
# ---------------------------------------------------------------------------

LyapunovEstimate = namedtuple('LyapunovEstimate', 'value drift converged orbits kicks')


def _map_orbits(q, p, K, rotation):
    c, s = rotation
    p = p + K * np.sin(q)
    return c * q + s * p, -s * q + c * p


def _chaotic_initial_conditions(params, n_orbits, rng):
    """
    uniform draws in |q|, |p| <= pi; orbits whose q-variance over the
    transient stays below 1 are taken as island-trapped and redrawn
    """
    rotation = (math.cos(params.nu_tau), math.sin(params.nu_tau))
    accepted_q, accepted_p = [], []
    for _ in range(MAX_RESAMPLING_ROUNDS):
        missing = n_orbits - sum(len(a) for a in accepted_q)
        if missing <= 0:
            break
        q = rng.uniform(-math.pi, math.pi, missing)
        p = rng.uniform(-math.pi, math.pi, missing)
        history = np.empty((TRANSIENT_KICKS, missing))
        for n in range(TRANSIENT_KICKS):
            q, p = _map_orbits(q, p, params.K, rotation)
            history[n] = q
        chaotic = np.var(history, axis=0) >= ISLAND_VARIANCE
        accepted_q.append(q[chaotic])
        accepted_p.append(p[chaotic])
    q, p = np.concatenate(accepted_q)[:n_orbits], np.concatenate(accepted_p)[:n_orbits]
    if len(q) < n_orbits:
        raise ConvergenceError('only {0} of {1} initial conditions reached the chaotic sea'.format(len(q),
                                                                                                   n_orbits))
    return q, p


def lyapunov_estimate(params, gamma_tau, n_kicks, n_orbits, seed):
    """
    Benettin tangent-map estimate of the mean log-growth per kick of
    the linearised map D(R o K), scaled by exp(-gamma_tau/2) per quadrature;
    the orbits themselves follow the conservative map
    """
    if n_kicks < MIN_LYAPUNOV_KICKS or n_orbits < MIN_LYAPUNOV_ORBITS:
        raise ValueError('need at least {0} kicks and {1} orbits'.format(MIN_LYAPUNOV_KICKS,
                                                                          MIN_LYAPUNOV_ORBITS))
    rng = np.random.default_rng(seed)
    contraction = math.exp(-gamma_tau / 2)
    c, s = math.cos(params.nu_tau), math.sin(params.nu_tau)
    q, p = _chaotic_initial_conditions(params, n_orbits, rng)
    vq, vp = np.ones(n_orbits), np.zeros(n_orbits)
    log_growth = np.zeros(n_orbits)
    checkpoint = int(0.9 * n_kicks)
    earlier = None
    for n in range(1, n_kicks + 1):
        vp = vp + params.K * np.cos(q) * vq
        vq, vp = contraction * (c * vq + s * vp), contraction * (-s * vq + c * vp)
        growth = np.hypot(vq, vp)
        log_growth += np.log(growth)
        vq, vp = vq / growth, vp / growth
        q, p = _map_orbits(q, p, params.K, (c, s))
        if n == checkpoint:
            earlier = float(np.mean(log_growth)) / n
    value = float(np.mean(log_growth)) / n_kicks
    drift = abs(value - earlier) / max(abs(value), 1e-3)
    return LyapunovEstimate(value, drift, drift <= CONVERGENCE_DRIFT, n_orbits, n_kicks)


def lyapunov_numeric(params, gamma_tau, n_kicks, n_orbits, seed, strict=False):
    estimate = lyapunov_estimate(params, gamma_tau, n_kicks, n_orbits, seed)
    if not estimate.converged:
        message = 'Lyapunov estimate {0:.4f} drifted by {1:.1%} over the last decade'.format(estimate.value,
                                                                                          estimate.drift)
        if strict:
            raise ConvergenceError(message)
        logger.warning(message)
    return estimate.value


def lyapunov_formula(K, nu_tau, gamma_tau, which=ENSEMBLE):
    """
    strong-chaos closed forms: ln[(K/2) sin nu_tau] over the chaotic sea,
    ln[K sin nu_tau] at the origin, both shifted by -gamma_tau/2
    """
    if K <= 0:
        raise DomainError('K must be > 0, got {0}'.format(K))
    if which == ENSEMBLE:
        argument = K / 2 * math.sin(nu_tau)
    elif which == ORIGIN:
        argument = K * math.sin(nu_tau)
    else:
        raise ValueError('unknown Lyapunov formula "{0}"'.format(which))
    if argument <= 0:
        raise DomainError('logarithm argument {0} <= 0'.format(argument))
    return math.log(argument) - gamma_tau / 2


def origin_expansion_rate(K, nu_tau, gamma_tau=0.0):
    """
    exact log of the expansion eigenvalue of the linearised map at the origin
    """
    c, s = math.cos(nu_tau), math.sin(nu_tau)
    jacobian = np.array([[c + s * K, s], [-s + c * K, c]]) * math.exp(-gamma_tau / 2)
    return float(np.log(np.max(np.abs(np.linalg.eigvals(jacobian)))))


# ---------------------------------------------------------------------------
# smoothed quantum propagator by direct quadrature
# ---------------------------------------------------------------------------

def smoothed_quantum_quadrature(xR, xprime, params, D, cutoff=50.0):
    """
    smoothed quantum kernel: the mu-integral of the exact one-kick
    propagator with the factor exp(-D mu^2 / eta^4), times the
    Gaussian smoothing of the position delta
    """
    if D <= 0:
        raise DomainError('D must be > 0')
    qR, pR = xR
    q1, p1 = xprime
    eta2 = params.eta ** 2
    kick = params.K * math.sin(q1)
    Y = p1 - pR + kick
    upper = math.sqrt(cutoff / D)

    def integrand(u):
        return math.exp(-D * u * u) * math.cos(kick * (math.sin(eta2 * u) / eta2 - u) + u * Y)

    momentum_part, _ = integrate.quad(integrand, 0, upper, limit=2000, epsabs=1e-13, epsrel=1e-10)
    position_part = math.exp(-(q1 - qR) ** 2 / (4 * D)) / (2 * math.sqrt(math.pi * D))
    return position_part * momentum_part / math.pi
