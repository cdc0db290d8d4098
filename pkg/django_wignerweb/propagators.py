"""
One-kick evolution operators: kick (quantum or classical),
harmonic rotation by three exact shears, then the reservoir step
"""
import logging
import math
from enum import Enum

import numpy as np

from . import settings as app_settings
from .decoherence import diffusion_step, dissipative_step
from .exceptions import AngleRangeError, NormDriftError
from .grid import Label, PhaseSpaceGrid, apply_fourier_multiplier, check_label, check_leakage, riemann_norm

logger = logging.getLogger(__name__)

MAX_ROTATION = math.pi / 2


class StepMode(str, Enum):
    QUANTUM = 'quantum'
    CLASSICAL = 'classical'

    @property
    def label(self):
        return Label(self.value)


def quantum_kick_multiplier(K, eta):
    """
    exact Wigner kick kernel, exp(i K sin(q) sin(eta^2 mu) / eta^2)
    """
    eta2 = eta ** 2

    def multiplier(mu, q):
        return np.exp(1j * K * np.sin(q) * np.sin(eta2 * mu) / eta2)
    return multiplier


def classical_kick_multiplier(K):
    """
    momentum shift p -> p + K sin(q) by the shift theorem
    """
    def multiplier(mu, q):
        return np.exp(1j * K * np.sin(q) * mu)
    return multiplier


def kick_quantum(grid, params):
    check_label(grid, Label.QUANTUM)
    return apply_fourier_multiplier(grid, 'p', quantum_kick_multiplier(params.K, params.eta))


def kick_classical(grid, params):
    check_label(grid, Label.CLASSICAL)
    return apply_fourier_multiplier(grid, 'p', classical_kick_multiplier(params.K))


def shear_q(grid, a):
    """
    pushes the distribution through (q, p) -> (q + a p, p)
    """
    return apply_fourier_multiplier(grid, 'q', lambda mu, p: np.exp(1j * mu * a * p))


def shear_p(grid, b):
    """
    pushes the distribution through (q, p) -> (q, p + b q)
    """
    return apply_fourier_multiplier(grid, 'p', lambda mu, q: np.exp(1j * mu * b * q))


def rotate(grid, angle):
    """
    W'(x) = W(R^-1 x) with R the clockwise phase-space rotation
    by ``angle``; |angle| <= pi/2
    """
    if abs(angle) > MAX_ROTATION:
        raise AngleRangeError('rotation angle {0} exceeds pi/2, compose smaller rotations'.format(angle))
    if angle == 0:
        return grid.with_values(grid.values)
    t = math.tan(angle / 2)
    grid = shear_q(grid, t)
    grid = shear_p(grid, -math.sin(angle))
    return shear_q(grid, t)


def rotate_by(grid, angle):
    """
    rotation by an arbitrary angle, composed of legal ``rotate`` calls
    """
    pieces = max(1, int(math.ceil(abs(angle) / MAX_ROTATION)))
    for _ in range(pieces):
        grid = rotate(grid, angle / pieces)
    return grid


def kick(grid, params, mode):
    mode = StepMode(mode)
    if mode is StepMode.QUANTUM:
        return kick_quantum(grid, params)
    return kick_classical(grid, params)


def reservoir_step(grid, params, deco):
    if deco.D > 0:
        grid = diffusion_step(grid, deco.D)
    if deco.gamma_tau > 0:
        grid = dissipative_step(grid, deco.gamma_tau, deco.nbar, params.eta)
    return grid


def step(grid, params, mode, deco):
    """
    one kick period: kick -> rotation by nu_tau -> reservoir;
    the result samples the distribution immediately before the next kick
    """
    mode = StepMode(mode)
    check_label(grid, mode.label)
    before = riemann_norm(grid)
    grid = kick(grid, params, mode)
    grid = rotate_by(grid, params.nu_tau)
    grid = reservoir_step(grid, params, deco)
    drift = abs(riemann_norm(grid) - before)
    if drift > app_settings.NORM_TOLERANCE:
        logger.error('%s norm drifted by %.3e in one step', mode.value, drift)
        raise NormDriftError('{0} norm drifted by {1:.3e} in one step '
                             '(tolerance {2:.1e})'.format(mode.value, drift, app_settings.NORM_TOLERANCE))
    check_leakage(grid)
    return grid


def inverse_map(q, p, params):
    """
    preimage of ``(q, p)`` under one kick period without reservoir:
    undo the rotation by nu_tau, then the kick
    """
    c, s = math.cos(params.nu_tau), math.sin(params.nu_tau)
    q, p = q * c - p * s, q * s + p * c
    return q, p - params.K * np.sin(q)


class Characteristics(object):
    """
    exact unitary classical evolution: the density after ``n`` kicks is
    the initial density evaluated at the ``n``-fold preimage of every
    grid point, so folds finer than the grid never alias
    """
    def __init__(self, spec, density, params):
        self.spec = spec
        self.density = density
        self.params = params
        self.n = 0
        self.q, self.p = spec.mesh()

    def step(self):
        self.q, self.p = inverse_map(self.q, self.p, self.params)
        self.n += 1
        return self.grid()

    def grid(self):
        grid = PhaseSpaceGrid(self.spec, self.density(self.q, self.p), Label.CLASSICAL)
        check_leakage(grid)
        return grid
