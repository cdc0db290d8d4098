import math
import os

from django.conf import settings

OUTPUT_DIR = getattr(settings, 'WIGNERWEB_OUTPUT_DIR',
                     os.environ.get('WIGNERWEB_OUTPUT_DIR', 'wignerweb-output'))
WORKERS = getattr(settings, 'WIGNERWEB_WORKERS', 1)
FFT_WORKERS = getattr(settings, 'WIGNERWEB_FFT_WORKERS', 1)

# numerical guards
NORM_TOLERANCE = getattr(settings, 'WIGNERWEB_NORM_TOLERANCE', 1e-6)
IMAG_TOLERANCE = getattr(settings, 'WIGNERWEB_IMAG_TOLERANCE', 1e-8)
UNIT_MODULUS_TOLERANCE = getattr(settings, 'WIGNERWEB_UNIT_MODULUS_TOLERANCE', 1e-12)
LEAKAGE_TOLERANCE = getattr(settings, 'WIGNERWEB_LEAKAGE_TOLERANCE', 1e-4)
GUARD_BAND = getattr(settings, 'WIGNERWEB_GUARD_BAND', 0.05)
UNDERSAMPLING_TOLERANCE = getattr(settings, 'WIGNERWEB_UNDERSAMPLING_TOLERANCE', 1e-8)

# grid resolution policy
MIN_CELLS_PER_SIGMA = getattr(settings, 'WIGNERWEB_MIN_CELLS_PER_SIGMA', 8)
MAX_GRID_SIZE = getattr(settings, 'WIGNERWEB_MAX_GRID_SIZE', 4096)
DEFAULT_WINDOW = getattr(settings, 'WIGNERWEB_DEFAULT_WINDOW', (-4 * math.pi, 4 * math.pi))

# experiment acceptance knobs
CHI_TOLERANCE = getattr(settings, 'WIGNERWEB_CHI_TOLERANCE', 0.05)
COLLAPSE_TOLERANCE = getattr(settings, 'WIGNERWEB_COLLAPSE_TOLERANCE', 0.25)
PEAK_BASELINE_FACTOR = getattr(settings, 'WIGNERWEB_PEAK_BASELINE_FACTOR', 3.0)
PEAK_FLOOR = getattr(settings, 'WIGNERWEB_PEAK_FLOOR', 1e-8)
DEFAULT_KICKS = getattr(settings, 'WIGNERWEB_DEFAULT_KICKS', 20)
