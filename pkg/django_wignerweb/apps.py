import math
from numbers import Number

from django.apps import AppConfig
from django.core.exceptions import ImproperlyConfigured
from django.utils.translation import gettext_lazy as _

from . import settings as app_settings
from .signals import experiment_status_changed
from .utils import is_power_of_two

POSITIVE_SETTINGS = ('NORM_TOLERANCE', 'IMAG_TOLERANCE', 'UNIT_MODULUS_TOLERANCE', 'LEAKAGE_TOLERANCE',
                     'UNDERSAMPLING_TOLERANCE', 'CHI_TOLERANCE', 'COLLAPSE_TOLERANCE',
                     'PEAK_BASELINE_FACTOR', 'PEAK_FLOOR', 'MIN_CELLS_PER_SIGMA')


class WignerwebConfig(AppConfig):
    name = 'django_wignerweb'
    label = 'django_wignerweb'
    verbose_name = _('Kicked oscillator phase-space experiments')

    def __setmodels__(self):
        """
        This method allows third party apps to set their own custom models
        """
        from .models import Artifact, Experiment
        self.experiment_model = Experiment
        self.artifact_model = Artifact

    def connect_signals(self):
        """
        * logs every experiment status transition
        """
        experiment_status_changed.connect(self.experiment_model.log_status_change,
                                          sender=self.experiment_model,
                                          dispatch_uid='wignerweb_log_status_change')

    def check_settings(self):
        for name in ('WORKERS', 'FFT_WORKERS', 'DEFAULT_KICKS'):
            value = getattr(app_settings, name)
            if not isinstance(value, int) or value < 1:
                raise ImproperlyConfigured('WIGNERWEB_{0} must be a positive integer, '
                                           'got {1!r}'.format(name, value))
        for name in POSITIVE_SETTINGS:
            value = getattr(app_settings, name)
            if not isinstance(value, Number) or not value > 0:
                raise ImproperlyConfigured('WIGNERWEB_{0} must be a positive number, '
                                           'got {1!r}'.format(name, value))
        if not 0 < app_settings.GUARD_BAND < 0.5:
            raise ImproperlyConfigured('WIGNERWEB_GUARD_BAND must lie in (0, 0.5)')
        if not is_power_of_two(app_settings.MAX_GRID_SIZE) or app_settings.MAX_GRID_SIZE < 64:
            raise ImproperlyConfigured('WIGNERWEB_MAX_GRID_SIZE must be a power of two >= 64')
        try:
            low, high = app_settings.DEFAULT_WINDOW
        except (TypeError, ValueError):
            raise ImproperlyConfigured('WIGNERWEB_DEFAULT_WINDOW must be a (low, high) pair')
        if not (math.isfinite(low) and math.isfinite(high) and high > low):
            raise ImproperlyConfigured('WIGNERWEB_DEFAULT_WINDOW must satisfy low < high')

    def ready(self):
        self.__setmodels__()
        self.check_settings()
        self.connect_signals()
