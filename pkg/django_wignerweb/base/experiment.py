import logging
import os

from django.core.exceptions import ValidationError
from django.db import models, transaction
from django.utils.translation import gettext_lazy as _
from model_utils import Choices
from model_utils.fields import StatusField

from .. import settings as app_settings
from ..config import FIG2, FIG3, FIG4, SCENARIOS, load_config
from ..signals import experiment_status_changed
from .base import BaseModel, parameters_field

logger = logging.getLogger(__name__)


class AbstractExperiment(BaseModel):
    """
    Abstract model implementing a persisted
    run of one scenario and its outputs
    """
    scenario = models.CharField(_('scenario'), max_length=32, choices=[(s, s) for s in SCENARIOS])
    config = parameters_field(_('configuration'),
                              blank=True,
                              help_text=_('experiment configuration in JSON format; '
                                          'omitted keys take the scenario defaults'))
    STATUS = Choices('pending', 'running', 'completed', 'failed')
    status = StatusField(_('run status'), help_text=_(
        '"pending" means the experiment has not been run yet; \n'
        '"running" means a run is in progress; \n'
        '"completed" means every artifact was written and listed in the manifest; \n'
        '"failed" means the last run raised an error, see the summary;'
    ))
    output_dir = models.CharField(_('output directory'), max_length=255, blank=True,
                                  help_text=_('defaults to a directory named after the '
                                              'experiment inside WIGNERWEB_OUTPUT_DIR'))
    seed = models.PositiveIntegerField(_('seed'), default=0)
    summary = parameters_field(_('summary'), blank=True, null=True)

    class Meta:
        abstract = True
        verbose_name = _('experiment')
        verbose_name_plural = _('experiments')

    def get_output_dir(self):
        return self.output_dir or os.path.join(app_settings.OUTPUT_DIR, self.name)

    def get_config(self):
        """
        returns the resolved ``ExperimentConfig``; the model fields
        win over the keys of the stored configuration
        """
        data = dict(self.config or {})
        data.update(scenario=self.scenario, seed=self.seed, output_dir=self.get_output_dir(), name=self.name)
        return load_config(data)

    def clean(self):
        """
        * ensures config is not ``None``
        * performs schema validation
        * checks grid resolution of every sweep point
        * enforces the chi invariant of the collapse scenario
        """
        if self.config is None:
            self.config = {}
        # blank scenario is reported by django itself
        if not self.scenario:
            return
        try:
            cfg = self.get_config()
            self._clean_grids(cfg)
        except ValidationError as e:
            raise ValidationError({'config': e.messages})
        if cfg.scenario == FIG2:
            mismatches = cfg.chi_mismatches()
            if mismatches:
                pairs = ', '.join('(eta={0}, D={1}): chi={2:.4g}'.format(*m) for m in mismatches)
                raise ValidationError({'config': 'chi deviates from {0} by more than {1:.0%} for {2}'.format(
                    cfg.chi_target, app_settings.CHI_TOLERANCE, pairs)})

    @staticmethod
    def _clean_grids(cfg):
        if cfg.scenario in (FIG2,):
            points = cfg.pairs
        elif cfg.scenario == FIG4:
            points = cfg.scan_points()
        elif cfg.scenario == FIG3:
            # pairs beyond the maximum grid fall back to trajectories
            return
        else:
            points = [(cfg.system.eta, cfg.deco.D)]
        for eta, D in points:
            cfg.grid_for(eta, D)

    def _set_status(self, status, save=True):
        self.status = status
        if save:
            self.save()
        experiment_status_changed.send(sender=self.__class__, experiment=self, status=status)

    def set_status_running(self, save=True):
        self._set_status('running', save)

    def set_status_completed(self, save=True):
        self._set_status('completed', save)

    def set_status_failed(self, save=True):
        self._set_status('failed', save)

    def run(self):
        """
        executes the scenario, stores its summary and one artifact row
        per manifest entry; returns the ``ScenarioResult``
        """
        from ..experiments import run_scenario
        cfg = self.get_config()
        self.set_status_running()
        try:
            result = run_scenario(cfg)
        except Exception as e:
            logger.exception('experiment "%s" failed', self.name)
            self.summary = {'error': '{0}: {1}'.format(e.__class__.__name__, e)}
            self.set_status_failed()
            raise
        artifact_model = self.artifacts.model
        with transaction.atomic():
            self.artifacts.all().delete()
            for entry in result.manifest:
                artifact_model.objects.create(experiment=self,
                                              path=entry['path'],
                                              kind=entry['kind'],
                                              scenario=entry['scenario'],
                                              parameters=entry['parameters'],
                                              checksum=entry['checksum'])
            self.summary = result.summary
            self.set_status_completed()
        return result

    def verify(self):
        """
        returns the artifacts whose file changed or disappeared
        """
        return [artifact for artifact in self.artifacts.all() if not artifact.verify()]

    @classmethod
    def log_status_change(cls, experiment, status, **kwargs):
        logger.info('experiment "%s" is %s', experiment.name, status)
