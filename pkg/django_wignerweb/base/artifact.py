import os

from django.db import models
from django.utils.translation import gettext_lazy as _
from openwisp_utils.base import TimeStampedEditableModel

from ..formats import ARTIFACT_KINDS
from ..utils import file_checksum
from ..validators import checksum_validator
from .base import parameters_field


class AbstractArtifact(TimeStampedEditableModel):
    """
    Abstract model implementing one entry of a run manifest
    """
    experiment = models.ForeignKey('django_wignerweb.Experiment',
                                   on_delete=models.CASCADE,
                                   related_name='artifacts')
    path = models.CharField(_('path'), max_length=255,
                            help_text=_('relative to the output directory of the experiment'))
    kind = models.CharField(_('kind'), max_length=16, choices=[(k, k) for k in ARTIFACT_KINDS])
    scenario = models.CharField(_('scenario'), max_length=32)
    parameters = parameters_field(_('parameters'), blank=True)
    checksum = models.CharField(_('checksum'), max_length=32, validators=[checksum_validator])

    class Meta:
        abstract = True
        verbose_name = _('artifact')
        verbose_name_plural = _('artifacts')
        unique_together = ('experiment', 'path')
        ordering = ('created',)

    def __str__(self):
        return self.path

    @property
    def absolute_path(self):
        return os.path.join(self.experiment.get_output_dir(), self.path)

    def verify(self):
        """
        recomputes the checksum of the file on disk
        """
        path = self.absolute_path
        return os.path.exists(path) and file_checksum(path) == self.checksum
