import collections

from django.db import models
from jsonfield import JSONField
from openwisp_utils.base import TimeStampedEditableModel

from ..validators import name_validator


class BaseModel(TimeStampedEditableModel):
    """
    Shared logic
    """
    name = models.CharField(max_length=64, unique=True, db_index=True, validators=[name_validator])

    class Meta:
        abstract = True

    def __str__(self):
        return self.name


def parameters_field(verbose_name, **kwargs):
    """
    JSON field storing ordered mappings, pretty printed
    """
    return JSONField(verbose_name,
                     default=dict,
                     load_kwargs={'object_pairs_hook': collections.OrderedDict},
                     dump_kwargs={'indent': 4},
                     **kwargs)
