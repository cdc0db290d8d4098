from .base.artifact import AbstractArtifact
from .base.experiment import AbstractExperiment


class Experiment(AbstractExperiment):
    """
    Concrete Experiment model
    """
    class Meta(AbstractExperiment.Meta):
        abstract = False


class Artifact(AbstractArtifact):
    """
    Concrete Artifact model
    """
    class Meta(AbstractArtifact.Meta):
        abstract = False
