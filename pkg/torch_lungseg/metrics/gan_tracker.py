from typing import Dict, List, Optional, Sequence

from torch_lungseg.metrics.base_tracker import BaseTracker
from torch_lungseg.utils.running_stats import RunningStats


class GANTracker(BaseTracker):
    """ Tracks the four adversarial losses plus the pixel accuracy of the stage.

    Training steps push the accuracy the model measured on its own batch; evaluation passes
    push it explicitly through ``track_accuracy``. The accuracies pushed since the last reset are
    kept in order so a checkpoint can carry them into a resumed run.
    """

    def reset(self, stage="train"):
        super().reset(stage=stage)
        self._accuracy = RunningStats()
        self._accuracies: List[float] = []

    def track(self, model, **kwargs):
        super().track(model, **kwargs)
        accuracy = getattr(model, "train_accuracy", None)
        if self._stage == "train" and accuracy is not None:
            self.track_accuracy(accuracy)

    def track_accuracy(self, accuracy: float):
        self._accuracy.push(accuracy)
        self._accuracies.append(float(accuracy))

    @property
    def accuracies(self) -> List[float]:
        return list(self._accuracies)

    def restore_accuracies(self, accuracies: Sequence[float]):
        """ Replays accuracies saved by an interrupted run, the running mean ends up bit identical """
        self._accuracy = RunningStats()
        self._accuracies = []
        for accuracy in accuracies:
            self.track_accuracy(float(accuracy))

    @property
    def pixel_accuracy(self) -> Optional[float]:
        return self._accuracy.mean() if self._accuracy.n else None

    def get_metrics(self, verbose=False) -> Dict[str, float]:
        metrics = super().get_metrics(verbose)
        if self._accuracy.n:
            metrics["{}_pixel_acc".format(self._stage)] = self._accuracy.mean()
        return metrics
