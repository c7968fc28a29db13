import os
import logging
from typing import Dict, Optional

import torch
from torch.utils.tensorboard import SummaryWriter

from torch_lungseg.utils.running_stats import RunningStats

log = logging.getLogger(__name__)


def meter_value(meter: RunningStats) -> float:
    return float(meter.mean()) if meter.n > 0 else 0.0


class BaseTracker:
    """ Averages the losses of a model over a stage (train / val / test) and publishes them.

    Metric names are prefixed with the stage, ``train_loss_g``. Tensorboard scalars drop the prefix and
    carry the stage as suffix, ``loss_g/train``.
    """

    def __init__(self, stage: str = "train", use_tensorboard: bool = False, log_dir: Optional[str] = None):
        self._use_tensorboard = use_tensorboard
        self._tensorboard_dir = os.path.join(log_dir or os.getcwd(), "tensorboard")
        self._writer = None

        if self._use_tensorboard:
            log.info(
                "Access tensorboard with the following command <tensorboard --logdir={}>".format(self._tensorboard_dir)
            )
            self._writer = SummaryWriter(log_dir=self._tensorboard_dir)
        self.reset(stage)

    @property
    def stage(self):
        return self._stage

    def reset(self, stage="train"):
        self._stage = stage
        self._loss_meters: Dict[str, RunningStats] = {}

    def get_metrics(self, verbose=False) -> Dict[str, float]:
        """ Stage means of the losses, plus their standard deviation and range when ``verbose`` """
        metrics = {}
        for key, meter in self._loss_meters.items():
            if meter.n == 0:
                continue
            metrics[key] = meter_value(meter)
            if verbose:
                metrics[key + "_std"] = meter.variance() ** 0.5
                metrics[key + "_min"] = meter.min
                metrics[key + "_max"] = meter.max
        return metrics

    def track(self, model, **kwargs):
        for name, value in model.get_current_losses().items():
            if value is not None:
                self._meter("{}_{}".format(self._stage, name)).push(self._as_float(value))

    def _meter(self, key: str) -> RunningStats:
        return self._loss_meters.setdefault(key, RunningStats())

    @staticmethod
    def _as_float(x) -> float:
        return x.detach().cpu().item() if torch.is_tensor(x) else float(x)

    def _unprefixed(self, metrics):
        return {name.replace(self._stage + "_", "", 1): value for name, value in metrics.items()}

    def publish_to_tensorboard(self, metrics, step):
        for name, value in self._unprefixed(metrics).items():
            self._writer.add_scalar("{}/{}".format(name, self._stage), value, step)

    def publish(self, step):
        """ Publishes the current metrics to tensorboard when enabled.

        Returns a dict with the stage, the step and the metrics without stage prefix.
        """
        metrics = self.get_metrics()
        if self._writer is not None:
            self.publish_to_tensorboard(metrics, step)
            self._writer.flush()
        return {
            "stage": self._stage,
            "step": step,
            "current_metrics": self._unprefixed(metrics),
        }

    def print_summary(self):
        log.info("=" * 50)
        for key, value in self.get_metrics(verbose=True).items():
            log.info("    {} = {:.2f}".format(key, value))
        log.info("=" * 50)

    def close(self):
        if self._writer is not None:
            self._writer.close()
            self._writer = None
