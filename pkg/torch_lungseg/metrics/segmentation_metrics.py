import logging
from dataclasses import dataclass, asdict
from typing import Iterable, List, Optional, Tuple

import numpy as np

from torch_lungseg.metrics.confusion_matrix import ConfusionCounts, confusion
from torch_lungseg.utils.enums import Aggregation

log = logging.getLogger(__name__)

METRIC_NAMES = ("accuracy", "precision", "recall", "f1", "dice")


@dataclass
class PerImageMetrics:
    id: str
    accuracy: float
    precision: float
    recall: float
    f1: float
    dice: float


@dataclass
class MetricsReport:
    """ Percentages in [0, 100]. ``dataset`` and ``checkpoint`` tag cross-dataset evaluations. """

    accuracy: float
    precision: float
    recall: float
    f1: float
    dice: float
    aggregation: str = Aggregation.MICRO.value
    n_images: int = 1
    per_image: Optional[List[PerImageMetrics]] = None
    dataset: Optional[str] = None
    checkpoint: Optional[str] = None

    def metrics(self):
        return {name: getattr(self, name) for name in METRIC_NAMES}

    def to_dict(self):
        out = asdict(self)
        if self.per_image is None:
            out.pop("per_image")
        else:
            out["per_image"] = [
                {"id": p.id, "metrics": {name: getattr(p, name) for name in METRIC_NAMES}} for p in self.per_image
            ]
        for key in ("dataset", "checkpoint"):
            if out[key] is None:
                out.pop(key)
        return out


def _ratio(numerator: int, denominator: int, both_empty: bool) -> float:
    if denominator == 0:
        return 100.0 if both_empty else 0.0
    return 100.0 * numerator / denominator


def metrics_from_counts(c: ConfusionCounts) -> MetricsReport:
    """ Accuracy, precision, recall, F1 and Dice in percent.

    Empty denominators follow one convention: a score whose denominator is zero is 100 when
    neither mask has a positive pixel, 0 otherwise.
    """
    if c.total <= 0:
        raise ValueError("Cannot compute metrics from empty confusion counts")
    both_empty = c.tp + c.fp + c.fn == 0
    accuracy = 100.0 * (c.tp + c.tn) / c.total
    precision = _ratio(c.tp, c.tp + c.fp, both_empty)
    recall = _ratio(c.tp, c.tp + c.fn, both_empty)
    # 2PR / (P + R) reduces to 2TP / (2TP + FP + FN)
    f1 = _ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn, both_empty)
    dice = _ratio(2 * c.tp, c.fp + 2 * c.tp + c.fn, both_empty)
    return MetricsReport(accuracy=accuracy, precision=precision, recall=recall, f1=f1, dice=dice)


def aggregate_counts(
    per_image: List[Tuple[str, ConfusionCounts]], mode=Aggregation.MICRO, keep_per_image=False
) -> MetricsReport:
    if not per_image:
        raise ValueError("Cannot aggregate metrics over an empty set")
    mode = Aggregation(mode)
    singles = [(sample_id, metrics_from_counts(counts)) for sample_id, counts in per_image]
    if mode == Aggregation.MICRO:
        total = ConfusionCounts()
        for _, counts in per_image:
            total = total + counts
        values = metrics_from_counts(total).metrics()
    else:
        values = {name: float(np.mean([getattr(r, name) for _, r in singles])) for name in METRIC_NAMES}
    table = None
    if keep_per_image:
        table = [PerImageMetrics(id=sample_id, **r.metrics()) for sample_id, r in singles]
    return MetricsReport(aggregation=mode.value, n_images=len(per_image), per_image=table, **values)


def aggregate(pairs: Iterable, mode=Aggregation.MICRO, keep_per_image=False) -> MetricsReport:
    """ pairs: iterable of (pred, gt) or (id, pred, gt) """
    per_image = []
    for i, pair in enumerate(pairs):
        if len(pair) == 3:
            sample_id, pred, gt = pair
        else:
            sample_id, (pred, gt) = str(i), pair
        per_image.append((sample_id, confusion(pred, gt)))
    return aggregate_counts(per_image, mode, keep_per_image)
