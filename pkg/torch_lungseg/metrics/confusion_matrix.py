from dataclasses import dataclass, asdict

import numpy as np
import sklearn.metrics as sk


@dataclass(frozen=True)
class ConfusionCounts:
    """ Pixel counts of a binary comparison, the lung being the positive class """

    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.tn + other.tn, self.fp + other.fp, self.fn + other.fn)

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def to_dict(self):
        return asdict(self)


def _as_binary(mask, name):
    mask = np.asarray(mask)
    if mask.dtype == np.bool_:
        return mask
    values = np.unique(mask)
    if values.size > 2 or not (np.isin(values, [0, 1]).all() or np.isin(values, [0, 255]).all()):
        raise ValueError("{} is not binary, found values {}".format(name, values[:8]))
    return mask > 0


def confusion(pred, gt) -> ConfusionCounts:
    """ Confusion counts of a predicted mask against the ground truth. Masks may be boolean,
    {0, 1} or {0, 255} arrays of identical extents.
    """
    pred = np.asarray(pred)
    gt = np.asarray(gt)
    if pred.shape != gt.shape:
        raise ValueError("Prediction extents {} differ from ground truth extents {}".format(pred.shape, gt.shape))
    pred = _as_binary(pred, "prediction").ravel()
    gt = _as_binary(gt, "ground truth").ravel()
    # rows: ground truth, columns: prediction
    matrix = sk.confusion_matrix(gt, pred, labels=[False, True])
    return ConfusionCounts(
        tp=int(matrix[1, 1]), tn=int(matrix[0, 0]), fp=int(matrix[0, 1]), fn=int(matrix[1, 0])
    )


class ConfusionMatrix:
    """ Streaming accumulator, count predictions mask by mask then read the summed counts """

    def __init__(self):
        self.counts = ConfusionCounts()
        self.per_image = []

    def count_predicted_batch(self, ground_truth, predicted, ids=None):
        """ ground_truth / predicted: (N, H, W) or (H, W) masks """
        ground_truth = np.asarray(ground_truth)
        predicted = np.asarray(predicted)
        if ground_truth.ndim == 2:
            ground_truth, predicted = ground_truth[None], predicted[None]
        if ids is None:
            ids = [str(len(self.per_image) + i) for i in range(len(ground_truth))]
        for sample_id, gt, pred in zip(ids, ground_truth, predicted):
            counts = confusion(pred, gt)
            self.per_image.append((sample_id, counts))
            self.counts = self.counts + counts

    def __len__(self):
        return len(self.per_image)
