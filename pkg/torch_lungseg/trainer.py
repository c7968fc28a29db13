""" Step based training loop of the pix2pix model """
import time
import logging
from typing import Callable, Iterable, Optional

import torch

from torch_lungseg.datasets.base_dataset import PairDataset, batches
from torch_lungseg.metrics.colored_tqdm import Coloredtqdm as Ctq
from torch_lungseg.metrics.gan_tracker import GANTracker
from torch_lungseg.metrics.history import HistoryRecord, TrainHistory
from torch_lungseg.metrics.model_checkpoint import ModelCheckpoint
from torch_lungseg.models.segmentation.pix2pix import Pix2PixModel
from torch_lungseg.utils.colors import COLORS, colored_print
from torch_lungseg.utils.errors import DataError

log = logging.getLogger(__name__)

Callback = Callable[[int, Pix2PixModel, HistoryRecord], None]


def evaluate_pixel_accuracy(model: Pix2PixModel, dataset: PairDataset, batch_size: int = 1) -> float:
    """ Fraction of all pixels of ``dataset`` where the predicted mask matches the ground truth """
    if len(dataset) == 0:
        raise DataError("Cannot evaluate on an empty set")
    correct, total = 0, 0
    for image, mask in batches(dataset, batch_size, 0, shuffle=False):
        pred, _ = model.predict_mask(image)
        correct += int((pred.cpu() == (mask > 0)).sum())
        total += mask.numel()
    return correct / total


def fit(
    model: Pix2PixModel,
    train_set: PairDataset,
    val_set: Optional[PairDataset],
    steps: int,
    eval_interval: int = 100,
    batch_size: int = 1,
    shuffle_seed: int = 0,
    num_workers: int = 0,
    callbacks: Iterable[Callback] = (),
    checkpoint: Optional[ModelCheckpoint] = None,
    checkpoint_interval: int = 0,
    history: Optional[TrainHistory] = None,
    tracker: Optional[GANTracker] = None,
    device="cpu",
) -> TrainHistory:
    """ Runs optimization steps ``model.step + 1`` to ``steps``, one batch per step.

    Losses are recorded at every step. Every ``eval_interval`` steps the record also gets the mean
    training pixel accuracy since the previous evaluation and the pixel accuracy on ``val_set``, then
    the callbacks are invoked with (step, model, record). Every ``checkpoint_interval`` steps a
    checkpoint is written, carrying the training accuracies gathered since the last evaluation. Pass
    ``history`` and a ``tracker`` restored from the checkpoint to continue an interrupted run.
    """
    if len(train_set) == 0:
        raise DataError("Cannot train on an empty dataset")
    history = history if history is not None else TrainHistory()
    history.truncate(model.step)
    tracker = tracker or GANTracker("train")
    if tracker.stage != "train":
        tracker.reset("train")
    callbacks = list(callbacks)

    remaining = steps - model.step
    if remaining <= 0:
        return history

    loader = batches(
        train_set,
        batch_size,
        shuffle_seed,
        start_batch=model.step,
        num_batches=remaining,
        num_workers=num_workers,
    )
    log.info(loader.batch_sampler)

    model.train()
    iter_data_time = time.time()
    with Ctq(loader, initial=model.step, total=steps) as tq_train_loader:
        for data in tq_train_loader:
            t_data = time.time() - iter_data_time
            step = model.step + 1
            model.set_input(data, device)
            losses = model.optimize_parameters(step)
            tracker.track(model)
            record = history.record_losses(step, losses)

            if eval_interval and step % eval_interval == 0:
                record.train_acc = tracker.pixel_accuracy
                if val_set is not None and len(val_set):
                    record.val_acc = evaluate_pixel_accuracy(model, val_set, batch_size)
                tracker.publish(step)
                tracker.print_summary()
                tracker.reset("train")
                for callback in callbacks:
                    callback(step, model, record)

            if checkpoint is not None and checkpoint_interval and step % checkpoint_interval == 0:
                checkpoint.save(model, step, tracker)

            tq_train_loader.set_postfix(**tracker.get_metrics(), data_loading=float(t_data), color=COLORS.TRAIN_COLOR)
            iter_data_time = time.time()

    last = history[-1]
    colored_print(
        COLORS.TRAIN_COLOR,
        "Step {}: g_total={:.4f} g_l1={:.4f} d_loss={:.4f}".format(last.step, last.g_total, last.g_l1, last.d_loss),
    )
    return history


def log_evaluation(step: int, model: Pix2PixModel, record: HistoryRecord):
    message = "Step {}: train pixel accuracy {}, validation pixel accuracy {}".format(
        step,
        "-" if record.train_acc is None else "{:.4f}".format(record.train_acc),
        "-" if record.val_acc is None else "{:.4f}".format(record.val_acc),
    )
    colored_print(COLORS.VAL_COLOR, message)


def select_device(use_cuda: bool) -> torch.device:
    device = torch.device("cuda" if (torch.cuda.is_available() and use_cuda) else "cpu")
    log.info("DEVICE : {}".format(device))
    return device
