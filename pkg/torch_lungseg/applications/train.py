import os
import logging

from torch_lungseg.applications.common import CHECKPOINT_DIR, check_resolution, output_dir
from torch_lungseg.core.data_transform import AugmentConfig, PreprocessingConfig, denormalize
from torch_lungseg.datasets.dataset_factory import instantiate_dataset
from torch_lungseg.metrics.gan_tracker import GANTracker
from torch_lungseg.metrics.history import TrainHistory
from torch_lungseg.metrics.model_checkpoint import ModelCheckpoint
from torch_lungseg.metrics.report import HISTORY_NAME, plot_history, plot_panels
from torch_lungseg.models.model_factory import instantiate_model
from torch_lungseg.trainer import fit, log_evaluation, select_device
from torch_lungseg.utils.colors import COLORS, colored_print
from torch_lungseg.utils.config import configure_torch, get_or_default, save_resolved_config, set_seeds, to_dataclass
from torch_lungseg.utils.errors import DivergenceError

log = logging.getLogger(__name__)


def save_prediction_preview(model, dataset, path: str):
    """ Input, ground truth and current prediction of the first pair of ``dataset`` """
    image, mask = dataset[0]
    pred, _ = model.predict_mask(image)
    panels = [denormalize(image), denormalize(mask), pred[0, 0].cpu().numpy().astype("uint8") * 255]
    return plot_panels([panels], ["Input image", "Ground truth", "Predicted mask"], path)


def _load_history(out: str, step: int) -> TrainHistory:
    path = os.path.join(out, HISTORY_NAME)
    if step == 0 or not os.path.exists(path):
        return TrainHistory()
    history = TrainHistory.from_csv(path)
    history.truncate(step)
    return history


def run_train(cfg) -> TrainHistory:
    out = output_dir(cfg)
    save_resolved_config(cfg, out)
    training = cfg.training
    configure_torch(get_or_default(training, "num_threads", 0), get_or_default(training, "deterministic", True))
    set_seeds(cfg.seed)
    device = select_device(get_or_default(training, "cuda", False))

    preprocessing = to_dataclass(cfg.preprocessing, PreprocessingConfig)
    augment = to_dataclass(cfg.augment, AugmentConfig)
    model = instantiate_model(cfg.models)
    check_resolution(model, preprocessing)
    dataset = instantiate_dataset(cfg.data, preprocessing, augment)
    dataset.log_summary()

    model.instantiate_optimizers(get_or_default(training, "optim", None))
    model.describe()
    model.log_optimizers()

    model = model.to(device)
    tracker = GANTracker("train", use_tensorboard=bool(get_or_default(cfg.tensorboard, "log", False)), log_dir=out)
    checkpoint = ModelCheckpoint(os.path.join(out, CHECKPOINT_DIR), get_or_default(training, "resume", None))
    resume_path = checkpoint.resume_path()
    if resume_path:
        checkpoint.load(model, resume_path, tracker=tracker)

    history = _load_history(out, model.step)
    if model.step == 0:
        checkpoint.save(model, 0, tracker)
        if get_or_default(training, "preview", True) and len(dataset.test_dataset):
            save_prediction_preview(model, dataset.test_dataset, os.path.join(out, "before_training.png"))

    try:
        fit(
            model,
            dataset.train_dataset,
            dataset.test_dataset,
            steps=training.steps,
            eval_interval=training.eval_interval,
            batch_size=training.batch_size,
            shuffle_seed=cfg.seed,
            num_workers=training.num_workers,
            callbacks=[log_evaluation],
            checkpoint=checkpoint,
            checkpoint_interval=training.checkpoint_interval,
            history=history,
            tracker=tracker,
            device=device,
        )
    except DivergenceError:
        if len(history):
            history.write_csv(os.path.join(out, HISTORY_NAME))
        log.error("Training diverged, the checkpoints written so far are kept in %s", checkpoint.checkpoint_dir)
        raise
    finally:
        tracker.close()

    if not os.path.exists(checkpoint.path_for_step(model.step)):
        checkpoint.save(model, model.step, tracker)
    if len(history):
        history.write_csv(os.path.join(out, HISTORY_NAME))
        plot_history(history, out)
        if get_or_default(training, "preview", True) and len(dataset.test_dataset):
            save_prediction_preview(model, dataset.test_dataset, os.path.join(out, "after_training.png"))
    colored_print(COLORS.BEST_COLOR, "Training finished at step {}, artifacts in {}".format(model.step, out))
    return history
