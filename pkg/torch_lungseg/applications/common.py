""" Helpers shared by the commands: output directories, model restoration from a training run """
import os
import logging
from typing import Optional, Tuple

import hydra
from omegaconf import OmegaConf

from torch_lungseg.core.data_transform import PreprocessingConfig
from torch_lungseg.metrics.model_checkpoint import ModelCheckpoint
from torch_lungseg.models.model_factory import instantiate_model
from torch_lungseg.models.segmentation.pix2pix import Pix2PixModel
from torch_lungseg.utils.config import RESOLVED_CONFIG_NAME, get_or_default, to_dataclass
from torch_lungseg.utils.errors import ConfigError

log = logging.getLogger(__name__)

CHECKPOINT_DIR = "checkpoints"


def absolute(path: Optional[str]) -> Optional[str]:
    return hydra.utils.to_absolute_path(path) if path else path


def output_dir(cfg) -> str:
    out = absolute(get_or_default(cfg, "out", os.getcwd()))
    os.makedirs(out, exist_ok=True)
    return out


def training_blocks(cfg):
    """ (models, preprocessing) blocks, read from ``<train_dir>/config.resolved.yaml`` when ``train_dir`` is set """
    train_dir = absolute(get_or_default(cfg, "train_dir", None))
    if not train_dir:
        return cfg.models, cfg.preprocessing
    path = os.path.join(train_dir, RESOLVED_CONFIG_NAME)
    if not os.path.exists(path):
        raise ConfigError("No {} in training directory {}".format(RESOLVED_CONFIG_NAME, train_dir))
    train_cfg = OmegaConf.load(path)
    log.info("Model and preprocessing configuration taken from %s", path)
    return train_cfg.models, train_cfg.preprocessing


def checkpoint_path(cfg) -> str:
    path = absolute(get_or_default(cfg, "checkpoint", None))
    if path:
        return path
    train_dir = absolute(get_or_default(cfg, "train_dir", None))
    if train_dir:
        latest = ModelCheckpoint(os.path.join(train_dir, CHECKPOINT_DIR)).latest()
        if latest:
            return latest
    raise ConfigError("Set 'checkpoint' to a checkpoint file or 'train_dir' to a training run directory")


def load_trained_model(cfg, device="cpu") -> Tuple[Pix2PixModel, PreprocessingConfig, str]:
    """ Builds the model of the run, loads its weights and returns (model, preprocessing, checkpoint path) """
    model_opt, preprocessing_opt = training_blocks(cfg)
    model = instantiate_model(model_opt)
    preprocessing = to_dataclass(preprocessing_opt, PreprocessingConfig)
    check_resolution(model, preprocessing)
    path = checkpoint_path(cfg)
    ModelCheckpoint.load(model, path, with_optimizer=False)
    model.to(device)
    model.eval()
    return model, preprocessing, path


def check_resolution(model: Pix2PixModel, preprocessing: PreprocessingConfig):
    if preprocessing.image_size != model.opt.image_size:
        raise ConfigError(
            "preprocessing.image_size ({}) must match the model image_size ({})".format(
                preprocessing.image_size, model.opt.image_size
            )
        )
