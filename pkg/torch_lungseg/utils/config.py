import os
import json
import random
import hashlib
import logging
import dataclasses
from typing import Any, Type, TypeVar

import numpy as np
import torch
from omegaconf import OmegaConf
from omegaconf.dictconfig import DictConfig
from omegaconf.listconfig import ListConfig
from omegaconf.errors import OmegaConfBaseException

from torch_lungseg.utils.errors import ConfigError

log = logging.getLogger(__name__)

RESOLVED_CONFIG_NAME = "config.resolved.yaml"

T = TypeVar("T")


def is_list(entity):
    return isinstance(entity, list) or isinstance(entity, ListConfig)


def is_dict(entity):
    return isinstance(entity, dict) or isinstance(entity, DictConfig)


def to_dataclass(opt: Any, schema_cls: Type[T]) -> T:
    """ Merges ``opt`` (DictConfig, dict or None) over the structured defaults of ``schema_cls``
    and returns a validated instance. Unknown keys and wrong types raise a ConfigError.
    """
    if isinstance(opt, schema_cls):
        obj = opt
    else:
        try:
            merged = OmegaConf.structured(schema_cls)
            if opt is not None:
                if dataclasses.is_dataclass(opt):
                    opt = OmegaConf.structured(opt)
                merged = OmegaConf.merge(merged, opt)
            obj = OmegaConf.to_object(merged)
        except OmegaConfBaseException as e:
            raise ConfigError("Invalid {} configuration: {}".format(schema_cls.__name__, e)) from e
    validate = getattr(obj, "validate", None)
    if validate is not None:
        validate()
    return obj


def fingerprint(entity) -> str:
    """ sha256 of the canonical json form of a dataclass / dict """
    if dataclasses.is_dataclass(entity):
        entity = dataclasses.asdict(entity)
    elif is_dict(entity):
        entity = OmegaConf.to_container(entity, resolve=True) if isinstance(entity, DictConfig) else entity
    payload = json.dumps(entity, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def set_seeds(seed: int):
    random.seed(seed)
    np.random.seed(seed % 2 ** 32)
    torch.manual_seed(seed)


def configure_torch(num_threads=None, deterministic=True):
    if num_threads:
        torch.set_num_threads(int(num_threads))
    if deterministic:
        torch.use_deterministic_algorithms(True, warn_only=True)


def save_resolved_config(cfg: DictConfig, output_dir: str) -> str:
    path = os.path.join(output_dir, RESOLVED_CONFIG_NAME)
    os.makedirs(output_dir, exist_ok=True)
    try:
        OmegaConf.save(cfg, path, resolve=True)
    except OmegaConfBaseException as e:
        raise ConfigError("Could not resolve the run configuration: {}".format(e)) from e
    log.info("Resolved configuration written to %s", path)
    return path


def get_or_default(opt, key, default=None):
    if opt is None:
        return default
    value = opt.get(key, default) if is_dict(opt) else getattr(opt, key, default)
    return default if value is None else value
