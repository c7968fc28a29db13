import importlib
import logging

from omegaconf import OmegaConf

from torch_lungseg.models.base_model import BaseModel
from torch_lungseg.models.model_config import ModelConfig
from torch_lungseg.utils.config import is_dict, to_dataclass
from torch_lungseg.utils.errors import ConfigError

log = logging.getLogger(__name__)


def model_config_from(model_opt) -> ModelConfig:
    """ ModelConfig from a model config block, ignoring the 'class' and 'task' selectors """
    if model_opt is None:
        return ModelConfig()
    opt = OmegaConf.to_container(model_opt, resolve=True) if not isinstance(model_opt, dict) else dict(model_opt)
    opt.pop("class", None)
    opt.pop("task", None)
    return to_dataclass(opt, ModelConfig)


def instantiate_model(model_opt) -> BaseModel:
    """ Imports torch_lungseg.models.<task>.<module> and builds the class named by ``model_opt.class``
    (case insensitive), e.g. ``class: pix2pix.Pix2PixModel`` with ``task: segmentation``.
    """
    if not is_dict(model_opt):
        raise ConfigError("A model configuration block is required")
    task = model_opt.get("task", "segmentation")
    model_class = model_opt.get("class", "pix2pix.Pix2PixModel")
    model_paths = model_class.split(".")
    module = ".".join(model_paths[:-1])
    class_name = model_paths[-1]
    model_module = ".".join(["torch_lungseg.models", task, module])
    try:
        modellib = importlib.import_module(model_module)
    except ImportError as e:
        raise ConfigError("Cannot import model module {}: {}".format(model_module, e)) from e

    model_cls = None
    for name, cls in modellib.__dict__.items():
        if name.lower() == class_name.lower() and isinstance(cls, type) and issubclass(cls, BaseModel):
            model_cls = cls

    if model_cls is None:
        raise ConfigError(
            "In %s.py, there should be a subclass of BaseModel with class name that matches %s in lowercase."
            % (model_module, class_name)
        )
    model = model_cls(model_config_from(model_opt))
    log.info("Model %s built from %s", model_cls.__name__, model_module)
    return model
