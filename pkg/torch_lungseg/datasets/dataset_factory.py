import importlib
import logging

import hydra

from torch_lungseg.datasets.base_dataset import BaseDataset
from torch_lungseg.utils.config import get_or_default
from torch_lungseg.utils.errors import ConfigError

log = logging.getLogger(__name__)


def get_dataset_class(dataset_config):
    task = get_or_default(dataset_config, "task", "segmentation")
    dataset_class = get_or_default(dataset_config, "class", None)
    if not dataset_class or "." not in dataset_class:
        raise ConfigError("Dataset option 'class' must read <module>.<ClassName>, got {}".format(dataset_class))
    dataset_paths = dataset_class.split(".")
    module = ".".join(dataset_paths[:-1])
    class_name = dataset_paths[-1]
    dataset_module = ".".join(["torch_lungseg.datasets", task, module])
    try:
        datasetlib = importlib.import_module(dataset_module)
    except ImportError as e:
        raise ConfigError("Cannot import dataset module {}: {}".format(dataset_module, e)) from e

    dataset_cls = None
    for name, cls in datasetlib.__dict__.items():
        if name.lower() == class_name.lower() and isinstance(cls, type) and issubclass(cls, BaseDataset):
            dataset_cls = cls

    if dataset_cls is None:
        raise ConfigError(
            "In %s.py, there should be a subclass of BaseDataset with class name that matches %s in lowercase."
            % (module, class_name)
        )
    return dataset_cls


def instantiate_dataset(dataset_config, preprocessing=None, augment=None) -> BaseDataset:
    """ Import the module "datasets/<task>/<module>.py" and instantiate the class named in ``class``
    (case insensitive), a subclass of BaseDataset. A relative dataroot is resolved against the directory
    the command was launched from.
    """
    dataset_cls = get_dataset_class(dataset_config)
    dataroot = get_or_default(dataset_config, "dataroot", None)
    if dataroot:
        dataset_config["dataroot"] = hydra.utils.to_absolute_path(dataroot)
    return dataset_cls(dataset_config, preprocessing, augment)
