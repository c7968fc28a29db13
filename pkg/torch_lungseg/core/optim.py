import logging

import torch
from torch.optim.optimizer import Optimizer

from torch_lungseg.utils.config import get_or_default
from torch_lungseg.utils.errors import ConfigError

log = logging.getLogger(__name__)


def instantiate_optimizer(params, optimizer_opt) -> Optimizer:
    """ Builds ``torch.optim.<class>(params, **params)`` from an optimizer config block, e.g.
        optimizer:
            class: Adam
            params:
                lr: 0.0002
                betas: [0.5, 0.999]
    """
    optimizer_cls_name = get_or_default(optimizer_opt, "class", "Adam")
    optimizer_cls = getattr(torch.optim, optimizer_cls_name, None)
    if optimizer_cls is None:
        raise ConfigError("Unknown optimizer class {}".format(optimizer_cls_name))
    optimizer_params = dict(get_or_default(optimizer_opt, "params", {}))
    if "betas" in optimizer_params:
        optimizer_params["betas"] = tuple(optimizer_params["betas"])
    return optimizer_cls(params, **optimizer_params)


def optimizer_step(optimizer: Optimizer):
    """ One update followed by zeroing every gradient buffer (kept allocated) """
    optimizer.step()
    optimizer.zero_grad(set_to_none=False)
