from collections import OrderedDict
from abc import abstractmethod
from typing import Any, Dict
import logging

import torch
from torch.optim.optimizer import Optimizer

from torch_lungseg.utils.colors import colored_print, COLORS

log = logging.getLogger(__name__)


class BaseModel(torch.nn.Module):
    """Abstract base class of the trainable models.
    A subclass implements:
        -- <__init__>:              build the networks; call BaseModel.__init__(self, opt) first and fill
                                    self.loss_names.
        -- <set_input>:             unpack a batch from the data loader.
        -- <forward>:               produce intermediate results.
        -- <optimize_parameters>:   compute losses and gradients, update the networks.
    """

    def __init__(self, opt):
        super(BaseModel, self).__init__()
        self.opt = opt
        self.loss_names = []
        self._optimizers: Dict[str, Optimizer] = OrderedDict()

    @property
    def optimizers(self) -> Dict[str, Optimizer]:
        return self._optimizers

    @property
    def device(self):
        return next(self.parameters()).device

    @abstractmethod
    def set_input(self, data, device):
        raise NotImplementedError

    @abstractmethod
    def forward(self) -> Any:
        """Run forward pass"""

    @abstractmethod
    def optimize_parameters(self, step: int):
        raise NotImplementedError

    def get_current_losses(self):
        """Return training losses as floats, None when not computed yet"""
        errors_ret = OrderedDict()
        for name in self.loss_names:
            value = getattr(self, name, None)
            errors_ret[name] = float(value) if value is not None else None
        return errors_ret

    @staticmethod
    def set_requires_grad(nets, requires_grad=False):
        if not isinstance(nets, (list, tuple)):
            nets = [nets]
        for net in nets:
            for param in net.parameters():
                param.requires_grad = requires_grad

    def log_optimizers(self):
        for name, optimizer in self._optimizers.items():
            colored_print(COLORS.TRAIN_COLOR, "Optimizer {}: {}".format(name, optimizer))
