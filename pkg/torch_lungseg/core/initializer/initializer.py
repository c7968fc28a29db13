import logging

import torch
from torch.nn import init

log = logging.getLogger(__name__)


def init_weights(net: torch.nn.Module, init_type="normal", gain=0.02, generator: torch.Generator = None):
    """ Convolution weights ~ N(0, gain), biases 0, batch norm gamma ~ N(1, gain) and beta 0 """

    def normal_(tensor, mean, std):
        with torch.no_grad():
            tensor.copy_(torch.randn(tensor.shape, generator=generator, dtype=tensor.dtype) * std + mean)

    def init_func(m):
        classname = m.__class__.__name__
        if hasattr(m, "weight") and classname.find("Conv") != -1:
            if init_type == "normal":
                normal_(m.weight.data, 0.0, gain)
            elif init_type == "xavier":
                init.xavier_normal_(m.weight.data, gain=gain)
            elif init_type == "kaiming":
                init.kaiming_normal_(m.weight.data, a=0, mode="fan_in")
            else:
                raise NotImplementedError("initialization method [%s] is not implemented" % init_type)
            if getattr(m, "bias", None) is not None:
                init.constant_(m.bias.data, 0.0)
        elif classname.find("BatchNorm2d") != -1:
            normal_(m.weight.data, 1.0, gain)
            init.constant_(m.bias.data, 0.0)

    log.debug("initialize %s with %s", net.__class__.__name__, init_type)
    net.apply(init_func)
