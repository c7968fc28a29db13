from typing import Optional

import numpy as np
import torch
from torch import nn
from torch.nn.parameter import Parameter

from torch_lungseg.core.autograd import (
    Conv2dFunction,
    ConvTranspose2dFunction,
    BatchNorm2dFunction,
    ActivationFunction,
    DropoutFunction,
    same_padding,
)
from torch_lungseg.utils.enums import Activation, Padding

__all__ = [
    "BaseModule",
    "Conv2d",
    "ConvTranspose2d",
    "BatchNorm2d",
    "LeakyReLU",
    "ReLU",
    "Tanh",
    "Sigmoid",
    "Dropout",
    "ZeroPadding2d",
    "Concatenate",
    "stored_param_count",
]

MOVING_STATS = ("moving_mean", "moving_variance")


def stored_param_count(module: nn.Module) -> int:
    """ Parameters plus batch norm moving statistics, the counting convention of the summary tables """
    count = sum(int(np.prod(p.size())) for p in module.parameters())
    for name, buf in module.named_buffers():
        if name.split(".")[-1] in MOVING_STATS:
            count += int(np.prod(buf.size()))
    return count


class BaseModule(nn.Module):
    @property
    def nb_params(self):
        """ Number of trainable parameters """
        model_parameters = filter(lambda p: p.requires_grad, self.parameters())
        return sum([int(np.prod(p.size())) for p in model_parameters])

    @property
    def nb_stored_params(self):
        return stored_param_count(self)


class Conv2d(BaseModule):
    def __init__(self, in_channels, out_channels, kernel_size=4, stride=2, padding="same", bias=True):
        super().__init__()
        if in_channels < 1 or out_channels < 1:
            raise ValueError("Channel counts must be positive, got {} -> {}".format(in_channels, out_channels))
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = Padding(padding)
        self.weight = Parameter(torch.empty(out_channels, in_channels, kernel_size, kernel_size))
        if bias:
            self.bias = Parameter(torch.zeros(out_channels))
        else:
            self.register_parameter("bias", None)
        nn.init.normal_(self.weight, 0.0, 0.02)

    def _pads(self, h, w):
        if self.padding == Padding.VALID:
            return (0, 0, 0, 0)
        return same_padding(h, self.kernel_size, self.stride) + same_padding(w, self.kernel_size, self.stride)

    def forward(self, x):
        if x.dim() != 4 or x.shape[1] != self.in_channels:
            raise ValueError(
                "Conv2d expects {} input channels, got tensor of shape {}".format(self.in_channels, tuple(x.shape))
            )
        pads = self._pads(*x.shape[-2:])
        h = x.shape[2] + pads[0] + pads[1]
        w = x.shape[3] + pads[2] + pads[3]
        if h < self.kernel_size or w < self.kernel_size:
            raise ValueError(
                "Spatial extent {}x{} is smaller than the {}x{} kernel".format(h, w, self.kernel_size, self.kernel_size)
            )
        return Conv2dFunction.apply(x, self.weight, self.bias, self.stride, pads)

    def extra_repr(self):
        return "{}, {}, kernel_size={}, stride={}, padding={}, bias={}".format(
            self.in_channels, self.out_channels, self.kernel_size, self.stride, self.padding.value, self.bias is not None
        )


class ConvTranspose2d(BaseModule):
    """ 'same' transposed convolution: output extent is stride x input extent """

    def __init__(self, in_channels, out_channels, kernel_size=4, stride=2, bias=True):
        super().__init__()
        if (kernel_size - stride) % 2:
            raise ValueError("kernel_size - stride must be even, got {} and {}".format(kernel_size, stride))
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.kernel_size = kernel_size
        self.stride = stride
        self.padding = (kernel_size - stride) // 2
        self.weight = Parameter(torch.empty(in_channels, out_channels, kernel_size, kernel_size))
        if bias:
            self.bias = Parameter(torch.zeros(out_channels))
        else:
            self.register_parameter("bias", None)
        nn.init.normal_(self.weight, 0.0, 0.02)

    def forward(self, x):
        if x.dim() != 4 or x.shape[1] != self.in_channels:
            raise ValueError(
                "ConvTranspose2d expects {} input channels, got tensor of shape {}".format(
                    self.in_channels, tuple(x.shape)
                )
            )
        return ConvTranspose2dFunction.apply(x, self.weight, self.bias, self.stride, self.padding)

    def extra_repr(self):
        return "{}, {}, kernel_size={}, stride={}, bias={}".format(
            self.in_channels, self.out_channels, self.kernel_size, self.stride, self.bias is not None
        )


class BatchNorm2d(BaseModule):
    """ Momentum follows the moving = momentum * moving + (1 - momentum) * batch convention.
    Eval mode before any update uses the initial statistics (mean 0, variance 1).
    """

    def __init__(self, num_features, momentum=0.99, eps=1e-3):
        super().__init__()
        self.num_features = num_features
        self.momentum = momentum
        self.eps = eps
        self.weight = Parameter(torch.ones(num_features))
        self.bias = Parameter(torch.zeros(num_features))
        self.register_buffer("moving_mean", torch.zeros(num_features))
        self.register_buffer("moving_variance", torch.ones(num_features))
        self.batch_stats_in_eval = False

    def forward(self, x):
        if x.dim() != 4 or x.shape[1] != self.num_features:
            raise ValueError(
                "BatchNorm2d expects {} channels, got tensor of shape {}".format(self.num_features, tuple(x.shape))
            )
        use_batch_stats = self.training or self.batch_stats_in_eval
        if self.training:
            with torch.no_grad():
                mean = x.mean((0, 2, 3))
                var = x.var((0, 2, 3), unbiased=False)
                self.moving_mean.mul_(self.momentum).add_(mean.to(self.moving_mean.dtype), alpha=1 - self.momentum)
                self.moving_variance.mul_(self.momentum).add_(
                    var.to(self.moving_variance.dtype), alpha=1 - self.momentum
                )
        return BatchNorm2dFunction.apply(
            x, self.weight, self.bias, self.moving_mean, self.moving_variance, self.eps, use_batch_stats
        )

    def extra_repr(self):
        return "{}, momentum={}, eps={}".format(self.num_features, self.momentum, self.eps)


class _Activation(BaseModule):
    KIND: Activation

    def forward(self, x):
        return ActivationFunction.apply(x, self.KIND, getattr(self, "negative_slope", 0.0))


class LeakyReLU(_Activation):
    KIND = Activation.LEAKY_RELU

    def __init__(self, negative_slope=0.2):
        super().__init__()
        self.negative_slope = negative_slope

    def extra_repr(self):
        return "negative_slope={}".format(self.negative_slope)


class ReLU(_Activation):
    KIND = Activation.RELU


class Tanh(_Activation):
    KIND = Activation.TANH


class Sigmoid(_Activation):
    KIND = Activation.SIGMOID


class Dropout(BaseModule):
    """ Inverted dropout: survivors are scaled by 1 / (1 - p) so that eval mode is the identity.
    Masks are drawn from ``generator`` when one is attached.
    """

    def __init__(self, p=0.5, generator: Optional[torch.Generator] = None):
        super().__init__()
        if not 0 <= p < 1:
            raise ValueError("Dropout probability must be in [0, 1), got {}".format(p))
        self.p = p
        self.generator = generator
        self.always_active = False

    def forward(self, x):
        if not (self.training or self.always_active) or self.p == 0:
            return x
        # masks are drawn on the cpu and depend only on the generator state
        keep = torch.full(x.shape, 1 - self.p, dtype=x.dtype)
        mask = (torch.bernoulli(keep, generator=self.generator) / (1 - self.p)).to(x.device)
        return DropoutFunction.apply(x, mask)

    def extra_repr(self):
        return "p={}".format(self.p)


class ZeroPadding2d(BaseModule):
    def __init__(self, padding=1):
        super().__init__()
        self.padding = padding

    def forward(self, x):
        p = self.padding
        return torch.nn.functional.pad(x, (p, p, p, p))


class Concatenate(BaseModule):
    """ Channel concatenation """

    def forward(self, *tensors):
        ref = tensors[0].shape
        for t in tensors[1:]:
            if t.shape[0] != ref[0] or t.shape[2:] != ref[2:]:
                raise ValueError(
                    "Cannot concatenate tensors of shapes {} and {}".format(tuple(ref), tuple(t.shape))
                )
        return torch.cat(tensors, dim=1)
