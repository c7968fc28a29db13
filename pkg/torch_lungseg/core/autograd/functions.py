""" Forward / backward kernels of the layer vocabulary used by the generator and the discriminator.

All tensors are NCHW. Each function saves what its backward needs in ``ctx`` and computes the
gradients explicitly; torch.nn.grad provides the strided correlation kernels.
"""
import math
from typing import Tuple

import torch
import torch.nn.functional as F
from torch.nn import grad as nn_grad

from torch_lungseg.utils.enums import Activation


def same_padding(size: int, kernel: int, stride: int) -> Tuple[int, int]:
    """ (before, after) padding giving ceil(size / stride) outputs. The odd pixel goes after. """
    out = int(math.ceil(size / stride))
    total = max((out - 1) * stride + kernel - size, 0)
    return total // 2, total - total // 2


class Conv2dFunction(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x, weight, bias, stride: int, pads: Tuple[int, int, int, int]):
        top, bottom, left, right = pads
        x_pad = F.pad(x, (left, right, top, bottom)) if any(pads) else x
        ctx.save_for_backward(x_pad, weight)
        ctx.stride = stride
        ctx.pads = pads
        ctx.has_bias = bias is not None
        return F.conv2d(x_pad, weight, bias, stride=stride)

    @staticmethod
    def backward(ctx, grad_output):
        x_pad, weight = ctx.saved_tensors
        top, bottom, left, right = ctx.pads
        grad_x = grad_w = grad_b = None
        if ctx.needs_input_grad[0]:
            grad_pad = nn_grad.conv2d_input(x_pad.shape, weight, grad_output, stride=ctx.stride)
            h, w = grad_pad.shape[-2:]
            grad_x = grad_pad[:, :, top : h - bottom, left : w - right]
        if ctx.needs_input_grad[1]:
            grad_w = nn_grad.conv2d_weight(x_pad, weight.shape, grad_output, stride=ctx.stride)
        if ctx.has_bias and ctx.needs_input_grad[2]:
            grad_b = grad_output.sum((0, 2, 3))
        return grad_x, grad_w, grad_b, None, None


class ConvTranspose2dFunction(torch.autograd.Function):
    """ Adjoint of Conv2dFunction with symmetric padding. Weight layout is (in, out, kh, kw). """

    @staticmethod
    def forward(ctx, x, weight, bias, stride: int, padding: int):
        ctx.save_for_backward(x, weight)
        ctx.stride = stride
        ctx.padding = padding
        ctx.has_bias = bias is not None
        return F.conv_transpose2d(x, weight, bias, stride=stride, padding=padding)

    @staticmethod
    def backward(ctx, grad_output):
        x, weight = ctx.saved_tensors
        grad_x = grad_w = grad_b = None
        if ctx.needs_input_grad[0]:
            grad_x = F.conv2d(grad_output, weight, None, stride=ctx.stride, padding=ctx.padding)
        if ctx.needs_input_grad[1]:
            grad_w = nn_grad.conv2d_weight(grad_output, weight.shape, x, stride=ctx.stride, padding=ctx.padding)
        if ctx.has_bias and ctx.needs_input_grad[2]:
            grad_b = grad_output.sum((0, 2, 3))
        return grad_x, grad_w, grad_b, None, None


def _per_channel(t):
    return t[None, :, None, None]


class BatchNorm2dFunction(torch.autograd.Function):
    """ With ``use_batch_stats`` the statistics come from the batch (biased variance), otherwise
    ``mean`` and ``var`` are used as constants.
    """

    @staticmethod
    def forward(ctx, x, weight, bias, mean, var, eps: float, use_batch_stats: bool):
        if use_batch_stats:
            mean = x.mean((0, 2, 3))
            var = x.var((0, 2, 3), unbiased=False)
        inv_std = torch.rsqrt(var + eps)
        x_hat = (x - _per_channel(mean)) * _per_channel(inv_std)
        ctx.save_for_backward(x_hat, weight, inv_std)
        ctx.use_batch_stats = use_batch_stats
        return x_hat * _per_channel(weight) + _per_channel(bias)

    @staticmethod
    def backward(ctx, grad_output):
        x_hat, weight, inv_std = ctx.saved_tensors
        axes = (0, 2, 3)
        grad_w = (grad_output * x_hat).sum(axes)
        grad_b = grad_output.sum(axes)
        dx_hat = grad_output * _per_channel(weight)
        if ctx.use_batch_stats:
            n = grad_output.numel() // grad_output.shape[1]
            grad_x = (
                _per_channel(inv_std)
                / n
                * (
                    n * dx_hat
                    - dx_hat.sum(axes, keepdim=True)
                    - x_hat * (dx_hat * x_hat).sum(axes, keepdim=True)
                )
            )
        else:
            grad_x = dx_hat * _per_channel(inv_std)
        return grad_x, grad_w, grad_b, None, None, None, None


class ActivationFunction(torch.autograd.Function):
    @staticmethod
    def forward(ctx, x, kind: Activation, negative_slope: float = 0.2):
        if kind == Activation.RELU:
            y = x.clamp(min=0)
            ctx.save_for_backward(x)
        elif kind == Activation.LEAKY_RELU:
            y = torch.where(x > 0, x, x * negative_slope)
            ctx.save_for_backward(x)
        elif kind == Activation.TANH:
            y = torch.tanh(x)
            ctx.save_for_backward(y)
        elif kind == Activation.SIGMOID:
            y = torch.sigmoid(x)
            ctx.save_for_backward(y)
        else:
            raise NotImplementedError("Activation {} is not supported".format(kind))
        ctx.kind = kind
        ctx.negative_slope = negative_slope
        return y

    @staticmethod
    def backward(ctx, grad_output):
        (saved,) = ctx.saved_tensors
        kind = ctx.kind
        if kind == Activation.RELU:
            grad = grad_output * (saved > 0).to(grad_output.dtype)
        elif kind == Activation.LEAKY_RELU:
            grad = torch.where(saved > 0, grad_output, grad_output * ctx.negative_slope)
        elif kind == Activation.TANH:
            grad = grad_output * (1 - saved * saved)
        else:
            grad = grad_output * saved * (1 - saved)
        return grad, None, None


class DropoutFunction(torch.autograd.Function):
    """ Multiplies by a precomputed {0, 1/(1-p)} mask """

    @staticmethod
    def forward(ctx, x, mask):
        ctx.save_for_backward(mask)
        return x * mask

    @staticmethod
    def backward(ctx, grad_output):
        (mask,) = ctx.saved_tensors
        return grad_output * mask, None
