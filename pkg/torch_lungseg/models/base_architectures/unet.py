""" U-Net generator: ``depth`` stride-2 encoder blocks down to a 1x1 bottleneck, ``depth - 1`` decoder blocks
each concatenated with the encoder output of matching resolution, and a final transposed convolution to the
mask channel with a tanh.
"""
import logging

from torch import nn

from torch_lungseg.core.common_modules import (
    BaseModule,
    Conv2d,
    ConvTranspose2d,
    BatchNorm2d,
    LeakyReLU,
    ReLU,
    Tanh,
    Dropout,
    Concatenate,
)
from torch_lungseg.models.model_config import ModelConfig

log = logging.getLogger(__name__)


class DownBlock(nn.Sequential):
    def __init__(self, in_channels, out_channels, batch_norm=True, bn_momentum=0.99, bn_eps=1e-3):
        layers = [Conv2d(in_channels, out_channels, kernel_size=4, stride=2, padding="same", bias=False)]
        if batch_norm:
            layers.append(BatchNorm2d(out_channels, momentum=bn_momentum, eps=bn_eps))
        layers.append(LeakyReLU(0.2))
        super().__init__(*layers)


class UpBlock(nn.Sequential):
    def __init__(self, in_channels, out_channels, dropout=0.0, bn_momentum=0.99, bn_eps=1e-3):
        layers = [
            ConvTranspose2d(in_channels, out_channels, kernel_size=4, stride=2, bias=False),
            BatchNorm2d(out_channels, momentum=bn_momentum, eps=bn_eps),
        ]
        if dropout > 0:
            layers.append(Dropout(dropout))
        layers.append(ReLU())
        super().__init__(*layers)


class UnetGenerator(BaseModule):
    INPUT_NAME = "input_image"

    def __init__(self, opt: ModelConfig):
        super().__init__()
        self.opt = opt
        channels = opt.encoder_channels()
        bn = dict(bn_momentum=opt.bn_momentum, bn_eps=opt.bn_eps)

        self.down = nn.ModuleList()
        in_channels = opt.in_channels
        for i, out_channels in enumerate(channels):
            self.down.append(DownBlock(in_channels, out_channels, batch_norm=i > 0, **bn))
            in_channels = out_channels

        self.up = nn.ModuleList()
        self.concat = nn.ModuleList()
        for k in range(opt.depth - 1):
            skip_channels = channels[opt.depth - 2 - k]
            dropout = opt.dropout if k < opt.dropout_up_blocks else 0.0
            self.up.append(UpBlock(in_channels, skip_channels, dropout=dropout, **bn))
            self.concat.append(Concatenate())
            in_channels = 2 * skip_channels

        self.output = nn.Sequential(ConvTranspose2d(in_channels, 1, kernel_size=4, stride=2, bias=True), Tanh())

    def skip_source(self, k: int) -> int:
        """ Index of the encoder block whose output is concatenated after decoder block k """
        return self.opt.depth - 2 - k

    def forward(self, x):
        skips = []
        for block in self.down:
            x = block(x)
            skips.append(x)
        for k, (block, concat) in enumerate(zip(self.up, self.concat)):
            x = concat(block(x), skips[self.skip_source(k)])
        return self.output(x)

    def summary_layers(self):
        """ (name, module, inputs) in execution order """
        layers = []
        previous = self.INPUT_NAME
        for i, block in enumerate(self.down):
            name = "down_{}".format(i + 1)
            layers.append((name, block, [previous]))
            previous = name
        for k, (block, concat) in enumerate(zip(self.up, self.concat)):
            up_name = "up_{}".format(k + 1)
            concat_name = "concatenate_{}".format(k + 1)
            layers.append((up_name, block, [previous]))
            layers.append((concat_name, concat, [up_name, "down_{}".format(self.skip_source(k) + 1)]))
            previous = concat_name
        layers.append(("output", self.output, [previous]))
        return layers

    def summary_inputs(self):
        return [(self.INPUT_NAME, self.opt.in_channels)]
