from torch import nn

from torch_lungseg.core.common_modules import (
    BaseModule,
    Conv2d,
    BatchNorm2d,
    LeakyReLU,
    ZeroPadding2d,
    Concatenate,
)
from torch_lungseg.models.base_architectures.unet import DownBlock
from torch_lungseg.models.model_config import ModelConfig


class PatchGANDiscriminator(BaseModule):
    """ Judges (image, mask) pairs with a map of logits, one per receptive field patch.
    At 256x256 the map is 30x30.
    """

    def __init__(self, opt: ModelConfig):
        super().__init__()
        self.opt = opt
        base = opt.base_channels
        bn = dict(bn_momentum=opt.bn_momentum, bn_eps=opt.bn_eps)
        self.concat = Concatenate()
        self.down = nn.ModuleList(
            [
                DownBlock(opt.in_channels + 1, base, batch_norm=False, **bn),
                DownBlock(base, 2 * base, **bn),
                DownBlock(2 * base, 4 * base, **bn),
            ]
        )
        self.pad1 = ZeroPadding2d(1)
        self.conv = Conv2d(4 * base, 8 * base, kernel_size=4, stride=1, padding="valid", bias=False)
        self.norm = BatchNorm2d(8 * base, momentum=opt.bn_momentum, eps=opt.bn_eps)
        self.act = LeakyReLU(0.2)
        self.pad2 = ZeroPadding2d(1)
        self.last = Conv2d(8 * base, 1, kernel_size=4, stride=1, padding="valid", bias=True)

    def forward(self, image, target):
        x = self.concat(image, target)
        for block in self.down:
            x = block(x)
        x = self.act(self.norm(self.conv(self.pad1(x))))
        return self.last(self.pad2(x))

    def summary_layers(self):
        return [
            ("concatenate", self.concat, ["input_image", "target_image"]),
            ("down_1", self.down[0], ["concatenate"]),
            ("down_2", self.down[1], ["down_1"]),
            ("down_3", self.down[2], ["down_2"]),
            ("zero_padding2d", self.pad1, ["down_3"]),
            ("conv2d", self.conv, ["zero_padding2d"]),
            ("batch_normalization", self.norm, ["conv2d"]),
            ("leaky_re_lu", self.act, ["batch_normalization"]),
            ("zero_padding2d_1", self.pad2, ["leaky_re_lu"]),
            ("conv2d_1", self.last, ["zero_padding2d_1"]),
        ]

    def summary_inputs(self):
        return [("input_image", self.opt.in_channels), ("target_image", 1)]
