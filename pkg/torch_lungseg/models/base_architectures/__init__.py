from .unet import UnetGenerator, DownBlock, UpBlock
from .patch_gan import PatchGANDiscriminator
