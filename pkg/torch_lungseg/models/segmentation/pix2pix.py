import math
import logging
from typing import Dict, Optional, Tuple

import torch

from torch_lungseg.core.common_modules import BatchNorm2d, Dropout, stored_param_count
from torch_lungseg.core.initializer import init_weights
from torch_lungseg.core.losses import gen_loss, disc_loss
from torch_lungseg.core.optim import instantiate_optimizer, optimizer_step
from torch_lungseg.models.base_architectures import UnetGenerator, PatchGANDiscriminator
from torch_lungseg.models.base_model import BaseModel
from torch_lungseg.models.model_config import ModelConfig
from torch_lungseg.utils.config import get_or_default, to_dataclass
from torch_lungseg.utils.enums import InferenceMode
from torch_lungseg.utils.errors import DivergenceError

log = logging.getLogger(__name__)


def pixel_accuracy(raw: torch.Tensor, target: torch.Tensor, threshold: float = 0.0) -> float:
    """ Fraction of pixels where (raw > threshold) agrees with the {-1, 1} target """
    return float(((raw > threshold) == (target > 0)).float().mean())


class Pix2PixModel(BaseModel):
    """ Conditional GAN for lung masks: a U-Net generator maps the radiograph to a mask in [-1, 1],
    a patch discriminator judges (radiograph, mask) pairs. Each step updates the discriminator on the
    real pair and the detached generated pair, then the generator through the frozen discriminator
    with adversarial + lambda_l1 * L1 loss.
    """

    def __init__(self, opt):
        opt = to_dataclass(opt, ModelConfig)
        super(Pix2PixModel, self).__init__(opt)
        self.loss_names = ["loss_g", "loss_g_gan", "loss_g_l1", "loss_d"]

        init_generator = torch.Generator().manual_seed(opt.seed)
        self.generator = UnetGenerator(opt)
        self.discriminator = PatchGANDiscriminator(opt)
        init_weights(self.generator, gain=opt.init_gain, generator=init_generator)
        init_weights(self.discriminator, gain=opt.init_gain, generator=init_generator)

        self.dropout_generator = torch.Generator().manual_seed(opt.seed)
        for module in self.generator.modules():
            if isinstance(module, Dropout):
                module.generator = self.dropout_generator

        self._optim_opt = None
        self.step = 0
        self.train_accuracy = None
        for name in self.loss_names:
            setattr(self, name, None)

    def instantiate_optimizers(self, optim_opt=None):
        """ One optimizer per network. ``optim_opt`` may hold a ``generator`` and a ``discriminator``
        optimizer block, the model hyper parameters are used otherwise.
        """
        if optim_opt is not None:
            self._optim_opt = optim_opt
        default = {"class": self.opt.optimizer, "params": {"lr": self.opt.lr, "betas": [self.opt.beta1, self.opt.beta2]}}
        for name in ("generator", "discriminator"):
            optimizer_opt = get_or_default(self._optim_opt, name, default)
            self._optimizers[name] = instantiate_optimizer(getattr(self, name).parameters(), optimizer_opt)

    @property
    def optimizer_g(self):
        return self._optimizers["generator"]

    @property
    def optimizer_d(self):
        return self._optimizers["discriminator"]

    def _check_extents(self, image):
        size = self.opt.image_size
        if image.dim() != 4 or tuple(image.shape[1:]) != (self.opt.in_channels, size, size):
            raise ValueError(
                "Expected images of shape (N, {}, {}, {}), got {}".format(
                    self.opt.in_channels, size, size, tuple(image.shape)
                )
            )

    def set_input(self, data, device=None):
        image, mask = data[0], data[1]
        device = device or self.device
        self._check_extents(image)
        self.real_image = image.to(device)
        self.real_mask = mask.to(device)

    def forward(self):
        self.fake_mask = self.generator(self.real_image)
        return self.fake_mask

    def _check_finite(self, step, **losses):
        if not all(math.isfinite(float(v)) for v in losses.values()):
            raise DivergenceError(step, {k: float(v) for k, v in losses.items()})

    def optimize_parameters(self, step: Optional[int] = None) -> Dict[str, float]:
        step = self.step + 1 if step is None else step
        if not self._optimizers:
            self.instantiate_optimizers()
        self.forward()

        # discriminator: real pair vs generated pair held constant
        self.set_requires_grad(self.discriminator, True)
        d_real = self.discriminator(self.real_image, self.real_mask)
        d_fake = self.discriminator(self.real_image, self.fake_mask.detach())
        loss_d = disc_loss(d_real, d_fake)
        self._check_finite(step, loss_d=loss_d.item())
        loss_d.backward()
        optimizer_step(self.optimizer_d)

        # generator through the frozen discriminator
        self.set_requires_grad(self.discriminator, False)
        d_fake = self.discriminator(self.real_image, self.fake_mask)
        loss_g, loss_g_gan, loss_g_l1 = gen_loss(d_fake, self.fake_mask, self.real_mask, self.opt.lambda_l1)
        self._check_finite(
            step, loss_d=loss_d.item(), loss_g=loss_g.item(), loss_g_gan=loss_g_gan.item(), loss_g_l1=loss_g_l1.item()
        )
        loss_g.backward()
        optimizer_step(self.optimizer_g)
        self.set_requires_grad(self.discriminator, True)

        self.loss_d = loss_d.item()
        self.loss_g = loss_g.item()
        self.loss_g_gan = loss_g_gan.item()
        self.loss_g_l1 = loss_g_l1.item()
        self.train_accuracy = pixel_accuracy(self.fake_mask.detach(), self.real_mask, self.opt.threshold)
        self.step = step
        return self.get_current_losses()

    def _set_inference_mode(self, mode: InferenceMode):
        active = mode == InferenceMode.TRAIN
        for module in self.generator.modules():
            if isinstance(module, BatchNorm2d):
                module.batch_stats_in_eval = active
            elif isinstance(module, Dropout):
                module.always_active = active

    def predict_mask(
        self, image: torch.Tensor, threshold: Optional[float] = None, inference_mode: Optional[str] = None
    ) -> Tuple[torch.Tensor, torch.Tensor]:
        """ Returns (binary mask, raw tanh output). In 'train' inference mode batch norm uses the batch statistics
        and dropout stays active, with the dropout stream restarted from the model seed on every call.
        """
        if image.dim() == 3:
            image = image[None]
        self._check_extents(image)
        threshold = self.opt.threshold if threshold is None else threshold
        mode = InferenceMode(inference_mode or self.opt.inference_mode)

        was_training = self.generator.training
        rng_state = self.dropout_generator.get_state()
        self.generator.eval()
        self._set_inference_mode(mode)
        if mode == InferenceMode.TRAIN:
            self.dropout_generator.manual_seed(self.opt.seed)
        try:
            with torch.no_grad():
                raw = self.generator(image.to(self.device))
        finally:
            self._set_inference_mode(InferenceMode.EVAL)
            self.dropout_generator.set_state(rng_state)
            self.generator.train(was_training)
        return raw > threshold, raw

    def describe(self):
        log.info(
            "Generator: %i stored parameters, discriminator: %i stored parameters",
            stored_param_count(self.generator),
            stored_param_count(self.discriminator),
        )
