from typing import Tuple

import torch
from torch import nn
import torch.nn.functional as F


def _check_shapes(a, b):
    if a.shape != b.shape:
        raise ValueError("Loss operands must have the same shape, got {} and {}".format(tuple(a.shape), tuple(b.shape)))


def bce_with_logits(logits: torch.Tensor, targets: torch.Tensor) -> torch.Tensor:
    """ mean(softplus(logit) - target * logit), evaluated in the overflow free form """
    _check_shapes(logits, targets)
    return F.binary_cross_entropy_with_logits(logits, targets)


def l1(a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
    _check_shapes(a, b)
    return F.l1_loss(a, b)


class GANLoss(nn.Module):
    """ Binary cross entropy against a constant real / fake label map """

    def __init__(self):
        super(GANLoss, self).__init__()
        self.register_buffer("real_label", torch.tensor(1.0))
        self.register_buffer("fake_label", torch.tensor(0.0))

    def forward(self, prediction, is_real: bool):
        target = self.real_label if is_real else self.fake_label
        return bce_with_logits(prediction, target.to(prediction).expand_as(prediction))


_gan_loss = GANLoss()


def gen_loss(
    d_fake_logits: torch.Tensor, fake: torch.Tensor, real: torch.Tensor, lambda_l1: float
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """ Returns (total, adversarial term, l1 term). The l1 term is reported before weighting. """
    adv = _gan_loss(d_fake_logits, True)
    l1_term = l1(fake, real)
    return adv + lambda_l1 * l1_term, adv, l1_term


def disc_loss(d_real_logits: torch.Tensor, d_fake_logits: torch.Tensor) -> torch.Tensor:
    _check_shapes(d_real_logits, d_fake_logits)
    return _gan_loss(d_real_logits, True) + _gan_loss(d_fake_logits, False)
