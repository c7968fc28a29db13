from .losses import bce_with_logits, l1, GANLoss, gen_loss, disc_loss
