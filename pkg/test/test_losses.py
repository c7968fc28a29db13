import os
import sys
import math
import unittest

import torch

DIR = os.path.dirname(os.path.realpath(__file__))
ROOT = os.path.join(DIR, "..")
sys.path.insert(0, ROOT)

from torch_lungseg.core.losses import disc_loss, gen_loss, l1
from torch_lungseg.core.optim import instantiate_optimizer, optimizer_step
from torch_lungseg.utils.errors import ConfigError


class TestGANLosses(unittest.TestCase):
    def test_generator_chance_level(self):
        logits = torch.zeros((1, 1, 30, 30))
        mask = torch.ones((1, 1, 8, 8))
        total, adv, l1_term = gen_loss(logits, mask, mask, 100.0)
        self.assertAlmostEqual(total.item(), math.log(2), places=6)
        self.assertAlmostEqual(adv.item(), math.log(2), places=6)
        self.assertEqual(l1_term.item(), 0.0)

    def test_generator_l1_weight(self):
        logits = torch.zeros((1, 1, 30, 30))
        fake = -torch.ones((1, 1, 8, 8))
        real = torch.ones((1, 1, 8, 8))
        total, adv, l1_term = gen_loss(logits, fake, real, 100.0)
        self.assertAlmostEqual(total.item(), math.log(2) + 200.0, places=4)
        self.assertAlmostEqual(l1_term.item(), 2.0, places=6)

    def test_discriminator_chance_level(self):
        zeros = torch.zeros((2, 1, 30, 30))
        self.assertAlmostEqual(disc_loss(zeros, zeros).item(), 2 * math.log(2), places=6)

    def test_discriminator_confidently_wrong(self):
        real = torch.full((1, 1, 30, 30), -40.0)
        fake = torch.full((1, 1, 30, 30), 40.0)
        loss = disc_loss(real, fake)
        self.assertTrue(torch.isfinite(loss))
        self.assertAlmostEqual(loss.item(), 80.0, delta=1e-3)

    def test_discriminator_confidently_right(self):
        real = torch.full((1, 1, 30, 30), 40.0)
        fake = torch.full((1, 1, 30, 30), -40.0)
        self.assertLess(disc_loss(real, fake).item(), 1e-6)

    def test_shape_mismatch(self):
        with self.assertRaises(ValueError):
            disc_loss(torch.zeros((1, 1, 30, 30)), torch.zeros((1, 1, 31, 31)))
        with self.assertRaises(ValueError):
            l1(torch.zeros(3), torch.zeros(4))


class TestOptimizer(unittest.TestCase):
    def test_adam_first_step(self):
        """ After one step Adam moves every parameter by lr * g / (|g| + eps) against the gradient """
        param = torch.nn.Parameter(torch.tensor([1.0, -2.0, 0.5], dtype=torch.float64))
        grad = torch.tensor([0.3, -1e-3, 4.0], dtype=torch.float64)
        optimizer = instantiate_optimizer(
            [param], {"class": "Adam", "params": {"lr": 2e-4, "betas": [0.5, 0.999], "eps": 1e-8}}
        )
        param.grad = grad.clone()
        optimizer_step(optimizer)
        expected = torch.tensor([1.0, -2.0, 0.5], dtype=torch.float64) - 2e-4 * grad / (grad.abs() + 1e-8)
        torch.testing.assert_close(param.detach(), expected, rtol=1e-9, atol=1e-12)
        torch.testing.assert_close(param.grad, torch.zeros_like(grad))

    def test_zero_learning_rate(self):
        param = torch.nn.Parameter(torch.randn(5))
        before = param.detach().clone()
        optimizer = instantiate_optimizer([param], {"class": "Adam", "params": {"lr": 0.0}})
        param.grad = torch.randn(5)
        optimizer_step(optimizer)
        self.assertTrue(torch.equal(param.detach(), before))

    def test_unknown_class(self):
        with self.assertRaises(ConfigError):
            instantiate_optimizer([torch.nn.Parameter(torch.zeros(1))], {"class": "Adamz"})


if __name__ == "__main__":
    unittest.main()
