import os
import sys
import unittest

import torch

DIR = os.path.dirname(os.path.realpath(__file__))
ROOT = os.path.join(DIR, "..")
sys.path.insert(0, ROOT)

from torch_lungseg.core.common_modules import stored_param_count
from torch_lungseg.models.base_architectures import PatchGANDiscriminator, UnetGenerator
from torch_lungseg.models.model_config import ModelConfig
from torch_lungseg.models.summary import format_table, param_table
from torch_lungseg.utils.config import to_dataclass
from torch_lungseg.utils.errors import ConfigError

GENERATOR_ROWS = [
    ("input_image", (None, 256, 256, 1), 0, []),
    ("down_1", (None, 128, 128, 64), 1024, ["input_image"]),
    ("down_2", (None, 64, 64, 128), 131584, ["down_1"]),
    ("down_3", (None, 32, 32, 256), 525312, ["down_2"]),
    ("down_4", (None, 16, 16, 512), 2099200, ["down_3"]),
    ("down_5", (None, 8, 8, 512), 4196352, ["down_4"]),
    ("down_6", (None, 4, 4, 512), 4196352, ["down_5"]),
    ("down_7", (None, 2, 2, 512), 4196352, ["down_6"]),
    ("down_8", (None, 1, 1, 512), 4196352, ["down_7"]),
    ("up_1", (None, 2, 2, 512), 4196352, ["down_8"]),
    ("concatenate_1", (None, 2, 2, 1024), 0, ["up_1", "down_7"]),
    ("up_2", (None, 4, 4, 512), 8390656, ["concatenate_1"]),
    ("concatenate_2", (None, 4, 4, 1024), 0, ["up_2", "down_6"]),
    ("up_3", (None, 8, 8, 512), 8390656, ["concatenate_2"]),
    ("concatenate_3", (None, 8, 8, 1024), 0, ["up_3", "down_5"]),
    ("up_4", (None, 16, 16, 512), 8390656, ["concatenate_3"]),
    ("concatenate_4", (None, 16, 16, 1024), 0, ["up_4", "down_4"]),
    ("up_5", (None, 32, 32, 256), 4195328, ["concatenate_4"]),
    ("concatenate_5", (None, 32, 32, 512), 0, ["up_5", "down_3"]),
    ("up_6", (None, 64, 64, 128), 1049088, ["concatenate_5"]),
    ("concatenate_6", (None, 64, 64, 256), 0, ["up_6", "down_2"]),
    ("up_7", (None, 128, 128, 64), 262400, ["concatenate_6"]),
    ("concatenate_7", (None, 128, 128, 128), 0, ["up_7", "down_1"]),
    ("output", (None, 256, 256, 1), 2049, ["concatenate_7"]),
]

DISCRIMINATOR_ROWS = [
    ("input_image", (None, 256, 256, 1), 0, []),
    ("target_image", (None, 256, 256, 1), 0, []),
    ("concatenate", (None, 256, 256, 2), 0, ["input_image", "target_image"]),
    ("down_1", (None, 128, 128, 64), 2048, ["concatenate"]),
    ("down_2", (None, 64, 64, 128), 131584, ["down_1"]),
    ("down_3", (None, 32, 32, 256), 525312, ["down_2"]),
    ("zero_padding2d", (None, 34, 34, 256), 0, ["down_3"]),
    ("conv2d", (None, 31, 31, 512), 2097152, ["zero_padding2d"]),
    ("batch_normalization", (None, 31, 31, 512), 2048, ["conv2d"]),
    ("leaky_re_lu", (None, 31, 31, 512), 0, ["batch_normalization"]),
    ("zero_padding2d_1", (None, 33, 33, 512), 0, ["leaky_re_lu"]),
    ("conv2d_1", (None, 30, 30, 1), 8193, ["zero_padding2d_1"]),
]


def as_tuples(rows):
    return [(r.name, r.output_shape, r.params, r.connected_to) for r in rows]


class TestDefaultArchitecture(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        opt = ModelConfig()
        cls.generator = UnetGenerator(opt)
        cls.discriminator = PatchGANDiscriminator(opt)

    def test_generator_table(self):
        rows = param_table(self.generator)
        self.assertEqual(as_tuples(rows), GENERATOR_ROWS)
        self.assertEqual(sum(r.params for r in rows), 54419713)
        self.assertEqual(stored_param_count(self.generator), 54419713)

    def test_discriminator_table(self):
        rows = param_table(self.discriminator)
        self.assertEqual(as_tuples(rows), DISCRIMINATOR_ROWS)
        self.assertEqual(sum(r.params for r in rows), 2766337)
        self.assertEqual(stored_param_count(self.discriminator), 2766337)

    def test_format_table(self):
        text = format_table(param_table(self.discriminator))
        self.assertIn("conv2d_1", text)
        self.assertIn("Total params: 2,766,337", text)

    def test_summary_keeps_mode(self):
        self.generator.train()
        param_table(self.generator)
        self.assertTrue(self.generator.training)


class TestScaledArchitecture(unittest.TestCase):
    def test_desk_preset(self):
        opt = ModelConfig(image_size=64, depth=6, base_channels=16)
        generator = UnetGenerator(opt)
        discriminator = PatchGANDiscriminator(opt)
        with torch.no_grad():
            x = torch.zeros((2, 1, 64, 64))
            out = generator.eval()(x)
            self.assertEqual(out.shape, (2, 1, 64, 64))
            self.assertEqual(discriminator.eval()(x, out).shape, (2, 1, 6, 6))
        rows = param_table(generator)
        self.assertEqual(rows[len(opt.encoder_channels())].output_shape, (None, 1, 1, 128))
        self.assertEqual(opt.encoder_channels(), [16, 32, 64, 128, 128, 128])

    def test_dropout_blocks(self):
        generator = UnetGenerator(ModelConfig(image_size=64, depth=6, base_channels=4, dropout_up_blocks=2))
        with_dropout = [any(type(m).__name__ == "Dropout" for m in block.modules()) for block in generator.up]
        self.assertEqual(with_dropout, [True, True, False, False, False])

    def test_first_encoder_block_has_no_batch_norm(self):
        generator = UnetGenerator(ModelConfig(image_size=32, depth=5, base_channels=4))
        names = [type(m).__name__ for m in generator.down[0]]
        self.assertNotIn("BatchNorm2d", names)
        self.assertIn("BatchNorm2d", [type(m).__name__ for m in generator.down[1]])

    def test_invalid_configs(self):
        with self.assertRaises(ConfigError):
            to_dataclass({"image_size": 100, "depth": 7}, ModelConfig)
        with self.assertRaises(ConfigError):
            to_dataclass({"image_size": 16, "depth": 4}, ModelConfig)
        with self.assertRaises(ConfigError):
            to_dataclass({"dropout_up_blocks": 8}, ModelConfig)
        with self.assertRaises(ConfigError):
            to_dataclass({"inference_mode": "sometimes"}, ModelConfig)
        with self.assertRaises(ConfigError):
            to_dataclass({"image_sise": 256}, ModelConfig)

    def test_fingerprint_tracks_architecture_only(self):
        base = ModelConfig()
        self.assertEqual(base.architecture_fingerprint, ModelConfig(lr=1e-3, seed=7).architecture_fingerprint)
        self.assertNotEqual(base.architecture_fingerprint, ModelConfig(base_channels=32).architecture_fingerprint)


if __name__ == "__main__":
    unittest.main()
