import io
import os
import sys
import shutil
import tempfile
import unittest

import numpy as np
import numpy.testing as npt
import torch
from PIL import Image

DIR = os.path.dirname(os.path.realpath(__file__))
ROOT = os.path.join(DIR, "..")
sys.path.insert(0, ROOT)

from torch_lungseg.core.data_transform import (
    AffineParams,
    AugmentConfig,
    PreprocessingConfig,
    apply_affine,
    binarize_mask,
    clahe,
    decode_png,
    denormalize,
    diff_image,
    encode_png,
    histogram,
    normalize,
    preprocess_pair,
    read_image,
    resize,
    sample_affine,
    write_image,
)
from torch_lungseg.utils.errors import ConfigError, DecodeError


def png_bytes(image: Image.Image) -> bytes:
    buffer = io.BytesIO()
    image.save(buffer, format="PNG")
    return buffer.getvalue()


class TestImageIO(unittest.TestCase):
    def setUp(self):
        self.run_path = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.run_path, ignore_errors=True)

    def test_file_round_trip(self):
        img = np.random.default_rng(0).integers(0, 256, size=(17, 23), dtype=np.uint8)
        path = os.path.join(self.run_path, "sub", "img.png")
        write_image(path, img)
        npt.assert_array_equal(read_image(path), img)

    def test_rgb_luminance(self):
        rgb = np.zeros((2, 2, 3), dtype=np.uint8)
        rgb[..., 0] = 255
        decoded = decode_png(png_bytes(Image.fromarray(rgb)))
        self.assertEqual(decoded.shape, (2, 2))
        npt.assert_array_equal(decoded, np.full((2, 2), 76, dtype=np.uint8))

    def test_sixteen_bit(self):
        wide = np.array([[0, 65535], [32768, 65535]], dtype=np.uint16)
        decoded = decode_png(png_bytes(Image.fromarray(wide)))
        npt.assert_array_equal(decoded, np.array([[0, 255], [128, 255]], dtype=np.uint8))

    def test_truncated(self):
        data = encode_png(np.zeros((32, 32), dtype=np.uint8))
        with self.assertRaises(DecodeError):
            decode_png(data[: len(data) // 2])
        with self.assertRaises(DecodeError):
            decode_png(b"not an image at all")

    def test_missing_file(self):
        with self.assertRaises(DecodeError) as context:
            read_image(os.path.join(self.run_path, "missing.png"))
        self.assertEqual(context.exception.exit_code, 3)

    def test_encode_rejects_color(self):
        with self.assertRaises(ValueError):
            encode_png(np.zeros((4, 4, 3), dtype=np.uint8))


class TestResize(unittest.TestCase):
    def test_checkerboard(self):
        board = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        out = resize(board, 1, 1, "bilinear")
        self.assertIn(int(out[0, 0]), (127, 128))

    def test_nearest_keeps_values(self):
        mask = np.zeros((37, 41), dtype=np.uint8)
        mask[5:20, 10:30] = 255
        out = resize(mask, 64, 64, "nearest")
        self.assertEqual(out.shape, (64, 64))
        self.assertTrue(set(np.unique(out)) <= {0, 255})

    def test_same_size_is_copy(self):
        img = np.arange(16, dtype=np.uint8).reshape(4, 4)
        out = resize(img, 4, 4)
        npt.assert_array_equal(out, img)
        self.assertIsNot(out, img)

    def test_constant_image(self):
        out = resize(np.full((30, 50), 77, dtype=np.uint8), 64, 64)
        npt.assert_array_equal(out, np.full((64, 64), 77, dtype=np.uint8))

    def test_invalid_extent(self):
        with self.assertRaises(ValueError):
            resize(np.zeros((4, 4), dtype=np.uint8), 0, 4)


class TestCLAHE(unittest.TestCase):
    def test_constant_image(self):
        img = np.full((64, 64), 90, dtype=np.uint8)
        out = clahe(img, 2.0, (8, 8))
        npt.assert_array_equal(out, img)
        self.assertIsNot(out, img)

    def test_range_and_dtype(self):
        img = np.random.default_rng(1).integers(0, 256, size=(61, 47), dtype=np.uint8)
        out = clahe(img, 2.0, (8, 8))
        self.assertEqual(out.shape, img.shape)
        self.assertEqual(out.dtype, np.uint8)

    def test_single_tile_without_clip_is_global_equalization(self):
        img = np.random.default_rng(2).integers(40, 120, size=(32, 32), dtype=np.uint8)
        out = clahe(img, None, (1, 1))
        cdf = np.cumsum(np.bincount(img.ravel(), minlength=256))
        expected = np.rint(cdf[img] / img.size * 255)
        self.assertEqual(out.dtype, np.uint8)
        npt.assert_allclose(out.astype(np.float64), expected, atol=1)

    def test_clipping_limits_contrast(self):
        img = np.tile(np.arange(100, 116, dtype=np.uint8), (64, 4))
        clipped = clahe(img, 1.0, (2, 2))
        unclipped = clahe(img, None, (2, 2))
        self.assertLess(int(clipped.max()) - int(clipped.min()), int(unclipped.max()) - int(unclipped.min()))
        npt.assert_array_equal(clahe(img, float("inf"), (2, 2)), unclipped)

    def test_stretches_contrast(self):
        img = np.tile(np.arange(100, 116, dtype=np.uint8), (64, 4))
        out = clahe(img, None, (2, 2))
        self.assertGreater(int(out.max()) - int(out.min()), 200)

    def test_invalid_arguments(self):
        img = np.zeros((16, 16), dtype=np.uint8)
        with self.assertRaises(ValueError):
            clahe(img, 0.0, (8, 8))
        with self.assertRaises(ValueError):
            clahe(img, 2.0, (0, 8))
        with self.assertRaises(ValueError):
            clahe(np.zeros((4, 4), dtype=np.uint8), 2.0, (8, 8))


class TestNormalization(unittest.TestCase):
    def test_mask_values(self):
        mask = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        t = normalize(mask)
        self.assertEqual(t.shape, (1, 2, 2))
        self.assertEqual(t.dtype, torch.float32)
        torch.testing.assert_close(t, torch.tensor([[[-1.0, 1.0], [1.0, -1.0]]]))

    def test_inverse(self):
        img = np.arange(256, dtype=np.uint8).reshape(16, 16)
        npt.assert_array_equal(denormalize(normalize(img)), img)

    def test_denormalize_clamps(self):
        out = denormalize(torch.tensor([[[-3.0, 3.0], [0.0, 1.0]]]))
        npt.assert_array_equal(out, np.array([[0, 255], [128, 255]], dtype=np.uint8))

    def test_binarize(self):
        npt.assert_array_equal(binarize_mask(np.array([0, 127, 128, 255])), np.array([0, 0, 255, 255]))

    def test_preprocess_pair(self):
        image = np.random.default_rng(3).integers(0, 256, size=(50, 70), dtype=np.uint8)
        mask = np.zeros((50, 70), dtype=np.uint8)
        mask[10:40, 5:30] = 200
        out_image, out_mask = preprocess_pair(image, mask, PreprocessingConfig(image_size=32, clahe=True))
        self.assertEqual(out_image.shape, (32, 32))
        self.assertTrue(set(np.unique(out_mask)) <= {0, 255})
        self.assertGreater(int(out_mask.sum()), 0)

    def test_invalid_config(self):
        with self.assertRaises(ConfigError):
            PreprocessingConfig(tiles=[8]).validate()

    def test_histogram(self):
        img = np.array([[0, 0, 5], [255, 5, 5]], dtype=np.uint8)
        hist = histogram(img)
        self.assertEqual(hist.shape, (256,))
        self.assertEqual(hist.sum(), img.size)
        self.assertEqual((hist[0], hist[5], hist[255]), (2, 3, 1))

    def test_diff(self):
        a = np.array([[0, 255], [255, 0]], dtype=np.uint8)
        b = np.array([[255, 255], [0, 0]], dtype=np.uint8)
        npt.assert_array_equal(diff_image(a, b), np.array([[255, 0], [255, 0]], dtype=np.uint8))
        npt.assert_array_equal(diff_image(a, a), np.zeros((2, 2), dtype=np.uint8))
        with self.assertRaises(ValueError):
            diff_image(a, np.zeros((3, 3), dtype=np.uint8))


class TestAugment(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(4)
        self.image = rng.integers(0, 256, size=(16, 16), dtype=np.uint8)
        self.mask = np.where(rng.random((16, 16)) > 0.5, 255, 0).astype(np.uint8)

    def test_identity(self):
        params = sample_affine(np.random.default_rng(0), AugmentConfig.identity())
        self.assertTrue(params.is_identity)
        image, mask = apply_affine(self.image, self.mask, params)
        npt.assert_array_equal(image, self.image)
        npt.assert_array_equal(mask, self.mask)

    def test_double_flip(self):
        flip = AffineParams(flip_h=True)
        image, mask = apply_affine(self.image, self.mask, flip)
        npt.assert_array_equal(image, self.image[:, ::-1])
        npt.assert_array_equal(mask, self.mask[:, ::-1])
        image, mask = apply_affine(image, mask, flip)
        npt.assert_array_equal(image, self.image)
        npt.assert_array_equal(mask, self.mask)

    def test_shift(self):
        image, mask = apply_affine(self.image, self.mask, AffineParams(shift_x_frac=0.25))
        npt.assert_array_equal(image[:, 4:], self.image[:, :-4])
        npt.assert_array_equal(mask[:, 4:], self.mask[:, :-4])
        npt.assert_array_equal(image[:, :4], np.repeat(self.image[:, :1], 4, axis=1))

    def test_mask_stays_binary(self):
        rng = np.random.default_rng(5)
        cfg = AugmentConfig()
        for _ in range(20):
            _, mask = apply_affine(self.image, self.mask, sample_affine(rng, cfg))
            self.assertTrue(set(np.unique(mask)) <= {0, 255})

    def test_sampling_bounds(self):
        rng = np.random.default_rng(6)
        cfg = AugmentConfig()
        draws = [sample_affine(rng, cfg) for _ in range(10000)]
        self.assertTrue(all(p.within(cfg) for p in draws))
        self.assertTrue(all(p.zoom_x == p.zoom_y for p in draws))
        self.assertFalse(any(p.flip_v for p in draws))
        self.assertAlmostEqual(np.mean([p.flip_h for p in draws]), 0.5, delta=0.02)

    def test_sampling_is_seeded(self):
        cfg = AugmentConfig()
        a = sample_affine(np.random.default_rng([1, 2, 3]), cfg)
        b = sample_affine(np.random.default_rng([1, 2, 3]), cfg)
        self.assertEqual(a, b)

    def test_extent_mismatch(self):
        with self.assertRaises(ValueError):
            apply_affine(self.image, self.mask[:8], AffineParams(flip_h=True))

    def test_invalid_config(self):
        with self.assertRaises(ConfigError):
            AugmentConfig(zoom_range=[1.2, 0.8]).validate()
        with self.assertRaises(ConfigError):
            AugmentConfig(fill_mode="reflect").validate()


if __name__ == "__main__":
    unittest.main()
