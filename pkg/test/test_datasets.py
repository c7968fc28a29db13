import os
import sys
import shutil
import tempfile
import unittest

import numpy as np
import numpy.testing as npt
import torch
from omegaconf import OmegaConf

DIR = os.path.dirname(os.path.realpath(__file__))
ROOT = os.path.join(DIR, "..")
sys.path.insert(0, ROOT)

from test.mockdatasets import half_lung, tiny_pairs, tiny_synth_config, write_montgomery_tree, write_shenzhen_tree
from torch_lungseg.core.data_transform import AugmentConfig, PreprocessingConfig, normalize, write_image
from torch_lungseg.datasets.base_dataset import PairDataset, SamplePair, batches
from torch_lungseg.datasets.dataset_factory import get_dataset_class, instantiate_dataset
from torch_lungseg.datasets.samplers import EpochBatchSampler
from torch_lungseg.datasets.segmentation.cxr import Montgomery, Shenzhen, scan_dataset
from torch_lungseg.datasets.segmentation.synthetic_lungs import SyntheticLungs
from torch_lungseg.datasets.split import SplitConfig, split
from torch_lungseg.datasets.synthetic import (
    SynthConfig,
    rasterize,
    read_manifest,
    render_sample,
    synth_generate,
    write_synthetic,
)
from torch_lungseg.utils.errors import ConfigError, DataError


def ids(pairs):
    return [p.id for p in pairs]


class TestSplit(unittest.TestCase):
    def setUp(self):
        self.pairs = [SamplePair(id="{:03d}".format(i)) for i in range(138)]

    def test_sizes(self):
        train, test = split(self.pairs, SplitConfig(0.8, 0))
        self.assertEqual((len(train), len(test)), (110, 28))

    def test_partition(self):
        train, test = split(self.pairs, SplitConfig(0.8, 0))
        self.assertFalse(set(ids(train)) & set(ids(test)))
        self.assertEqual(sorted(ids(train) + ids(test)), ids(self.pairs))
        self.assertEqual(ids(train), sorted(ids(train)))

    def test_seeded(self):
        first = split(self.pairs, SplitConfig(0.8, 4))
        shuffled = list(reversed(self.pairs))
        second = split(shuffled, SplitConfig(0.8, 4))
        self.assertEqual(ids(first[0]), ids(second[0]))
        other = split(self.pairs, SplitConfig(0.8, 5))
        self.assertNotEqual(ids(first[1]), ids(other[1]))

    def test_small_sets(self):
        train, test = split(self.pairs[:2], SplitConfig(0.99, 0))
        self.assertEqual((len(train), len(test)), (1, 1))
        with self.assertRaises(DataError):
            split(self.pairs[:1], SplitConfig())

    def test_invalid_fraction(self):
        with self.assertRaises(ConfigError):
            SplitConfig(1.0).validate()
        with self.assertRaises(ConfigError):
            SplitConfig(0.0).validate()


class TestSampler(unittest.TestCase):
    def test_epoch_covers_every_sample(self):
        sampler = EpochBatchSampler(10, 3, seed=1)
        batches_ = list(sampler)
        self.assertEqual(len(sampler), 4)
        self.assertEqual([len(b) for b in batches_], [3, 3, 3, 1])
        self.assertEqual(sorted(i for b in batches_ for _, i in b), list(range(10)))
        self.assertTrue(all(epoch == 0 for b in batches_ for epoch, _ in b))

    def test_resume_continues_stream(self):
        full = list(EpochBatchSampler(10, 3, seed=2, num_batches=12))
        resumed = list(EpochBatchSampler(10, 3, seed=2, start_batch=5, num_batches=3))
        self.assertEqual(resumed, full[5:8])
        self.assertEqual(resumed[0][0][0], 1)

    def test_epochs_reshuffle(self):
        stream = list(EpochBatchSampler(20, 20, seed=0, num_batches=2))
        self.assertNotEqual([i for _, i in stream[0]], [i for _, i in stream[1]])

    def test_no_shuffle(self):
        stream = list(EpochBatchSampler(5, 2, shuffle=False))
        self.assertEqual([[i for _, i in b] for b in stream], [[0, 1], [2, 3], [4]])

    def test_invalid(self):
        with self.assertRaises(ValueError):
            EpochBatchSampler(0, 1)
        with self.assertRaises(ValueError):
            EpochBatchSampler(3, 0)


class TestSynthetic(unittest.TestCase):
    def setUp(self):
        self.run_path = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.run_path, ignore_errors=True)

    def test_deterministic(self):
        a, b = tiny_pairs(5), tiny_pairs(5)
        for x, y in zip(a, b):
            npt.assert_array_equal(x.image, y.image)
            npt.assert_array_equal(x.mask, y.mask)
        c = tiny_pairs(5, seed=1)
        self.assertFalse(np.array_equal(a[0].image, c[0].image))

    def test_sample_independent_of_count(self):
        npt.assert_array_equal(tiny_pairs(3)[2].image, tiny_pairs(8)[2].image)

    def test_mask_is_exact_rasterization(self):
        cfg = SynthConfig(count=1, size=64, seed=3)
        image, mask, ellipses = render_sample(cfg, 0)
        expected = np.zeros((64, 64), dtype=np.uint8)
        for e in ellipses:
            rr, cc = rasterize(e, 64)
            expected[rr, cc] = 255
        npt.assert_array_equal(mask, expected)
        self.assertEqual(image.dtype, np.uint8)

    def test_lungs_are_separate(self):
        for pair in synth_generate(SynthConfig(count=20, size=64)):
            left, right = pair.mask[:, :32], pair.mask[:, 32:]
            self.assertTrue(left.any() and right.any())
            coverage = (pair.mask > 0).mean()
            self.assertTrue(0.1 < coverage < 0.45, coverage)

    def test_lungs_differ_from_background(self):
        pair = synth_generate(SynthConfig(count=1, size=64, noise_level=0.0))[0]
        lung = pair.image[pair.mask > 0].astype(float).mean()
        outside = pair.image[:, :4].astype(float).mean()
        self.assertGreater(lung, outside + 30)

    def test_invalid_config(self):
        with self.assertRaises(ConfigError):
            SynthConfig(count=0).validate()
        with self.assertRaises(ConfigError):
            SynthConfig(size=16).validate()
        with self.assertRaises(ConfigError):
            SynthConfig(lung_center_x=[0.4, 0.45]).validate()

    def test_invalid_count_writes_nothing(self):
        out = os.path.join(self.run_path, "synth")
        with self.assertRaises(ConfigError):
            write_synthetic(SynthConfig(count=0), out)
        self.assertFalse(os.path.exists(out))

    def test_write_and_read(self):
        cfg = tiny_synth_config(count=6)
        written = write_synthetic(cfg, self.run_path)
        self.assertEqual(read_manifest(self.run_path), cfg)
        self.assertEqual(len(os.listdir(os.path.join(self.run_path, "images"))), 6)
        dataset = SyntheticLungs({"name": "synthetic", "dataroot": self.run_path}, {"image_size": 32})
        self.assertEqual(ids(dataset.all_pairs), ids(written))
        image, mask = dataset.all_pairs[0].load()
        npt.assert_array_equal(image, written[0].image)
        npt.assert_array_equal(mask, written[0].mask)

    def test_pairs_must_match_manifest(self):
        write_synthetic(tiny_synth_config(count=6), self.run_path)
        for sub_dir in ("images", "masks"):
            os.remove(os.path.join(self.run_path, sub_dir, "0003.png"))
        with self.assertRaises(DataError) as context:
            SyntheticLungs({"name": "synthetic", "dataroot": self.run_path}, {"image_size": 32})
        self.assertIn("manifest lists 6", str(context.exception))

    def test_broken_manifest(self):
        write_synthetic(tiny_synth_config(count=2), self.run_path)
        with open(os.path.join(self.run_path, "manifest.json"), "w") as f:
            f.write("{}")
        with self.assertRaises(DataError):
            SyntheticLungs({"name": "synthetic", "dataroot": self.run_path}, {"image_size": 32})


class TestFolderDatasets(unittest.TestCase):
    def setUp(self):
        self.run_path = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.run_path, ignore_errors=True)

    def test_montgomery_merges_masks(self):
        write_montgomery_tree(self.run_path, ["MCUCXR_000{}_0".format(i) for i in range(5)])
        dataset = Montgomery({"dataroot": self.run_path}, {"image_size": 32})
        self.assertEqual((len(dataset.train_dataset), len(dataset.test_dataset)), (4, 1))
        _, mask = dataset.all_pairs[0].load()
        npt.assert_array_equal(mask, np.maximum(half_lung(48, True), half_lung(48, False)))
        image, mask = dataset.test_dataset[0]
        self.assertEqual(image.shape, (1, 32, 32))
        self.assertEqual(set(torch.unique(mask).tolist()), {-1.0, 1.0})

    def test_shenzhen_unpaired(self):
        write_shenzhen_tree(self.run_path, ["a", "b", "c"], ["a", "b"])
        dataset = Shenzhen({"dataroot": self.run_path}, {"image_size": 32})
        self.assertTrue(dataset.eval_only)
        self.assertEqual(len(dataset.train_dataset), 0)
        self.assertEqual(dataset.test_dataset.ids, ["a", "b"])
        self.assertEqual(dataset.scan_result.unpaired_images, ["c"])
        with self.assertRaises(DataError):
            batches(dataset.train_dataset, 1, 0)

    def test_no_pairs(self):
        write_shenzhen_tree(self.run_path, ["a", "b"], [])
        os.makedirs(os.path.join(self.run_path, "mask"), exist_ok=True)
        with self.assertRaises(DataError) as context:
            Shenzhen({"dataroot": self.run_path}, {"image_size": 32})
        self.assertIn("2 unpaired images", str(context.exception))
        result = scan_dataset(
            os.path.join(self.run_path, "CXR_png"), [os.path.join(self.run_path, "mask")], allow_empty=True
        )
        self.assertEqual(result.pairs, [])

    def test_missing_directory(self):
        with self.assertRaises(DataError):
            Montgomery({"dataroot": os.path.join(self.run_path, "nothing")})

    def test_duplicate_stems(self):
        write_shenzhen_tree(self.run_path, ["a"], ["a"])
        shutil.copy(os.path.join(self.run_path, "CXR_png", "a.png"), os.path.join(self.run_path, "CXR_png", "a.PNG"))
        with self.assertRaises(DataError):
            scan_dataset(os.path.join(self.run_path, "CXR_png"), [os.path.join(self.run_path, "mask")])

    def test_mask_extent_mismatch(self):
        write_montgomery_tree(self.run_path, ["x", "y"])
        write_image(os.path.join(self.run_path, "ManualMask", "rightMask", "x.png"), half_lung(40, False))
        dataset = Montgomery({"dataroot": self.run_path, "eval_only": True}, {"image_size": 32})
        with self.assertRaises(DataError):
            dataset.select("all")[0]

    def test_factory(self):
        write_montgomery_tree(self.run_path, ["a", "b", "c"])
        cfg = OmegaConf.create({"class": "cxr.Montgomery", "task": "segmentation", "dataroot": self.run_path})
        self.assertIs(get_dataset_class(cfg), Montgomery)
        dataset = instantiate_dataset(cfg, {"image_size": 32})
        self.assertEqual(len(dataset.all_pairs), 3)
        with self.assertRaises(ConfigError):
            get_dataset_class({"class": "cxr.JSRT"})
        with self.assertRaises(ConfigError):
            get_dataset_class({"class": "Montgomery"})


class TestPairDataset(unittest.TestCase):
    def setUp(self):
        self.pairs = tiny_pairs(7)
        self.preprocessing = PreprocessingConfig(image_size=32)

    def test_items_without_augmentation(self):
        dataset = PairDataset(self.pairs, self.preprocessing)
        for i, pair in enumerate(self.pairs):
            image, mask = dataset[i]
            torch.testing.assert_close(image, normalize(pair.image))
            torch.testing.assert_close(mask, normalize(pair.mask))
            self.assertTrue(torch.equal(dataset[(3, i)][0], image))

    def test_augmentation_is_keyed(self):
        dataset = PairDataset(self.pairs, self.preprocessing, AugmentConfig(), seed=9)
        self.assertTrue(torch.equal(dataset[(2, 1)][0], dataset[(2, 1)][0]))
        self.assertFalse(torch.equal(dataset[(0, 1)][0], dataset[(1, 1)][0]))
        self.assertEqual(set(torch.unique(dataset[(1, 1)][1]).tolist()) - {-1.0, 1.0}, set())

    def test_batches(self):
        loader = batches(self.pairs, 3, shuffle_seed=0, preprocessing=self.preprocessing)
        shapes = [tuple(image.shape) for image, _ in loader]
        self.assertEqual(len(loader), 3)
        self.assertEqual(shapes, [(3, 1, 32, 32), (3, 1, 32, 32), (1, 1, 32, 32)])

    def test_parallel_loading_matches_serial(self):
        dataset = PairDataset(self.pairs, self.preprocessing, AugmentConfig(), seed=1)
        serial = list(batches(dataset, 2, shuffle_seed=4, num_batches=8))
        parallel = list(batches(dataset, 2, shuffle_seed=4, num_batches=8, num_workers=2))
        self.assertEqual(len(serial), len(parallel))
        for (a_image, a_mask), (b_image, b_mask) in zip(serial, parallel):
            self.assertTrue(torch.equal(a_image, b_image))
            self.assertTrue(torch.equal(a_mask, b_mask))

    def test_empty(self):
        with self.assertRaises(DataError):
            batches([], 1, 0)

    def test_base_dataset_split(self):
        dataset = SyntheticLungs({"name": "synthetic", "synth": {"count": 10, "size": 32}}, {"image_size": 32}, {})
        self.assertEqual((len(dataset.train_dataset), len(dataset.test_dataset)), (8, 2))
        self.assertIsNotNone(dataset.train_dataset.augment)
        self.assertIsNone(dataset.select("train").augment)
        self.assertEqual(len(dataset.select("all")), 10)
        with self.assertRaises(ValueError):
            dataset.select("validation")
        self.assertEqual(len(batches(dataset.train_dataset, 2, 0)), 4)


if __name__ == "__main__":
    unittest.main()
