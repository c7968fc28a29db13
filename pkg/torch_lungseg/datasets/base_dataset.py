import logging
from abc import abstractmethod
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import torch
from torch.utils.data import DataLoader, Dataset

from torch_lungseg.core.data_transform import (
    AugmentConfig,
    PreprocessingConfig,
    apply_affine,
    binarize_mask,
    normalize,
    preprocess_pair,
    read_image,
    sample_affine,
)
from torch_lungseg.datasets.samplers import EpochBatchSampler
from torch_lungseg.datasets.split import SplitConfig, split
from torch_lungseg.utils.colors import COLORS, colored_print
from torch_lungseg.utils.config import get_or_default, to_dataclass
from torch_lungseg.utils.errors import DataError

log = logging.getLogger(__name__)


@dataclass
class SamplePair:
    """ A radiograph and its lung mask. Either backed by files (masks of several
    directories are merged by union) or held in memory.
    """

    id: str
    source: str = ""
    image_path: Optional[str] = None
    mask_paths: List[str] = field(default_factory=list)
    image: Optional[np.ndarray] = None
    mask: Optional[np.ndarray] = None

    def load(self) -> Tuple[np.ndarray, Optional[np.ndarray]]:
        image = self.image if self.image is not None else read_image(self.image_path)
        mask = self.mask
        if mask is None and self.mask_paths:
            masks = [binarize_mask(read_image(path)) for path in self.mask_paths]
            for other, path in zip(masks[1:], self.mask_paths[1:]):
                if other.shape != masks[0].shape:
                    raise DataError(
                        "Mask {} has extents {}, expected {}".format(path, other.shape, masks[0].shape)
                    )
            mask = np.maximum.reduce(masks)
        if mask is not None and mask.shape != image.shape:
            raise DataError("Sample {}: mask extents {} differ from image extents {}".format(self.id, mask.shape, image.shape))
        return image, mask


Key = Union[int, Tuple[int, int]]


class PairDataset(Dataset):
    """ Torch dataset of preprocessed (image, mask) tensors in [-1, 1], both shaped (1, H, W).

    Items are addressed by ``index`` or ``(epoch, index)``. When an AugmentConfig is given, the random
    affine of an item is drawn from ``default_rng([seed, epoch, index])`` so the stream only depends on
    the seeds, never on the loading order or the number of workers.
    """

    def __init__(
        self,
        pairs: Sequence[SamplePair],
        preprocessing: Optional[PreprocessingConfig] = None,
        augment: Optional[AugmentConfig] = None,
        seed: int = 0,
        name: str = "",
        cache: bool = True,
    ):
        self.pairs = list(pairs)
        self.preprocessing = preprocessing or PreprocessingConfig()
        self.augment = augment if augment is not None and augment.enabled else None
        self.seed = seed
        self.name = name
        self._cache = {} if cache else None

    def __len__(self):
        return len(self.pairs)

    @property
    def ids(self):
        return [p.id for p in self.pairs]

    def preprocessed(self, index: int) -> Tuple[np.ndarray, np.ndarray]:
        """ uint8 image and {0, 255} mask at model resolution, before augmentation """
        if self._cache is not None and index in self._cache:
            return self._cache[index]
        pair = self.pairs[index]
        image, mask = pair.load()
        if mask is None:
            raise DataError("Sample {} has no mask".format(pair.id))
        out = preprocess_pair(image, mask, self.preprocessing)
        if self._cache is not None:
            self._cache[index] = out
        return out

    def augmented(self, epoch: int, index: int) -> Tuple[np.ndarray, np.ndarray]:
        image, mask = self.preprocessed(index)
        if self.augment is None:
            return image, mask
        rng = np.random.default_rng([self.seed, epoch, index])
        return apply_affine(image, mask, sample_affine(rng, self.augment))

    def __getitem__(self, key: Key) -> Tuple[torch.Tensor, torch.Tensor]:
        epoch, index = key if isinstance(key, tuple) else (0, key)
        image, mask = self.augmented(epoch, index)
        return normalize(image), normalize(mask)

    def __repr__(self):
        return "{}(name={}, size={}, augment={})".format(
            self.__class__.__name__, self.name, len(self), self.augment is not None
        )


def batches(
    pairs: Sequence[SamplePair],
    batch_size: int,
    shuffle_seed: int,
    augment: Optional[AugmentConfig] = None,
    preprocessing: Optional[PreprocessingConfig] = None,
    shuffle: bool = True,
    start_batch: int = 0,
    num_batches: Optional[int] = None,
    num_workers: int = 0,
) -> DataLoader:
    """ Batches of (image, mask) tensors shaped (B, 1, H, W). Epochs are reshuffled from (shuffle_seed, epoch);
    with ``num_workers > 0`` samples are prepared ahead by worker processes, the stream stays identical.
    """
    dataset = pairs if isinstance(pairs, PairDataset) else PairDataset(pairs, preprocessing, augment, shuffle_seed)
    if len(dataset) == 0:
        raise DataError("Cannot batch an empty set of pairs")
    sampler = EpochBatchSampler(
        len(dataset), batch_size, seed=shuffle_seed, shuffle=shuffle, start_batch=start_batch, num_batches=num_batches
    )
    return DataLoader(dataset, batch_sampler=sampler, num_workers=num_workers)


class BaseDataset:
    """ A collection of pairs split into train and test PairDatasets.

    Subclasses implement ``scan`` returning the pairs. Dataset options:
        - name: tag carried by the reports
        - dataroot: root directory of the data
        - eval_only: every pair goes to the test set, no training set
        - train_fraction / split_seed: the train / test split
    """

    def __init__(self, dataset_opt, preprocessing=None, augment=None):
        self.dataset_opt = dataset_opt
        self.name = get_or_default(dataset_opt, "name", self.__class__.__name__.lower())
        self.preprocessing = to_dataclass(preprocessing, PreprocessingConfig)
        self.augment = to_dataclass(augment, AugmentConfig) if augment is not None else None
        self.eval_only = bool(get_or_default(dataset_opt, "eval_only", False))
        self.split_config = to_dataclass(
            {
                "train_fraction": get_or_default(dataset_opt, "train_fraction", 0.8),
                "seed": get_or_default(dataset_opt, "split_seed", 0),
            },
            SplitConfig,
        )

        pairs = self.scan()
        if not pairs:
            raise DataError("Dataset {} holds no pairs".format(self.name))
        self.all_pairs = sorted(pairs, key=lambda p: p.id)
        if self.eval_only:
            train_pairs, test_pairs = [], self.all_pairs
        else:
            train_pairs, test_pairs = split(self.all_pairs, self.split_config)
        self.train_dataset = PairDataset(
            train_pairs, self.preprocessing, self.augment, self.split_config.seed, name="train"
        )
        self.test_dataset = PairDataset(test_pairs, self.preprocessing, None, self.split_config.seed, name="test")

    @property
    def dataroot(self):
        return get_or_default(self.dataset_opt, "dataroot", "")

    @abstractmethod
    def scan(self) -> List[SamplePair]:
        raise NotImplementedError

    def select(self, selection: str = "test") -> PairDataset:
        """ train, test or all, never augmented """
        if selection == "train":
            return PairDataset(self.train_dataset.pairs, self.preprocessing, None, self.split_config.seed, name="train")
        if selection == "test":
            return self.test_dataset
        if selection == "all":
            return PairDataset(self.all_pairs, self.preprocessing, None, self.split_config.seed, name="all")
        raise ValueError("Unknown selection {}, expected train, test or all".format(selection))

    def __repr__(self):
        message = "Dataset: %s \n" % self.__class__.__name__
        message += "name = {}, pairs = {}, train = {}, test = {}\n".format(
            self.name, len(self.all_pairs), len(self.train_dataset), len(self.test_dataset)
        )
        message += "preprocessing = {}\n".format(self.preprocessing)
        message += "augment = {}".format(self.augment)
        return message

    def log_summary(self):
        colored_print(COLORS.TEST_COLOR, str(self))
