from typing import Optional

import numpy as np
from torch.utils.data import Sampler


class EpochBatchSampler(Sampler):
    r"""Yields batches of ``(epoch, index)`` keys over an endless sequence of epochs.

    Each epoch is a permutation of the samples drawn from ``default_rng([seed, epoch])``, cut into batches
    of ``batch_size`` (the last one may be smaller). Global batch ``b`` is therefore fully determined by
    ``(seed, b)``, which lets a resumed run start at ``start_batch`` and see the same stream as an
    uninterrupted one. Without ``num_batches`` the sampler covers the rest of the epoch ``start_batch``
    falls in.
    """

    def __init__(
        self,
        num_samples: int,
        batch_size: int,
        seed: int = 0,
        shuffle: bool = True,
        start_batch: int = 0,
        num_batches: Optional[int] = None,
    ):
        if num_samples < 1:
            raise ValueError("Cannot sample batches from an empty dataset")
        if batch_size < 1:
            raise ValueError("batch_size must be at least 1, got {}".format(batch_size))
        self.num_samples = num_samples
        self.batch_size = batch_size
        self.seed = seed
        self.shuffle = shuffle
        self.start_batch = start_batch
        self.batches_per_epoch = -(-num_samples // batch_size)
        if num_batches is None:
            num_batches = self.batches_per_epoch - start_batch % self.batches_per_epoch
        self.num_batches = num_batches

    def epoch_order(self, epoch: int) -> np.ndarray:
        if not self.shuffle:
            return np.arange(self.num_samples)
        return np.random.default_rng([self.seed, epoch]).permutation(self.num_samples)

    def __iter__(self):
        order, order_epoch = None, None
        for batch in range(self.start_batch, self.start_batch + self.num_batches):
            epoch, position = divmod(batch, self.batches_per_epoch)
            if epoch != order_epoch:
                order, order_epoch = self.epoch_order(epoch), epoch
            indices = order[position * self.batch_size : (position + 1) * self.batch_size]
            yield [(epoch, int(i)) for i in indices]

    def __len__(self):
        return self.num_batches

    def __repr__(self):
        return "{}(num_samples={}, batch_size={}, shuffle={}, start_batch={}, num_batches={})".format(
            self.__class__.__name__,
            self.num_samples,
            self.batch_size,
            self.shuffle,
            self.start_batch,
            self.num_batches,
        )
