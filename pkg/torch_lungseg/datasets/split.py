import math
import logging
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from sklearn.model_selection import train_test_split

from torch_lungseg.utils.errors import ConfigError, DataError

log = logging.getLogger(__name__)


@dataclass
class SplitConfig:
    train_fraction: float = 0.8
    seed: int = 0

    def validate(self):
        if not 0 < self.train_fraction < 1:
            raise ConfigError("train_fraction must be in (0, 1), got {}".format(self.train_fraction))
        if self.seed < 0:
            raise ConfigError("The split seed must be non negative, got {}".format(self.seed))

    def train_size(self, n: int) -> int:
        """ floor(train_fraction * n), kept within [1, n - 1] so both sides are non empty """
        return min(max(math.floor(self.train_fraction * n + 1e-9), 1), n - 1)


def split(pairs: Sequence, config: SplitConfig) -> Tuple[List, List]:
    """ Seeded shuffle of the pairs sorted by id, first train_size(N) go to train.
    Pairs only need an ``id`` attribute.
    """
    if len(pairs) < 2:
        raise DataError("At least 2 pairs are needed to split, got {}".format(len(pairs)))
    ordered = sorted(pairs, key=lambda p: p.id)
    n_train = config.train_size(len(ordered))
    train, test = train_test_split(
        ordered, train_size=n_train, test_size=len(ordered) - n_train, random_state=config.seed, shuffle=True
    )
    train = sorted(train, key=lambda p: p.id)
    test = sorted(test, key=lambda p: p.id)
    log.info("Split %i pairs into %i train / %i test (seed %i)", len(ordered), len(train), len(test), config.seed)
    return train, test
