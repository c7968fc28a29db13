from dataclasses import dataclass, asdict

from torch_lungseg.utils.config import fingerprint
from torch_lungseg.utils.enums import InferenceMode
from torch_lungseg.utils.errors import ConfigError

ARCHITECTURE_FIELDS = ("image_size", "in_channels", "base_channels", "depth", "dropout_up_blocks")


@dataclass
class ModelConfig:
    image_size: int = 256
    in_channels: int = 1
    base_channels: int = 64
    depth: int = 8
    lambda_l1: float = 100.0
    lr: float = 2e-4
    beta1: float = 0.5
    beta2: float = 0.999
    optimizer: str = "Adam"
    dropout_up_blocks: int = 3
    dropout: float = 0.5
    bn_momentum: float = 0.99
    bn_eps: float = 1e-3
    init_gain: float = 0.02
    seed: int = 0
    inference_mode: str = "eval"
    threshold: float = 0.0

    def validate(self):
        if self.depth < 1:
            raise ConfigError("depth must be at least 1, got {}".format(self.depth))
        if self.image_size != 2 ** self.depth:
            raise ConfigError(
                "image_size must equal 2^depth so the bottleneck reaches 1x1, got image_size={} and depth={}".format(
                    self.image_size, self.depth
                )
            )
        if self.image_size < 32:
            raise ConfigError("image_size must be at least 32 for the patch discriminator, got {}".format(self.image_size))
        if self.base_channels < 1 or self.in_channels < 1:
            raise ConfigError("Channel counts must be positive")
        if self.lambda_l1 < 0:
            raise ConfigError("lambda_l1 must be non negative, got {}".format(self.lambda_l1))
        if not 0 <= self.dropout_up_blocks <= self.depth - 1:
            raise ConfigError("dropout_up_blocks must be in [0, {}], got {}".format(self.depth - 1, self.dropout_up_blocks))
        try:
            InferenceMode(self.inference_mode)
        except ValueError:
            raise ConfigError("inference_mode must be 'eval' or 'train', got {}".format(self.inference_mode))

    @property
    def architecture_fingerprint(self) -> str:
        config = asdict(self)
        return fingerprint({key: config[key] for key in ARCHITECTURE_FIELDS})

    def encoder_channels(self):
        return [self.base_channels * min(2 ** i, 8) for i in range(self.depth)]
