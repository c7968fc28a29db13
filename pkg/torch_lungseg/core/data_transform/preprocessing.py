import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import torch
from skimage.transform import resize as sk_resize

from torch_lungseg.core.data_transform.histogram_equalization import clahe
from torch_lungseg.utils.enums import Interpolation
from torch_lungseg.utils.errors import ConfigError

log = logging.getLogger(__name__)


@dataclass
class PreprocessingConfig:
    image_size: int = 256
    clahe: bool = False
    clip_limit: float = 2.0
    tiles: List[int] = field(default_factory=lambda: [8, 8])

    def validate(self):
        if self.image_size < 1:
            raise ConfigError("image_size must be positive, got {}".format(self.image_size))
        if self.clip_limit <= 0:
            raise ConfigError("clip_limit must be positive, got {}".format(self.clip_limit))
        if len(self.tiles) != 2 or min(self.tiles) < 1:
            raise ConfigError("tiles must hold two positive integers, got {}".format(self.tiles))


def resize(img: np.ndarray, width: int, height: int, method="bilinear") -> np.ndarray:
    """ Pixel centers sit at half-integer positions; bilinear results are rounded half to even,
    so a 2x2 [0, 255; 255, 0] checkerboard becomes 128.
    """
    method = Interpolation(method)
    if width < 1 or height < 1:
        raise ValueError("Target extents must be positive, got {}x{}".format(width, height))
    if img.shape == (height, width):
        return img.copy()
    order = 1 if method == Interpolation.BILINEAR else 0
    out = sk_resize(img, (height, width), order=order, mode="edge", anti_aliasing=False, preserve_range=True)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def binarize_mask(mask: np.ndarray) -> np.ndarray:
    """ {0, 255} mask, any value above 127 is foreground """
    return np.where(mask > 127, 255, 0).astype(np.uint8)


def preprocess_pair(
    image: np.ndarray, mask: Optional[np.ndarray], cfg: PreprocessingConfig
) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    size = cfg.image_size
    image = resize(image, size, size, Interpolation.BILINEAR)
    if cfg.clahe:
        image = clahe(image, cfg.clip_limit, tuple(cfg.tiles))
    if mask is not None:
        mask = binarize_mask(resize(binarize_mask(mask), size, size, Interpolation.NEAREST))
    return image, mask


def normalize(img: np.ndarray) -> torch.Tensor:
    """ uint8 (H, W) -> float32 (1, H, W) in [-1, 1] with p / 127.5 - 1 """
    arr = np.asarray(img, dtype=np.float32) / np.float32(127.5) - np.float32(1.0)
    return torch.from_numpy(arr[None])


def denormalize(t: torch.Tensor) -> np.ndarray:
    """ Inverse of normalize after clamping to [-1, 1], rounded half to even """
    arr = t.detach().cpu().numpy() if torch.is_tensor(t) else np.asarray(t)
    arr = np.squeeze(arr)
    if arr.ndim != 2:
        raise ValueError("Expected a single channel image, got shape {}".format(arr.shape))
    arr = (np.clip(arr, -1.0, 1.0) + 1.0) * 127.5
    return np.clip(np.rint(arr), 0, 255).astype(np.uint8)


def histogram(img: np.ndarray) -> np.ndarray:
    return np.bincount(np.asarray(img, dtype=np.uint8).ravel(), minlength=256)


def diff_image(gt: np.ndarray, pred: np.ndarray) -> np.ndarray:
    if gt.shape != pred.shape:
        raise ValueError("Cannot diff images of shapes {} and {}".format(gt.shape, pred.shape))
    return np.abs(gt.astype(np.int16) - pred.astype(np.int16)).astype(np.uint8)
