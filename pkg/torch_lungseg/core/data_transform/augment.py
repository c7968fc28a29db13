""" Random geometric augmentation applied jointly to a radiograph and its mask """
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy import ndimage

from torch_lungseg.utils.errors import ConfigError

log = logging.getLogger(__name__)


@dataclass
class AugmentConfig:
    enabled: bool = True
    rotation_range_deg: float = 5.0
    width_shift_frac: float = 0.05
    height_shift_frac: float = 0.05
    shear_range: float = 0.01  # radians
    zoom_range: List[float] = field(default_factory=lambda: [0.8, 1.2])
    horizontal_flip: bool = True
    vertical_flip: bool = False
    fill_mode: str = "nearest"
    isotropic_zoom: bool = True

    def validate(self):
        ranges = [self.rotation_range_deg, self.width_shift_frac, self.height_shift_frac, self.shear_range]
        if min(ranges) < 0:
            raise ConfigError("Augmentation ranges must be non negative, got {}".format(ranges))
        if len(self.zoom_range) != 2 or not 0 < self.zoom_range[0] <= self.zoom_range[1]:
            raise ConfigError("zoom_range must satisfy 0 < low <= high, got {}".format(self.zoom_range))
        if self.fill_mode != "nearest":
            raise ConfigError("Only the 'nearest' fill mode is supported, got {}".format(self.fill_mode))

    @classmethod
    def identity(cls):
        return cls(
            rotation_range_deg=0.0,
            width_shift_frac=0.0,
            height_shift_frac=0.0,
            shear_range=0.0,
            zoom_range=[1.0, 1.0],
            horizontal_flip=False,
            vertical_flip=False,
        )


@dataclass
class AffineParams:
    rotation_deg: float = 0.0
    shift_x_frac: float = 0.0
    shift_y_frac: float = 0.0
    shear: float = 0.0
    zoom_x: float = 1.0
    zoom_y: float = 1.0
    flip_h: bool = False
    flip_v: bool = False

    @property
    def is_identity(self) -> bool:
        return (
            self.rotation_deg == 0
            and self.shift_x_frac == 0
            and self.shift_y_frac == 0
            and self.shear == 0
            and self.zoom_x == 1
            and self.zoom_y == 1
            and not self.flip_h
            and not self.flip_v
        )

    def within(self, cfg: AugmentConfig) -> bool:
        low, high = cfg.zoom_range
        return (
            abs(self.rotation_deg) <= cfg.rotation_range_deg
            and abs(self.shift_x_frac) <= cfg.width_shift_frac
            and abs(self.shift_y_frac) <= cfg.height_shift_frac
            and abs(self.shear) <= cfg.shear_range
            and low <= self.zoom_x <= high
            and low <= self.zoom_y <= high
            and (cfg.horizontal_flip or not self.flip_h)
            and (cfg.vertical_flip or not self.flip_v)
        )


def _uniform(rng: np.random.Generator, low: float, high: float) -> float:
    # one draw per field whatever the range, so streams stay aligned across configs
    u = rng.random()
    return low + (high - low) * u if high > low else low


def sample_affine(rng: np.random.Generator, cfg: AugmentConfig) -> AffineParams:
    rotation = _uniform(rng, -cfg.rotation_range_deg, cfg.rotation_range_deg)
    shift_x = _uniform(rng, -cfg.width_shift_frac, cfg.width_shift_frac)
    shift_y = _uniform(rng, -cfg.height_shift_frac, cfg.height_shift_frac)
    shear = _uniform(rng, -cfg.shear_range, cfg.shear_range)
    low, high = cfg.zoom_range
    zoom_x = _uniform(rng, low, high)
    zoom_y = _uniform(rng, low, high)
    if cfg.isotropic_zoom:
        zoom_y = zoom_x
    flip_h = bool(rng.random() < 0.5) and cfg.horizontal_flip
    flip_v = bool(rng.random() < 0.5) and cfg.vertical_flip
    return AffineParams(rotation, shift_x, shift_y, shear, zoom_x, zoom_y, flip_h, flip_v)


def affine_matrix(p: AffineParams, shape: Tuple[int, int]) -> Tuple[np.ndarray, np.ndarray]:
    """ Output-to-input mapping in (row, col) coordinates, as consumed by scipy.ndimage.affine_transform.

    The forward transform acts on (x, y) about the image center: rotation, then shear, then zoom
    (flips are negative zooms), then translation.
    """
    h, w = shape
    theta = np.deg2rad(p.rotation_deg)
    rotation = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
    shear = np.array([[1.0, -np.sin(p.shear)], [0.0, np.cos(p.shear)]])
    zoom = np.diag([p.zoom_x * (-1.0 if p.flip_h else 1.0), p.zoom_y * (-1.0 if p.flip_v else 1.0)])
    forward = zoom @ shear @ rotation
    inverse = np.linalg.inv(forward)

    center = np.array([(w - 1) / 2.0, (h - 1) / 2.0])
    translation = np.array([p.shift_x_frac * w, p.shift_y_frac * h])
    offset_xy = center - inverse @ (center + translation)

    swap = np.array([[0.0, 1.0], [1.0, 0.0]])
    return swap @ inverse @ swap, swap @ offset_xy


def apply_affine(img: np.ndarray, mask: np.ndarray, p: AffineParams) -> Tuple[np.ndarray, np.ndarray]:
    """ Bilinear for the image, nearest for the mask, out of bounds samples take the nearest edge pixel """
    if img.shape != mask.shape:
        raise ValueError("Image and mask extents differ: {} vs {}".format(img.shape, mask.shape))
    if p.is_identity:
        return img.copy(), mask.copy()
    matrix, offset = affine_matrix(p, img.shape)
    warped = ndimage.affine_transform(
        img.astype(np.float64), matrix, offset=offset, order=1, mode="nearest", prefilter=False
    )
    warped_mask = ndimage.affine_transform(
        mask.astype(np.float64), matrix, offset=offset, order=0, mode="nearest", prefilter=False
    )
    return (
        np.clip(np.rint(warped), 0, 255).astype(img.dtype),
        warped_mask.astype(mask.dtype),
    )
