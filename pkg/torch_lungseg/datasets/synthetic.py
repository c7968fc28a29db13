""" Synthetic chest radiographs: two filled ellipses as lungs on a darker noisy background with a bright
central band. The mask is the exact rasterization of the two ellipses.
"""
import os
import json
import logging
from dataclasses import dataclass, field, asdict
from typing import Dict, List, Tuple

import numpy as np
from skimage.draw import ellipse

from torch_lungseg.core.data_transform import write_image
from torch_lungseg.datasets.base_dataset import SamplePair
from torch_lungseg.utils.colors import COLORS, colored_print
from torch_lungseg.utils.errors import ConfigError, DataError

log = logging.getLogger(__name__)

MANIFEST_NAME = "manifest.json"
IMAGE_DIR = "images"
MASK_DIR = "masks"
SOURCE = "synthetic"


@dataclass
class SynthConfig:
    """ Geometry ranges are fractions of the image size, levels are 8 bit intensities """

    count: int = 200
    size: int = 64
    noise_level: float = 0.02
    seed: int = 0
    lung_center_x: List[float] = field(default_factory=lambda: [0.27, 0.33])
    lung_center_y: List[float] = field(default_factory=lambda: [0.45, 0.55])
    semi_axis_x: List[float] = field(default_factory=lambda: [0.11, 0.16])
    semi_axis_y: List[float] = field(default_factory=lambda: [0.25, 0.36])
    max_rotation: float = 0.15  # radians
    lung_level: List[float] = field(default_factory=lambda: [110.0, 170.0])
    lung_gradient: float = 30.0
    background_level: List[float] = field(default_factory=lambda: [30.0, 60.0])
    background_gradient: float = 20.0
    mediastinum_level: List[float] = field(default_factory=lambda: [200.0, 230.0])
    mediastinum_half_width: float = 0.06

    def validate(self):
        if self.count < 1:
            raise ConfigError("count must be at least 1, got {}".format(self.count))
        if self.size < 32:
            raise ConfigError("size must be at least 32, got {}".format(self.size))
        if self.noise_level < 0:
            raise ConfigError("noise_level must be non negative, got {}".format(self.noise_level))
        for name in (
            "lung_center_x",
            "lung_center_y",
            "semi_axis_x",
            "semi_axis_y",
            "lung_level",
            "background_level",
            "mediastinum_level",
        ):
            low_high = getattr(self, name)
            if len(low_high) != 2 or low_high[0] > low_high[1]:
                raise ConfigError("{} must be a [low, high] range, got {}".format(name, low_high))
        # the left lung must stay left of the midline whatever its rotation
        a, b = self.semi_axis_x[1], self.semi_axis_y[1]
        half_extent = np.sqrt((a * np.cos(self.max_rotation)) ** 2 + (b * np.sin(self.max_rotation)) ** 2)
        if self.lung_center_x[1] + half_extent >= 0.5:
            raise ConfigError("Lung ranges let the two lungs overlap")


def _draw(rng: np.random.Generator, low_high) -> float:
    return float(rng.uniform(low_high[0], low_high[1]))


def _lung_ellipses(rng: np.random.Generator, cfg: SynthConfig) -> List[Dict[str, float]]:
    scale = cfg.size - 1
    ellipses = []
    for side in ("left", "right"):
        center_x = _draw(rng, cfg.lung_center_x) * scale
        if side == "right":
            center_x = scale - center_x
        ellipses.append(
            {
                "center_row": _draw(rng, cfg.lung_center_y) * scale,
                "center_col": center_x,
                "radius_row": _draw(rng, cfg.semi_axis_y) * scale,
                "radius_col": _draw(rng, cfg.semi_axis_x) * scale,
                "rotation": float(rng.uniform(-cfg.max_rotation, cfg.max_rotation)),
            }
        )
    return ellipses


def rasterize(e: Dict[str, float], size: int) -> Tuple[np.ndarray, np.ndarray]:
    return ellipse(
        e["center_row"], e["center_col"], e["radius_row"], e["radius_col"], shape=(size, size), rotation=e["rotation"]
    )


def render_sample(cfg: SynthConfig, index: int) -> Tuple[np.ndarray, np.ndarray, List[Dict[str, float]]]:
    """ (uint8 image, {0, 255} mask, lung ellipses) of sample ``index``, a pure function of (cfg.seed, index) """
    rng = np.random.default_rng([cfg.seed, index])
    size = cfg.size
    rows = np.arange(size, dtype=np.float64)[:, None] / max(size - 1, 1)

    image = np.empty((size, size), dtype=np.float64)
    image[:] = _draw(rng, cfg.background_level) + cfg.background_gradient * (rows - 0.5)

    half_width = cfg.mediastinum_half_width * size
    center = (size - 1) / 2.0
    band = np.abs(np.arange(size) - center) <= half_width
    image[:, band] = _draw(rng, cfg.mediastinum_level)

    mask = np.zeros((size, size), dtype=np.uint8)
    ellipses = _lung_ellipses(rng, cfg)
    for e in ellipses:
        rr, cc = rasterize(e, size)
        level = _draw(rng, cfg.lung_level)
        image[rr, cc] = level + cfg.lung_gradient * ((rr - e["center_row"]) / (2 * e["radius_row"]))
        mask[rr, cc] = 255

    if cfg.noise_level > 0:
        image += rng.normal(0.0, cfg.noise_level * 255.0, size=image.shape)
    image = np.clip(np.rint(image), 0, 255).astype(np.uint8)
    return image, mask, ellipses


def synth_generate(cfg: SynthConfig) -> List[SamplePair]:
    cfg.validate()
    pairs = []
    for index in range(cfg.count):
        image, mask, _ = render_sample(cfg, index)
        pairs.append(SamplePair(id="{:04d}".format(index), source=SOURCE, image=image, mask=mask))
    return pairs


def write_synthetic(cfg: SynthConfig, output_dir: str) -> List[SamplePair]:
    """ Writes images/NNNN.png, masks/NNNN.png and manifest.json. The configuration is validated
    before anything touches the disk.
    """
    cfg.validate()
    try:
        for sub_dir in (IMAGE_DIR, MASK_DIR):
            os.makedirs(os.path.join(output_dir, sub_dir), exist_ok=True)
    except OSError as e:
        raise DataError("Cannot write the synthetic dataset to {}: {}".format(output_dir, e)) from e

    pairs = synth_generate(cfg)
    for pair in pairs:
        pair.image_path = os.path.join(output_dir, IMAGE_DIR, pair.id + ".png")
        pair.mask_paths = [os.path.join(output_dir, MASK_DIR, pair.id + ".png")]
        write_image(pair.image_path, pair.image)
        write_image(pair.mask_paths[0], pair.mask)
    with open(os.path.join(output_dir, MANIFEST_NAME), "w") as f:
        json.dump({"generator": SOURCE, "config": asdict(cfg)}, f, indent=2, sort_keys=True)
    colored_print(COLORS.SYNTH_COLOR, "Wrote {} synthetic pairs to {}".format(len(pairs), output_dir))
    return pairs


def read_manifest(dataset_dir: str) -> SynthConfig:
    path = os.path.join(dataset_dir, MANIFEST_NAME)
    try:
        with open(path, "r") as f:
            return SynthConfig(**json.load(f)["config"])
    except (OSError, KeyError, TypeError, ValueError) as e:
        raise DataError("Invalid synthetic manifest {}: {}".format(path, e)) from e
