import os
import logging
from typing import Dict, List

import numpy as np
import pandas as pd
import hydra

from torch_lungseg.applications.common import output_dir
from torch_lungseg.core.data_transform import (
    AffineParams,
    AugmentConfig,
    PreprocessingConfig,
    apply_affine,
    histogram,
    preprocess_pair,
    read_image,
    sample_affine,
    write_image,
)
from torch_lungseg.metrics.report import plot_histograms, plot_panels
from torch_lungseg.utils.config import get_or_default, to_dataclass

log = logging.getLogger(__name__)

AUGMENT_DIR = "augment"


def write_histogram_csv(img: np.ndarray, path: str) -> str:
    counts = histogram(img)
    pd.DataFrame({"intensity": np.arange(256), "count": counts}).to_csv(path, index=False)
    return path


def augment_variants(image: np.ndarray, mask: np.ndarray, augment: AugmentConfig, count: int, seed: int):
    """ ``count`` augmented copies of a pair, copy k drawn from ``default_rng([seed, k])`` """
    variants = []
    for k in range(count):
        params = sample_affine(np.random.default_rng([seed, k]), augment) if augment.enabled else AffineParams()
        variants.append(apply_affine(image, mask, params))
    return variants


def run_inspect(cfg) -> Dict[str, List[str]]:
    """ 256 bin histogram CSVs of the image and mask, a histogram figure and, with a mask, ``n_variants``
    augmented copies of the preprocessed pair plus their preview grid.
    """
    out = output_dir(cfg)
    paths = {"histograms": [], "variants": []}
    image_path = hydra.utils.to_absolute_path(cfg.image)
    image = read_image(image_path)
    mask_path = get_or_default(cfg, "mask", None)
    mask = read_image(hydra.utils.to_absolute_path(mask_path)) if mask_path else None

    for name, path, img in [("image", image_path, image), ("mask", mask_path, mask)]:
        if img is None:
            continue
        stem = os.path.splitext(os.path.basename(path))[0]
        csv_path = os.path.join(out, "{}_{}_histogram.csv".format(name, stem))
        paths["histograms"].append(write_histogram_csv(img, csv_path))
        log.info("%s %s: %ix%i, intensities %i to %i", name, stem, img.shape[1], img.shape[0], img.min(), img.max())
    paths["figure"] = [plot_histograms(image, mask, os.path.join(out, "histograms.png"))]

    count = int(get_or_default(cfg, "n_variants", 0))
    if mask is not None and count > 0:
        preprocessing = to_dataclass(cfg.preprocessing, PreprocessingConfig)
        augment = to_dataclass(cfg.augment, AugmentConfig)
        image, mask = preprocess_pair(image, mask, preprocessing)
        variants = augment_variants(image, mask, augment, count, cfg.seed)
        for k, (variant_image, variant_mask) in enumerate(variants):
            for kind, img in (("image", variant_image), ("mask", variant_mask)):
                path = os.path.join(out, AUGMENT_DIR, "{:03d}_{}.png".format(k, kind))
                write_image(path, img)
                paths["variants"].append(path)
        rows = [[image, mask]] + [list(v) for v in variants]
        paths["figure"].append(plot_panels(rows, ["Image", "Mask"], os.path.join(out, "augment_preview.png")))
    return paths
