""" Contrast limited adaptive histogram equalization on 8-bit images, backed by OpenCV """
import math
from typing import Optional, Tuple

import cv2
import numpy as np


def clahe(img: np.ndarray, clip_limit: Optional[float] = 2.0, tiles: Tuple[int, int] = (8, 8)) -> np.ndarray:
    """ ``tiles`` is (tiles along x, tiles along y). ``clip_limit`` is relative to a uniform histogram: a bin is
    clipped at max(1, clip_limit * tile_pixels / 256). ``None`` or ``inf`` disables clipping.
    Images holding a single gray level are returned unchanged.
    """
    tiles_x, tiles_y = int(tiles[0]), int(tiles[1])
    if tiles_x < 1 or tiles_y < 1:
        raise ValueError("Tile counts must be positive, got {}".format(tiles))
    if clip_limit is not None and not clip_limit > 0:
        raise ValueError("clip_limit must be positive, got {}".format(clip_limit))
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("Expected a 2D grayscale image, got shape {}".format(img.shape))
    h, w = img.shape
    if h < tiles_y or w < tiles_x:
        raise ValueError("Image {}x{} is smaller than the {}x{} tile grid".format(w, h, tiles_x, tiles_y))
    if img.min() == img.max():
        return img.astype(np.uint8)

    # a non positive clipLimit turns clipping off in OpenCV
    limit = 0.0 if clip_limit is None or not math.isfinite(clip_limit) else float(clip_limit)
    equalizer = cv2.createCLAHE(clipLimit=limit, tileGridSize=(tiles_x, tiles_y))
    return equalizer.apply(np.ascontiguousarray(img, dtype=np.uint8))
