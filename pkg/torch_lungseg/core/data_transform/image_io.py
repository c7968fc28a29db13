""" PNG decode / encode. Images are 2D uint8 numpy arrays (height, width). """
import io
import logging
import os

import numpy as np
from PIL import Image

from torch_lungseg.utils.errors import DecodeError

log = logging.getLogger(__name__)

_WIDE_MODES = ("I", "I;16", "I;16B", "I;16L", "I;16N", "F")


def _to_gray(image: Image.Image) -> np.ndarray:
    if image.mode == "L":
        return np.array(image, dtype=np.uint8)
    if image.mode in _WIDE_MODES:
        arr = np.asarray(image, dtype=np.float64)
        peak = 65535.0 if arr.max() > 255 else 255.0
        return np.clip(np.rint(arr / peak * 255.0), 0, 255).astype(np.uint8)
    # ITU-R BT.601 luma: L = 0.299 R + 0.587 G + 0.114 B, alpha dropped
    if image.mode in ("RGBA", "LA", "PA"):
        image = image.convert("RGB" if image.mode != "LA" else "L")
    return np.array(image.convert("L"), dtype=np.uint8)


def decode_png(data: bytes, name: str = "<bytes>") -> np.ndarray:
    try:
        with Image.open(io.BytesIO(data)) as image:
            image.load()
            return _to_gray(image)
    except (OSError, SyntaxError, ValueError, EOFError) as e:
        raise DecodeError("Could not decode image {}: {}".format(name, e)) from e


def encode_png(img: np.ndarray) -> bytes:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("Expected a 2D grayscale image, got shape {}".format(img.shape))
    buffer = io.BytesIO()
    Image.fromarray(img.astype(np.uint8), mode="L").save(buffer, format="PNG")
    return buffer.getvalue()


def read_image(path: str) -> np.ndarray:
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise DecodeError("Could not read {}: {}".format(path, e)) from e
    return decode_png(data, name=path)


def write_image(path: str, img: np.ndarray):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, "wb") as f:
        f.write(encode_png(img))
