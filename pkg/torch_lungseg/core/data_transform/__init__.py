from .image_io import decode_png, encode_png, read_image, write_image
from .preprocessing import (
    PreprocessingConfig,
    resize,
    binarize_mask,
    preprocess_pair,
    normalize,
    denormalize,
    histogram,
    diff_image,
)
from .histogram_equalization import clahe
from .augment import AugmentConfig, AffineParams, sample_affine, apply_affine
