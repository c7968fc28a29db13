import os
import logging
from typing import Dict

import hydra

from torch_lungseg.applications.common import load_trained_model, output_dir
from torch_lungseg.core.data_transform import denormalize, normalize, preprocess_pair, read_image, write_image
from torch_lungseg.trainer import select_device
from torch_lungseg.utils.colors import COLORS, colored_print
from torch_lungseg.utils.config import configure_torch, get_or_default

log = logging.getLogger(__name__)


def run_predict(cfg) -> Dict[str, str]:
    """ Writes ``<stem>_mask.png``, a {0, 255} mask at model resolution, and ``<stem>_raw.png``, the tanh
    output rescaled to 8 bit, when ``save_raw`` is set.
    """
    out = output_dir(cfg)
    configure_torch(get_or_default(cfg, "num_threads", 0), True)
    image_path = hydra.utils.to_absolute_path(cfg.image)
    image = read_image(image_path)
    model, preprocessing, _ = load_trained_model(cfg, select_device(get_or_default(cfg, "cuda", False)))

    image, _ = preprocess_pair(image, None, preprocessing)
    mask, raw = model.predict_mask(
        normalize(image),
        threshold=get_or_default(cfg, "threshold", None),
        inference_mode=get_or_default(cfg, "inference_mode", None),
    )

    stem = os.path.splitext(os.path.basename(image_path))[0]
    paths = {"mask": os.path.join(out, "{}_mask.png".format(stem))}
    write_image(paths["mask"], mask[0, 0].cpu().numpy().astype("uint8") * 255)
    if get_or_default(cfg, "save_raw", False):
        paths["raw"] = os.path.join(out, "{}_raw.png".format(stem))
        write_image(paths["raw"], denormalize(raw))
    colored_print(COLORS.TEST_COLOR, "Predicted mask written to {}".format(paths["mask"]))
    return paths
