import os
import logging
from typing import List

from omegaconf import OmegaConf

from torch_lungseg.datasets.base_dataset import BaseDataset, SamplePair
from torch_lungseg.datasets.segmentation.cxr import scan_dataset
from torch_lungseg.datasets.synthetic import (
    IMAGE_DIR,
    MANIFEST_NAME,
    MASK_DIR,
    SynthConfig,
    read_manifest,
    synth_generate,
)
from torch_lungseg.utils.config import get_or_default, to_dataclass
from torch_lungseg.utils.errors import DataError

log = logging.getLogger(__name__)


class SyntheticLungs(BaseDataset):
    """ Synthetic set, read from a directory written by the synth command when ``dataroot`` holds a
    manifest, generated in memory from the ``synth`` options otherwise.
    """

    def scan(self) -> List[SamplePair]:
        dataroot = self.dataroot
        if dataroot and os.path.exists(os.path.join(dataroot, MANIFEST_NAME)):
            manifest = read_manifest(dataroot)
            result = scan_dataset(
                os.path.join(dataroot, IMAGE_DIR), [os.path.join(dataroot, MASK_DIR)], mask_suffix="", source=self.name
            )
            if len(result.pairs) != manifest.count:
                raise DataError(
                    "Synthetic dataset {} holds {} pairs, its manifest lists {}".format(
                        dataroot, len(result.pairs), manifest.count
                    )
                )
            log.info(
                "Synthetic dataset %s: %i pairs of size %i (seed %i)", dataroot, manifest.count, manifest.size, manifest.seed
            )
            return result.pairs
        synth_opt = get_or_default(self.dataset_opt, "synth", None)
        if synth_opt is not None and OmegaConf.is_config(synth_opt):
            synth_opt = OmegaConf.to_container(synth_opt, resolve=True)
        cfg = to_dataclass(synth_opt, SynthConfig)
        log.info("Generating %i synthetic pairs of size %i in memory (seed %i)", cfg.count, cfg.size, cfg.seed)
        pairs = synth_generate(cfg)
        for pair in pairs:
            pair.source = self.name
        return pairs
