import logging
from typing import List

from omegaconf import OmegaConf

from torch_lungseg.applications.common import output_dir
from torch_lungseg.datasets.base_dataset import SamplePair
from torch_lungseg.datasets.synthetic import SynthConfig, write_synthetic
from torch_lungseg.utils.config import to_dataclass

log = logging.getLogger(__name__)


def run_synth(cfg) -> List[SamplePair]:
    """ Writes a synthetic dataset to ``cfg.out``. The configuration is checked before the output directory
    is created, so an invalid count leaves nothing behind.
    """
    synth_cfg = to_dataclass(OmegaConf.to_container(cfg.synth, resolve=True), SynthConfig)
    return write_synthetic(synth_cfg, output_dir(cfg))
