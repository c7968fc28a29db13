""" Folder layouts of chest X-ray sets: one image directory, one or more mask directories matched by file stem """
import os
import glob
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from torch_lungseg.datasets.base_dataset import BaseDataset, SamplePair
from torch_lungseg.utils.config import get_or_default, is_list
from torch_lungseg.utils.errors import DataError

log = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".png",)


@dataclass
class ScanResult:
    pairs: List[SamplePair] = field(default_factory=list)
    unpaired_images: List[str] = field(default_factory=list)
    unpaired_masks: List[str] = field(default_factory=list)

    def diagnostic(self) -> str:
        lines = ["{} pairs, {} unpaired images, {} unpaired masks".format(
            len(self.pairs), len(self.unpaired_images), len(self.unpaired_masks)
        )]
        if self.unpaired_images:
            lines.append("unpaired images: " + ", ".join(self.unpaired_images))
        if self.unpaired_masks:
            lines.append("unpaired masks: " + ", ".join(self.unpaired_masks))
        return "\n".join(lines)


def _list_pngs(directory: str) -> List[str]:
    if not os.path.isdir(directory):
        raise DataError("Directory {} does not exist".format(directory))
    files = [f for f in glob.glob(os.path.join(directory, "*")) if f.lower().endswith(IMAGE_EXTENSIONS)]
    return sorted(files)


def _stem(path: str, suffix: str = "") -> str:
    stem = os.path.splitext(os.path.basename(path))[0]
    if suffix and stem.endswith(suffix):
        stem = stem[: -len(suffix)]
    return stem


def _index_by_stem(files: Sequence[str], suffix: str, kind: str) -> Dict[str, str]:
    index = {}
    for path in files:
        stem = _stem(path, suffix)
        if stem in index:
            raise DataError("Duplicate {} stem '{}': {} and {}".format(kind, stem, index[stem], path))
        index[stem] = path
    return index


def scan_dataset(
    image_dir: str,
    mask_dirs: Sequence[str],
    mask_suffix: str = "_mask",
    source: str = "",
    allow_empty: bool = False,
) -> ScanResult:
    """ Pairs every image with the masks sharing its stem, ``mask_suffix`` being stripped from mask stems.
    An image is paired when every mask directory holds a mask for it; the masks are merged by union at load time.
    Images and masks left without a partner are reported in the result and logged.
    """
    images = _index_by_stem(_list_pngs(image_dir), "", "image")
    masks_per_dir = [_index_by_stem(_list_pngs(d), mask_suffix, "mask") for d in mask_dirs]
    if not masks_per_dir:
        raise DataError("At least one mask directory is needed to pair {}".format(image_dir))

    result = ScanResult()
    for stem in sorted(images):
        mask_paths = [masks[stem] for masks in masks_per_dir if stem in masks]
        if len(mask_paths) == len(masks_per_dir):
            result.pairs.append(SamplePair(id=stem, source=source, image_path=images[stem], mask_paths=mask_paths))
        else:
            result.unpaired_images.append(stem)
    for masks in masks_per_dir:
        result.unpaired_masks += sorted(masks[stem] for stem in masks if stem not in images)

    if result.unpaired_images or result.unpaired_masks:
        log.warning(result.diagnostic())
    if not result.pairs and not allow_empty:
        raise DataError("No image / mask pairs found in {}\n{}".format(image_dir, result.diagnostic()))
    log.info("Found %i pairs in %s", len(result.pairs), image_dir)
    return result


class CXRFolder(BaseDataset):
    """ Generic layout, options:
        - dataroot: root of the set
        - image_dir: directory of the radiographs relative to dataroot
        - mask_dirs: mask directories relative to dataroot
        - mask_suffix: suffix stripped from mask stems
    """

    IMAGE_DIR = "images"
    MASK_DIRS = ["masks"]
    MASK_SUFFIX = "_mask"
    EVAL_ONLY = False

    def __init__(self, dataset_opt, preprocessing=None, augment=None):
        self.scan_result: Optional[ScanResult] = None
        if get_or_default(dataset_opt, "eval_only", None) is None:
            dataset_opt = dict(dataset_opt or {})
            dataset_opt["eval_only"] = self.EVAL_ONLY
        super().__init__(dataset_opt, preprocessing, augment)

    def _path(self, relative: str) -> str:
        return os.path.join(self.dataroot, relative)

    def scan(self) -> List[SamplePair]:
        mask_dirs = get_or_default(self.dataset_opt, "mask_dirs", self.MASK_DIRS)
        if not is_list(mask_dirs):
            mask_dirs = [mask_dirs]
        self.scan_result = scan_dataset(
            self._path(get_or_default(self.dataset_opt, "image_dir", self.IMAGE_DIR)),
            [self._path(d) for d in mask_dirs],
            mask_suffix=get_or_default(self.dataset_opt, "mask_suffix", self.MASK_SUFFIX),
            source=self.name,
        )
        return self.scan_result.pairs


class Montgomery(CXRFolder):
    """ Left and right lung masks ship in separate directories under the image stem """

    IMAGE_DIR = "CXR_png"
    MASK_DIRS = ["ManualMask/leftMask", "ManualMask/rightMask"]
    MASK_SUFFIX = ""


class Shenzhen(CXRFolder):
    """ Evaluation only by default, masks named ``<stem>_mask.png`` """

    IMAGE_DIR = "CXR_png"
    MASK_DIRS = ["mask"]
    MASK_SUFFIX = "_mask"
    EVAL_ONLY = True
