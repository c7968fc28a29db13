import os
import logging

from torch_lungseg.applications.common import load_trained_model, output_dir
from torch_lungseg.core.data_transform import denormalize
from torch_lungseg.datasets.base_dataset import batches
from torch_lungseg.datasets.dataset_factory import instantiate_dataset
from torch_lungseg.metrics.colored_tqdm import Coloredtqdm as Ctq
from torch_lungseg.metrics.confusion_matrix import ConfusionMatrix
from torch_lungseg.metrics.report import TRIPTYCH_DIR, format_report, plot_panels, serialize_report, write_triptych
from torch_lungseg.metrics.segmentation_metrics import MetricsReport, aggregate_counts
from torch_lungseg.trainer import select_device
from torch_lungseg.utils.colors import COLORS, colored_print
from torch_lungseg.utils.config import configure_torch, get_or_default
from torch_lungseg.utils.enums import Aggregation
from torch_lungseg.utils.errors import DataError

log = logging.getLogger(__name__)


def run_eval(cfg) -> MetricsReport:
    """ Predicts every pair of the selected split and writes report.json, per_image.csv and optionally
    the triptychs and a preview of the first predictions.
    """
    out = output_dir(cfg)
    configure_torch(get_or_default(cfg, "num_threads", 0), True)
    device = select_device(get_or_default(cfg, "cuda", False))
    model, preprocessing, path = load_trained_model(cfg, device)
    dataset = instantiate_dataset(cfg.data, preprocessing, None)
    dataset.log_summary()
    split_name = get_or_default(cfg, "split", "test")
    selection = dataset.select(split_name)
    scan_result = getattr(dataset, "scan_result", None)
    if scan_result is not None and scan_result.unpaired_images:
        log.warning("%i images without masks are excluded from the evaluation", len(scan_result.unpaired_images))
    if len(selection) == 0:
        raise DataError("The '{}' selection of {} is empty".format(split_name, dataset.name))

    threshold = get_or_default(cfg, "threshold", None)
    inference_mode = get_or_default(cfg, "inference_mode", None)
    save_triptychs = bool(get_or_default(cfg, "triptychs", False))
    preview_count = int(get_or_default(cfg, "preview_count", 0))

    matrix = ConfusionMatrix()
    previews = []
    loader = batches(selection, 1, 0, shuffle=False)
    with Ctq(loader) as tq_loader:
        for index, (image, mask) in enumerate(tq_loader):
            pred, _ = model.predict_mask(image, threshold=threshold, inference_mode=inference_mode)
            pred = pred[0, 0].cpu().numpy()
            gt = mask[0, 0].numpy() > 0
            sample_id = selection.pairs[index].id
            matrix.count_predicted_batch(gt, pred, ids=[sample_id])
            if save_triptychs:
                write_triptych(os.path.join(out, TRIPTYCH_DIR), sample_id, gt, pred)
            if index < preview_count:
                previews.append([denormalize(image), gt.astype("uint8") * 255, pred.astype("uint8") * 255])
            tq_loader.set_postfix(image=sample_id, color=COLORS.TEST_COLOR)

    headline = Aggregation(get_or_default(cfg, "aggregation", Aggregation.MICRO.value))
    reports = {}
    for mode in Aggregation:
        report = aggregate_counts(matrix.per_image, mode, keep_per_image=mode == headline)
        report.dataset = dataset.name
        report.checkpoint = path
        reports[mode.value] = report
    report = reports.pop(headline.value)
    serialize_report(report, out, extra_reports=reports)
    if previews:
        plot_panels(previews, ["Input image", "Ground truth", "Predicted mask"], os.path.join(out, "predictions.png"))

    for line in format_report(report):
        colored_print(COLORS.TEST_COLOR, line)
    for other in reports.values():
        for line in format_report(other):
            log.info(line)
    return report
