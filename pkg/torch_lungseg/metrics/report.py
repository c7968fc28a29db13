""" Report artifacts: metrics JSON, per image CSV, history CSV, triptych PNGs and figures """
import os
import json
import logging
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from torch_lungseg.core.data_transform import write_image, diff_image, histogram
from torch_lungseg.metrics.history import TrainHistory
from torch_lungseg.metrics.segmentation_metrics import MetricsReport, METRIC_NAMES

log = logging.getLogger(__name__)

REPORT_NAME = "report.json"
PER_IMAGE_NAME = "per_image.csv"
HISTORY_NAME = "history.csv"
TRIPTYCH_DIR = "triptychs"


def serialize_report(
    report: MetricsReport,
    output_dir: str,
    history: Optional[TrainHistory] = None,
    extra_reports: Optional[Dict[str, MetricsReport]] = None,
) -> Dict[str, str]:
    """ Writes ``report.json`` (the headline report, other aggregations under ``other_aggregations``),
    ``per_image.csv`` when the report carries per image rows and ``history.csv`` when a history is given.
    Returns the written paths by kind.
    """
    os.makedirs(output_dir, exist_ok=True)
    paths = {}
    payload = report.to_dict()
    if extra_reports:
        payload["other_aggregations"] = {name: r.to_dict() for name, r in extra_reports.items()}
    paths["report"] = os.path.join(output_dir, REPORT_NAME)
    with open(paths["report"], "w") as f:
        json.dump(payload, f, indent=2, sort_keys=True)

    if report.per_image is not None:
        paths["per_image"] = os.path.join(output_dir, PER_IMAGE_NAME)
        write_per_image_csv(report, paths["per_image"])
    if history is not None:
        paths["history"] = os.path.join(output_dir, HISTORY_NAME)
        history.write_csv(paths["history"])
    log.info("Report written to %s", paths["report"])
    return paths


def write_per_image_csv(report: MetricsReport, path: str):
    rows = [dict(id=p.id, **{name: getattr(p, name) for name in METRIC_NAMES}) for p in report.per_image or []]
    pd.DataFrame(rows, columns=["id"] + list(METRIC_NAMES)).to_csv(path, index=False)


def format_report(report: MetricsReport) -> List[str]:
    lines = ["{} ({} aggregation, {} images)".format(report.dataset or "report", report.aggregation, report.n_images)]
    lines += ["    {} = {:.2f}".format(name, getattr(report, name)) for name in METRIC_NAMES]
    return lines


def write_triptych(output_dir: str, sample_id: str, gt: np.ndarray, pred: np.ndarray) -> List[str]:
    """ Ground truth, prediction and absolute difference as three {0, 255} PNGs """
    gt = np.where(np.asarray(gt) > 0, 255, 0).astype(np.uint8)
    pred = np.where(np.asarray(pred) > 0, 255, 0).astype(np.uint8)
    panels = {"gt": gt, "pred": pred, "diff": diff_image(gt, pred)}
    paths = []
    for kind, panel in panels.items():
        path = os.path.join(output_dir, "{}_{}.png".format(sample_id, kind))
        write_image(path, panel)
        paths.append(path)
    return paths


def _save(fig, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    fig.savefig(path)
    plt.close(fig)
    return path


def plot_history(history: TrainHistory, output_dir: str) -> List[str]:
    """ losses.png with the four losses against the step, accuracy.png with the pixel accuracies """
    frame = history.to_frame()
    fig, axes = plt.subplots(1, 2, figsize=(12, 4))
    for column, label in [("g_total", "generator total"), ("g_adv", "generator adversarial"), ("d_loss", "discriminator")]:
        axes[0].plot(frame["step"], frame[column], label=label)
    axes[0].set_xlabel("step")
    axes[0].set_title("Training losses")
    axes[0].legend()
    axes[1].plot(frame["step"], frame["g_l1"], color="tab:red")
    axes[1].set_xlabel("step")
    axes[1].set_title("Generator L1")
    paths = [_save(fig, os.path.join(output_dir, "losses.png"))]

    fig, ax = plt.subplots(figsize=(6, 4))
    for column, label in [("train_acc", "train"), ("val_acc", "validation")]:
        values = frame[["step", column]].dropna()
        if len(values):
            ax.plot(values["step"], values[column], marker="o", label=label)
    ax.set_xlabel("step")
    ax.set_ylabel("pixel accuracy")
    ax.set_title("Accuracy")
    ax.legend()
    paths.append(_save(fig, os.path.join(output_dir, "accuracy.png")))
    return paths


def plot_histograms(image: np.ndarray, mask: Optional[np.ndarray], path: str) -> str:
    """ 256 bin intensity histograms of a radiograph and its mask side by side """
    panels = [("X-ray", image)] + ([("Mask", mask)] if mask is not None else [])
    fig, axes = plt.subplots(1, len(panels), figsize=(6 * len(panels), 4), squeeze=False)
    for ax, (title, img) in zip(axes[0], panels):
        ax.bar(np.arange(256), histogram(img), width=1.0, color="gray")
        ax.set_xlim(0, 255)
        ax.set_title(title)
        ax.set_xlabel("intensity")
    return _save(fig, path)


def plot_panels(rows: Sequence[Sequence[np.ndarray]], titles: Sequence[str], path: str) -> str:
    """ Grid of grayscale images, one row per sample. Used for prediction and augmentation previews. """
    n_rows, n_cols = len(rows), len(titles)
    fig, axes = plt.subplots(n_rows, n_cols, figsize=(3 * n_cols, 3 * n_rows), squeeze=False)
    for i, row in enumerate(rows):
        for j, img in enumerate(row):
            axes[i][j].imshow(img, cmap="gray", vmin=0, vmax=255)
            axes[i][j].axis("off")
            if i == 0:
                axes[i][j].set_title(titles[j])
    return _save(fig, path)
