""" Per-layer summary of a generator or discriminator: name, output shape (None, H, W, C), stored parameter count
(trainable parameters plus batch norm moving statistics) and input connections.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Tuple

import torch

from torch_lungseg.core.common_modules import stored_param_count

log = logging.getLogger(__name__)


@dataclass
class LayerRow:
    name: str
    output_shape: Tuple
    params: int
    connected_to: List[str] = field(default_factory=list)


def param_table(graph: torch.nn.Module) -> List[LayerRow]:
    size = graph.opt.image_size
    inputs = graph.summary_inputs()
    layers = graph.summary_layers()

    shapes = {}
    handles = []
    for name, module, _ in layers:

        def hook(_module, _inputs, output, name=name):
            shapes[name] = tuple(output.shape)

        handles.append(module.register_forward_hook(hook))

    was_training = graph.training
    graph.eval()
    try:
        with torch.no_grad():
            dummies = [torch.zeros(1, channels, size, size) for _, channels in inputs]
            graph(*dummies)
    finally:
        for handle in handles:
            handle.remove()
        graph.train(was_training)

    rows = [LayerRow(name, (None, size, size, channels), 0, []) for name, channels in inputs]
    for name, module, connected_to in layers:
        _, c, h, w = shapes[name]
        rows.append(LayerRow(name, (None, h, w, c), stored_param_count(module), list(connected_to)))
    return rows


def format_table(rows: List[LayerRow]) -> str:
    lines = ["{:<22}{:<24}{:>12}  {}".format("Layer", "Output Shape", "Param #", "Connected to")]
    lines.append("=" * 90)
    for row in rows:
        lines.append(
            "{:<22}{:<24}{:>12,}  {}".format(row.name, str(row.output_shape), row.params, ", ".join(row.connected_to))
        )
    lines.append("=" * 90)
    lines.append("Total params: {:,}".format(sum(row.params for row in rows)))
    return "\n".join(lines)
