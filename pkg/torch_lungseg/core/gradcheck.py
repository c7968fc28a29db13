from typing import Sequence, Union

import torch

TensorOrTensors = Union[torch.Tensor, Sequence[torch.Tensor]]


def _generators(layer):
    return [m.generator for m in layer.modules() if getattr(m, "generator", None) is not None]


def grad_check(layer: torch.nn.Module, inputs: TensorOrTensors, epsilon: float = 1e-4, seed: int = 0) -> float:
    """ Max relative error between the analytic gradients of ``sum(layer(inputs) * r)`` (r a fixed random
    projection) and central finite differences, over every input and every parameter.

    The layer is converted to float64 in place. Layers holding a random generator (dropout) get the
    generator state restored before each evaluation so all evaluations share one mask.
    """
    if torch.is_tensor(inputs):
        inputs = (inputs,)
    layer.double()
    inputs = [x.detach().double().clone().requires_grad_(True) for x in inputs]
    params = [p for p in layer.parameters() if p.requires_grad]
    states = [g.get_state() for g in _generators(layer)]

    def evaluate():
        for g, state in zip(_generators(layer), states):
            g.set_state(state)
        return layer(*inputs)

    out = evaluate()
    projection = torch.randn(out.shape, generator=torch.Generator().manual_seed(seed), dtype=torch.float64)
    for p in params:
        p.grad = None
    (out * projection).sum().backward()
    analytic = [x.grad.detach().clone() if x.grad is not None else torch.zeros_like(x) for x in inputs + params]

    worst = 0.0
    with torch.no_grad():
        for tensor, grad in zip(inputs + params, analytic):
            flat = tensor.data.view(-1)
            numeric = torch.zeros_like(flat)
            for i in range(flat.numel()):
                orig = flat[i].item()
                flat[i] = orig + epsilon
                f_plus = (evaluate() * projection).sum().item()
                flat[i] = orig - epsilon
                f_minus = (evaluate() * projection).sum().item()
                flat[i] = orig
                numeric[i] = (f_plus - f_minus) / (2 * epsilon)
            numeric = numeric.view_as(grad)
            scale = max(grad.abs().max().item(), numeric.abs().max().item(), 1e-12)
            worst = max(worst, (grad - numeric).abs().max().item() / scale)
    return worst
