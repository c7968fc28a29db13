""" Binary checkpoint format:

    magic b"P2PS" | version u32 | fingerprint length u32 + ascii | entry count u32
    per entry: name length u32 + utf-8 name | dtype tag u32 | rank u32 | extents u32 * rank | raw little endian values

Optimizer moments live under the reserved "optim/" prefix, random generator states under "rng/" and run
metadata (step, training accuracies since the last evaluation) under "meta/".
"""
import os
import glob
import logging
from collections import OrderedDict
from typing import Dict, Optional

import numpy as np
import torch

from torch_lungseg.utils.colors import colored_print, COLORS
from torch_lungseg.utils.errors import CheckpointError, CheckpointShapeError

log = logging.getLogger(__name__)

MAGIC = b"P2PS"
VERSION = 1
OPTIM_PREFIX = "optim/"
RNG_PREFIX = "rng/"
META_PREFIX = "meta/"
ADAM_STATE_KEYS = ("step", "exp_avg", "exp_avg_sq")

DTYPES = {0: np.dtype("<f4"), 1: np.dtype("<i8"), 2: np.dtype("u1")}
TAGS = {np.dtype("<f4"): 0, np.dtype("<i8"): 1, np.dtype("u1"): 2}


def _u32(*values) -> bytes:
    return np.asarray(values, dtype="<u4").tobytes()


def write_checkpoint(path: str, entries: Dict[str, np.ndarray], fingerprint: str = ""):
    """ Writes through a temporary file so an interrupted save never replaces a good checkpoint """
    chunks = [MAGIC, _u32(VERSION)]
    encoded_fingerprint = fingerprint.encode("ascii")
    chunks += [_u32(len(encoded_fingerprint)), encoded_fingerprint, _u32(len(entries))]
    for name, value in entries.items():
        value = np.ascontiguousarray(value)
        dtype = value.dtype.newbyteorder("<") if value.dtype.byteorder == ">" else value.dtype
        if np.dtype(dtype) not in TAGS:
            raise CheckpointError("Unsupported dtype {} for entry {}".format(value.dtype, name))
        value = value.astype(dtype, copy=False)
        encoded_name = name.encode("utf-8")
        chunks += [
            _u32(len(encoded_name)),
            encoded_name,
            _u32(TAGS[np.dtype(dtype)], value.ndim),
            _u32(*value.shape) if value.ndim else b"",
            value.tobytes(),
        ]
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    tmp_path = path + ".tmp"
    with open(tmp_path, "wb") as f:
        for chunk in chunks:
            f.write(chunk)
    os.replace(tmp_path, path)


class _Reader:
    def __init__(self, data: bytes, path: str):
        self._data = memoryview(data)
        self._pos = 0
        self._path = path

    def take(self, n: int) -> memoryview:
        if self._pos + n > len(self._data):
            raise CheckpointError("Checkpoint {} is truncated".format(self._path))
        chunk = self._data[self._pos : self._pos + n]
        self._pos += n
        return chunk

    def u32(self, count=1):
        values = np.frombuffer(self.take(4 * count), dtype="<u4")
        return [int(v) for v in values]


def read_checkpoint(path: str):
    """ Returns (fingerprint, OrderedDict name -> numpy array) """
    try:
        with open(path, "rb") as f:
            data = f.read()
    except OSError as e:
        raise CheckpointError("Cannot read checkpoint {}: {}".format(path, e)) from e
    reader = _Reader(data, path)
    if bytes(reader.take(4)) != MAGIC:
        raise CheckpointError("{} is not a checkpoint file (bad magic)".format(path))
    (version,) = reader.u32()
    if version != VERSION:
        raise CheckpointError("Unsupported checkpoint version {} in {}, expected {}".format(version, path, VERSION))
    (fingerprint_length,) = reader.u32()
    fingerprint = bytes(reader.take(fingerprint_length)).decode("ascii")
    (count,) = reader.u32()
    entries = OrderedDict()
    for _ in range(count):
        (name_length,) = reader.u32()
        name = bytes(reader.take(name_length)).decode("utf-8")
        tag, rank = reader.u32(2)
        if tag not in DTYPES:
            raise CheckpointError("Unknown dtype tag {} for entry {}".format(tag, name))
        shape = tuple(reader.u32(rank)) if rank else ()
        dtype = DTYPES[tag]
        nbytes = int(np.prod(shape, dtype=np.int64)) * dtype.itemsize
        entries[name] = np.frombuffer(reader.take(nbytes), dtype=dtype).reshape(shape).copy()
    if reader._pos != len(data):
        raise CheckpointError("Trailing bytes after the last entry of {}".format(path))
    return fingerprint, entries


def _network_entries(model):
    entries = OrderedDict()
    for net_name in ("generator", "discriminator"):
        net = getattr(model, net_name)
        for name, tensor in net.state_dict().items():
            entries["{}.{}".format(net_name, name)] = tensor.detach().cpu().numpy()
    return entries


def _optimizer_entries(model):
    entries = OrderedDict()
    for net_name, optimizer in model.optimizers.items():
        net = getattr(model, net_name)
        for name, param in net.named_parameters():
            state = optimizer.state.get(param, {})
            for key in ADAM_STATE_KEYS:
                if key in state:
                    value = state[key]
                    value = value.detach().cpu().numpy() if torch.is_tensor(value) else np.asarray(value)
                    entries["{}{}/{}/{}".format(OPTIM_PREFIX, net_name, name, key)] = value.astype(np.float32)
    return entries


def model_entries(model, with_optimizer=True, tracker=None) -> Dict[str, np.ndarray]:
    entries = _network_entries(model)
    if with_optimizer:
        entries.update(_optimizer_entries(model))
    entries[RNG_PREFIX + "dropout"] = model.dropout_generator.get_state().numpy()
    entries[META_PREFIX + "step"] = np.asarray([model.step], dtype=np.int64)
    if tracker is not None:
        entries[META_PREFIX + "train_accuracies"] = np.asarray(tracker.accuracies, dtype=np.float32)
    return entries


def restore_model(model, fingerprint: str, entries: Dict[str, np.ndarray], with_optimizer=True, tracker=None):
    """ Loads networks (and optimizer state) bit exactly. Shapes are checked before the fingerprint so a
    mismatch names the offending entry.
    """
    expected = _network_entries(model)
    current = model.opt.architecture_fingerprint
    for name, value in expected.items():
        if name not in entries:
            message = "Checkpoint entry '{}' is missing".format(name)
            if fingerprint and fingerprint != current:
                message += ", the checkpoint was written for another architecture"
                message += " (fingerprint {}..., config {}...)".format(fingerprint[:12], current[:12])
            raise CheckpointError(message)
        if entries[name].shape != value.shape:
            raise CheckpointShapeError(name, value.shape, entries[name].shape)
    for name in entries:
        if not name.startswith((OPTIM_PREFIX, RNG_PREFIX, META_PREFIX)) and name not in expected:
            raise CheckpointError("Unexpected checkpoint entry '{}' for the current architecture".format(name))
    if fingerprint and fingerprint != current:
        raise CheckpointError(
            "Architecture fingerprint mismatch: checkpoint {}..., config {}...".format(
                fingerprint[:12], current[:12]
            )
        )

    for net_name in ("generator", "discriminator"):
        net = getattr(model, net_name)
        prefix = net_name + "."
        state = OrderedDict(
            (name[len(prefix) :], torch.from_numpy(value.copy()))
            for name, value in entries.items()
            if name.startswith(prefix)
        )
        net.load_state_dict(state, strict=True)

    if RNG_PREFIX + "dropout" in entries:
        model.dropout_generator.set_state(torch.from_numpy(entries[RNG_PREFIX + "dropout"].copy()))
    if META_PREFIX + "step" in entries:
        model.step = int(entries[META_PREFIX + "step"][0])
    if tracker is not None:
        tracker.restore_accuracies(entries.get(META_PREFIX + "train_accuracies", []))

    if with_optimizer:
        if not model.optimizers:
            model.instantiate_optimizers()
        for net_name, optimizer in model.optimizers.items():
            net = getattr(model, net_name)
            for name, param in net.named_parameters():
                keys = ["{}{}/{}/{}".format(OPTIM_PREFIX, net_name, name, key) for key in ADAM_STATE_KEYS]
                if not all(key in entries for key in keys):
                    continue
                state = {}
                for key, entry_name in zip(ADAM_STATE_KEYS, keys):
                    value = torch.from_numpy(entries[entry_name].copy())
                    if key != "step" and value.shape != param.shape:
                        raise CheckpointShapeError(entry_name, param.shape, value.shape)
                    state[key] = value if key == "step" else value.to(param.device)
                optimizer.state[param] = state


class ModelCheckpoint(object):
    """ Checkpoints of a run, stored as ``<checkpoint_dir>/step_NNNNNN.p2ps``

    Arguments:
        - checkpoint_dir: directory holding the checkpoints
        - resume_from: explicit file to resume from, "latest" for the newest file in checkpoint_dir, or None
    """

    EXTENSION = ".p2ps"

    def __init__(self, checkpoint_dir: str, resume_from: Optional[str] = None):
        self._checkpoint_dir = checkpoint_dir
        self._resume_from = resume_from

    @property
    def checkpoint_dir(self):
        return self._checkpoint_dir

    def path_for_step(self, step: int) -> str:
        return os.path.join(self._checkpoint_dir, "step_{:06d}{}".format(step, self.EXTENSION))

    def available(self):
        return sorted(glob.glob(os.path.join(self._checkpoint_dir, "step_*" + self.EXTENSION)))

    def latest(self) -> Optional[str]:
        available = self.available()
        return available[-1] if available else None

    def resume_path(self) -> Optional[str]:
        if not self._resume_from:
            return None
        if self._resume_from == "latest":
            path = self.latest()
            if path is None:
                raise CheckpointError("No checkpoint found in {} to resume from".format(self._checkpoint_dir))
            return path
        return self._resume_from

    def save(self, model, step: int, tracker=None) -> str:
        path = self.path_for_step(step)
        write_checkpoint(path, model_entries(model, tracker=tracker), model.opt.architecture_fingerprint)
        log.info("Checkpoint written to %s", path)
        return path

    @staticmethod
    def load(model, path: str, with_optimizer=True, tracker=None):
        fingerprint, entries = read_checkpoint(path)
        restore_model(model, fingerprint, entries, with_optimizer=with_optimizer, tracker=tracker)
        colored_print(COLORS.VAL_COLOR, "Model loaded from {} (step {})".format(path, model.step))
        return model
