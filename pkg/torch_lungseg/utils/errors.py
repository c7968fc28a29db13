class LungSegError(Exception):
    """Base class of the errors raised by the package. Each subclass carries the
    process exit code used by the command line scripts."""

    exit_code = 1


class ConfigError(LungSegError, ValueError):
    exit_code = 2


class DataError(LungSegError, ValueError):
    exit_code = 3


class DecodeError(DataError):
    """A file could not be decoded as an image"""


class DivergenceError(LungSegError, RuntimeError):
    """Raised when a training loss becomes non finite"""

    exit_code = 4

    def __init__(self, step: int, losses: dict):
        self.step = step
        self.losses = dict(losses)
        values = ", ".join("{}={}".format(k, v) for k, v in self.losses.items())
        super().__init__("Non finite loss at step {}: {}".format(step, values))


class CheckpointError(LungSegError):
    exit_code = 5


class CheckpointShapeError(CheckpointError):
    def __init__(self, entry: str, expected, found):
        self.entry = entry
        super().__init__(
            "Shape mismatch for checkpoint entry '{}': model expects {}, file holds {}".format(
                entry, tuple(expected), tuple(found)
            )
        )
