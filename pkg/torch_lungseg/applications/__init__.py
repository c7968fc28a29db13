import sys
import logging

from torch_lungseg.utils.colors import colored_error
from torch_lungseg.utils.errors import LungSegError

log = logging.getLogger(__name__)


def run_command(run, cfg):
    """ Runs ``run(cfg)`` and turns package errors into their exit code """
    try:
        run(cfg)
    except LungSegError as e:
        colored_error("{}: {}".format(e.__class__.__name__, e))
        sys.exit(e.exit_code)
    return 0
