import os

import torch


def run_if_cuda(func):
    def wrapped_func(*args, **kwargs):
        if torch.cuda.is_available():
            return func(*args, **kwargs)
        else:
            return

    return wrapped_func


def run_if_slow(func):
    """ Desk scale runs, enabled with LUNGSEG_SLOW_TESTS=1 """

    def wrapped_func(*args, **kwargs):
        if os.environ.get("LUNGSEG_SLOW_TESTS", "0") not in ("", "0"):
            return func(*args, **kwargs)
        else:
            return

    return wrapped_func
