import logging

log = logging.getLogger(__name__)


class COLORS:
    """Shell color tokens, used as ``colored_print(COLORS.X, text)``"""

    TRAIN_COLOR = "\033[0;92m"
    VAL_COLOR = "\033[0;94m"
    TEST_COLOR = "\033[0;93m"
    BEST_COLOR = "\033[0;92m"
    ERROR_COLOR = "\033[1;31m"
    SYNTH_COLOR = "\033[0;96m"

    END_TOKEN = "\033[0m)"
    END_NO_TOKEN = "\033[0m"


def colored_print(color, msg):
    log.info(color + msg + COLORS.END_NO_TOKEN)


def colored_error(msg):
    log.error(COLORS.ERROR_COLOR + msg + COLORS.END_NO_TOKEN)
