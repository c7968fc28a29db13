from numbers import Number

from tqdm import tqdm

from torch_lungseg.utils.colors import COLORS


class Coloredtqdm(tqdm):
    """ tqdm bar whose postfix, ``key=value`` pairs with fixed width numbers, can be colored """

    def set_postfix(self, ordered_dict=None, refresh=True, color=None, round=4, **kwargs):
        items = dict(ordered_dict or {})
        items.update({key: kwargs[key] for key in sorted(kwargs)})
        text = ", ".join("{}={}".format(key, self.format_value(value, round)) for key, value in items.items())
        self.postfix = "{}{}{}".format(color, text, COLORS.END_NO_TOKEN) if color else text
        if refresh:
            self.refresh()

    @staticmethod
    def format_value(value, width=4) -> str:
        """ Numbers are cut or padded to ``width + 1`` characters, other values padded to ``width`` """
        if isinstance(value, Number) and not isinstance(value, bool):
            return "{:<{w}}".format("{:.{p}f}".format(value, p=width), w=width + 1)[: width + 1]
        return "{:<{w}}".format(str(value), w=width)
