import math


class RunningStats:
    """ Incremental mean, spread and range of a scalar stream, the averaging meter of the trackers """

    def __init__(self):
        self.clear()

    def clear(self):
        self.n = 0
        self._mean = 0.0
        self._m2 = 0.0
        self.min = math.inf
        self.max = -math.inf

    def push(self, x):
        x = float(x)
        self.n += 1
        delta = x - self._mean
        self._mean += delta / self.n
        self._m2 += delta * (x - self._mean)
        self.min = min(self.min, x)
        self.max = max(self.max, x)

    def mean(self) -> float:
        return self._mean if self.n else 0.0

    def variance(self) -> float:
        return self._m2 / (self.n - 1) if self.n > 1 else 0.0
