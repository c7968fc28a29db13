import math
from dataclasses import dataclass, astuple, fields
from typing import List, Optional

import pandas as pd


@dataclass
class HistoryRecord:
    step: int
    g_total: float
    g_adv: float
    g_l1: float
    d_loss: float
    train_acc: Optional[float] = None
    val_acc: Optional[float] = None


HISTORY_COLUMNS = [f.name for f in fields(HistoryRecord)]


class TrainHistory:
    """ Per step losses of a run with the pixel accuracies recorded at evaluation steps """

    def __init__(self, records: Optional[List[HistoryRecord]] = None):
        self.records: List[HistoryRecord] = []
        for record in records or []:
            self.append(record)

    def __len__(self):
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    def __getitem__(self, item):
        return self.records[item]

    def __eq__(self, other):
        return isinstance(other, TrainHistory) and self.records == other.records

    @property
    def last_step(self) -> int:
        return self.records[-1].step if self.records else 0

    def append(self, record: HistoryRecord):
        if self.records and record.step <= self.records[-1].step:
            raise ValueError(
                "History steps must be strictly increasing, got {} after {}".format(record.step, self.records[-1].step)
            )
        self.records.append(record)

    def record_losses(self, step: int, losses, train_acc=None, val_acc=None) -> HistoryRecord:
        record = HistoryRecord(
            step=step,
            g_total=losses["loss_g"],
            g_adv=losses["loss_g_gan"],
            g_l1=losses["loss_g_l1"],
            d_loss=losses["loss_d"],
            train_acc=train_acc,
            val_acc=val_acc,
        )
        self.append(record)
        return record

    def truncate(self, step: int):
        """ Drops the records after ``step``, used when resuming from a checkpoint """
        self.records = [r for r in self.records if r.step <= step]

    def column(self, name: str):
        return [getattr(r, name) for r in self.records]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([astuple(r) for r in self.records], columns=HISTORY_COLUMNS)
        return frame.astype({"step": "int64"})

    def write_csv(self, path: str):
        self.to_frame().to_csv(path, index=False)

    @classmethod
    def from_csv(cls, path: str) -> "TrainHistory":
        frame = pd.read_csv(path, float_precision="round_trip")
        missing = [c for c in HISTORY_COLUMNS if c not in frame.columns]
        if missing:
            raise ValueError("History file {} misses columns {}".format(path, missing))
        history = cls()
        for row in frame[HISTORY_COLUMNS].itertuples(index=False):
            values = [None if isinstance(v, float) and math.isnan(v) else v for v in row]
            values[0] = int(values[0])
            history.append(HistoryRecord(*values))
        return history
