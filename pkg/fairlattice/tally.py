import dataclasses
import logging
import typing
from dataclasses import dataclass
from enum import Enum

import numpy as np

from datatypes import MetricKind, SubgroupSpec
from fairlattice import lattice
from fairlattice.exceptions import DataError, ModeError
from fairlattice.models import DatasetView

logger = logging.getLogger(__name__)

CONFUSION_FIELDS = ('tp', 'fp', 'tn', 'fn')


class TallyMode(Enum):
    OUTCOME = 'outcome'
    CONFUSION = 'confusion'

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class CountTable:
    """
    Exact integer counts for all 3^M hypercubes, addressed by lattice index.
    Only vertex entries are filled until the table is propagated.
    """
    m: int
    n: np.ndarray
    n_pos: np.ndarray
    mode: TallyMode = TallyMode.OUTCOME
    tp: typing.Optional[np.ndarray] = None
    fp: typing.Optional[np.ndarray] = None
    tn: typing.Optional[np.ndarray] = None
    fn: typing.Optional[np.ndarray] = None
    propagated: bool = False
    edge_traversals: int = 0

    def __post_init__(self):
        if self.mode == TallyMode.CONFUSION and any(getattr(self, f) is None for f in CONFUSION_FIELDS):
            raise ModeError("confusion mode needs tp, fp, tn and fn arrays")
        for array in self.count_arrays().values():
            array.setflags(write=False)

    @property
    def size(self) -> int:
        return 3 ** self.m

    @property
    def n_total(self) -> int:
        return int(self.n[self.size - 1]) if self.propagated else int(self.n[lattice.vertex_indices(self.m)].sum())

    @property
    def sr_tot(self) -> typing.Optional[float]:
        return success_rate(self, SubgroupSpec.main(self.m))

    def count_arrays(self) -> typing.Dict[str, np.ndarray]:
        arrays = {'n': self.n, 'n_pos': self.n_pos}
        if self.mode == TallyMode.CONFUSION:
            arrays.update({f: getattr(self, f) for f in CONFUSION_FIELDS})
        return arrays

    def same_counts(self, other: 'CountTable') -> bool:
        mine, theirs = self.count_arrays(), other.count_arrays()
        return (self.m == other.m and mine.keys() == theirs.keys()
                and all(np.array_equal(mine[k], theirs[k]) for k in mine))


def _bincount(indices: np.ndarray, size: int) -> np.ndarray:
    return np.bincount(indices, minlength=size).astype(np.int64)


def _check_m(data: DatasetView, m: typing.Optional[int]):
    if m is not None and data.m != m:
        raise DataError(f"dataset has {data.m} attributes, lattice configured for {m}")
    lattice.check_attribute_count(data.m)


def tally_vertices(data: DatasetView, m: typing.Optional[int] = None) -> CountTable:
    _check_m(data, m)
    size = 3 ** data.m
    indices = data.vertex_indices()
    return CountTable(m=data.m,
                      n=_bincount(indices, size),
                      n_pos=_bincount(indices[data.y_true == 1], size))


def tally_confusion(data: DatasetView, m: typing.Optional[int] = None) -> CountTable:
    if not data.has_predictions:
        raise ModeError("confusion tally needs predictions")
    _check_m(data, m)
    size = 3 ** data.m
    indices = data.vertex_indices()
    truth, pred = data.y_true == 1, data.y_pred == 1
    return CountTable(m=data.m,
                      n=_bincount(indices, size),
                      n_pos=_bincount(indices[truth], size),
                      mode=TallyMode.CONFUSION,
                      tp=_bincount(indices[truth & pred], size),
                      fp=_bincount(indices[~truth & pred], size),
                      tn=_bincount(indices[~truth & ~pred], size),
                      fn=_bincount(indices[truth & ~pred], size))


def propagate(table: CountTable) -> CountTable:
    """
    Fill every non-vertex entry level by level: a hypercube at level K is the
    sum of the two level K-1 halves obtained by resolving its first star.
    """
    if table.propagated:
        return table
    m = table.m
    powers = lattice.first_star_powers(m)
    arrays = {name: array.copy() for name, array in table.count_arrays().items()}
    traversals = 0
    for k in range(1, m + 1):
        indices = lattice.level_indices(m, k)
        step = powers[indices].astype(np.int64)
        low, high = indices - 2 * step, indices - step
        for array in arrays.values():
            array[indices] = array[low] + array[high]
        traversals += 2 * indices.size
    logger.debug("propagated M=%d over %d edges", m, traversals)
    return dataclasses.replace(table, propagated=True, edge_traversals=traversals, **arrays)


def build_table(data: DatasetView, confusion: typing.Optional[bool] = None) -> CountTable:
    if confusion is None:
        confusion = data.has_predictions
    return propagate(tally_confusion(data) if confusion else tally_vertices(data))


def _terms(table: CountTable, kind: MetricKind) -> typing.Tuple[np.ndarray, np.ndarray]:
    kind = MetricKind.of(kind)
    if kind == MetricKind.SUCCESS_RATE:
        return table.n_pos, table.n
    if table.mode != TallyMode.CONFUSION:
        raise ModeError(f"{kind} needs a confusion table")
    tp, fp, tn, fn = (getattr(table, f) for f in CONFUSION_FIELDS)
    return {
        MetricKind.ACCURACY: (tp + tn, table.n),
        MetricKind.TPR: (tp, tp + fn),
        MetricKind.FPR: (fp, fp + tn),
        MetricKind.TNR: (tn, fp + tn),
        MetricKind.FNR: (fn, tp + fn),
        MetricKind.PRECISION: (tp, tp + fp),
    }[kind]


def rates(table: CountTable, kind: MetricKind = MetricKind.SUCCESS_RATE) -> np.ndarray:
    """ rate of every hypercube, NaN where the denominator is 0 """
    numerator, denominator = _terms(table, kind)
    out = np.full(numerator.shape, np.nan)
    np.divide(numerator, denominator, out=out, where=denominator > 0)
    return out


def rate_of(table: CountTable, spec: SubgroupSpec,
            kind: MetricKind = MetricKind.SUCCESS_RATE) -> typing.Optional[float]:
    if not table.propagated and not spec.is_vertex:
        raise ModeError("table must be propagated before querying non-vertex subgroups")
    if spec.m != table.m:
        raise DataError(f"spec {spec} does not match M={table.m}")
    numerator, denominator = _terms(table, kind)
    index = lattice.encode(spec)
    if denominator[index] == 0:
        return None
    return float(numerator[index]) / float(denominator[index])


def success_rate(table: CountTable, spec: SubgroupSpec) -> typing.Optional[float]:
    return rate_of(table, spec, MetricKind.SUCCESS_RATE)


def merge(tables: typing.Sequence[CountTable]) -> CountTable:
    """ entry-wise sum of tables over the same lattice, e.g. pooled subsample repetitions """
    first = tables[0]
    if any(t.m != first.m or t.mode != first.mode for t in tables):
        raise DataError("can only merge tables with the same M and mode")
    arrays = {name: np.sum([t.count_arrays()[name] for t in tables], axis=0)
              for name in first.count_arrays()}
    return CountTable(m=first.m, mode=first.mode,
                      propagated=all(t.propagated for t in tables), **arrays)
