import typing
from dataclasses import dataclass, field, fields
from enum import Enum

import numpy as np
import pandas as pd

from fairlattice.exceptions import ConfigError, DataError, MalformedRowError

LABEL_COLUMN = 'label'
PREDICTION_COLUMN = 'prediction'


def default_attribute_names(m: int) -> typing.Tuple[str, ...]:
    return tuple(f"p{i + 1}" for i in range(m))


def _binary_column(values) -> np.ndarray:
    array = np.asarray(values)
    if array.dtype.kind not in 'biuf':
        # text such as "x" turns into NaN here and is reported with its row below
        flat = pd.to_numeric(pd.Series(array.reshape(-1), dtype=object), errors='coerce')
        array = flat.to_numpy(dtype=float).reshape(array.shape)
    if array.dtype.kind == 'f':
        # non-integral or NaN entries become -1 so the 0/1 check reports their row
        return np.where(array == np.round(array), array, -1).astype(np.int64)
    return array.astype(np.int64)


def _first_bad_row(array: np.ndarray) -> typing.Optional[int]:
    bad = (array != 0) & (array != 1)
    if bad.ndim > 1:
        bad = bad.any(axis=1)
    rows = np.flatnonzero(bad)
    return int(rows[0]) if rows.size else None


@dataclass(frozen=True)
class DatasetView:
    """
    N rows of M binary protected attributes with a binary label and, optionally,
    a binary prediction. Immutable once built.
    """
    attributes: np.ndarray
    y_true: np.ndarray
    y_pred: typing.Optional[np.ndarray] = None
    attribute_names: typing.Tuple[str, ...] = ()
    dropped_rows: int = 0
    source: str = ''

    def __post_init__(self):
        attributes = _binary_column(self.attributes)
        if attributes.ndim != 2 or attributes.shape[1] < 1:
            raise DataError(f"attributes must be an N x M matrix, got shape {attributes.shape}")
        if attributes.shape[0] < 1:
            raise DataError("dataset has no rows")
        y_true = _binary_column(self.y_true).reshape(-1)
        y_pred = None if self.y_pred is None else _binary_column(self.y_pred).reshape(-1)
        for name, column in (('label', y_true), ('prediction', y_pred)):
            if column is not None and column.shape[0] != attributes.shape[0]:
                raise DataError(f"{column.shape[0]} {name}s for {attributes.shape[0]} rows")

        row = _first_bad_row(attributes)
        if row is not None:
            raise MalformedRowError(row, f"attribute values {attributes[row].tolist()} outside {{0,1}}")
        for name, column in (('label', y_true), ('prediction', y_pred)):
            row = None if column is None else _first_bad_row(column)
            if row is not None:
                raise MalformedRowError(row, f"{name} {column[row]} outside {{0,1}}")

        names = tuple(self.attribute_names) or default_attribute_names(attributes.shape[1])
        if len(names) != attributes.shape[1]:
            raise DataError(f"{len(names)} attribute names for {attributes.shape[1]} attributes")

        object.__setattr__(self, 'attributes', attributes.astype(np.uint8))
        object.__setattr__(self, 'y_true', y_true.astype(np.uint8))
        object.__setattr__(self, 'y_pred', None if y_pred is None else y_pred.astype(np.uint8))
        object.__setattr__(self, 'attribute_names', names)
        for array in (self.attributes, self.y_true, self.y_pred):
            if array is not None:
                array.setflags(write=False)

    @classmethod
    def from_rows(cls, rows: typing.Iterable[typing.Sequence[int]], y_true: typing.Sequence[int],
                  y_pred: typing.Optional[typing.Sequence[int]] = None, **kwargs) -> 'DatasetView':
        rows = [list(r) for r in rows]
        if not rows:
            raise DataError("dataset has no rows")
        widths = {len(r) for r in rows}
        if len(widths) > 1:
            width = len(rows[0])
            row = next(i for i, r in enumerate(rows) if len(r) != width)
            raise MalformedRowError(row, f"expected {width} attributes, got {len(rows[row])}")
        return cls(attributes=np.asarray(rows).reshape(len(rows), -1), y_true=y_true, y_pred=y_pred, **kwargs)

    @property
    def n_rows(self) -> int:
        return int(self.attributes.shape[0])

    @property
    def m(self) -> int:
        return int(self.attributes.shape[1])

    @property
    def has_predictions(self) -> bool:
        return self.y_pred is not None

    def vertex_indices(self) -> np.ndarray:
        """ lattice index of the vertex holding each row """
        weights = 3 ** np.arange(self.m - 1, -1, -1, dtype=np.int64)
        return self.attributes.astype(np.int64) @ weights

    def vertex_numbers(self) -> np.ndarray:
        """ binary vertex number of each row, attribute 1 most significant """
        weights = 2 ** np.arange(self.m - 1, -1, -1, dtype=np.int64)
        return self.attributes.astype(np.int64) @ weights

    def take(self, rows: np.ndarray) -> 'DatasetView':
        return DatasetView(attributes=self.attributes[rows],
                           y_true=self.y_true[rows],
                           y_pred=None if self.y_pred is None else self.y_pred[rows],
                           attribute_names=self.attribute_names,
                           source=self.source)

    def with_predictions(self, y_pred: typing.Sequence[int]) -> 'DatasetView':
        return DatasetView(attributes=self.attributes, y_true=self.y_true, y_pred=y_pred,
                           attribute_names=self.attribute_names,
                           dropped_rows=self.dropped_rows, source=self.source)

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.attributes.astype(np.int64), columns=list(self.attribute_names))
        frame[LABEL_COLUMN] = self.y_true.astype(np.int64)
        if self.y_pred is not None:
            frame[PREDICTION_COLUMN] = self.y_pred.astype(np.int64)
        return frame


def _from_dict(cls, values: typing.Dict[str, typing.Any]):
    known = {f.name for f in fields(cls)}
    unknown = set(values) - known
    if unknown:
        raise ConfigError(f"unknown {cls.__name__} keys: {', '.join(sorted(unknown))}")
    try:
        return cls(**values)
    except TypeError as e:
        raise ConfigError(f"invalid {cls.__name__}: {e}") from e


@dataclass(frozen=True)
class SubsampleConfig:
    n_sub: int
    n_repeats: int = 20
    seed: int = 0
    allow_sparse: bool = False

    def __post_init__(self):
        if self.n_sub < 1:
            raise ConfigError(f"n_sub must be at least 1, got {self.n_sub}")
        if self.n_repeats < 1:
            raise ConfigError(f"n_repeats must be at least 1, got {self.n_repeats}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")

    @classmethod
    def from_dict(cls, values: dict) -> 'SubsampleConfig':
        return _from_dict(cls, values)


class BiasPlacement(Enum):
    RANDOM = 'random'
    CONTIGUOUS = 'contiguous'

    @classmethod
    def of(cls, value) -> 'BiasPlacement':
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError as e:
            raise ConfigError(f"unknown bias placement {value!r}") from e

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SyntheticConfig:
    """
    Per-vertex Bernoulli generator. Each vertex gets vertex_size rows when set,
    otherwise size_step * R rows with R uniform in 1..size_multiples.
    """
    m: int = 10
    vertex_size: typing.Optional[int] = None
    size_step: int = 200
    size_multiples: int = 10
    p_base: float = 0.5
    delta: float = 0.0
    n_biased_low: int = 0
    n_biased_high: int = 0
    placement: BiasPlacement = BiasPlacement.RANDOM
    seed: int = 0
    attribute_names: typing.Tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, 'placement', BiasPlacement.of(self.placement))
        object.__setattr__(self, 'attribute_names',
                           tuple(self.attribute_names) or default_attribute_names(self.m))
        self.validate()

    def validate(self):
        if self.m < 1:
            raise ConfigError(f"m must be at least 1, got {self.m}")
        if self.seed < 0:
            raise ConfigError(f"seed must be non-negative, got {self.seed}")
        if len(self.attribute_names) != self.m:
            raise ConfigError(f"{len(self.attribute_names)} attribute names for m={self.m}")
        if self.vertex_size is not None and self.vertex_size < 1:
            raise ConfigError(f"vertex_size must be positive, got {self.vertex_size}")
        if self.size_step < 1 or self.size_multiples < 1:
            raise ConfigError("size_step and size_multiples must be positive")
        if self.delta < 0:
            raise ConfigError(f"delta must be non-negative, got {self.delta}")
        if not 0 <= self.p_base - self.delta or not self.p_base + self.delta <= 1:
            raise ConfigError(f"p_base={self.p_base} with delta={self.delta} leaves [0, 1]")
        if self.n_biased_low < 0 or self.n_biased_high < 0:
            raise ConfigError("biased vertex counts must be non-negative")
        if self.n_biased_low + self.n_biased_high > 2 ** self.m:
            raise ConfigError(f"{self.n_biased_low} + {self.n_biased_high} biased vertices "
                              f"exceed the {2 ** self.m} vertices")

    @classmethod
    def from_dict(cls, values: dict) -> 'SyntheticConfig':
        values = dict(values)
        if 'attribute_names' in values:
            values['attribute_names'] = tuple(values['attribute_names'])
        return _from_dict(cls, values)

    def to_dict(self) -> dict:
        values = {f.name: getattr(self, f.name) for f in fields(self)}
        values['placement'] = str(self.placement)
        values['attribute_names'] = list(self.attribute_names)
        return values
