import logging
import typing
from dataclasses import dataclass

import numpy as np
import pandas as pd

from fairlattice import config
from fairlattice.exceptions import ConfigError, DataError, MappingError
from fairlattice.models import DatasetView, LABEL_COLUMN, PREDICTION_COLUMN
from utils import get_column_from_list, write_frame

logger = logging.getLogger(__name__)

# column names of the raw UCI adult.data / adult.test files, which have no header
ADULT_COLUMNS = ('age', 'workclass', 'fnlwgt', 'education', 'education-num', 'marital-status',
                 'occupation', 'relationship', 'race', 'sex', 'capital-gain', 'capital-loss',
                 'hours-per-week', 'native-country', 'class')

MARRIED = ('Married-civ-spouse', 'Married-spouse-absent', 'Married-AF-spouse')
NOT_MARRIED = ('Never-married', 'Divorced', 'Separated', 'Widowed')
NON_WHITE = ('Black', 'Asian-Pac-Islander', 'Amer-Indian-Eskimo', 'Other')

DEFAULT_MISSING_VALUES = ('?', '')


def _names(values) -> typing.Tuple[str, ...]:
    if values is None:
        return ()
    if isinstance(values, (str, int, float)):
        values = [values]
    return tuple(str(v).strip() for v in values)


def _columns(values: dict, default: str) -> typing.Tuple[str, ...]:
    columns = _names(values.pop('columns', None)) + _names(values.pop('column', None))
    return columns or (default,)


@dataclass(frozen=True)
class ThresholdRule:
    """ numeric column, value >= threshold maps to 1 """
    name: str
    columns: typing.Tuple[str, ...]
    threshold: float

    def apply(self, column: str, values: pd.Series) -> np.ndarray:
        numbers = pd.to_numeric(values, errors='coerce')
        bad = numbers.isna()
        if bad.any():
            row = bad.idxmax()
            raise MappingError(int(row), column, values[row])
        return (numbers.to_numpy() >= self.threshold).astype(np.int64)

    def to_dict(self) -> dict:
        return {'name': self.name, 'columns': list(self.columns), 'threshold': self.threshold}


@dataclass(frozen=True)
class ValueSetRule:
    """
    Categorical column. Values in positive map to 1, values in negative to 0,
    anything else to `others`; with no `others` default an unlisted value is a
    mapping error, except that a rule listing no negatives maps every
    unlisted value to 0.
    """
    name: str
    columns: typing.Tuple[str, ...]
    positive: typing.Tuple[str, ...]
    negative: typing.Tuple[str, ...] = ()
    others: typing.Optional[int] = None

    def __post_init__(self):
        if not self.positive:
            raise ConfigError(f"rule {self.name!r} lists no positive values")
        overlap = set(self.positive) & set(self.negative)
        if overlap:
            raise ConfigError(f"rule {self.name!r} lists {sorted(overlap)} as both positive and negative")
        if self.others not in (None, 0, 1):
            raise ConfigError(f"rule {self.name!r}: others must be 0 or 1, got {self.others!r}")

    @property
    def fallback(self) -> typing.Optional[int]:
        if self.others is not None:
            return self.others
        return None if self.negative else 0

    def apply(self, column: str, values: pd.Series) -> np.ndarray:
        out = pd.Series(self.fallback, index=values.index, dtype='float64')
        out[values.isin(self.negative)] = 0
        out[values.isin(self.positive)] = 1
        bad = out.isna()
        if bad.any():
            row = bad.idxmax()
            raise MappingError(int(row), column, values[row])
        return out.to_numpy().astype(np.int64)

    def to_dict(self) -> dict:
        values = {'name': self.name, 'columns': list(self.columns), 'positive': list(self.positive)}
        if self.negative:
            values['negative'] = list(self.negative)
        if self.others is not None:
            values['others'] = self.others
        return values


Rule = typing.Union[ThresholdRule, ValueSetRule]


def rule_from_dict(values: dict, default_name: typing.Optional[str] = None) -> Rule:
    if not isinstance(values, dict):
        raise ConfigError(f"rule must be a mapping, got {values!r}")
    values = dict(values)
    name = str(values.pop('name', default_name) or '')
    if not name:
        raise ConfigError(f"rule without a name: {values!r}")
    columns = _columns(values, name)
    try:
        if 'threshold' in values:
            threshold = float(values.pop('threshold'))
            rule = ThresholdRule(name=name, columns=columns, threshold=threshold)
        else:
            others = values.pop('others', None)
            rule = ValueSetRule(name=name, columns=columns,
                                positive=_names(values.pop('positive', None)),
                                negative=_names(values.pop('negative', None)),
                                others=None if others is None else int(others))
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid rule {name!r}: {e}") from e
    if values:
        raise ConfigError(f"unknown keys in rule {name!r}: {', '.join(sorted(values))}")
    return rule


@dataclass(frozen=True)
class BinarizationConfig:
    attributes: typing.Tuple[Rule, ...]
    label: Rule
    prediction: typing.Optional[Rule] = None
    missing_values: typing.Tuple[str, ...] = DEFAULT_MISSING_VALUES

    def __post_init__(self):
        if not self.attributes:
            raise ConfigError("binarization config needs at least one attribute rule")
        names = [r.name for r in self.attributes]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate attribute names in {names}")

    @property
    def m(self) -> int:
        return len(self.attributes)

    @property
    def rules(self) -> typing.Tuple[Rule, ...]:
        extra = (self.label,) if self.prediction is None else (self.label, self.prediction)
        return tuple(self.attributes) + extra

    @classmethod
    def from_dict(cls, values: dict) -> 'BinarizationConfig':
        values = dict(values)
        try:
            attributes = values.pop('attributes')
            label = values.pop('label')
        except KeyError as e:
            raise ConfigError(f"binarization config is missing {e.args[0]!r}") from e
        prediction = values.pop('prediction', None)
        missing = values.pop('missing_values', DEFAULT_MISSING_VALUES)
        if values:
            raise ConfigError(f"unknown binarization keys: {', '.join(sorted(values))}")
        if not isinstance(attributes, list):
            raise ConfigError("attributes must be a list of rules")
        return cls(attributes=tuple(rule_from_dict(a) for a in attributes),
                   label=rule_from_dict(label, LABEL_COLUMN),
                   prediction=None if prediction is None else rule_from_dict(prediction, PREDICTION_COLUMN),
                   missing_values=_names(missing))

    def to_dict(self) -> dict:
        values = {'attributes': [r.to_dict() for r in self.attributes],
                  'label': self.label.to_dict(),
                  'missing_values': list(self.missing_values)}
        if self.prediction is not None:
            values['prediction'] = self.prediction.to_dict()
        return values

    def resolve(self, header: typing.Iterable[str]) -> typing.Dict[str, str]:
        """ rule name -> input column, trying each rule's aliases in order """
        header = list(header)
        resolved = {}
        for rule in self.rules:
            column = get_column_from_list(header, rule.columns)
            if column is None:
                raise ConfigError(f"column for {rule.name!r} not found, tried {list(rule.columns)}")
            resolved[rule.name] = column
        return resolved


def load_config(path) -> BinarizationConfig:
    return BinarizationConfig.from_dict(config.load_yaml(path))


def adult_preset() -> BinarizationConfig:
    """
    sex Male->1, race White->1, age >= 40 -> 1, the three Married-* statuses
    -> 1, income above 50K -> 1. Polarities are cosmetic: every metric takes
    extrema over subgroups.
    """
    return BinarizationConfig(
        attributes=(
            ValueSetRule(name='sex', columns=('sex', 'gender'), positive=('Male',), negative=('Female',)),
            ValueSetRule(name='race', columns=('race',), positive=('White',), negative=NON_WHITE),
            ThresholdRule(name='age', columns=('age',), threshold=40),
            ValueSetRule(name='marital-status', columns=('marital-status', 'marital_status', 'marital.status'),
                         positive=MARRIED, negative=NOT_MARRIED),
        ),
        label=ValueSetRule(name=LABEL_COLUMN, columns=('class', 'income', LABEL_COLUMN),
                           positive=('>50K', '>50K.'), negative=('<=50K', '<=50K.')),
    )


def identity_config(attribute_names: typing.Iterable[str], prediction: bool = False) -> BinarizationConfig:
    """ for CSVs whose columns already hold 0/1 values """
    def binary(name):
        return ValueSetRule(name=name, columns=(name,), positive=('1',), negative=('0',))

    return BinarizationConfig(
        attributes=tuple(binary(n) for n in attribute_names),
        label=binary(LABEL_COLUMN),
        prediction=binary(PREDICTION_COLUMN) if prediction else None,
    )


def read_header(path) -> typing.List[str]:
    try:
        return [str(c).strip() for c in pd.read_csv(path, nrows=0, skipinitialspace=True).columns]
    except FileNotFoundError as e:
        raise DataError(f"input file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"cannot parse {path}: {e}") from e


def identity_config_for(path) -> BinarizationConfig:
    """ identity config inferred from a header: every column but label and prediction is an attribute """
    header = read_header(path)
    if LABEL_COLUMN not in header:
        raise ConfigError(f"{path} has no {LABEL_COLUMN!r} column and no binarization config was given")
    attributes = [c for c in header if c not in (LABEL_COLUMN, PREDICTION_COLUMN)]
    return identity_config(attributes, prediction=PREDICTION_COLUMN in header)


def _read_frame(path, header: bool) -> pd.DataFrame:
    options = dict(dtype=str, keep_default_na=False, skipinitialspace=True)
    if not header:
        # the raw test file opens with a "|1x3 Cross validator" line
        options.update(header=None, names=list(ADULT_COLUMNS), comment='|')
    try:
        frame = pd.read_csv(path, **options)
    except FileNotFoundError as e:
        raise DataError(f"input file not found: {path}") from e
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DataError(f"cannot parse {path}: {e}") from e
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame


def load_csv(path, cfg: BinarizationConfig, header: bool = True) -> DatasetView:
    frame = _read_frame(path, header)
    columns = cfg.resolve(frame.columns)
    used = frame[list(dict.fromkeys(columns.values()))].apply(lambda c: c.str.strip())

    # short rows come back as NaN
    missing = (used.isna() | used.isin(cfg.missing_values)).any(axis=1)
    dropped = int(missing.sum())
    used = used[~missing]
    if used.empty:
        raise DataError(f"{path}: no rows left after dropping {dropped} rows with missing values")

    def binarize(rule):
        return rule.apply(columns[rule.name], used[columns[rule.name]])

    data = DatasetView(attributes=np.column_stack([binarize(r) for r in cfg.attributes]),
                       y_true=binarize(cfg.label),
                       y_pred=None if cfg.prediction is None else binarize(cfg.prediction),
                       attribute_names=tuple(r.name for r in cfg.attributes),
                       dropped_rows=dropped,
                       source=str(path))
    logger.info("loaded %d rows with %d attributes from %s (%d dropped for missing values)",
                data.n_rows, data.m, path, dropped)
    return data


def save_csv(data: DatasetView, path):
    write_frame(data.to_frame(), str(path))
