import logging
import math
import typing
from dataclasses import dataclass, asdict
from enum import Enum

import numpy as np

from datatypes import MetricKind, SubgroupSpec
from fairlattice import config, lattice
from fairlattice.exceptions import (
    BenchmarkError,
    DataError,
    DegenerateVarianceError,
    EmptyLevelError,
)
from fairlattice.tally import CountTable, rates

logger = logging.getLogger(__name__)

Tables = typing.Union[CountTable, typing.Sequence[CountTable]]

LEVEL_COLUMNS = ('level', 'h_k', 'n_avg', 'n_min', 'sr_min', 'sr_max', 'di', 'sp',
                 'var', 'log_var', 'var_isp', 'var_ratio')


def _as_tables(tables: Tables) -> typing.List[CountTable]:
    return [tables] if isinstance(tables, CountTable) else list(tables)


@dataclass(frozen=True)
class IspBenchmark:
    """ variance law of level success rates under intersectional statistical parity """
    p_tot: float
    n_per_vertex: float

    def __post_init__(self):
        if not 0 <= self.p_tot <= 1:
            raise BenchmarkError(f"p_tot={self.p_tot} outside [0, 1]")
        if self.n_per_vertex <= 0:
            raise BenchmarkError(f"n_per_vertex must be positive, got {self.n_per_vertex}")

    @property
    def alpha(self) -> float:
        return self.p_tot * (1 - self.p_tot) / self.n_per_vertex

    @classmethod
    def from_tables(cls, tables: Tables, n_per_vertex: typing.Optional[float] = None) -> 'IspBenchmark':
        """ p_tot pooled over the tables; n_per_vertex defaults to the mean vertex count N/2^M """
        tables = _as_tables(tables)
        main = tables[0].size - 1
        n = sum(int(t.n[main]) for t in tables)
        n_pos = sum(int(t.n_pos[main]) for t in tables)
        if n == 0:
            raise BenchmarkError("no rows to estimate p_tot")
        if n_per_vertex is None:
            n_per_vertex = n / len(tables) / 2 ** tables[0].m
        return cls(p_tot=n_pos / n, n_per_vertex=n_per_vertex)


@dataclass(frozen=True)
class LevelReport:
    level: int
    h_k: int
    n_avg: float
    n_min: int
    sr_min: float
    sr_max: float
    di: typing.Optional[float]
    sp: float
    var: typing.Optional[float]
    log_var: typing.Optional[float]
    var_isp: float
    var_ratio: typing.Optional[float]
    empty_count: int = 0

    def to_record(self) -> typing.Dict[str, typing.Any]:
        return asdict(self)


class VarRatioBand(Enum):
    ISP_CONSISTENT = 'isp-consistent'
    INTERSECTIONAL_BIAS = 'intersectional-bias'
    BIAS_MITIGATED = 'bias-mitigated'

    @classmethod
    def of(cls, ratio: float, tolerance: float = config.ISP_TOLERANCE) -> 'VarRatioBand':
        if ratio > 1 + tolerance:
            return cls.INTERSECTIONAL_BIAS
        if ratio < 1 - tolerance:
            return cls.BIAS_MITIGATED
        return cls.ISP_CONSISTENT

    @property
    def description(self) -> str:
        return {
            VarRatioBand.ISP_CONSISTENT: 'satisfies or is close to intersectional statistical parity',
            VarRatioBand.INTERSECTIONAL_BIAS: 'contains intersectional bias',
            VarRatioBand.BIAS_MITIGATED: 'hints at training or post-processing with bias mitigation',
        }[self]

    def __str__(self):
        return self.value


def level_rates(table: CountTable, k: int, kind: MetricKind = MetricKind.SUCCESS_RATE) -> np.ndarray:
    return rates(table, kind)[lattice.level_indices(table.m, k)]


def level_extrema(tables: Tables, k: int,
                  kind: MetricKind = MetricKind.SUCCESS_RATE) -> typing.Tuple[float, float]:
    """ min and max of the defined rates at level k, pooled over every table given """
    values = np.concatenate([level_rates(t, k, kind) for t in _as_tables(tables)])
    values = values[~np.isnan(values)]
    if values.size == 0:
        raise EmptyLevelError(k)
    return float(values.min()), float(values.max())


def disparate_impact(low: float, high: float) -> typing.Optional[float]:
    if high == 0:
        return None
    return low / high


def statistical_parity(low: float, high: float) -> float:
    return high - low


def opportunity_ratio_diff(tables: Tables, k: int, kind: MetricKind) -> typing.Tuple[typing.Optional[float], float]:
    low, high = level_extrema(tables, k, kind)
    return disparate_impact(low, high), statistical_parity(low, high)


def accuracy_ratio_diff(tables: Tables, k: int) -> typing.Tuple[typing.Optional[float], float]:
    return opportunity_ratio_diff(tables, k, MetricKind.ACCURACY)


def empirical_variance(rate_sets: typing.Iterable[np.ndarray]) -> float:
    """
    Population variance of every defined rate around their common mean;
    each set holds the level rates of one subsample repetition.
    """
    samples = np.concatenate([np.asarray(r, dtype=float).reshape(-1) for r in rate_sets])
    samples = samples[~np.isnan(samples)]
    if samples.size < 2:
        raise DegenerateVarianceError(f"{samples.size} defined rate(s), at least 2 needed")
    return float(np.var(samples))


def isp_variance(bench: IspBenchmark, k: int) -> float:
    return bench.alpha * 2.0 ** -k


def log_isp_variance(bench: IspBenchmark, k: int) -> float:
    return math.log(bench.alpha) - k * math.log(2)


def var_ratio(var: float, var_isp: float) -> float:
    if var_isp <= 0:
        raise BenchmarkError(f"ISP variance must be positive, got {var_isp}")
    return var / var_isp


def balanced_level_size(n_total: float, m: int, k: int) -> float:
    """ mean number of rows per hypercube at level k """
    return n_total * 2.0 ** (k - m)


def variance_lower_bound(bench: IspBenchmark, h_k: int, n_k: float) -> float:
    if h_k < 1 or n_k <= 0:
        raise BenchmarkError(f"lower bound needs h_k >= 1 and n_k > 0, got {h_k}, {n_k}")
    return (h_k - 1) / h_k * bench.p_tot * (1 - bench.p_tot) / n_k


def expected_isp_variance(p_tot: float, counts: np.ndarray) -> float:
    """ expected level variance under ISP for uncorrelated rates with the given sizes """
    counts = np.asarray(counts, dtype=float)
    h_k = counts.size
    return (h_k - 1) / h_k ** 2 * float(np.sum(p_tot * (1 - p_tot) / counts))


def level_counts(tables: Tables, k: int) -> typing.Tuple[float, int]:
    """ mean and minimum rows per hypercube at level k, pooled over tables """
    counts = np.concatenate([t.n[lattice.level_indices(t.m, k)] for t in _as_tables(tables)])
    return float(counts.mean()), int(counts.min())


def split_bound_arrays(table: CountTable,
                       kind: MetricKind = MetricKind.SUCCESS_RATE) -> typing.Tuple[np.ndarray, np.ndarray]:
    """
    For every hypercube, max over star positions of the smaller child rate and
    min over star positions of the larger one; only positions whose two
    children both have defined rates count. NaN where no position qualifies.
    """
    values = rates(table, kind)
    index = np.arange(table.size, dtype=np.int64)
    lower = np.full(table.size, np.nan)
    upper = np.full(table.size, np.nan)
    for position in range(table.m):
        power = 3 ** (table.m - 1 - position)
        starred = index[(index // power) % 3 == 2]
        low, high = values[starred - 2 * power], values[starred - power]
        valid = ~np.isnan(low) & ~np.isnan(high)
        starred, low, high = starred[valid], low[valid], high[valid]
        lower[starred] = np.fmax(lower[starred], np.minimum(low, high))
        upper[starred] = np.fmin(upper[starred], np.maximum(low, high))
    return lower, upper


def split_bounds(table: CountTable, spec: SubgroupSpec,
                 kind: MetricKind = MetricKind.SUCCESS_RATE) -> typing.Optional[typing.Tuple[float, float]]:
    if spec.m != table.m:
        raise DataError(f"spec {spec} does not match M={table.m}")
    lower, upper = split_bound_arrays(table, kind)
    index = lattice.encode(spec)
    if np.isnan(lower[index]):
        return None
    return float(lower[index]), float(upper[index])


def level_report(tables: Tables, k: int, bench: IspBenchmark) -> LevelReport:
    tables = _as_tables(tables)
    m = tables[0].m
    rate_sets = [level_rates(t, k) for t in tables]
    empty_count = int(sum(np.isnan(r).sum() for r in rate_sets))
    sr_min, sr_max = level_extrema(tables, k)
    n_avg, n_min = level_counts(tables, k)
    try:
        var = empirical_variance(rate_sets)
    except DegenerateVarianceError:
        logger.debug("level %d: variance undefined", k)
        var = None
    var_isp = isp_variance(bench, k)
    ratio = None
    if var is not None:
        try:
            ratio = var_ratio(var, var_isp)
        except BenchmarkError:
            logger.warning("level %d: ISP benchmark variance is 0 (p_tot=%s), VarRatio undefined", k, bench.p_tot)
    return LevelReport(
        level=k,
        h_k=lattice.level_size(m, k),
        n_avg=n_avg,
        n_min=n_min,
        sr_min=sr_min,
        sr_max=sr_max,
        di=disparate_impact(sr_min, sr_max),
        sp=statistical_parity(sr_min, sr_max),
        var=var,
        log_var=math.log(var) if var else None,
        var_isp=var_isp,
        var_ratio=ratio,
        empty_count=empty_count,
    )


def audit_levels(tables: Tables, bench: typing.Optional[IspBenchmark] = None) -> typing.List[LevelReport]:
    tables = _as_tables(tables)
    bench = bench or IspBenchmark.from_tables(tables)
    return [level_report(tables, k, bench) for k in range(tables[0].m + 1)]


def log_variance_slope(reports: typing.Sequence[LevelReport],
                       levels: typing.Optional[typing.Iterable[int]] = None) -> float:
    """ least-squares slope of log Var(K) against K; -log 2 under ISP """
    wanted = set(levels) if levels is not None else None
    points = [(r.level, r.log_var) for r in reports
              if r.log_var is not None and (wanted is None or r.level in wanted)]
    if len(points) < 2:
        raise DegenerateVarianceError("slope needs at least two levels with a defined log variance")
    x, y = zip(*points)
    slope, _ = np.polyfit(np.asarray(x, dtype=float), np.asarray(y, dtype=float), 1)
    return float(slope)
