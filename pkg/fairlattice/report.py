import logging
import math
import os
import typing
from dataclasses import dataclass, field
from datetime import datetime

import numpy as np
import pandas as pd
import pytz
import yaml

from datatypes import MetricKind
from fairlattice import config, lattice, metrics, sampling
from fairlattice.exceptions import DataError, DegenerateVarianceError, EmptyLevelError
from fairlattice.models import DatasetView, SubsampleConfig
from fairlattice.tally import CONFUSION_FIELDS, CountTable, TallyMode, build_table, merge, rates
from utils import atomic_write_text, write_frame

logger = logging.getLogger(__name__)

REPORT_FILE = 'report.yml'
LEVELS_FILE = 'levels.csv'
OPPORTUNITY_FILE = 'opportunity.csv'
SUBGROUPS_FILE = 'subgroups.csv'

OPPORTUNITY_COLUMNS = ('level', 'metric', 'min', 'max', 'ratio', 'diff', 'empty_count')


@dataclass(frozen=True)
class AuditReport:
    metadata: typing.Dict[str, typing.Any]
    levels: typing.Tuple[metrics.LevelReport, ...]
    var_ratio_0: typing.Optional[float]
    interpretation: typing.Optional[metrics.VarRatioBand]
    opportunity: typing.Tuple[typing.Dict[str, typing.Any], ...] = ()
    subgroups: typing.Optional[pd.DataFrame] = field(default=None, compare=False)

    def __post_init__(self):
        m = self.metadata['m']
        if len(self.levels) != m + 1:
            raise DataError(f"report holds {len(self.levels)} levels for M={m}")
        if [r.level for r in self.levels] != list(range(m + 1)):
            raise DataError("report levels must run 0..M in ascending order")
        if self.var_ratio_0 != self.levels[0].var_ratio:
            raise DataError("headline VarRatio must equal the level-0 VarRatio")

    @property
    def empty_count(self) -> int:
        return sum(r.empty_count for r in self.levels)

    def levels_frame(self) -> pd.DataFrame:
        return pd.DataFrame([r.to_record() for r in self.levels], columns=list(metrics.LEVEL_COLUMNS))

    def to_dict(self) -> dict:
        band = self.interpretation
        return {
            'metadata': dict(self.metadata),
            'headline': {
                'var_ratio_0': self.var_ratio_0,
                'interpretation': None if band is None else str(band),
                'description': None if band is None else band.description,
            },
            'levels': [r.to_record() for r in self.levels],
            'opportunity': [dict(r) for r in self.opportunity],
        }


def _utc_now() -> str:
    return datetime.now(pytz.utc).isoformat(timespec='seconds')


def opportunity_records(tables: typing.Sequence[CountTable]) -> typing.List[typing.Dict[str, typing.Any]]:
    """ per level worst-case ratio and difference of every confusion statistic """
    records = []
    m = tables[0].m
    for k in range(m + 1):
        for kind in MetricKind.confusion_kinds():
            empty = int(sum(np.isnan(metrics.level_rates(t, k, kind)).sum() for t in tables))
            try:
                low, high = metrics.level_extrema(tables, k, kind)
            except EmptyLevelError:
                records.append({'level': k, 'metric': str(kind), 'min': None, 'max': None,
                                'ratio': None, 'diff': None, 'empty_count': empty})
                continue
            records.append({'level': k, 'metric': str(kind), 'min': low, 'max': high,
                            'ratio': metrics.disparate_impact(low, high),
                            'diff': metrics.statistical_parity(low, high),
                            'empty_count': empty})
    return records


def subgroup_frame(tables: typing.Sequence[CountTable]) -> pd.DataFrame:
    """ one row per hypercube with counts pooled over the tables """
    pooled = merge(tables)
    m = pooled.m
    index = np.arange(pooled.size)
    frame = pd.DataFrame({
        'index': index,
        'spec': [str(lattice.decode(int(i), m)) for i in index],
        'level': lattice.level_codes(m).astype(np.int64),
        'n': pooled.n,
        'n_pos': pooled.n_pos,
        'sr': rates(pooled),
    })
    if pooled.mode == TallyMode.CONFUSION:
        for name in CONFUSION_FIELDS:
            frame[name] = getattr(pooled, name)
    return frame


def _population_check(data: DatasetView, allow_sparse: bool):
    # without subsampling every vertex needs at least one row
    sampling.check_population(data, SubsampleConfig(n_sub=1, n_repeats=1, allow_sparse=allow_sparse))


def run_audit(data: DatasetView,
              n_sub: typing.Optional[int] = None,
              n_repeats: int = config.DEFAULT_N_REPEATS,
              seed: int = config.DEFAULT_SEED,
              allow_sparse: bool = False,
              dump_subgroups: bool = False,
              metadata: typing.Optional[typing.Dict[str, typing.Any]] = None) -> AuditReport:
    if n_sub is not None:
        views = sampling.balanced_subsample(
            data, SubsampleConfig(n_sub=n_sub, n_repeats=n_repeats, seed=seed, allow_sparse=allow_sparse))
    else:
        _population_check(data, allow_sparse)
        views = [data]
        n_repeats = 1

    tables = [build_table(v) for v in views]
    bench = metrics.IspBenchmark.from_tables(tables)
    levels = metrics.audit_levels(tables, bench)

    empty = sum(r.empty_count for r in levels)
    if empty:
        logger.warning("%d undefined subgroup rates excluded from extrema and variance", empty)
    try:
        slope = metrics.log_variance_slope(levels, range(data.m))
    except DegenerateVarianceError:
        slope = None

    headline = levels[0].var_ratio
    band = None if headline is None else metrics.VarRatioBand.of(headline)
    logger.info("VarRatio(0) = %s (%s)", headline, band)

    meta = {
        'source': data.source,
        'attribute_names': list(data.attribute_names),
        'm': data.m,
        'n': data.n_rows,
        'dropped_rows': data.dropped_rows,
        'seed': seed,
        'n_sub': n_sub,
        'n_repeats': n_repeats,
        'allow_sparse': allow_sparse,
        'mode': str(tables[0].mode),
        'p_tot': bench.p_tot,
        'n_per_vertex': bench.n_per_vertex,
        'alpha': bench.alpha,
        'empty_subgroups': empty,
        'edge_traversals': tables[0].edge_traversals,
        'log_var_slope': slope,
        'log_var_slope_isp': -math.log(2),
        'generated_at': _utc_now(),
    }
    meta.update(metadata or {})
    return AuditReport(
        metadata=meta,
        levels=tuple(levels),
        var_ratio_0=headline,
        interpretation=band,
        opportunity=tuple(opportunity_records(tables)) if data.has_predictions else (),
        subgroups=subgroup_frame(tables) if dump_subgroups else None,
    )


def write_report(report: AuditReport, out_dir: str) -> typing.Dict[str, str]:
    """ writes every report file atomically, returns file kind -> path """
    os.makedirs(out_dir, exist_ok=True)
    paths = {'report': os.path.join(out_dir, REPORT_FILE), 'levels': os.path.join(out_dir, LEVELS_FILE)}
    atomic_write_text(paths['report'], yaml.safe_dump(report.to_dict(), sort_keys=False))
    write_frame(report.levels_frame(), paths['levels'])
    if report.opportunity:
        paths['opportunity'] = os.path.join(out_dir, OPPORTUNITY_FILE)
        write_frame(pd.DataFrame(list(report.opportunity), columns=list(OPPORTUNITY_COLUMNS)),
                    paths['opportunity'])
    if report.subgroups is not None:
        paths['subgroups'] = os.path.join(out_dir, SUBGROUPS_FILE)
        write_frame(report.subgroups, paths['subgroups'])
    for kind, path in paths.items():
        logger.info("wrote %s to %s", kind, path)
    return paths


def summary_info(report: AuditReport) -> typing.Dict[str, typing.Any]:
    meta = report.metadata
    return {
        'M': meta['m'],
        'N': meta['n'],
        'SR_tot': f"{meta['p_tot']:.4f}",
        'VarRatio(0)': 'undefined' if report.var_ratio_0 is None else f"{report.var_ratio_0:.3f}",
        'interpretation': 'undefined' if report.interpretation is None else report.interpretation.description,
        'log-variance slope': 'undefined' if meta['log_var_slope'] is None else f"{meta['log_var_slope']:.4f}",
        'empty subgroups': report.empty_count,
    }
