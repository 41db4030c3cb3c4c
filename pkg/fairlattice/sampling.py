import logging
import typing

import numpy as np

from datatypes import SubgroupSpec
from fairlattice.exceptions import UnderPopulatedVertexError
from fairlattice.models import DatasetView, SubsampleConfig

logger = logging.getLogger(__name__)


def vertex_counts(data: DatasetView) -> np.ndarray:
    """ rows per vertex, indexed by binary vertex number """
    return np.bincount(data.vertex_numbers(), minlength=2 ** data.m)


def check_population(data: DatasetView, cfg: SubsampleConfig) -> np.ndarray:
    counts = vertex_counts(data)
    short = np.flatnonzero(counts < cfg.n_sub)
    if short.size == 0:
        return counts
    smallest = int(short[np.argmin(counts[short])])
    vertex = str(SubgroupSpec.from_vertex_number(smallest, data.m))
    if not cfg.allow_sparse:
        raise UnderPopulatedVertexError(vertex, int(counts[smallest]), cfg.n_sub)
    logger.warning("%d vertices hold fewer than %d rows (smallest %s with %d), sampling what exists",
                   short.size, cfg.n_sub, vertex, counts[smallest])
    return counts


def repeat_rng(seed: int, repeat: int) -> np.random.Generator:
    """ independent generator of one repetition, a child stream of seed """
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(repeat,)))


def _draw(data: DatasetView, cfg: SubsampleConfig, counts: np.ndarray, repeat: int) -> DatasetView:
    rng = repeat_rng(cfg.seed, repeat)
    order = np.argsort(data.vertex_numbers(), kind='stable')
    ends = np.cumsum(counts)
    chosen = []
    for vertex, end in enumerate(ends):
        members = order[end - counts[vertex]:end]
        take = min(cfg.n_sub, members.size)
        if take:
            chosen.append(rng.choice(members, size=take, replace=False))
    return data.take(np.concatenate(chosen))


def subsample_view(data: DatasetView, cfg: SubsampleConfig, repeat: int = 0) -> DatasetView:
    return _draw(data, cfg, check_population(data, cfg), repeat)


def balanced_subsample(data: DatasetView, cfg: SubsampleConfig) -> typing.List[DatasetView]:
    counts = check_population(data, cfg)
    logger.info("subsampling %d rows per vertex over %d vertices, %d repetitions (seed %d)",
                cfg.n_sub, 2 ** data.m, cfg.n_repeats, cfg.seed)
    return [_draw(data, cfg, counts, i) for i in range(cfg.n_repeats)]
