"""
Synthetic benchmark populations: every vertex gets its own row count and its
own Bernoulli success probability, so the amount of intersectional bias is
known by construction.
"""
import logging
import typing

import numpy as np

from fairlattice.models import BiasPlacement, DatasetView, SyntheticConfig

logger = logging.getLogger(__name__)

EXPERIMENT_M = 10
EXPERIMENT_N_SUB = 100
EXPERIMENT_N_REPEATS = 20
EXPERIMENT_BIASED_VERTICES = 100
EXPERIMENT_TWO_DELTAS = (0.0, 0.1, 0.2, 0.3, 0.4)


def vertex_sizes(cfg: SyntheticConfig, rng: np.random.Generator) -> np.ndarray:
    n_vertices = 2 ** cfg.m
    if cfg.vertex_size is not None:
        return np.full(n_vertices, cfg.vertex_size, dtype=np.int64)
    return cfg.size_step * rng.integers(1, cfg.size_multiples + 1, size=n_vertices, dtype=np.int64)


def vertex_probabilities(cfg: SyntheticConfig, rng: np.random.Generator) -> np.ndarray:
    n_vertices = 2 ** cfg.m
    p = np.full(n_vertices, cfg.p_base)
    if cfg.placement == BiasPlacement.RANDOM:
        order = rng.permutation(n_vertices)
    else:
        order = np.arange(n_vertices)
    p[order[:cfg.n_biased_low]] = cfg.p_base - cfg.delta
    if cfg.n_biased_high:
        # disjoint from the low set since n_low + n_high <= 2^m
        p[order[n_vertices - cfg.n_biased_high:]] = cfg.p_base + cfg.delta
    return p


def generate(cfg: SyntheticConfig) -> DatasetView:
    cfg.validate()
    rng = np.random.default_rng(np.random.SeedSequence(cfg.seed))
    sizes = vertex_sizes(cfg, rng)
    p = vertex_probabilities(cfg, rng)

    numbers = np.repeat(np.arange(2 ** cfg.m, dtype=np.int64), sizes)
    shifts = np.arange(cfg.m - 1, -1, -1, dtype=np.int64)
    attributes = (numbers[:, None] >> shifts) & 1
    labels = rng.random(numbers.size) < p[numbers]

    logger.info("generated %d rows over %d vertices (delta=%s, %d low, %d high, %s placement)",
                numbers.size, 2 ** cfg.m, cfg.delta, cfg.n_biased_low, cfg.n_biased_high, cfg.placement)
    return DatasetView(attributes=attributes, y_true=labels.astype(np.int64),
                       attribute_names=cfg.attribute_names, source=f'synthetic:seed={cfg.seed}')


def experiment_one(seed: int = 0, **overrides) -> SyntheticConfig:
    """ every vertex at p=0.5, sizes 200·R with R in 1..10 """
    return SyntheticConfig(m=EXPERIMENT_M, seed=seed, **overrides)


def experiment_two(delta: float, seed: int = 0, **overrides) -> SyntheticConfig:
    values = dict(m=EXPERIMENT_M, delta=delta, seed=seed,
                  n_biased_low=EXPERIMENT_BIASED_VERTICES,
                  n_biased_high=EXPERIMENT_BIASED_VERTICES,
                  placement=BiasPlacement.CONTIGUOUS)
    values.update(overrides)
    return SyntheticConfig(**values)


def experiment_two_sweep(seed: int = 0, deltas: typing.Iterable[float] = EXPERIMENT_TWO_DELTAS,
                         **overrides) -> typing.List[SyntheticConfig]:
    return [experiment_two(delta, seed, **overrides) for delta in deltas]


def random_dataset(m: int, n_rows: int, seed: int = 0, predictions: bool = True) -> DatasetView:
    """ uniform attributes, labels and predictions with no structure, for equivalence checks """
    rng = np.random.default_rng(np.random.SeedSequence(seed))
    attributes = rng.integers(0, 2, size=(n_rows, m))
    y_true = rng.integers(0, 2, size=n_rows)
    y_pred = rng.integers(0, 2, size=n_rows) if predictions else None
    return DatasetView(attributes=attributes, y_true=y_true, y_pred=y_pred, source=f'random:seed={seed}')
