"""
Brute-force reference counts: every intersectional subgroup is filtered from
the dataset on its own. Shares no matching or indexing code with tally, so an
agreement between the two is evidence, not tautology.
"""
import itertools
import logging

import numpy as np

from fairlattice import config
from fairlattice.exceptions import CapacityError
from fairlattice.models import DatasetView
from fairlattice.tally import CountTable, TallyMode

logger = logging.getLogger(__name__)


def work(m: int, n_rows: int) -> int:
    return 3 ** m * n_rows


def comparison_count(m: int, n_rows: int) -> int:
    """ attribute comparisons made by brute_force_counts: each attribute is fixed in 2 of every 3 specs """
    return n_rows * m * 2 * 3 ** (m - 1)


def check_budget(m: int, n_rows: int):
    budget = config.oracle_budget()
    if work(m, n_rows) > budget:
        raise CapacityError(f"oracle work 3^{m} x {n_rows} exceeds budget {budget:,} "
                            f"(FAIRLATTICE_ORACLE_BUDGET)")


def brute_force_counts(data: DatasetView) -> CountTable:
    m, n_rows = data.m, data.n_rows
    check_budget(m, n_rows)

    positive = data.y_true == 1
    confusion = data.has_predictions
    if confusion:
        predicted = data.y_pred == 1
        filters = {
            'tp': positive & predicted,
            'fp': ~positive & predicted,
            'tn': ~positive & ~predicted,
            'fn': positive & ~predicted,
        }
    else:
        filters = {}
    filters['n_pos'] = positive

    size = 3 ** m
    counts = {name: np.zeros(size, dtype=np.int64) for name in ('n', *filters)}
    # product over "01*" walks the specs in ascending base-3 order, attribute 1 first
    for position, pattern in enumerate(itertools.product('01*', repeat=m)):
        member = np.ones(n_rows, dtype=bool)
        for column, symbol in enumerate(pattern):
            if symbol != '*':
                member &= data.attributes[:, column] == int(symbol)
        counts['n'][position] = np.count_nonzero(member)
        for name, selected in filters.items():
            counts[name][position] = np.count_nonzero(member & selected)

    logger.debug("brute force over %d specs and %d rows", size, n_rows)
    return CountTable(m=m,
                      mode=TallyMode.CONFUSION if confusion else TallyMode.OUTCOME,
                      propagated=True,
                      **counts)
