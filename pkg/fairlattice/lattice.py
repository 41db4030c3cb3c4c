import logging
import math
import typing
from dataclasses import dataclass

import numpy as np
from cachetools import cached, LRUCache

from datatypes import Trit, SubgroupSpec
from fairlattice import config
from fairlattice.exceptions import CapacityError, InvalidSplitError, LevelBoundsError

logger = logging.getLogger(__name__)

# n, n_pos, tp, fp, tn, fn as int64 plus one int8 level code and one int32 first-star power
BYTES_PER_ENTRY = 6 * 8 + 1 + 4


@dataclass(frozen=True)
class LatticeShape:
    m: int
    h_per_level: typing.Tuple[int, ...]
    h_total: int
    edge_count: int

    @property
    def edge_bound(self) -> int:
        return 2 * self.m * 3 ** self.m


def check_attribute_count(m: int):
    if m < 1:
        raise LevelBoundsError(f"attribute count must be at least 1, got {m}")
    limit = config.max_m()
    if m > limit:
        raise CapacityError(f"M={m} exceeds the capacity guard {limit} (FAIRLATTICE_MAX_M)")
    needed = 3 ** m * BYTES_PER_ENTRY
    if needed > config.memory_budget():
        raise CapacityError(f"M={m} needs about {needed:,} bytes, "
                            f"over the memory budget {config.memory_budget():,}")


def _check_level(m: int, k: int):
    if not 0 <= k <= m:
        raise LevelBoundsError(f"level {k} outside 0..{m}")


def level_size(m: int, k: int) -> int:
    _check_level(m, k)
    return math.comb(m, k) * 2 ** (m - k)


def shape(m: int) -> LatticeShape:
    check_attribute_count(m)
    h_per_level = tuple(level_size(m, k) for k in range(m + 1))
    edge_count = sum(2 * k * h for k, h in enumerate(h_per_level))
    return LatticeShape(m=m, h_per_level=h_per_level, h_total=sum(h_per_level), edge_count=edge_count)


def encode(spec: SubgroupSpec) -> int:
    index = 0
    for code in spec.codes:
        index = index * 3 + code.value
    return index


def decode(index: int, m: int) -> SubgroupSpec:
    if not 0 <= index < 3 ** m:
        raise LevelBoundsError(f"lattice index {index} outside 0..{3 ** m - 1}")
    codes = []
    for _ in range(m):
        index, digit = divmod(index, 3)
        codes.append(Trit.of(digit))
    return SubgroupSpec(tuple(reversed(codes)))


def _freeze(array: np.ndarray) -> np.ndarray:
    array.setflags(write=False)
    return array


@cached(LRUCache(maxsize=32))
def level_codes(m: int) -> np.ndarray:
    """ star count of every lattice index, built by prepending one digit at a time """
    check_attribute_count(m)
    codes = np.zeros(1, dtype=np.int8)
    for _ in range(m):
        codes = np.concatenate([codes, codes, codes + 1])
    return _freeze(codes)


@cached(LRUCache(maxsize=32))
def first_star_powers(m: int) -> np.ndarray:
    """ 3**(m-1-i) for the first star position i of every index, 0 for vertices """
    check_attribute_count(m)
    powers = np.zeros(1, dtype=np.int32)
    for j in range(m):
        # a star in the new leading digit is the first star of the longer spec
        powers = np.concatenate([powers, powers, np.full(3 ** j, 3 ** j, dtype=np.int32)])
    return _freeze(powers)


@cached(LRUCache(maxsize=256))
def level_indices(m: int, k: int) -> np.ndarray:
    _check_level(m, k)
    return _freeze(np.flatnonzero(level_codes(m) == k))


def vertex_indices(m: int) -> np.ndarray:
    return level_indices(m, 0)


def enumerate_level(m: int, k: int) -> typing.Tuple[SubgroupSpec, ...]:
    check_attribute_count(m)
    _check_level(m, k)
    return tuple(decode(int(i), m) for i in level_indices(m, k))


def first_star(spec: SubgroupSpec) -> typing.Optional[int]:
    for position, code in enumerate(spec.codes):
        if code == Trit.STAR:
            return position
    return None


def split(spec: SubgroupSpec, star_position: int) -> typing.Tuple[SubgroupSpec, SubgroupSpec]:
    if not 0 <= star_position < spec.m or spec.codes[star_position] != Trit.STAR:
        raise InvalidSplitError(f"position {star_position} of {spec} does not hold a star")
    return spec.replace(star_position, Trit.ZERO), spec.replace(star_position, Trit.ONE)


def splits(spec: SubgroupSpec) -> typing.Iterator[typing.Tuple[int, SubgroupSpec, SubgroupSpec]]:
    """ every edge pair of the hypercube graph leaving spec """
    for position in spec.star_positions:
        low, high = split(spec, position)
        yield position, low, high


def covered_vertices(spec: SubgroupSpec) -> typing.Iterator[SubgroupSpec]:
    for bits in spec.vertex_bits():
        yield SubgroupSpec(tuple(Trit.of(b) for b in bits))
