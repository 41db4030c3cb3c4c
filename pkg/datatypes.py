import itertools
import typing
from dataclasses import dataclass
from enum import Enum


class Traits(Enum):
    @classmethod
    def of(cls, i):
        if isinstance(i, cls):
            return i
        for mem in cls.__members__.values():
            if i == mem.value or str(i).strip().lower() == str(mem).lower():
                return mem
        raise ValueError(f"not found {i}")

    def __str__(self):
        return str(self.value)


class Trit(Traits):
    ZERO = 0
    ONE = 1
    STAR = 2

    def __str__(self):
        return "01*"[self.value]


class MetricKind(Traits):
    SUCCESS_RATE = "sr"
    ACCURACY = "accuracy"
    TPR = "tpr"
    FPR = "fpr"
    TNR = "tnr"
    FNR = "fnr"
    PRECISION = "precision"

    @property
    def needs_confusion(self) -> bool:
        return self != MetricKind.SUCCESS_RATE

    @classmethod
    def confusion_kinds(cls) -> typing.Tuple['MetricKind', ...]:
        return tuple(k for k in cls if k.needs_confusion)


@dataclass(frozen=True)
class SubgroupSpec:
    """ one hypercube as a vector of 0, 1 and * codes, a point of {0,1,*}^M """
    codes: typing.Tuple[Trit, ...]

    def __post_init__(self):
        object.__setattr__(self, 'codes', tuple(Trit.of(c) for c in self.codes))

    @classmethod
    def parse(cls, text: str) -> 'SubgroupSpec':
        """ accepts both "01*" and "(0,1,*)" """
        symbols = [c for c in text if c in "01*"]
        if not symbols:
            raise ValueError(f"empty subgroup spec {text!r}")
        return cls(tuple(Trit.of(c) for c in symbols))

    @classmethod
    def main(cls, m: int) -> 'SubgroupSpec':
        return cls((Trit.STAR,) * m)

    @classmethod
    def from_vertex_number(cls, number: int, m: int) -> 'SubgroupSpec':
        # attribute 1 is the most significant bit
        return cls(tuple(Trit.of((number >> (m - 1 - i)) & 1) for i in range(m)))

    @property
    def m(self) -> int:
        return len(self.codes)

    @property
    def level(self) -> int:
        return sum(1 for c in self.codes if c == Trit.STAR)

    @property
    def is_vertex(self) -> bool:
        return self.level == 0

    @property
    def is_main(self) -> bool:
        return self.level == self.m

    @property
    def star_positions(self) -> typing.Tuple[int, ...]:
        return tuple(i for i, c in enumerate(self.codes) if c == Trit.STAR)

    def replace(self, position: int, code: Trit) -> 'SubgroupSpec':
        codes = list(self.codes)
        codes[position] = code
        return SubgroupSpec(tuple(codes))

    def vertex_bits(self) -> typing.Iterator[typing.Tuple[int, ...]]:
        """ bit patterns of every vertex contained in this hypercube """
        choices = [(0, 1) if c == Trit.STAR else (c.value,) for c in self.codes]
        return itertools.product(*choices)

    def __str__(self):
        return "({})".format(",".join(str(c) for c in self.codes))
