from typing import Optional

import enum
from dataclasses import dataclass


class SortKind(str, enum.Enum):
    BOOL = "Bool"
    INT = "Int"
    REAL = "Real"
    BITVEC = "BitVec"


@dataclass(frozen=True)
class Sort:
    kind: SortKind
    width: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind == SortKind.BITVEC:
            if self.width is None or self.width < 1:
                raise ValueError(f"bit-vector width must be positive, got {self.width}")
        elif self.width is not None:
            raise ValueError(f"{self.kind.value} takes no width")

    @property
    def is_bool(self) -> bool:
        return self.kind == SortKind.BOOL

    @property
    def is_arithmetic(self) -> bool:
        return self.kind in (SortKind.INT, SortKind.REAL)

    @property
    def is_bv(self) -> bool:
        return self.kind == SortKind.BITVEC

    @property
    def is_numeric(self) -> bool:
        return self.kind != SortKind.BOOL

    def __str__(self) -> str:
        if self.kind == SortKind.BITVEC:
            return f"(_ BitVec {self.width})"
        return self.kind.value


BOOL = Sort(SortKind.BOOL)
INT = Sort(SortKind.INT)
REAL = Sort(SortKind.REAL)


def bitvec(width: int) -> Sort:
    return Sort(SortKind.BITVEC, width)
