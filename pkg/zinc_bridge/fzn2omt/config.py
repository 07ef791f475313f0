from typing import Optional

import enum

from pydantic import BaseModel, validator

from zinc_bridge.smtlib.printer import DIALECTS

MIN_BV_WIDTH = 2
MAX_BV_WIDTH = 63


class IntMode(str, enum.Enum):
    LA = "la"
    BV = "bv"


class ObjectiveMode(str, enum.Enum):
    INDEPENDENT = "independent"
    LEXICOGRAPHIC = "lexicographic"


class EncodeConfig(BaseModel):
    """Options of :func:`~zinc_bridge.fzn2omt.encode_model`.

    ``bv_width=None`` picks the smallest width covering every declared domain
    and integer constant plus a sign bit.
    """

    int_mode: IntMode = IntMode.LA
    bv_width: Optional[int] = None
    pb_rewrite: bool = True
    dialect: str = "default"
    objective_mode: ObjectiveMode = ObjectiveMode.INDEPENDENT

    class Config:
        allow_mutation = False

    @validator("bv_width")
    def _width_in_range(cls, value: Optional[int]) -> Optional[int]:
        if value is not None and not MIN_BV_WIDTH <= value <= MAX_BV_WIDTH:
            raise ValueError(f"bv_width must be in [{MIN_BV_WIDTH}, {MAX_BV_WIDTH}]")
        return value

    @validator("dialect")
    def _known_dialect(cls, value: str) -> str:
        if value not in DIALECTS:
            raise ValueError(
                f"unknown dialect '{value}', expected one of {sorted(DIALECTS)}"
            )
        return value
