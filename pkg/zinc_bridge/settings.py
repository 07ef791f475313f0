from typing import Optional

from pydantic import BaseSettings, validator

DEFAULT_MZN2FZN_COMMAND = (
    "minizinc --compile --solver org.minizinc.mzn-fzn {mzn} {data} --fzn {fzn}"
)


class Settings(BaseSettings):
    mzn2fzn_command: str = DEFAULT_MZN2FZN_COMMAND
    fzn_solver_command: Optional[str] = None
    oracle_budget: int = 1_000_000
    log_level: str = "WARNING"
    log_format: str = "text"

    class Config:
        env_prefix = "ZINC_BRIDGE_"

    @validator("oracle_budget")
    def _positive_budget(cls, value: int) -> int:
        if value <= 0:
            raise ValueError("oracle budget must be positive")
        return value

    @validator("log_format")
    def _known_format(cls, value: str) -> str:
        if value not in ("text", "json"):
            raise ValueError("log format must be 'text' or 'json'")
        return value
