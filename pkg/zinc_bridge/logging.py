from typing import Any, Dict

import uuid
from copy import deepcopy

from zinc_bridge import __version__


class LoggingContext(Dict[str, Any]):
    def __init__(self, command: str) -> None:
        super().__init__()

        self["zinc_bridge.version"] = __version__
        self["run.command"] = command
        self["run.uuid"] = str(uuid.uuid4())

    def with_input(self, path: str) -> "LoggingContext":
        self["input.path"] = path
        return self

    def with_stage(self, stage: str) -> "LoggingContext":
        self["pipeline.stage"] = stage
        return self

    def with_verdict(self, verdict: str) -> "LoggingContext":
        context = deepcopy(self)
        context["oracle.verdict"] = verdict
        return context

    def with_exit_code(self, exit_code: int) -> "LoggingContext":
        context = deepcopy(self)
        context["exit.code"] = exit_code
        return context
