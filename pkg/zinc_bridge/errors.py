from typing import Optional, Sequence


class ZincBridgeError(Exception):
    exit_code = 70


class UsageError(ZincBridgeError):
    exit_code = 1


class ParseError(ZincBridgeError):
    exit_code = 2

    def __init__(
        self, message: str, line: Optional[int] = None, column: Optional[int] = None
    ) -> None:
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"{line}:{column}: {message}"
        super().__init__(message)


class TokenizeError(ParseError):
    pass


class ValidationError(ZincBridgeError):
    exit_code = 3


class UnknownSymbolError(ValidationError):
    def __init__(
        self, symbol: str, what: str = "symbol", where: Optional[str] = None
    ) -> None:
        self.symbol = symbol
        prefix = f"{where}: " if where else ""
        super().__init__(f"{prefix}unknown {what} '{symbol}'")


class SortMismatchError(ValidationError):
    pass


class ScopeError(ValidationError):
    def __init__(self, symbol: str, detail: str = "out-of-scope theory symbol") -> None:
        self.symbol = symbol
        super().__init__(f"{detail}: '{symbol}'")


class UnsupportedConstraintError(ValidationError):
    def __init__(self, name: str, detail: str = "unsupported constraint") -> None:
        self.name = name
        super().__init__(f"{detail}: '{name}'")


class ModeError(ValidationError):
    pass


class WidthError(ValidationError):
    pass


class LossyEmissionError(ValidationError):
    pass


class CardinalityError(ValidationError, ValueError):
    pass


class MissingVariableError(ValidationError):
    def __init__(self, name: str) -> None:
        self.name = name
        super().__init__(
            f"fresh variable '{name}' is not declared in the FlatZinc output"
        )


class VerdictIncorrect(ZincBridgeError):
    exit_code = 4


class ExternalToolError(ZincBridgeError):
    exit_code = 5


class CompilerSpawnError(ExternalToolError):
    def __init__(self, command: Sequence[str], reason: str) -> None:
        self.command = list(command)
        super().__init__(f"cannot run {' '.join(self.command)!r}: {reason}")


class CompilerFailedError(ExternalToolError):
    def __init__(self, command: Sequence[str], returncode: int, stderr: str) -> None:
        self.command = list(command)
        self.returncode = returncode
        self.stderr = stderr
        super().__init__(
            f"{' '.join(self.command)!r} exited with status {returncode}: "
            f"{stderr.strip()}"
        )
