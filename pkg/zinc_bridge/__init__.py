"""Bidirectional compiler between FlatZinc/MiniZinc models and OMT scripts.

OMT scripts are SMT-LIB scripts with the optimization extensions.
"""

from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("zinc-bridge")
except PackageNotFoundError:  # pragma: no cover
    __version__ = "unknown"
