from zinc_bridge.fzn2omt.config import EncodeConfig, IntMode, ObjectiveMode
from zinc_bridge.fzn2omt.context import SetEncoding
from zinc_bridge.fzn2omt.encoder import choose_bv_width, encode_model
from zinc_bridge.fzn2omt.globals import encode_global
from zinc_bridge.fzn2omt.propagation import propagate_constants_and_aliases
from zinc_bridge.fzn2omt.pseudo_boolean import detect_and_rewrite_pb

__all__ = [
    "EncodeConfig",
    "IntMode",
    "ObjectiveMode",
    "SetEncoding",
    "choose_bv_width",
    "detect_and_rewrite_pb",
    "encode_global",
    "encode_model",
    "propagate_constants_and_aliases",
]
