from zinc_bridge.omt2mzn.bitvector import translate_bv_term
from zinc_bridge.omt2mzn.labels import LabelMode, LabelPlan, daggify
from zinc_bridge.omt2mzn.maxsmt import maxsmt_to_pb
from zinc_bridge.omt2mzn.translator import (
    BoundsPolicy,
    IntDomainMode,
    Manifest,
    MznOutput,
    OutputKind,
    emission_size,
    translate,
)

__all__ = [
    "BoundsPolicy",
    "IntDomainMode",
    "LabelMode",
    "LabelPlan",
    "Manifest",
    "MznOutput",
    "OutputKind",
    "daggify",
    "emission_size",
    "maxsmt_to_pb",
    "translate",
    "translate_bv_term",
]
