"""Builtin signature table.

Union of the FlatZinc 2.2.1 and 2.3.2 standard builtin lists (bool/int/float linear,
comparison, reified, array, element and set builtins) plus the globals that are
encoded by decomposition. Globals appear under both naming generations (``count``
and ``count_eq``, ``maximum_int`` and ``array_int_maximum``) and with the ``fzn_``
prefix newer compilers emit. Entries are keyed by name; overloads differ in arity.

Argument kinds are written compactly: ``int`` is a par int, ``vint`` a var int
(par accepted), ``[]vint`` an array of var ints, and so on.
"""

from typing import Dict, List, Tuple

from dataclasses import dataclass


@dataclass(frozen=True)
class ParamKind:
    base: str
    is_array: bool
    is_var: bool


@dataclass(frozen=True)
class BuiltinSignature:
    name: str
    params: Tuple[ParamKind, ...]
    nonlinear: bool = False


def _kind(token: str) -> ParamKind:
    is_array = token.startswith("[]")
    if is_array:
        token = token[2:]
    is_var = token.startswith("v")
    if is_var:
        token = token[1:]
    return ParamKind(token, is_array, is_var)


SIGNATURES: Dict[str, List[BuiltinSignature]] = {}


def _add(names: str, kinds: str, nonlinear: bool = False) -> None:
    params = tuple(_kind(token) for token in kinds.split())
    for name in names.split():
        signature = BuiltinSignature(name, params, nonlinear)
        SIGNATURES.setdefault(name, []).append(signature)


# bool
_add("array_bool_and array_bool_or", "[]vbool vbool")
_add("array_bool_xor", "[]vbool")
_add("array_bool_element", "vint []bool vbool")
_add("array_var_bool_element", "vint []vbool vbool")
_add("bool2int", "vbool vint")
_add("bool_and bool_or bool_xor", "vbool vbool vbool")
_add("bool_xor", "vbool vbool")
_add("bool_clause", "[]vbool []vbool")
_add("bool_clause_reif", "[]vbool []vbool vbool")
_add("bool_eq bool_le bool_lt bool_not", "vbool vbool")
_add("bool_eq_reif bool_le_reif bool_lt_reif", "vbool vbool vbool")
_add("bool_lin_eq", "[]int []vbool vint")
_add("bool_lin_le", "[]int []vbool int")

# int
_add("array_int_element", "vint []int vint")
_add("array_var_int_element", "vint []vint vint")
_add("array_int_maximum array_int_minimum maximum_int minimum_int", "vint []vint")
_add("int_abs", "vint vint")
_add("int_div int_max int_min int_mod int_plus int_times", "vint vint vint")
_add("int_pow", "vint vint vint", nonlinear=True)
_add("int_eq int_le int_lt int_ne", "vint vint")
_add("int_eq_reif int_le_reif int_lt_reif int_ne_reif", "vint vint vbool")
_add("int_lin_eq int_lin_le int_lin_ne", "[]int []vint int")
_add("int_lin_eq_reif int_lin_le_reif int_lin_ne_reif", "[]int []vint int vbool")
_add("int2float", "vint vfloat")

# float
_add("array_float_element", "vint []float vfloat")
_add("array_var_float_element", "vint []vfloat vfloat")
_add("array_float_maximum array_float_minimum", "vfloat []vfloat")
_add("float_abs", "vfloat vfloat")
_add("float_div float_max float_min float_plus float_times", "vfloat vfloat vfloat")
_add("float_eq float_le float_lt float_ne", "vfloat vfloat")
_add("float_eq_reif float_le_reif float_lt_reif float_ne_reif", "vfloat vfloat vbool")
_add("float_lin_eq float_lin_le float_lin_lt float_lin_ne", "[]float []vfloat float")
_add(
    "float_lin_eq_reif float_lin_le_reif float_lin_lt_reif float_lin_ne_reif",
    "[]float []vfloat float vbool",
)
_add(
    "float_acos float_acosh float_asin float_asinh float_atan float_atanh float_cos "
    "float_cosh float_exp float_ln float_log10 float_log2 float_sin float_sinh "
    "float_sqrt float_tan float_tanh",
    "vfloat vfloat",
    nonlinear=True,
)
_add("float_pow", "vfloat vfloat vfloat", nonlinear=True)

# set
_add("array_set_element", "vint []set vset")
_add("array_var_set_element", "vint []vset vset")
_add("set_card", "vset vint")
_add("set_diff set_intersect set_symdiff set_union", "vset vset vset")
_add("set_eq set_ne set_subset set_superset", "vset vset")
_add("set_eq_reif set_ne_reif set_subset_reif set_superset_reif", "vset vset vbool")
_add("set_in", "vint vset")
_add("set_in_reif", "vint vset vbool")

# globals
_add("all_different_int fzn_all_different_int", "[]vint")
_add("count count_eq fzn_count_eq", "[]vint vint vint")
_add("table_int fzn_table_int", "[]vint []int")
_add("table_bool fzn_table_bool", "[]vbool []bool")


def lookup(name: str) -> List[BuiltinSignature]:
    return SIGNATURES.get(name, [])
