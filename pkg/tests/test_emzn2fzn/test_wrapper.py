from fractions import Fraction
import json

import pytest
from pydantic import ValidationError as PydanticValidationError

from zinc_bridge.emzn2fzn import (
    Substitution,
    SubstitutionTable,
    compiler_command,
    patch_fzn,
    rewrite_mzn,
    run_wrapper,
)
from zinc_bridge.errors import (
    CompilerFailedError,
    CompilerSpawnError,
    MissingVariableError,
    TokenizeError,
)

DOMAIN = Fraction(100)
COPY = "cp {mzn} {fzn}"


def test_equal_fractions_share_one_fresh_variable():
    text, table = rewrite_mzn(
        "constraint x = 1/3 + 2/6;\nconstraint y = 1/3;\n", float_domain=DOMAIN
    )
    assert text == (
        "var -100.0..100.0: zb_frac_1;\n"
        "constraint x = zb_frac_1 + zb_frac_1;\n"
        "constraint y = zb_frac_1;\n"
    )
    assert table.values() == {"zb_frac_1": Fraction(1, 3)}
    entry = table.entries["zb_frac_1"]
    assert (entry.line, entry.column) == (1, 16)


def test_every_division_gets_its_own_variable_without_dedup():
    text, table = rewrite_mzn(
        "constraint x = 1/3 + 2/6;\nconstraint y = 1/3;\n",
        dedup=False,
        float_domain=DOMAIN,
    )
    assert len(table) == 3
    assert "zb_frac_3" in table
    assert set(table.values().values()) == {Fraction(1, 3)}
    assert "constraint x = zb_frac_1 + zb_frac_2;" in text


def test_decimal_literals_are_read_exactly():
    _, table = rewrite_mzn("constraint x = 0.1/3;", float_domain=DOMAIN)
    assert table.values() == {"zb_frac_1": Fraction(1, 30)}


@pytest.mark.parametrize(
    "text",
    [
        "constraint x = 2 ^ 1/3;",
        "constraint x = 1/2 ^ 3;",
        "constraint x = y div 4/2;",
        "constraint x = y mod 4/2;",
        "constraint x = 1/0;",
        "constraint x = y/3;",
        "% 1/2 in a comment\nconstraint x = 1.5;",
        'output ["1/2"];',
    ],
)
def test_other_divisions_are_left_alone(text):
    assert rewrite_mzn(text) == (text, SubstitutionTable())


def test_par_float_declarations_become_variables():
    text, _ = rewrite_mzn(
        "float: half = 1/2;\npar float: quarter = 1/4;\nvar float: v = 3/4;\n",
        float_domain=DOMAIN,
    )
    body = text.split("\n")[3:]
    assert body == [
        "var float: half = zb_frac_1;",
        "var float: quarter = zb_frac_2;",
        "var float: v = zb_frac_3;",
        "",
    ]


def test_fresh_names_avoid_existing_identifiers():
    _, table = rewrite_mzn("var int: zb_frac_1;\nconstraint x = 1/7;")
    assert list(table.entries) == ["zb_frac_2"]


def test_default_domain_is_the_single_precision_range():
    text, _ = rewrite_mzn("constraint x = 1/3;")
    assert text.startswith("var -3.402823e+38..3.402823e+38: zb_frac_1;\n")


@pytest.mark.parametrize("text", ["constraint x = 1/3; /* open", 'output ["1/3];'])
def test_unterminated_tokens_are_rejected(text):
    with pytest.raises(TokenizeError):
        rewrite_mzn(text)


def test_substitutions_need_a_denominator():
    with pytest.raises(PydanticValidationError):
        Substitution(numerator=1, denominator=0, line=1, column=1)
    entry = Substitution(numerator=-2, denominator=3, line=1, column=1)
    assert entry.value == Fraction(-2, 3)


def _table(**values: Fraction) -> SubstitutionTable:
    return SubstitutionTable(
        entries={
            name: Substitution(
                numerator=value.numerator,
                denominator=value.denominator,
                line=1,
                column=1,
            )
            for name, value in values.items()
        }
    )


def test_patch_goes_before_the_solve_item():
    fzn = "var -1.0..1.0: zb_frac_1;\nsolve satisfy;\n"
    patched = patch_fzn(fzn, _table(zb_frac_1=Fraction(-1, 3)))
    assert patched == (
        "var -1.0..1.0: zb_frac_1;\n"
        "constraint float_div(-1.0, 3.0, zb_frac_1);\n"
        "solve satisfy;\n"
    )


def test_patch_is_appended_without_a_solve_item():
    patched = patch_fzn("var float: zb_frac_1;", _table(zb_frac_1=Fraction(1, 2)))
    assert patched == (
        "var float: zb_frac_1;\nconstraint float_div(1.0, 2.0, zb_frac_1);\n"
    )
    assert patch_fzn("solve satisfy;\n", SubstitutionTable()) == "solve satisfy;\n"


def test_eliminated_fresh_variables_are_reported():
    with pytest.raises(MissingVariableError) as raised:
        patch_fzn("var float: x;\nsolve satisfy;\n", _table(zb_frac_1=Fraction(1, 2)))
    assert raised.value.name == "zb_frac_1"
    assert raised.value.exit_code == 3


def test_compiler_command_expands_every_data_file(tmp_path):
    mzn, fzn = tmp_path / "m.mzn", tmp_path / "m.fzn"
    data = [tmp_path / "a.dzn", tmp_path / "b.dzn"]
    template = "mzn2fzn {mzn} {data} --output-to={fzn}"
    command = compiler_command(template, mzn, data, fzn)
    assert command == ["mzn2fzn", str(mzn), *map(str, data), f"--output-to={fzn}"]
    bare = compiler_command("mzn2fzn {mzn} {data}", mzn, [], fzn)
    assert bare == ["mzn2fzn", str(mzn)]


MODEL = "var float: x;\nconstraint x = 1/3;\nsolve satisfy;\n"


def test_wrapper_round_trip(write, tmp_path):
    model = write("model.mzn", MODEL)
    table_path = tmp_path / "model.fractions.json"
    fzn = run_wrapper(
        model, compiler=COPY, float_domain=Fraction(10), table_path=table_path
    )
    assert fzn == (
        "var -10.0..10.0: zb_frac_1;\n"
        "var float: x;\n"
        "constraint x = zb_frac_1;\n"
        "constraint float_div(1.0, 3.0, zb_frac_1);\n"
        "solve satisfy;\n"
    )
    assert json.loads(table_path.read_text()) == {
        "entries": {
            "zb_frac_1": {"numerator": 1, "denominator": 3, "line": 2, "column": 16}
        }
    }
    assert sorted(path.name for path in tmp_path.iterdir()) == [
        "model.fractions.json",
        "model.mzn",
    ]


def test_wrapper_uses_the_configured_compiler(write, monkeypatch):
    monkeypatch.setenv("ZINC_BRIDGE_MZN2FZN_COMMAND", COPY)
    fzn = run_wrapper(write("model.mzn", MODEL), float_domain=Fraction(10))
    assert "constraint float_div(1.0, 3.0, zb_frac_1);" in fzn


def test_missing_compiler(write):
    with pytest.raises(CompilerSpawnError) as raised:
        run_wrapper(write("model.mzn", MODEL), compiler="zb-no-such-compiler {mzn}")
    assert raised.value.command[0] == "zb-no-such-compiler"


def test_failing_compiler(write, tmp_path):
    with pytest.raises(CompilerFailedError) as raised:
        run_wrapper(write("model.mzn", MODEL), compiler="false {mzn} {fzn}")
    assert raised.value.returncode == 1
    assert [path.name for path in tmp_path.iterdir()] == ["model.mzn"]
