from __future__ import annotations

import pytest

from pwqeval.schema import (
    FLAG,
    INTEGER,
    STRING,
    FlagValue,
    IntValue,
    ParamSpec,
    ParameterSchema,
    SchemaError,
    StrValue,
    default_schema,
    parse_schema_text,
    schema_lookup,
)


def test_default_schema_has_twenty_parameters():
    assert len(default_schema()) == 20


def test_default_schema_kinds():
    schema = default_schema()
    kinds = {spec.name: spec.value_kind for spec in schema}
    assert kinds["minlen"] == INTEGER
    assert kinds["badwords"] == STRING
    assert kinds["dictpath"] == STRING
    assert kinds["enforce_for_root"] == FLAG
    assert kinds["local_users_only"] == FLAG
    assert sum(1 for k in kinds.values() if k == INTEGER) == 16


def test_key_defaults():
    schema = default_schema()
    assert schema.lookup("difok").default == IntValue(1)
    assert schema.lookup("minlen").default == IntValue(8)
    assert schema.lookup("dictcheck").default == IntValue(1)
    assert schema.lookup("usercheck").default == IntValue(1)
    assert schema.lookup("enforcing").default == IntValue(1)
    assert schema.lookup("retry").default == IntValue(1)
    assert schema.lookup("dcredit").default == IntValue(0)
    assert schema.lookup("badwords").default == StrValue("")
    assert schema.lookup("enforce_for_root").default == FlagValue(False)


def test_defaults_returns_fresh_dict():
    schema = default_schema()
    first = schema.defaults()
    first["minlen"] = IntValue(99)
    assert schema.defaults()["minlen"] == IntValue(8)


def test_lookup_and_contains():
    schema = default_schema()
    assert "minlen" in schema
    assert "check_userpass" not in schema
    assert schema.lookup("check_userpass") is None
    assert schema_lookup("retry").name == "retry"
    assert schema_lookup("nope") is None


def test_names_preserve_catalog_order():
    schema = default_schema()
    names = schema.names()
    assert names[0] == "difok"
    assert len(names) == len(set(names)) == 20


def test_parse_schema_text_roundtrip_minimal():
    schema = parse_schema_text("a\tinteger\t3\nb\tflag\tabsent\nc\tstring\t\tdesc\n")
    assert len(schema) == 3
    assert schema.lookup("a").default == IntValue(3)
    assert schema.lookup("b").default == FlagValue(False)
    assert schema.lookup("c").default == StrValue("")
    assert schema.lookup("c").description == "desc"


def test_parse_schema_text_skips_comments_and_blanks():
    schema = parse_schema_text("# catalog\n\na\tinteger\t0\n")
    assert schema.names() == ("a",)


@pytest.mark.parametrize(
    "text",
    [
        "a\tinteger\n",  # too few fields
        "a\tinteger\tx\n",  # non-integer default
        "a\tflag\tmaybe\n",  # bad flag default
        "a\twat\t1\n",  # unknown kind
        "a\tinteger\t1\na\tinteger\t2\n",  # duplicate name
    ],
)
def test_parse_schema_text_rejects_bad_catalogs(text):
    with pytest.raises(SchemaError):
        parse_schema_text(text)


def test_param_spec_validates_kind_and_default():
    with pytest.raises(SchemaError):
        ParamSpec("x", "integer", StrValue("8"))
    with pytest.raises(SchemaError):
        ParamSpec("x", "bogus", IntValue(1))


def test_schema_rejects_duplicates_directly():
    spec = ParamSpec("x", "integer", IntValue(0))
    with pytest.raises(SchemaError):
        ParameterSchema([spec, spec])


def test_value_types_compare_exactly():
    assert IntValue(1) != StrValue("1")
    assert IntValue(1) != FlagValue(True)
    assert StrValue("") == StrValue("")
    assert FlagValue(True) != FlagValue(False)
