from __future__ import annotations

import pytest

from pwqeval.schema import parse_schema_text

MINI_SCHEMA_TEXT = (
    "minlen\tinteger\t8\tminimum length\n"
    "difok\tinteger\t1\tnew-vs-old difference\n"
    "dcredit\tinteger\t0\tdigit credit\n"
    "retry\tinteger\t1\tprompt retries\n"
)


@pytest.fixture(scope="session")
def mini_schema():
    return parse_schema_text(MINI_SCHEMA_TEXT)


@pytest.fixture
def write_conf(tmp_path):
    """Write named config files into tmp_path and return the directory."""

    def _write(files: dict[str, str]):
        for name, text in files.items():
            (tmp_path / name).write_text(text, encoding="utf-8")
        return tmp_path

    return _write
