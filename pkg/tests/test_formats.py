import json
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np
import pytest
import tomli

from pgrl.core import ParseError
from pgrl.exactla import Matrix
from pgrl.formats import (dumps, format_form, format_matrices, jsonable,
                          load_schema, parse_form_file, parse_form_text,
                          parse_matrix_file, parse_matrix_text, validate,
                          write_json, write_record)
from pgrl.nilring import VectorForm

TWO_MATRICES = """
3 2 2
1 2
0 1

3 2 2
2 0
0 1
"""


def test_parse_matrices() -> None:
    matrices = parse_matrix_text(TWO_MATRICES)
    assert matrices == [Matrix([[1, 2], [0, 1]], 3), Matrix([[2, 0], [0, 1]], 3)]
    assert parse_matrix_text(format_matrices(matrices)) == matrices


@pytest.mark.parametrize(
    "text",
    [
        "",
        "   \n\n",
        "3 2\n1 0\n0 1\n",
        "3 2 2\n1 0\n",
        "3 2 2\n1 0 0\n0 1\n",
        "3 2 2\n1 x\n0 1\n",
        "3 2 2\n1 3\n0 1\n",
        "3 2 2\n1 -1\n0 1\n",
        "1 1 1\n0\n",
        "2 0 1\n",
    ],
)
def test_malformed_matrices(text: str) -> None:
    with pytest.raises(ParseError):
        parse_matrix_text(text)


def test_parse_form() -> None:
    text = "3 1 3 2\n0 1 2\n9 0 1\n9 9 0\n\n0 0 1\n0 0 0\n0 0 0\n"
    form = parse_form_text(text)
    assert (form.p, form.r, form.n, form.k) == (3, 1, 3, 2)
    # lower triangles are ignored
    assert form.mats[0].tolist() == [[0, 1, 2], [2, 0, 1], [1, 2, 0]]
    assert parse_form_text(format_form(form)) == form
    assert parse_form_text(format_form(VectorForm.symplectic(5, 2, r=2))) == (
        VectorForm.symplectic(5, 2, r=2)
    )


@pytest.mark.parametrize(
    "text",
    [
        "",
        "2 1 2\n0 1\n0 0\n",
        "2 1 2 1\n0 1\n",
        "2 1 2 1\n0 1 1\n0 0\n",
        "2 1 2 1\n0 2\n0 0\n",
        "2 0 2 1\n0 1\n0 0\n",
        "4 1 2 1\n0 1\n0 0\n",
        "2 1 2 1\n0 a\n0 0\n",
    ],
)
def test_malformed_forms(text: str) -> None:
    with pytest.raises(ParseError):
        parse_form_text(text)


def test_files(tmp_dir: Path) -> None:
    matrix_path = tmp_dir / "gens.txt"
    matrix_path.write_text(TWO_MATRICES)
    assert len(parse_matrix_file(matrix_path)) == 2
    form_path = tmp_dir / "form.txt"
    form_path.write_text(format_form(VectorForm.symplectic(2, 1)))
    assert parse_form_file(form_path) == VectorForm.symplectic(2, 1)
    with pytest.raises(FileNotFoundError):
        parse_matrix_file(tmp_dir / "missing.txt")


def test_jsonable() -> None:
    value = {
        1: np.int64(3),
        "flag": np.bool_(True),
        "array": np.arange(3),
        "pair": (Fraction(4, 2), Fraction(1, 3)),
    }
    assert jsonable(value) == {
        "1": 3,
        "flag": True,
        "array": [0, 1, 2],
        "pair": [2, "1/3"],
    }


def test_dumps_is_deterministic() -> None:
    first = dumps({"b": 1, "a": [np.int64(2)]})
    second = dumps({"a": [2], "b": 1})
    assert first == second
    assert first.endswith("\n")
    assert json.loads(first) == {"a": [2], "b": 1}


def test_write_json(tmp_dir: Path) -> None:
    path = write_json(tmp_dir / "out" / "report.json", {"ok": True})
    assert json.loads(path.read_text()) == {"ok": True}


def test_write_record(tmp_dir: Path) -> None:
    record = {"name": "d16", "params": {}, "ok": True, "missing": None, "x": Fraction(1, 2)}
    path = write_record(tmp_dir / "d16.toml", record)
    with open(path, "rb") as f:
        loaded = tomli.load(f)
    assert loaded == {"name": "d16", "params": {}, "ok": True, "x": "1/2"}


def test_schemas() -> None:
    for name in ("zero_ideal", "zero_ideal_verify", "closure", "omega_index",
                 "abelian_type", "verbal_index", "build_group", "isotropy",
                 "isotropy_form", "verify", "bounds"):
        schema = load_schema(name)
        jsonschema.Draft202012Validator.check_schema(schema)
    with pytest.raises(jsonschema.ValidationError):
        validate({"unexpected": 1}, "bounds")
