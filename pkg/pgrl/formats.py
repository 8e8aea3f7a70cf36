"""
Reading and writing the files exchanged with the command line: matrices and
alternating forms in plain text, JSON reports and TOML expectation records.

Matrix text format: a header line 'p n m' (modulus, rows, cols) followed by n
lines of m integers in [0, p). Several matrices are separated by blank lines.

Form text format: a header line 'p r n k' followed by k blocks of n x n
integers (blank lines between blocks are optional). Only the strict upper
triangles are read: the diagonal is set to zero and the lower triangle to the
negated transpose.
"""

import json
from fractions import Fraction
from functools import lru_cache
from importlib import resources
from pathlib import Path
from typing import Any, Union

import jsonschema
import numpy as np
import tomli_w
from filelock import FileLock

from .core import PgrlError, ParseError, logger
from .exactla import Matrix
from .nilring import VectorForm

PathLike = Union[str, Path]


def _integers(tokens: list[str], where: str) -> list[int]:
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(f"{where}: expected integers, got '{' '.join(tokens)}'") from None


def _blocks(text: str) -> list[list[list[str]]]:
    # groups of non empty lines, each line split into tokens
    blocks: list[list[list[str]]] = []
    current: list[list[str]] = []
    for line in text.splitlines():
        tokens = line.split()
        if not tokens:
            if current:
                blocks.append(current)
                current = []
            continue
        current.append(tokens)
    if current:
        blocks.append(current)
    return blocks


def parse_matrix_text(text: str) -> list[Matrix]:
    """
    Parse one or several matrices from the matrix text format.

    Args:
        text (str): The content of a matrix file.

    Returns:
        list[Matrix]: The matrices, in the order of the text.

    Raises:
        ParseError: On empty input, a malformed header, a wrong number of rows or
          entries, non integers, or entries outside [0, p).
    """
    blocks = _blocks(text)
    if not blocks:
        raise ParseError("no matrix found in empty input")
    matrices = []
    for number, block in enumerate(blocks, start=1):
        where = f"matrix {number}"
        header = _integers(block[0], f"{where} header")
        if len(header) != 3:
            raise ParseError(f"{where}: header should be 'p n m', got {block[0]}")
        p, rows, cols = header
        if p < 2 or rows < 1 or cols < 1:
            raise ParseError(f"{where}: invalid header {header}")
        body = block[1:]
        if len(body) != rows:
            raise ParseError(f"{where}: expected {rows} rows, got {len(body)}")
        data = []
        for i, line in enumerate(body):
            row = _integers(line, f"{where}, row {i + 1}")
            if len(row) != cols:
                raise ParseError(f"{where}, row {i + 1}: expected {cols} entries, got {len(row)}")
            if any(x < 0 or x >= p for x in row):
                raise ParseError(f"{where}, row {i + 1}: entries should lie in [0, {p})")
            data.append(row)
        try:
            matrices.append(Matrix(data, p))
        except PgrlError as e:
            raise ParseError(f"{where}: {e}") from e
    logger.debug(f"parsed {len(matrices)} matrices")
    return matrices


def parse_matrix_file(path: PathLike) -> list[Matrix]:
    """
    Read a matrix file.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParseError: If the content is not in the matrix text format.
    """
    path = Path(path)
    logger.debug(f"reading matrices from {path}")
    return parse_matrix_text(path.read_text())


def format_matrices(matrices: list[Matrix]) -> str:
    blocks = []
    for m in matrices:
        lines = [f"{m.modulus} {m.rows} {m.cols}"]
        lines += [" ".join(str(x) for x in row) for row in m.tolist()]
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + "\n"


def parse_form_text(text: str) -> VectorForm:
    """
    Parse an alternating form from the form text format.

    Raises:
        ParseError: On a malformed header, wrong counts, non integers, or strict
          upper triangle entries outside [0, p^r).
    """
    rows = [tokens for block in _blocks(text) for tokens in block]
    if not rows:
        raise ParseError("no form found in empty input")
    header = _integers(rows[0], "form header")
    if len(header) != 4:
        raise ParseError(f"form header should be 'p r n k', got {rows[0]}")
    p, r, n, k = header
    if r < 1 or n < 1 or k < 1:
        raise ParseError(f"invalid form header {header}")
    body = rows[1:]
    if len(body) != n * k:
        raise ParseError(f"expected {k} blocks of {n} rows, got {len(body)} rows")
    values = []
    for i, line in enumerate(body):
        row = _integers(line, f"form row {i + 1}")
        if len(row) != n:
            raise ParseError(f"form row {i + 1}: expected {n} entries, got {len(row)}")
        values.append(row)
    mats = np.array(values, dtype=np.int64).reshape(k, n, n)
    upper = np.triu(mats, 1)
    modulus = p**r
    if (upper < 0).any() or (upper >= modulus).any():
        raise ParseError(f"upper triangle entries should lie in [0, {modulus})")
    try:
        return VectorForm.from_upper(p, r, upper)
    except PgrlError as e:
        raise ParseError(f"invalid form: {e}") from e


def parse_form_file(path: PathLike) -> VectorForm:
    path = Path(path)
    logger.debug(f"reading form from {path}")
    return parse_form_text(path.read_text())


def format_form(form: VectorForm) -> str:
    lines = [f"{form.p} {form.r} {form.n} {form.k}"]
    for c in range(form.k):
        if c:
            lines.append("")
        lines += [" ".join(str(int(x)) for x in row) for row in form.mats[c]]
    return "\n".join(lines) + "\n"


def jsonable(value: Any) -> Any:
    """
    value with numpy scalars and arrays, Fractions and tuples converted to
    plain JSON types (Fractions to int when integral, else to 'a/b').
    """
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, Fraction):
        return int(value) if value.denominator == 1 else str(value)
    return value


def dumps(payload: Any) -> str:
    """
    Deterministic JSON: sorted keys, two spaces of indentation, final newline.
    """
    return json.dumps(jsonable(payload), sort_keys=True, indent=2) + "\n"


def _lock_path(path: Path) -> Path:
    return path.with_name(path.name + ".lock")


def write_json(path: PathLike, payload: Any) -> Path:
    """
    Write payload as deterministic JSON, holding a file lock next to the
    target while writing.

    Returns:
        Path: The written file.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with FileLock(_lock_path(path)):
        path.write_text(dumps(payload))
    logger.debug(f"wrote {path}")
    return path


def _toml_ready(value: Any) -> Any:
    # TOML has no null: None entries are dropped
    if isinstance(value, dict):
        return {k: _toml_ready(v) for k, v in value.items() if v is not None}
    if isinstance(value, list):
        return [_toml_ready(v) for v in value if v is not None]
    return value


def write_record(path: PathLike, record: dict[str, Any]) -> Path:
    """
    Write an expectation record as TOML, under a file lock.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    content = _toml_ready(jsonable(record))
    with FileLock(_lock_path(path)):
        with open(path, "wb") as f:
            tomli_w.dump(content, f)
    logger.debug(f"wrote record {path}")
    return path


@lru_cache(maxsize=None)
def load_schema(name: str) -> dict[str, Any]:
    """
    The published JSON schema pgrl/schemas/<name>.json.
    """
    source = resources.files("pgrl") / "schemas" / f"{name}.json"
    return json.loads(source.read_text())


def validate(payload: Any, schema_name: str) -> None:
    """
    Validate a report against its published schema.

    Raises:
        jsonschema.ValidationError: If the report does not conform.
    """
    jsonschema.validate(instance=jsonable(payload), schema=load_schema(schema_name))
