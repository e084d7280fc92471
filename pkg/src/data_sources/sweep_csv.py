"""Read and write sweep result tables.

Files are CSV with the fixed column order in CSV_COLUMNS, floats written
with "%.16e" and "\\n" line endings so a rerun reproduces the file byte for
byte.
"""

import logging
import math
import re
from dataclasses import asdict
from pathlib import Path
from typing import Optional

import pandas as pd

from src.config import CSV_COLUMNS, CSV_FLOAT_FORMAT
from src.detector_schema import SweepRow, SweepTable
from src.errors import SweepFileError

logger = logging.getLogger(__name__)

_FLOAT_COLUMNS = [c for c in CSV_COLUMNS if c != "status"]
_PARSER_LINE = re.compile(r"line (\d+)")


def write_sweep_table(table: SweepTable, path: str) -> Path:
    """Write the rows of `table` to `path` and return the path."""
    frame = pd.DataFrame([asdict(row) for row in table.rows], columns=CSV_COLUMNS)
    target = Path(path)
    frame.to_csv(
        target,
        index=False,
        float_format=CSV_FLOAT_FORMAT,
        lineterminator="\n",
        na_rep="nan",
    )
    logger.info("wrote %d row(s) to %s", len(frame), target)
    return target


def _parse_float(value, column: str, line: int) -> float:
    if not isinstance(value, str) or not value.strip():
        raise SweepFileError(f"missing value for {column}", line=line)
    try:
        return float(value)
    except ValueError as exc:
        raise SweepFileError(f"{column} is not a number: {value!r}", line=line) from exc


def read_sweep_table(path: str, mode: Optional[str] = None) -> SweepTable:
    """Parse a sweep CSV, checking the header and every field.

    Raises SweepFileError carrying the 1-based file line of the first bad
    row; a file with a header but no rows is an error too.
    """
    source = Path(path)
    try:
        with source.open() as handle:
            header = handle.readline().rstrip("\r\n")
    except OSError as exc:
        raise SweepFileError(f"cannot read {path}: {exc}") from exc
    if not header:
        raise SweepFileError("file is empty", line=1)
    if header.split(",") != CSV_COLUMNS:
        raise SweepFileError(
            f"header must be {','.join(CSV_COLUMNS)}, got {header}", line=1
        )

    try:
        frame = pd.read_csv(source, dtype=str, keep_default_na=False)
    except pd.errors.ParserError as exc:
        match = _PARSER_LINE.search(str(exc))
        line = int(match.group(1)) if match else None
        raise SweepFileError(f"malformed row: {exc}", line=line) from exc
    if frame.empty:
        raise SweepFileError("no data rows", line=2)

    rows = []
    for idx, record in enumerate(frame.to_dict(orient="records")):
        line = idx + 2
        values = {c: _parse_float(record[c], c, line) for c in _FLOAT_COLUMNS}
        status = record["status"]
        if not isinstance(status, str) or not status:
            raise SweepFileError("missing status", line=line)
        if math.isnan(values["swept"]):
            raise SweepFileError("swept value is nan", line=line)
        rows.append(SweepRow(status=status, **values))
    return SweepTable(mode=mode or "", rows=rows)
