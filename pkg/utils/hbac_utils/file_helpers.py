import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Dict, Iterable, List, Sequence

from utils.hbac_utils.hbac_errors import InvalidParameterError


def create_output_file(content, file_name):
    """Writes content next to its final name, then renames it into place."""
    if content == '':
        return
    target = Path(file_name)
    target.parent.mkdir(parents=True, exist_ok=True)
    handle, temp_name = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
    try:
        with os.fdopen(handle, "w", newline="") as f:
            f.write(content)
        os.replace(temp_name, target)
    except BaseException:
        if os.path.exists(temp_name):
            os.remove(temp_name)
        raise


def check_rows(rows: Sequence[Dict[str, object]], columns: Sequence[str], index_column: str = "n"):
    """Declared columns only, no NaN, and a strictly increasing round index inside each series."""
    last_index = {}
    for position, row in enumerate(rows):
        if tuple(row.keys()) != tuple(columns):
            raise InvalidParameterError(f"Row {position} has columns {list(row.keys())}, expected {list(columns)}")
        for column, value in row.items():
            if isinstance(value, float) and math.isnan(value):
                raise InvalidParameterError(f"Row {position} has NaN in column {column}")
        if index_column in row:
            series = row.get("variant", "")
            index = row[index_column]
            if series in last_index and index <= last_index[series]:
                raise InvalidParameterError(f"Round index {index} at row {position} is not increasing")
            last_index[series] = index


def rows_to_csv(rows: Sequence[Dict[str, object]], columns: Sequence[str]) -> str:
    check_rows(rows, columns)
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({column: _format_value(value) for column, value in row.items()})
    return buffer.getvalue()


def rows_to_records(rows: Iterable[Dict[str, object]]) -> str:
    """One JSON object per line, keys in row order."""
    return "".join(json.dumps(row, allow_nan=False) + "\n" for row in rows)


def write_rows(rows: List[Dict[str, object]], columns: Sequence[str], file_name, output_format: str = "csv"):
    if output_format == "csv":
        content = rows_to_csv(rows, columns)
    elif output_format == "records":
        check_rows(rows, columns)
        content = rows_to_records(rows)
    else:
        raise InvalidParameterError(f"Unknown output format {output_format!r}")
    create_output_file(content, file_name)


def _format_value(value):
    if isinstance(value, float):
        return repr(value)
    return value
