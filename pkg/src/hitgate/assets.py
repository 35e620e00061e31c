"""Location and parsing of the bundled parameter tables.

All parameter tables are plain tab-separated text: ``#`` starts a comment,
the first non-comment line is the header, every following line is a record.
The environment variable ``HITGATE_DATA_DIR`` points the toolkit at an
alternative directory containing replacement tables of the same names.
"""

from __future__ import annotations

import os
from pathlib import Path

_BUNDLED = Path(__file__).parent / "data"


def data_path(name: str) -> Path:
    """Resolve a parameter-table file, honouring HITGATE_DATA_DIR."""
    override = os.environ.get("HITGATE_DATA_DIR")
    if override:
        candidate = Path(override) / name
        if candidate.exists():
            return candidate
    return _BUNDLED / name


def read_table(name: str) -> list[dict[str, str]]:
    """Read a bundled table into a list of header-keyed row dicts."""
    path = data_path(name)
    rows: list[dict[str, str]] = []
    header: list[str] | None = None
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.lstrip().startswith("#"):
                continue
            fields = line.split("\t")
            if header is None:
                header = fields
                continue
            rows.append(dict(zip(header, fields)))
    if header is None:
        raise ValueError(f"{path}: no header line found")
    return rows
