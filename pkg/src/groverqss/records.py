"""Typed tables that serialize to CSV or JSON and parse back unchanged."""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .exceptions import ConfigurationError

FORMATS = ("csv", "structured-text")
_TYPES = {"int": int, "float": float, "str": str, "bool": bool}


@dataclass(frozen=True)
class Column:
    name: str
    type: str = "str"

    def __post_init__(self):
        if self.type not in _TYPES:
            raise ConfigurationError(f"unknown column type {self.type!r}")

    def coerce(self, value: Any) -> Any:
        if self.type == "float":
            return float(value)
        if self.type == "int":
            if isinstance(value, bool) or int(value) != value:
                raise ConfigurationError(f"column {self.name}: {value!r} is not an integer")
            return int(value)
        if self.type == "bool":
            if not isinstance(value, bool):
                raise ConfigurationError(f"column {self.name}: {value!r} is not a bool")
            return value
        return str(value)

    def format_cell(self, value: Any) -> str:
        if self.type == "float":
            return repr(float(value))
        if self.type == "bool":
            return "true" if value else "false"
        return str(value)

    def parse_cell(self, text: str) -> Any:
        if self.type == "float":
            return float(text)
        if self.type == "int":
            return int(text)
        if self.type == "bool":
            if text not in ("true", "false"):
                raise ConfigurationError(f"column {self.name}: bad bool {text!r}")
            return text == "true"
        return text


def columns(spec: str) -> tuple[Column, ...]:
    """``"k:int,success:float,label"`` -> columns (type defaults to str)."""
    out = []
    for part in spec.split(","):
        name, _, kind = part.strip().partition(":")
        out.append(Column(name, kind or "str"))
    return tuple(out)


@dataclass
class Table:
    name: str
    columns: tuple[Column, ...]
    rows: list[tuple] = field(default_factory=list)

    def __post_init__(self):
        if isinstance(self.columns, str):
            self.columns = columns(self.columns)
        self.rows = [self._coerce(r) for r in self.rows]

    def _coerce(self, row: Sequence) -> tuple:
        if len(row) != len(self.columns):
            raise ConfigurationError(f"row has {len(row)} cells, table {self.name} has {len(self.columns)}")
        return tuple(c.coerce(v) for c, v in zip(self.columns, row))

    def append(self, *row) -> None:
        self.rows.append(self._coerce(row))

    def extend(self, rows: Iterable[Sequence]) -> None:
        for r in rows:
            self.append(*r)

    @property
    def names(self) -> list[str]:
        return [c.name for c in self.columns]

    def column(self, name: str) -> list:
        j = self.names.index(name)
        return [r[j] for r in self.rows]

    def dicts(self) -> list[dict]:
        return [dict(zip(self.names, r)) for r in self.rows]

    def __eq__(self, other):
        if not isinstance(other, Table):
            return NotImplemented
        return (
            self.name == other.name
            and self.columns == other.columns
            and len(self.rows) == len(other.rows)
            and all(_row_eq(a, b) for a, b in zip(self.rows, other.rows))
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.names)
        for r in self.rows:
            w.writerow([c.format_cell(v) for c, v in zip(self.columns, r)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str, name: str, cols: Sequence[Column] | str) -> "Table":
        cols = columns(cols) if isinstance(cols, str) else tuple(cols)
        reader = csv.reader(io.StringIO(text))
        header = next(reader, None)
        if header != [c.name for c in cols]:
            raise ConfigurationError(f"csv header {header} does not match {[c.name for c in cols]}")
        rows = [tuple(c.parse_cell(v) for c, v in zip(cols, line)) for line in reader if line]
        return cls(name, cols, rows)

    def to_json(self) -> str:
        doc = {
            "table": self.name,
            "columns": [{"name": c.name, "type": c.type} for c in self.columns],
            "rows": [list(r) for r in self.rows],
        }
        return json.dumps(doc, indent=1, allow_nan=True) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Table":
        doc = json.loads(text)
        cols = tuple(Column(c["name"], c["type"]) for c in doc["columns"])
        return cls(doc["table"], cols, [tuple(r) for r in doc["rows"]])

    def serialize(self, fmt: str = "csv") -> str:
        if fmt == "csv":
            return self.to_csv()
        if fmt == "structured-text":
            return self.to_json()
        raise ConfigurationError(f"unknown format {fmt!r}; choose from {FORMATS}")


def parse_table(text: str, fmt: str, name: str = "", cols: Sequence[Column] | str = ()) -> Table:
    if fmt == "structured-text":
        return Table.from_json(text)
    return Table.from_csv(text, name, cols)


def _row_eq(a: tuple, b: tuple) -> bool:
    for x, y in zip(a, b):
        if isinstance(x, float) and isinstance(y, float) and math.isnan(x) and math.isnan(y):
            continue
        if x != y:
            return False
    return True
