"""CSV / JSON output with explicit sentinels for infinite or missing values."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np


class Missing:
    """A value that was not computed, with a reason code.

    Serialises as ``degenerate:<reason>`` (numerical degeneracy or failure)
    or ``null:<reason>`` (deliberately skipped).
    """

    __slots__ = ("reason", "kind")

    def __init__(self, reason: str, kind: str = "degenerate"):
        self.reason = reason
        self.kind = kind

    def __repr__(self):
        return f"Missing({self.reason!r}, {self.kind!r})"

    def __eq__(self, other):
        return isinstance(other, Missing) and (other.reason, other.kind) == (self.reason, self.kind)

    def __hash__(self):
        return hash(("Missing", self.reason, self.kind))

    def __str__(self):
        return f"{self.kind}:{self.reason}"


NOT_REQUESTED = Missing("not-requested", "null")


def is_number(v) -> bool:
    return isinstance(v, (int, float, np.integer, np.floating)) and not isinstance(v, bool)


def finite(v) -> bool:
    return is_number(v) and math.isfinite(v)


def encode(v):
    """JSON-ready value: floats stay numbers, inf/nan/Missing become strings."""
    if isinstance(v, Missing):
        return str(v)
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if is_number(v):
        v = float(v)
        if math.isnan(v):
            return "degenerate:nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    if isinstance(v, np.ndarray):
        return [encode(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [encode(x) for x in v]
    if isinstance(v, dict):
        return {str(k): encode(x) for k, x in v.items()}
    if v is None:
        return None
    return v if isinstance(v, (str, int)) else str(v)


def cell(v) -> str:
    """CSV cell text; sequences are ';'-joined."""
    if isinstance(v, (list, tuple, np.ndarray)):
        return ";".join(cell(x) for x in v)
    e = encode(v)
    if e is None:
        return ""
    if isinstance(e, float):
        return repr(e)
    return str(e)


def decode_cell(text: str):
    """Inverse of :func:`cell` for scalar cells."""
    if text == "":
        return None
    if text == "inf":
        return math.inf
    if text == "-inf":
        return -math.inf
    for kind in ("degenerate", "null"):
        if text.startswith(kind + ":"):
            return Missing(text.split(":", 1)[1], kind)
    try:
        return float(text)
    except ValueError:
        return text


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            values = [row.get(h) for h in header] if isinstance(row, dict) else list(row)
            w.writerow([cell(v) for v in values])


def read_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [{k: decode_cell(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def dumps(obj) -> str:
    return json.dumps(encode(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
