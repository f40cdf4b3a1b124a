"""Deterministic CSV/JSON writers."""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Iterable, Sequence


def fmt(x) -> str:
    """17 significant digits, '.' separator; integers and strings pass through."""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, str):
        return x
    x = float(x)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if hasattr(obj, "item") and not isinstance(obj, (str, bytes)):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def _parent(path) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    return p


def write_json(path: str | Path, obj) -> None:
    with open(_parent(path), "w", newline="\n") as fh:
        fh.write(dumps(obj))


def write_csv(path: str | Path, header: str, rows: Iterable[Sequence], meta: dict | None = None) -> None:
    """Write rows under ``header``; ``meta`` goes to a sibling ``.meta.json``."""
    with open(_parent(path), "w", newline="\n") as fh:
        fh.write(header + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    if meta is not None:
        write_json(meta_path(path), meta)


def meta_path(path: str | Path) -> Path:
    p = Path(path)
    return p.with_name(p.name + ".meta.json")
