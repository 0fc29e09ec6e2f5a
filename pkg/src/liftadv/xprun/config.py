"""Flat ``key = value`` config files (``#`` starts a comment)."""
from __future__ import annotations

from pathlib import Path


def _coerce(v: str):
    v = v.strip()
    if "," in v:
        return tuple(_coerce(x) for x in v.split(",") if x.strip())
    low = v.lower()
    if low in ("true", "false"):
        return low == "true"
    if low in ("none", ""):
        return None
    for cast in (int, float):
        try:
            return cast(v)
        except ValueError:
            pass
    return v


def parse_config(text: str) -> dict:
    out = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        k, v = line.split("=", 1)
        k = k.strip().replace("-", "_")
        if not k:
            raise ValueError(f"line {lineno}: empty key")
        out[k] = _coerce(v)
    return out


def load_config(path) -> dict:
    return parse_config(Path(path).read_text())
