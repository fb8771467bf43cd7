"""Shared I/O helpers: canonical JSON and atomic file replacement."""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

from .errors import RolecastError


def dumps_canonical(obj) -> str:
    """Serialize to compact JSON with sorted keys.

    Identical values always produce identical bytes; round-trip tests,
    seeded-rerun guarantees and the wire protocol all rely on this.
    """
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, separators=(",", ":"))


def dumps_pretty(obj) -> str:
    """Human-editable variant used for config-like files (still canonical)."""
    return json.dumps(obj, ensure_ascii=False, sort_keys=True, indent=2) + "\n"


def write_jsonl(path, records) -> int:
    """Write one canonical JSON object per line. Returns the record count."""
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(dumps_canonical(record))
            fh.write("\n")
            n += 1
    return n


def read_jsonl(path, error=RolecastError):
    """Yield (line_number, parsed_object) for every non-blank line.

    Parse failures raise `error` with the path and line number, so every
    loader reports its own typed error instead of a bare JSONDecodeError.
    """
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield lineno, json.loads(line)
            except json.JSONDecodeError as exc:
                raise error(f"{path}, line {lineno}: invalid JSON: {exc}") from exc


def atomic_write_text(path, text: str) -> None:
    """Write through a temp file + rename so a failed write never clobbers."""
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(path.parent) or ".", prefix=path.name + ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise
