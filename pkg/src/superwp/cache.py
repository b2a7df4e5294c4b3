"""JSON-lines persistence for the shared correlator table.

One record per line::

    {"genus": 2, "kappa": [[1, 1]], "psi": [], "value": "3/128"}

Records are written in canonical key order.  Loading merges into the
in-memory table; a record that disagrees with a value already present is a
hard error.
"""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .combinatorics import MultiIndex
from .correlator import CorrelatorKey, table_load, table_snapshot
from .render import format_rational, parse_rational

__all__ = ["CacheRecord", "CacheError", "cache_load", "cache_store", "default_cache_path",
           "read_records"]


class CacheError(ValueError):
    """Malformed cache content."""


@dataclass(frozen=True)
class CacheRecord:
    genus: int
    kappa: tuple[tuple[int, int], ...]
    psi: tuple[int, ...]
    value: Fraction

    @classmethod
    def from_key(cls, key: CorrelatorKey, value: Fraction) -> "CacheRecord":
        return cls(key.genus, tuple(key.kappa.items()), key.psi, Fraction(value))

    @property
    def key(self) -> CorrelatorKey:
        return CorrelatorKey(self.genus, MultiIndex.from_counts(dict(self.kappa)), self.psi)

    def render(self) -> str:
        payload = {
            "genus": self.genus,
            "kappa": [list(p) for p in self.kappa],
            "psi": list(self.psi),
            "value": format_rational(self.value, explicit_denominator=True),
        }
        return json.dumps(payload, sort_keys=True, separators=(", ", ": "))

    @classmethod
    def parse(cls, line: str) -> "CacheRecord":
        try:
            obj = json.loads(line)
            genus = obj["genus"]
            kappa = tuple(sorted((int(i), int(c)) for i, c in obj["kappa"] if int(c)))
            psi = tuple(sorted((int(d) for d in obj["psi"]), reverse=True))
            value = parse_rational(obj["value"])
        except (ValueError, KeyError, TypeError) as exc:
            raise CacheError(f"bad cache record {line.strip()!r}: {exc}") from None
        if not isinstance(genus, int) or genus < 0 or any(i < 1 or c < 0 for i, c in kappa) \
                or any(d < 0 for d in psi):
            raise CacheError(f"bad cache record {line.strip()!r}")
        return cls(genus, kappa, psi, value)


def default_cache_path() -> Path:
    base = os.environ.get("XDG_CACHE_HOME") or os.path.join(os.path.expanduser("~"), ".cache")
    return Path(base) / "superwp" / "correlators.jsonl"


def read_records(path) -> list[CacheRecord]:
    path = Path(path)
    if not path.exists():
        return []
    with path.open(encoding="utf-8") as fh:
        return [CacheRecord.parse(line) for line in fh if line.strip()]


def cache_load(path) -> int:
    """Merge the file into the shared table; returns the number of new entries.

    Raises ``StrategyDisagreement`` on a conflicting value and
    :class:`CacheError` on a malformed line or on two file lines that disagree.
    """
    records: dict[CorrelatorKey, Fraction] = {}
    for rec in read_records(path):
        key = rec.key
        if key in records and records[key] != rec.value:
            raise CacheError(f"cache file holds two values for {key}")
        records[key] = rec.value
    return table_load(records)


def _canonical(records: Iterable[CacheRecord]) -> list[CacheRecord]:
    return sorted(records, key=lambda r: r.key.sort_key())


def cache_store(path) -> int:
    """Write the shared table to ``path`` atomically; returns the record count."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    snapshot = table_snapshot()
    records = _canonical(CacheRecord.from_key(k, v) for k, v in snapshot.items())
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write(rec.render() + "\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return len(records)
