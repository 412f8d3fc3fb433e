"""Pluggable synonym resource used for term-to-concept matching.

The bundled static table stands in for a full lexical database; anything
implementing ``SynonymResource`` (e.g. a WordNet adapter) can replace it.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Protocol, runtime_checkable


@runtime_checkable
class SynonymResource(Protocol):
    def synset(self, term: str) -> set[str]: ...


class StaticSynonyms:
    """In-memory synonym table; lookups are case-insensitive."""

    def __init__(self, table: dict[str, list[str]] | None = None):
        self._table: dict[str, set[str]] = {}
        for term, syns in (table or {}).items():
            self.add(term, syns)

    def add(self, term: str, syns: list[str]) -> None:
        key = term.lower()
        entry = self._table.setdefault(key, set())
        entry.add(key)
        entry.update(s.lower() for s in syns)

    def synset(self, term: str) -> set[str]:
        return set(self._table.get(term.lower(), set()))

    def __len__(self) -> int:
        return len(self._table)

    def to_dict(self) -> dict[str, list[str]]:
        return {t: sorted(s) for t, s in sorted(self._table.items())}


def load_synonyms(path: str | Path) -> StaticSynonyms:
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    return StaticSynonyms(raw)


def save_synonyms(res: StaticSynonyms, path: str | Path) -> None:
    Path(path).write_text(json.dumps(res.to_dict(), indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def bundled_synonyms() -> StaticSynonyms:
    return load_synonyms(Path(__file__).parent / "data" / "synonyms.json")
