"""Shared text utilities: tokenization and small vector helpers."""

from __future__ import annotations

import math
import re
from collections import Counter
from typing import Iterable, Mapping

_TOKEN = re.compile(r"[^\W_]+", re.UNICODE)

MIN_TOKEN_LEN = 2


def tokenize(text: str) -> list[str]:
    """Lowercase, split on non-alphanumeric runs, drop tokens shorter than 2 chars."""
    return [t for t in _TOKEN.findall(text.lower()) if len(t) >= MIN_TOKEN_LEN]


def term_counts(terms: Iterable[str]) -> Counter:
    return Counter(terms)


def cosine(a: Mapping[str, float], b: Mapping[str, float]) -> float:
    """Cosine similarity of two sparse vectors; 0.0 when either has no mass."""
    if not a or not b:
        return 0.0
    dot = sum(w * b[k] for k, w in a.items() if k in b)
    na = math.sqrt(sum(w * w for w in a.values()))
    nb = math.sqrt(sum(w * w for w in b.values()))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return dot / (na * nb)


def jaccard(a: set[str], b: set[str]) -> float:
    if not a and not b:
        return 0.0
    union = a | b
    if not union:
        return 0.0
    return len(a & b) / len(union)
