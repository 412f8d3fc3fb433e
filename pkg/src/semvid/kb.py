"""Tiered document store with pheromone-style relevance trails.

Documents live in one of three tiers: active, usual, depreciated. Every
document carries a pheromone level tau. User feedback deposits onto it,
periodic evaporation decays all trails geometrically, and reorganization
migrates documents between tiers purely as a function of tau. Retrieval
never looks at the depreciated tier.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import (
    CorruptStore,
    DuplicateDocument,
    InvalidRating,
    IoFailure,
    UnknownDocument,
)
from .ingestion import MetadataRecord, record_from_dict, record_to_dict

RATING_MIN = 0.0
RATING_MAX = 5.0


class Tier(str, Enum):
    ACTIVE = "active"
    USUAL = "usual"
    DEPRECIATED = "depreciated"


#: Search precedence; lower ranks first.
TIER_ORDER = {Tier.ACTIVE: 0, Tier.USUAL: 1, Tier.DEPRECIATED: 2}


@dataclass(frozen=True)
class PheromoneParams:
    tau0: float = 1.0
    rho: float = 0.1            # evaporation rate
    q: float = 1.0              # deposit scale
    theta_active: float = 2.0   # promotion threshold
    theta_depr: float = 0.2     # demotion threshold

    def __post_init__(self) -> None:
        if not 0.0 < self.rho < 1.0:
            raise ValueError("rho must be in (0, 1)")
        if not 0.0 < self.theta_depr < self.tau0 < self.theta_active:
            raise ValueError("need 0 < theta_depr < tau0 < theta_active")


@dataclass
class KbDocument:
    record: MetadataRecord
    tier: Tier = Tier.USUAL
    tau: float = 1.0
    request_count: int = 0
    last_feedback_step: int = 0

    @property
    def doc_id(self) -> str:
        return self.record.doc_id

    def concept_ids(self) -> set[str]:
        return {cid for cid, _ in self.record.concepts}


@dataclass(frozen=True)
class KbStats:
    counts: dict[str, int]      # tier value -> document count
    total: int
    mean_tau: dict[str, float]  # tier value -> mean tau (0.0 for empty tier)


class KnowledgeBase:
    """In-memory store; new documents enter the usual tier at tau0."""

    def __init__(self, params: PheromoneParams = PheromoneParams()):
        self.params = params
        self.docs: dict[str, KbDocument] = {}
        self._df: Counter = Counter()
        self._step = 0

    def __len__(self) -> int:
        return len(self.docs)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self.docs

    def insert(self, record: MetadataRecord) -> str:
        if record.doc_id in self.docs:
            raise DuplicateDocument(record.doc_id)
        self.docs[record.doc_id] = KbDocument(record=record, tier=Tier.USUAL,
                                              tau=self.params.tau0)
        self._df.update(set(record.text_terms))
        return record.doc_id

    def get(self, doc_id: str) -> KbDocument:
        try:
            return self.docs[doc_id]
        except KeyError:
            raise UnknownDocument(doc_id) from None

    def deposit(self, doc_id: str, rating: float) -> float:
        """tau += q * rating / 5; returns the new trail level."""
        if not isinstance(rating, (int, float)) or isinstance(rating, bool):
            raise InvalidRating(f"rating must be a number, got {rating!r}")
        if not RATING_MIN <= rating <= RATING_MAX:
            raise InvalidRating(f"rating {rating} outside [0, 5]")
        doc = self.get(doc_id)
        doc.tau += self.params.q * rating / RATING_MAX
        doc.request_count += 1
        self._step += 1
        doc.last_feedback_step = self._step
        return doc.tau

    def evaporate(self) -> int:
        """tau <- (1 - rho) * tau for every document; returns count touched."""
        decay = 1.0 - self.params.rho
        for doc in self.docs.values():
            doc.tau *= decay
        return len(self.docs)

    def reorganize(self) -> list[tuple[str, Tier, Tier]]:
        """Migrate tiers from tau alone; idempotent. Reports only changes."""
        moves = []
        for doc_id in sorted(self.docs):
            doc = self.docs[doc_id]
            if doc.tau >= self.params.theta_active:
                target = Tier.ACTIVE
            elif doc.tau < self.params.theta_depr:
                target = Tier.DEPRECIATED
            else:
                target = Tier.USUAL
            if target is not doc.tier:
                moves.append((doc_id, doc.tier, target))
                doc.tier = target
        return moves

    def find_by_concepts(self, concept_ids: set[str] | list[str],
                         tier_order: list[Tier]) -> list[KbDocument]:
        """Documents carrying any of the concepts, grouped by tier_order,
        ascending doc_id within a tier."""
        if not tier_order or len(set(tier_order)) != len(tier_order):
            raise ValueError("tier_order must be non-empty without duplicates")
        wanted = set(concept_ids)
        out: list[KbDocument] = []
        for tier in tier_order:
            out.extend(doc for _, doc in sorted(self.docs.items())
                       if doc.tier is tier and doc.concept_ids() & wanted)
        return out

    def find_by_terms(self, terms: set[str] | list[str],
                      tier_order: list[Tier]) -> list[KbDocument]:
        """Text fallback: documents sharing any term, same ordering rules."""
        if not tier_order or len(set(tier_order)) != len(tier_order):
            raise ValueError("tier_order must be non-empty without duplicates")
        wanted = set(terms)
        out: list[KbDocument] = []
        for tier in tier_order:
            out.extend(doc for _, doc in sorted(self.docs.items())
                       if doc.tier is tier and wanted & set(doc.record.text_terms))
        return out

    def in_tier(self, tier: Tier) -> list[KbDocument]:
        return [doc for _, doc in sorted(self.docs.items()) if doc.tier is tier]

    def stats(self) -> KbStats:
        counts = {t.value: 0 for t in Tier}
        sums = {t.value: 0.0 for t in Tier}
        for doc in self.docs.values():
            counts[doc.tier.value] += 1
            sums[doc.tier.value] += doc.tau
        mean_tau = {t: (sums[t] / counts[t] if counts[t] else 0.0) for t in counts}
        return KbStats(counts=counts, total=len(self.docs), mean_tau=mean_tau)

    def idf(self, term: str) -> float:
        """ln((1+N)/(1+df)) + 1 over the stored corpus."""
        n = len(self.docs)
        return math.log((1 + n) / (1 + self._df[term])) + 1.0

    def max_tau(self) -> float:
        return max((d.tau for d in self.docs.values()), default=0.0)

    # -- persistence -------------------------------------------------

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            manifest = {
                "schema": "1",
                "params": {
                    "tau0": self.params.tau0,
                    "rho": self.params.rho,
                    "q": self.params.q,
                    "theta_active": self.params.theta_active,
                    "theta_depr": self.params.theta_depr,
                },
                "step": self._step,
                "doc_count": len(self.docs),
            }
            (directory / "manifest.json").write_text(
                json.dumps(manifest, sort_keys=True, indent=2), encoding="utf-8")
            lines = []
            for doc_id in sorted(self.docs):
                doc = self.docs[doc_id]
                lines.append(json.dumps({
                    "record": record_to_dict(doc.record),
                    "tier": doc.tier.value,
                    "tau": doc.tau,
                    "request_count": doc.request_count,
                    "last_feedback_step": doc.last_feedback_step,
                }, sort_keys=True))
            (directory / "documents.jsonl").write_text(
                "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc

    @classmethod
    def load(cls, directory: str | Path) -> "KnowledgeBase":
        directory = Path(directory)
        try:
            manifest = json.loads(
                (directory / "manifest.json").read_text(encoding="utf-8"))
            body = (directory / "documents.jsonl").read_text(encoding="utf-8")
        except FileNotFoundError as exc:
            raise CorruptStore(f"missing store file: {exc.filename}") from exc
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise CorruptStore(f"bad manifest: {exc}") from exc
        if not isinstance(manifest, dict) or manifest.get("schema") != "1":
            raise CorruptStore("unsupported or missing schema version")
        try:
            kb = cls(PheromoneParams(**manifest["params"]))
            kb._step = int(manifest["step"])
            expected = int(manifest["doc_count"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptStore(f"bad manifest fields: {exc}") from exc
        for i, line in enumerate(body.splitlines()):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                doc = KbDocument(
                    record=record_from_dict(row["record"]),
                    tier=Tier(row["tier"]),
                    tau=float(row["tau"]),
                    request_count=int(row["request_count"]),
                    last_feedback_step=int(row["last_feedback_step"]),
                )
            except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
                raise CorruptStore(f"bad document line {i + 1}: {exc}") from exc
            if doc.doc_id in kb.docs:
                raise CorruptStore(f"duplicate document {doc.doc_id!r}")
            kb.docs[doc.doc_id] = doc
            kb._df.update(set(doc.record.text_terms))
        if expected != len(kb.docs):
            raise CorruptStore("doc_count disagrees with document lines")
        return kb
