"""Query processing: enrich, map to concepts, score, rank, measure.

A raw query is tokenized and expanded with the user's top preferred
concept labels, its terms are mapped to ontology concepts through a
synonym resource, and candidates from the active and usual tiers are
scored as a weighted sum of four components (concept overlap, text
cosine, preference affinity, pheromone level). The pipeline reports a
global performance P as the product of per-stage local performances.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

from .errors import OutOfRangePerformance, UnknownUser
from .ingestion import Storyboard, summarize
from .kb import KbDocument, KnowledgeBase, Tier, TIER_ORDER
from .ontology import OntologyStore
from .personalization import AvatarProfile
from .synonyms import SynonymResource
from .text import cosine, jaccard, tokenize

DEFAULT_M = 3                  # max injected preference concepts
DEFAULT_INJECT_WEIGHT = 0.3
DEFAULT_MAP_THRESHOLD = 0.3
STORYBOARD_LEN = 5             # keyframes attached to each result


@dataclass(frozen=True)
class RawQuery:
    user_id: str
    domain: str
    text: str
    k: int

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError("k must be >= 0")


@dataclass(frozen=True)
class EnrichedQuery:
    terms: tuple[tuple[str, float], ...]
    injected: frozenset[str] = frozenset()

    def distinct_terms(self) -> list[str]:
        seen: list[str] = []
        for term, _ in self.terms:
            if term not in seen:
                seen.append(term)
        return seen


@dataclass(frozen=True)
class ConceptMapping:
    pairs: tuple[tuple[str, str, float], ...]   # (term, concept id, sim)
    unmapped: tuple[str, ...]

    def concept_ids(self) -> set[str]:
        return {cid for _, cid, _ in self.pairs}


@dataclass(frozen=True)
class StrategyWeights:
    w_concept: float
    w_text: float
    w_pref: float
    w_pher: float

    def __post_init__(self) -> None:
        ws = (self.w_concept, self.w_text, self.w_pref, self.w_pher)
        if any(w < 0 for w in ws) or not any(w > 0 for w in ws):
            raise ValueError("weights must be non-negative, at least one > 0")


STRATEGIES: dict[str, StrategyWeights] = {
    "concept-first": StrategyWeights(0.5, 0.2, 0.2, 0.1),
    "text-first": StrategyWeights(0.2, 0.5, 0.2, 0.1),
    "personalized": StrategyWeights(0.25, 0.25, 0.4, 0.1),
    "popular": StrategyWeights(0.2, 0.2, 0.1, 0.5),
}
STRATEGIES["hybrid"] = STRATEGIES["concept-first"]


@dataclass(frozen=True)
class RankedResult:
    doc_id: str
    score: float
    tier: Tier
    breakdown: dict[str, float]
    storyboard: Storyboard


@dataclass(frozen=True)
class PerformanceReport:
    stages: tuple[tuple[str, float], ...]
    n: int
    p_global: float


def enrich(raw: RawQuery, profile: AvatarProfile, ontology: OntologyStore,
           m: int = DEFAULT_M,
           inject_weight: float = DEFAULT_INJECT_WEIGHT) -> EnrichedQuery:
    """Tokenized raw terms at weight 1.0 plus up to m top preferred concept
    labels at a fractional weight, skipping labels already present."""
    if profile.user_id != raw.user_id:
        raise UnknownUser(f"profile {profile.user_id!r} is not {raw.user_id!r}")
    terms: list[tuple[str, float]] = [(t, 1.0) for t in tokenize(raw.text)]
    present = {t for t, _ in terms}
    injected = []
    for cid in profile.top_concepts(raw.domain, m):
        label = ontology.label_of(cid)
        if label is None:
            continue
        label = label.casefold()
        if label not in present:
            terms.append((label, inject_weight))
            present.add(label)
            injected.append(label)
    return EnrichedQuery(terms=tuple(terms), injected=frozenset(injected))


def map_concepts(q: EnrichedQuery, ontology: OntologyStore, domain: str,
                 syn: SynonymResource,
                 threshold: float = DEFAULT_MAP_THRESHOLD) -> ConceptMapping:
    """Each distinct term maps to its best concept: similarity 1.0 on an
    exact synonym hit, otherwise Jaccard between the term's synset and the
    concept's synonyms. Below threshold lands in unmapped."""
    if not 0.0 < threshold <= 1.0:
        raise ValueError("threshold must be in (0, 1]")
    candidates = ontology.candidates(domain)
    pairs: list[tuple[str, str, float]] = []
    unmapped: list[str] = []
    for term in q.distinct_terms():
        folded = term.casefold()
        synset = syn.synset(folded)
        best_cid, best_sim = None, 0.0
        for concept in sorted(candidates, key=lambda c: c.id):
            if folded in concept.synonyms:
                sim = 1.0
            else:
                sim = jaccard(synset, concept.synonyms)
            if sim > best_sim:
                best_cid, best_sim = concept.id, sim
        if best_cid is not None and best_sim >= threshold:
            pairs.append((term, best_cid, best_sim))
        else:
            unmapped.append(term)
    return ConceptMapping(pairs=tuple(pairs), unmapped=tuple(unmapped))


def score(doc: KbDocument, mapping: ConceptMapping, q: EnrichedQuery,
          profile: AvatarProfile, domain: str, weights: StrategyWeights,
          tau_max: float, idf=None) -> tuple[float, dict[str, float]]:
    """score = w_concept*C + w_text*T + w_pref*R + w_pher*(tau/tau_max).

    C is the document's confidence over the mapped concepts (normalized by
    how many were mapped), T the TF-IDF cosine of query and document terms,
    R the cosine of the user's domain preferences and the document's
    concept confidences. All components sit in [0, 1].
    """
    if tau_max <= 0:
        raise ValueError("tau_max must be > 0")
    if idf is None:
        idf = lambda term: 1.0  # noqa: E731

    mapped = mapping.concept_ids()
    doc_conf = dict(doc.record.concepts)
    c_comp = (sum(doc_conf.get(cid, 0.0) for cid in mapped) / len(mapped)
              if mapped else 0.0)

    q_vec: dict[str, float] = {}
    for term, weight in q.terms:
        q_vec[term] = q_vec.get(term, 0.0) + weight * idf(term)
    d_counts = Counter(doc.record.text_terms)
    d_vec = {t: tf * idf(t) for t, tf in d_counts.items()}
    t_comp = cosine(q_vec, d_vec)

    r_comp = cosine(profile.prefs.get(domain, {}), doc_conf)
    pher = doc.tau / tau_max

    breakdown = {"concept": c_comp, "text": t_comp, "pref": r_comp, "pher": pher}
    total = (weights.w_concept * c_comp + weights.w_text * t_comp
             + weights.w_pref * r_comp + weights.w_pher * pher)
    return total, breakdown


def global_performance(stages: list[tuple[str, float]]) -> PerformanceReport:
    """P is the product of the local per-stage performances."""
    p = 1.0
    for name, p_i in stages:
        if not 0.0 <= p_i <= 1.0:
            raise OutOfRangePerformance(f"stage {name!r}: {p_i}")
        p *= p_i
    return PerformanceReport(stages=tuple(stages), n=len(stages), p_global=p)


def retrieve(raw: RawQuery, strategy: StrategyWeights, kb: KnowledgeBase,
             ontology: OntologyStore, syn: SynonymResource,
             profile: AvatarProfile,
             threshold: float = DEFAULT_MAP_THRESHOLD,
             m: int = DEFAULT_M,
             session_ratings: list[float] | None = None,
             ) -> tuple[list[RankedResult], PerformanceReport]:
    """Full pipeline over a store snapshot; deterministic and read-only.

    Candidates come from the active and usual tiers by mapped concept,
    falling back to a text scan over the usual tier when nothing maps.
    The depreciated tier is never searched.
    """
    q = enrich(raw, profile, ontology, m=m)
    mapping = map_concepts(q, ontology, raw.domain, syn, threshold=threshold)

    if mapping.pairs:
        candidates = kb.find_by_concepts(mapping.concept_ids(),
                                         [Tier.ACTIVE, Tier.USUAL])
    else:
        candidates = kb.find_by_terms(q.distinct_terms(), [Tier.USUAL])

    tau_max = max((d.tau for d in candidates), default=0.0)
    if tau_max <= 0:
        tau_max = 1.0

    scored: list[RankedResult] = []
    for doc in candidates:
        total, breakdown = score(doc, mapping, q, profile, raw.domain,
                                 strategy, tau_max, idf=kb.idf)
        n_frames = min(STORYBOARD_LEN, len(doc.record.shots))
        scored.append(RankedResult(
            doc_id=doc.doc_id, score=total, tier=doc.tier,
            breakdown=breakdown,
            storyboard=summarize(doc.record, n_frames),
        ))
    scored.sort(key=lambda r: (TIER_ORDER[r.tier], -r.score, r.doc_id))
    results = scored[:raw.k]

    n_terms = len(mapping.pairs) + len(mapping.unmapped)
    p_map = len(mapping.pairs) / n_terms if n_terms else 1.0
    p_retrieve = min(1.0, len(results) / raw.k) if raw.k > 0 else 1.0
    if session_ratings:
        p_feedback = math.fsum(session_ratings) / (5.0 * len(session_ratings))
    else:
        p_feedback = 1.0
    report = global_performance([
        ("enrich", 1.0),
        ("map", p_map),
        ("retrieve", p_retrieve),
        ("feedback", p_feedback),
    ])
    return results, report


def result_payload(results: list[RankedResult],
                   report: PerformanceReport) -> dict:
    """JSON shape shared by the CLI and the HTTP API."""
    return {
        "results": [
            {
                "doc_id": r.doc_id,
                "score": r.score,
                "tier": r.tier.value,
                "breakdown": r.breakdown,
                "storyboard": [
                    {"shot": shot, "frame": frame, "hist": list(hist)}
                    for shot, frame, hist in r.storyboard.keyframes
                ],
            }
            for r in results
        ],
        "performance": {
            "stages": [{"name": name, "p": p} for name, p in report.stages],
            "p_global": report.p_global,
        },
    }
