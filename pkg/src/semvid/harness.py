"""Synthetic corpus generator and simulated-user driver.

The generator plants shot boundaries (L1 jump 1.2 between piecewise
constant histograms) and writes descriptor files whose text comes from
per-concept term pools. A few distractor documents per domain mimic a
concept's vocabulary without carrying its ground truth, so they rank
well at first, collect zero ratings, and sink to the depreciated tier;
simulated users rate binarily against the planted truth. Everything is
deterministic under the spec seed.
"""

from __future__ import annotations

import json
import random
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

from .classification import LabeledExample
from .config import EngineConfig
from .engine import Engine
from .ingestion import (
    HIST_DIM,
    FrameFeature,
    VideoDescriptor,
    descriptor_to_dict,
    extract,
    load_descriptor,
)
from .ontology import bundled_ontology, save_ontology
from .synonyms import bundled_synonyms, save_synonyms

#: Concepts given documents in the generated corpus, three per domain.
CORPUS_CONCEPTS: dict[str, tuple[str, ...]] = {
    "news": ("news.politics", "news.weather", "news.economy"),
    "sports": ("sports.football", "sports.tennis", "sports.cycling"),
    "art": ("art.painting", "art.cinema", "art.theatre"),
}

#: Thematic term pools feeding document text and simulated queries.
POOLS: dict[str, tuple[str, ...]] = {
    "news.politics": ("government", "parliament", "minister", "senate",
                      "policy", "diplomacy", "summit", "reform"),
    "news.weather": ("forecast", "meteo", "storm", "rainfall", "heatwave",
                     "snowfall", "hurricane", "drought"),
    "news.economy": ("finance", "markets", "inflation", "budget", "trade",
                     "stocks", "growth", "banks"),
    "sports.football": ("footy", "goal", "striker", "keeper", "pitch",
                        "derby", "cup", "league"),
    "sports.tennis": ("racquet", "serve", "volley", "court", "grandslam",
                      "baseline", "tiebreak", "deuce"),
    "sports.cycling": ("velo", "bike", "peloton", "sprint", "climb",
                       "tour", "rider", "saddle"),
    "art.painting": ("canvas", "fresco", "brush", "palette", "gallery",
                     "portrait", "easel", "oil"),
    "art.cinema": ("film", "movie", "screen", "director", "premiere",
                   "festival", "scene", "actor"),
    "art.theatre": ("stage", "play", "drama", "curtain", "rehearsal",
                    "troupe", "comedy", "tragedy"),
}

#: Concept-free filler vocabulary mixed into clean documents.
NOISE_TERMS = ("report", "update", "daily", "special", "archive",
               "channel", "tonight", "weekly", "roundup", "magazine")


@dataclass(frozen=True)
class UserSpec:
    user_id: str
    country: str
    language: str
    interest: str   # ground-truth concept id


DEFAULT_USERS = (
    UserSpec("u1", "MA", "fr", "sports.football"),
    UserSpec("u2", "MA", "fr", "sports.tennis"),
    UserSpec("u3", "FR", "fr", "news.politics"),
    UserSpec("u4", "GB", "en", "art.painting"),
    UserSpec("u5", "US", "en", "sports.football"),
)


@dataclass(frozen=True)
class SyntheticSpec:
    seed: int = 0
    domains: tuple[str, ...] = ("news", "sports", "art")
    docs_per_domain: int = 20
    distractors_per_domain: int = 2
    users: tuple[UserSpec, ...] = DEFAULT_USERS
    rounds: int = 20
    k: int = 5

    def __post_init__(self) -> None:
        if self.docs_per_domain < 1:
            raise ValueError("docs_per_domain must be >= 1")
        if self.rounds < 1:
            raise ValueError("rounds must be >= 1")
        unknown = [d for d in self.domains if d not in CORPUS_CONCEPTS]
        if unknown:
            raise ValueError(f"no corpus recipe for domains {unknown}")


@dataclass
class GeneratedCorpus:
    root: Path
    descriptors: list[Path]
    labels: list[tuple[str, str]]      # (doc_id, concept_id), clean docs only
    truth: dict[str, str]              # doc_id -> planted concept ("" = none)

    def descriptor_path(self, doc_id: str) -> Path:
        return self.root / "descriptors" / f"{doc_id}.json"


@dataclass(frozen=True)
class RoundMetrics:
    round: int
    precision: dict[str, float]        # user -> precision@k
    mean_precision: float
    tiers: dict[str, int]              # tier counts at end of round
    p_global: dict[str, float]
    flags: frozenset[str] = frozenset()   # users whose precision was undefined


def planted_frames(rng: random.Random, n_shots: int,
                   frames_lo: int = 3, frames_hi: int = 5,
                   dim: int = HIST_DIM) -> tuple[list[FrameFeature], list[int]]:
    """Piecewise-constant histograms: one dominant bin per shot, so every
    shot change is an L1 jump of exactly 1.2. Returns (frames, boundary
    frame indices)."""
    bins = rng.sample(range(dim), n_shots)
    frames: list[FrameFeature] = []
    boundaries: list[int] = []
    base = 0.4 / dim
    for s, b in enumerate(bins):
        if s > 0:
            boundaries.append(len(frames))
        for _ in range(rng.randint(frames_lo, frames_hi)):
            hist = [base] * dim
            hist[b] += 0.6
            frames.append(FrameFeature(t=float(len(frames)), hist=tuple(hist)))
    return frames, boundaries


def _descriptor(doc_id: str, title: str, terms: list[str], tags: list[str],
                rng: random.Random, n_shots: int) -> VideoDescriptor:
    frames, _ = planted_frames(rng, n_shots)
    duration = float(len(frames))
    return VideoDescriptor(
        id=doc_id,
        uri=f"corpus://{doc_id}",
        title=title,
        duration_s=duration,
        frames=frames,
        transcript=[(0.0, duration, " ".join(terms))],
        captions=[],
        tags=tags,
        meta={"format": "descriptor", "genre": tags[0] if tags else ""},
    )


def generate_corpus(spec: SyntheticSpec, out_dir: str | Path) -> GeneratedCorpus:
    """Write descriptors, labels, planted truth, ontology, and synonyms."""
    rng = random.Random(spec.seed)
    ontology = bundled_ontology()
    root = Path(out_dir)
    (root / "descriptors").mkdir(parents=True, exist_ok=True)

    descriptors: list[Path] = []
    labels: list[tuple[str, str]] = []
    truth: dict[str, str] = {}

    for domain in spec.domains:
        concepts = CORPUS_CONCEPTS[domain]
        n_distract = min(spec.distractors_per_domain,
                         max(0, spec.docs_per_domain - len(concepts)))
        n_clean = spec.docs_per_domain - n_distract
        for i in range(spec.docs_per_domain):
            doc_id = f"{domain}-{i:03d}"
            n_shots = 1 + (i % 4)
            if i < n_clean:
                concept = concepts[i % len(concepts)]
                label = ontology.label_of(concept)
                terms = ([label] + rng.choices(POOLS[concept], k=8)
                         + rng.choices(NOISE_TERMS, k=4))
                desc = _descriptor(doc_id, f"{label} clip {i}", terms,
                                   [domain, label], rng, n_shots)
                labels.append((doc_id, concept))
                truth[doc_id] = concept
            else:
                mimic = concepts[(i - n_clean) % len(concepts)]
                label = ontology.label_of(mimic)
                terms = [label] * 2 + rng.choices(POOLS[mimic], k=10)
                desc = _descriptor(doc_id, f"best of {label} {i}", terms,
                                   [domain], rng, n_shots)
                truth[doc_id] = ""
            path = root / "descriptors" / f"{doc_id}.json"
            path.write_text(json.dumps(descriptor_to_dict(desc),
                                       sort_keys=True), encoding="utf-8")
            descriptors.append(path)

    (root / "labels.jsonl").write_text(
        "".join(json.dumps({"doc_id": d, "concept_id": c}, sort_keys=True) + "\n"
                for d, c in labels), encoding="utf-8")
    (root / "truth.json").write_text(
        json.dumps(truth, sort_keys=True, indent=2), encoding="utf-8")
    save_ontology(ontology, root / "ontology.json")
    save_synonyms(bundled_synonyms(), root / "synonyms.json")
    return GeneratedCorpus(root=root, descriptors=descriptors, labels=labels,
                           truth=truth)


def load_examples(corpus: GeneratedCorpus,
                  shot_theta: float = 0.4) -> list[LabeledExample]:
    return [
        LabeledExample(record=extract(load_descriptor(
            corpus.descriptor_path(doc_id)), shot_theta), concept_id=cid)
        for doc_id, cid in corpus.labels
    ]


def query_text(rng: random.Random, ontology, interest: str) -> str:
    """One sure-to-map synonym (the label) plus one rotating pool term."""
    label = ontology.label_of(interest)
    return f"{label} {rng.choice(POOLS[interest])}"


def simulate(spec: SyntheticSpec,
             workdir: str | Path | None = None,
             ) -> tuple[list[RoundMetrics], Engine]:
    """Run the full loop: generate, train, ingest, then query/rate rounds."""
    if workdir is None:
        with tempfile.TemporaryDirectory(prefix="semvid-harness-") as tmp:
            return _simulate_in(spec, Path(tmp))
    return _simulate_in(spec, Path(workdir))


def _simulate_in(spec: SyntheticSpec, workdir: Path) -> tuple[list[RoundMetrics], Engine]:
    corpus = generate_corpus(spec, workdir)
    config = EngineConfig(seed=spec.seed)
    engine = Engine(config)
    engine.train(load_examples(corpus, config.shot_theta))
    engine.ingest(corpus.descriptors)
    for user in spec.users:
        engine.add_user(user.user_id, user.country, user.language)

    rng = random.Random(spec.seed + 1)
    metrics: list[RoundMetrics] = []
    for rnd in range(1, spec.rounds + 1):
        precision: dict[str, float] = {}
        p_global: dict[str, float] = {}
        flags: set[str] = set()
        for user in spec.users:
            domain = engine.ontology.domain_of(user.interest)
            text = query_text(rng, engine.ontology, user.interest)
            results, report = engine.query(user.user_id, domain, text, spec.k)
            if results and spec.k > 0:
                hits = sum(1 for r in results
                           if corpus.truth.get(r.doc_id) == user.interest)
                precision[user.user_id] = hits / spec.k
            else:
                precision[user.user_id] = 0.0
                flags.add(user.user_id)
            p_global[user.user_id] = report.p_global
            for r in results:
                rating = 5 if corpus.truth.get(r.doc_id) == user.interest else 0
                engine.feedback(user.user_id, r.doc_id, rating)
        counts = engine.stats().counts
        metrics.append(RoundMetrics(
            round=rnd,
            precision=precision,
            mean_precision=sum(precision.values()) / len(precision),
            tiers=dict(counts),
            p_global=p_global,
            flags=frozenset(flags),
        ))
    return metrics, engine


CSV_HEADER = "round,user,precision_at_k,p_global,active,usual,depreciated"


def metrics_to_csv(metrics: list[RoundMetrics],
                   users: tuple[UserSpec, ...] = DEFAULT_USERS) -> str:
    lines = [CSV_HEADER]
    for m in metrics:
        for user in users:
            uid = user.user_id
            lines.append(
                f"{m.round},{uid},{m.precision[uid]:.6f},{m.p_global[uid]:.6f},"
                f"{m.tiers['active']},{m.tiers['usual']},{m.tiers['depreciated']}")
    return "\n".join(lines) + "\n"


def write_metrics(metrics: list[RoundMetrics], path: str | Path,
                  users: tuple[UserSpec, ...] = DEFAULT_USERS) -> None:
    Path(path).write_text(metrics_to_csv(metrics, users), encoding="utf-8")
