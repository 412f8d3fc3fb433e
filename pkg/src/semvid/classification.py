"""Concept detectors: one-vs-rest linear classifiers over text + visual features.

Features concatenate an L2-normalized TF-IDF block over a record's text
terms with the mean keyframe color histogram. Training is hinge-loss
stochastic subgradient descent with learning rate 1/(lambda*t); the
returned detector averages the iterates from the second half of the run,
which keeps margins calibrated even on small training sets. Margins are
squashed to confidences with the logistic function. Everything is
deterministic under a fixed seed.
"""

from __future__ import annotations

import json
import math
import random
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import EmptyEvaluationSet, EmptyTrainingSet, InsufficientClasses
from .ingestion import MetadataRecord
from .ontology import ConceptLexicon  # noqa: F401  (lexicon validated by callers)

DEFAULT_LAMBDA = 1e-4
DEFAULT_EPOCHS = 10
DEFAULT_ATTACH_THRESHOLD = 0.6


@dataclass(frozen=True)
class Hyper:
    lam: float = DEFAULT_LAMBDA
    epochs: int = DEFAULT_EPOCHS
    seed: int = 0


@dataclass
class LabeledExample:
    record: MetadataRecord
    concept_id: str


@dataclass
class ClassifierModel:
    vocab: dict[str, int]          # term -> dense feature index
    idf: list[float]               # aligned with vocab indices
    visual_dim: int
    concept_ids: list[str]         # sorted; aligns weights/biases rows
    weights: np.ndarray            # shape (n_concepts, len(vocab) + visual_dim)
    biases: np.ndarray             # shape (n_concepts,)
    hyper: Hyper = field(default_factory=Hyper)

    @property
    def dim(self) -> int:
        return len(self.vocab) + self.visual_dim


def mean_keyframe_hist(record: MetadataRecord, dim: int) -> np.ndarray:
    hists = [s.keyframe_hist for s in record.shots if s.keyframe_hist]
    if not hists:
        return np.zeros(dim)
    return np.mean(np.array(hists, dtype=float), axis=0)


def build_features(record: MetadataRecord, vocab: dict[str, int], idf: list[float],
                   visual_dim: int) -> np.ndarray:
    """L2-normalized TF-IDF text block followed by the mean keyframe histogram."""
    if not vocab:
        raise ValueError("vocab must be non-empty")
    text = np.zeros(len(vocab))
    counts = Counter(record.text_terms)
    for term, tf in counts.items():
        j = vocab.get(term)
        if j is not None:
            text[j] = tf * idf[j]
    norm = np.linalg.norm(text)
    if norm > 0:
        text /= norm
    return np.concatenate([text, mean_keyframe_hist(record, visual_dim)])


def _build_vocab(records: list[MetadataRecord]) -> tuple[dict[str, int], list[float]]:
    df: Counter = Counter()
    for r in records:
        df.update(set(r.text_terms))
    terms = sorted(df)
    vocab = {t: j for j, t in enumerate(terms)}
    n = len(records)
    idf = [math.log((1 + n) / (1 + df[t])) + 1.0 for t in terms]
    return vocab, idf


def train(examples: list[LabeledExample], lexicon: ConceptLexicon | None = None,
          hyper: Hyper = Hyper()) -> ClassifierModel:
    """One-vs-rest Pegasos-style SGD; deterministic given hyper.seed."""
    if not examples:
        raise EmptyTrainingSet("no training examples")
    labels = sorted({ex.concept_id for ex in examples})
    if len(labels) < 2:
        raise InsufficientClasses(f"need >= 2 distinct concepts, got {len(labels)}")
    if lexicon is not None:
        for ex in examples:
            if ex.concept_id not in lexicon.concepts:
                raise ValueError(f"label {ex.concept_id!r} not in lexicon")

    records = [ex.record for ex in examples]
    vocab, idf = _build_vocab(records)
    visual_dim = max((len(s.keyframe_hist) for r in records for s in r.shots
                      if s.keyframe_hist), default=0)
    x = np.stack([build_features(r, vocab, idf, visual_dim) for r in records])
    y = np.array([labels.index(ex.concept_id) for ex in examples])

    dim = x.shape[1]
    weights = np.zeros((len(labels), dim))
    biases = np.zeros(len(labels))
    rng = random.Random(hyper.seed)
    order = list(range(len(examples)))
    bound = 1.0 / math.sqrt(hyper.lam)  # projection radius keeps margins finite
    total = hyper.epochs * len(examples)
    t_start = total // 2  # suffix averaging: late iterates only

    for c in range(len(labels)):
        w = np.zeros(dim)
        b = 0.0
        t = 0
        w_sum = np.zeros(dim)
        b_sum = 0.0
        n_avg = 0
        for _ in range(hyper.epochs):
            rng.shuffle(order)
            for i in order:
                t += 1
                eta = 1.0 / (hyper.lam * t)
                sign = 1.0 if y[i] == c else -1.0
                margin = sign * (float(w @ x[i]) + b)
                decay = 1.0 - eta * hyper.lam
                w *= decay
                b *= decay
                if margin < 1.0:
                    w += eta * sign * x[i]
                    b += eta * sign
                norm = math.sqrt(float(w @ w) + b * b)
                if norm > bound:
                    w *= bound / norm
                    b *= bound / norm
                if t > t_start:
                    w_sum += w
                    b_sum += b
                    n_avg += 1
        weights[c] = w_sum / n_avg
        biases[c] = b_sum / n_avg

    return ClassifierModel(vocab=vocab, idf=idf, visual_dim=visual_dim,
                           concept_ids=labels, weights=weights, biases=biases,
                           hyper=hyper)


def _squash(margin: float) -> float:
    # branch avoids exp overflow; clamp keeps confidences strictly inside (0, 1)
    if margin >= 0:
        v = 1.0 / (1.0 + math.exp(-margin))
    else:
        e = math.exp(margin)
        v = e / (1.0 + e)
    return min(max(v, 1e-15), 1.0 - 1e-15)


def classify(model: ClassifierModel, record: MetadataRecord) -> list[tuple[str, float]]:
    """All concepts ranked by logistic-squashed margin, ties by concept id."""
    x = build_features(record, model.vocab, model.idf, model.visual_dim)
    margins = model.weights @ x + model.biases
    scored = [(cid, _squash(float(m))) for cid, m in zip(model.concept_ids, margins)]
    return sorted(scored, key=lambda p: (-p[1], p[0]))


def attach_concepts(model: ClassifierModel, record: MetadataRecord,
                    threshold: float = DEFAULT_ATTACH_THRESHOLD) -> MetadataRecord:
    """Set record.concepts to every concept whose confidence clears the threshold."""
    record.concepts = [(cid, conf) for cid, conf in classify(model, record)
                       if conf >= threshold]
    return record


def evaluate(model: ClassifierModel, examples: list[LabeledExample]) -> float:
    if not examples:
        raise EmptyEvaluationSet("no evaluation examples")
    hits = sum(1 for ex in examples
               if classify(model, ex.record)[0][0] == ex.concept_id)
    return hits / len(examples)


def save_model(model: ClassifierModel, path: str | Path) -> None:
    doc = {
        "vocab": model.vocab,
        "idf": model.idf,
        "visual_dim": model.visual_dim,
        "concept_ids": model.concept_ids,
        "weights": model.weights.tolist(),
        "biases": model.biases.tolist(),
        "hyper": {"lam": model.hyper.lam, "epochs": model.hyper.epochs,
                  "seed": model.hyper.seed},
    }
    Path(path).write_text(json.dumps(doc, sort_keys=True), encoding="utf-8")


def load_model(path: str | Path) -> ClassifierModel:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    return ClassifierModel(
        vocab={t: int(j) for t, j in doc["vocab"].items()},
        idf=[float(v) for v in doc["idf"]],
        visual_dim=int(doc["visual_dim"]),
        concept_ids=list(doc["concept_ids"]),
        weights=np.array(doc["weights"], dtype=float),
        biases=np.array(doc["biases"], dtype=float),
        hyper=Hyper(**doc["hyper"]),
    )
