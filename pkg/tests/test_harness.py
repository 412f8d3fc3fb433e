import random

import pytest

from semvid.harness import (
    CORPUS_CONCEPTS,
    CSV_HEADER,
    NOISE_TERMS,
    POOLS,
    RoundMetrics,
    SyntheticSpec,
    UserSpec,
    generate_corpus,
    load_examples,
    metrics_to_csv,
    planted_frames,
    query_text,
    simulate,
    write_metrics,
)
from semvid.ingestion import detect_shots
from semvid.ontology import bundled_ontology

SMALL = SyntheticSpec(docs_per_domain=6, rounds=3, k=3)


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticSpec(docs_per_domain=0)
    with pytest.raises(ValueError):
        SyntheticSpec(rounds=0)
    with pytest.raises(ValueError):
        SyntheticSpec(domains=("news", "gardening"))


def test_every_corpus_concept_has_a_pool():
    for concepts in CORPUS_CONCEPTS.values():
        assert len(concepts) == 3
        for cid in concepts:
            assert len(POOLS[cid]) == 8
    pooled = {t for pool in POOLS.values() for t in pool}
    assert not pooled & set(NOISE_TERMS)


def test_planted_frames_boundaries_match_detector():
    rng = random.Random(7)
    frames, boundaries = planted_frames(rng, n_shots=4)
    shots = detect_shots(frames, theta=0.4)
    assert [s.start_idx for s in shots] == [0] + boundaries
    assert len(shots) == 4


def test_generate_corpus_layout(tmp_path):
    corpus = generate_corpus(SMALL, tmp_path)
    assert len(corpus.descriptors) == 18          # 6 per domain, 3 domains
    assert all(p.exists() for p in corpus.descriptors)
    assert (tmp_path / "labels.jsonl").exists()
    assert (tmp_path / "ontology.json").exists()
    assert (tmp_path / "synonyms.json").exists()
    # truth covers every document; distractors carry the empty marker
    assert set(corpus.truth) == {p.stem for p in corpus.descriptors}
    labeled = dict(corpus.labels)
    distractors = [d for d, c in corpus.truth.items() if c == ""]
    assert len(distractors) == 6                  # 2 per domain
    assert not set(distractors) & set(labeled)
    for doc_id, concept in corpus.labels:
        assert corpus.truth[doc_id] == concept


def test_generate_corpus_is_deterministic(tmp_path):
    a = generate_corpus(SMALL, tmp_path / "a")
    b = generate_corpus(SMALL, tmp_path / "b")
    assert a.labels == b.labels
    assert a.truth == b.truth
    for pa, pb in zip(a.descriptors, b.descriptors):
        assert pa.read_text() == pb.read_text()


def test_load_examples_matches_labels(tmp_path):
    corpus = generate_corpus(SMALL, tmp_path)
    examples = load_examples(corpus)
    assert [(e.record.doc_id, e.concept_id) for e in examples] == corpus.labels
    assert all(e.record.shots for e in examples)


def test_query_text_is_label_plus_pool_term():
    ontology = bundled_ontology()
    rng = random.Random(0)
    text = query_text(rng, ontology, "sports.cycling")
    label, term = text.split(" ", 1)
    assert label == ontology.label_of("sports.cycling")
    assert term in POOLS["sports.cycling"]


def test_metrics_csv_golden():
    users = (UserSpec("u1", "MA", "fr", "sports.football"),
             UserSpec("u2", "FR", "fr", "news.politics"))
    metrics = [RoundMetrics(round=1,
                            precision={"u1": 0.5, "u2": 1.0},
                            mean_precision=0.75,
                            tiers={"active": 0, "usual": 9, "depreciated": 1},
                            p_global={"u1": 0.25, "u2": 1.0})]
    csv = metrics_to_csv(metrics, users)
    assert csv == (CSV_HEADER + "\n"
                   "1,u1,0.500000,0.250000,0,9,1\n"
                   "1,u2,1.000000,1.000000,0,9,1\n")


def test_write_metrics(tmp_path):
    users = (UserSpec("u1", "MA", "fr", "sports.football"),)
    metrics = [RoundMetrics(round=1, precision={"u1": 1.0},
                            mean_precision=1.0,
                            tiers={"active": 1, "usual": 2, "depreciated": 3},
                            p_global={"u1": 0.5})]
    write_metrics(metrics, tmp_path / "m.csv", users)
    body = (tmp_path / "m.csv").read_text().splitlines()
    assert body[0] == CSV_HEADER
    assert body[1] == "1,u1,1.000000,0.500000,1,2,3"


def test_simulate_small_run(tmp_path):
    metrics, engine = simulate(SMALL, workdir=tmp_path)
    assert len(metrics) == SMALL.rounds
    assert engine.stats().total == 18
    for m in metrics:
        assert 0.0 <= m.mean_precision <= 1.0
        for uid, p in m.precision.items():
            assert 0.0 <= p <= 1.0
        for uid, p in m.p_global.items():
            assert 0.0 <= p <= 1.0
        assert sum(m.tiers.values()) == 18
    # users exist in the engine with their query history populated
    for user in SMALL.users:
        history = engine.people.profile(user.user_id).history
        assert any(history.values())


def test_simulate_is_deterministic(tmp_path):
    a, _ = simulate(SMALL, workdir=tmp_path / "a")
    b, _ = simulate(SMALL, workdir=tmp_path / "b")
    assert metrics_to_csv(a, SMALL.users) == metrics_to_csv(b, SMALL.users)
