import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semvid.errors import (
    CorruptStore,
    DuplicateDocument,
    InvalidRating,
    UnknownDocument,
)
from semvid.kb import TIER_ORDER, KnowledgeBase, PheromoneParams, Tier

from conftest import make_record


def seeded_kb(n=4):
    kb = KnowledgeBase()
    for i in range(n):
        rec = make_record(f"doc{i}", [f"term{i}", "shared"],
                          concepts=[(f"concept.{i % 2}", 0.9)])
        kb.insert(rec)
    return kb


def test_insert_defaults_and_duplicate():
    kb = seeded_kb(2)
    doc = kb.get("doc0")
    assert doc.tier is Tier.USUAL
    assert doc.tau == 1.0
    assert "doc0" in kb and len(kb) == 2
    with pytest.raises(DuplicateDocument):
        kb.insert(make_record("doc0", ["again"]))


def test_get_unknown():
    with pytest.raises(UnknownDocument):
        seeded_kb(1).get("nope")


@pytest.mark.parametrize("rating,expected", [
    (0, 1.0),
    (5, 2.0),
    (3, 1.6),
    (2.5, 1.5),
])
def test_deposit_arithmetic(rating, expected):
    kb = seeded_kb(1)
    assert kb.deposit("doc0", rating) == pytest.approx(expected)


@pytest.mark.parametrize("bad", [-1, 5.01, 6, float("nan"), "3", None, True])
def test_deposit_rejects_bad_ratings(bad):
    kb = seeded_kb(1)
    with pytest.raises(InvalidRating):
        kb.deposit("doc0", bad)


def test_deposit_unknown_doc():
    with pytest.raises(UnknownDocument):
        seeded_kb(1).deposit("ghost", 3)


def test_evaporate_decays_all_and_counts():
    kb = seeded_kb(3)
    kb.deposit("doc0", 5)
    assert kb.evaporate() == 3
    assert kb.get("doc0").tau == pytest.approx(1.8)
    assert kb.get("doc1").tau == pytest.approx(0.9)


def test_promotion_crosses_threshold_on_second_cycle():
    # evaporate-then-deposit cycles with the top rating
    kb = seeded_kb(1)
    kb.evaporate()
    tau = kb.deposit("doc0", 5)
    assert tau == pytest.approx(1.9)
    assert kb.reorganize() == []          # 1.9 < 2.0 stays usual
    kb.evaporate()
    tau = kb.deposit("doc0", 5)
    assert tau == pytest.approx(2.71)
    moves = kb.reorganize()
    assert moves == [("doc0", Tier.USUAL, Tier.ACTIVE)]


def test_neglect_depreciates_after_sixteen_cycles():
    # 0.9^15 = 0.2059 stays, 0.9^16 = 0.1853 falls below 0.2
    kb = seeded_kb(1)
    for _ in range(15):
        kb.evaporate()
    assert kb.reorganize() == []
    kb.evaporate()
    assert kb.reorganize() == [("doc0", Tier.USUAL, Tier.DEPRECIATED)]


def test_reorganize_boundary_values():
    kb = seeded_kb(2)
    kb.get("doc0").tau = 2.0    # >= theta_active promotes
    kb.get("doc1").tau = 0.2    # == theta_depr is NOT below it
    moves = kb.reorganize()
    assert moves == [("doc0", Tier.USUAL, Tier.ACTIVE)]
    assert kb.get("doc1").tier is Tier.USUAL


def test_reorganize_idempotent_and_sorted():
    kb = seeded_kb(4)
    kb.get("doc3").tau = 5.0
    kb.get("doc1").tau = 0.01
    moves = kb.reorganize()
    assert moves == [("doc1", Tier.USUAL, Tier.DEPRECIATED),
                     ("doc3", Tier.USUAL, Tier.ACTIVE)]
    assert kb.reorganize() == []


def test_find_by_concepts_tier_grouping():
    kb = seeded_kb(4)   # doc0/doc2 -> concept.0, doc1/doc3 -> concept.1
    kb.get("doc2").tier = Tier.ACTIVE
    kb.get("doc0").tier = Tier.DEPRECIATED
    hits = kb.find_by_concepts({"concept.0"}, [Tier.ACTIVE, Tier.USUAL])
    assert [d.doc_id for d in hits] == ["doc2"]     # depreciated excluded
    hits = kb.find_by_concepts({"concept.0", "concept.1"},
                               [Tier.ACTIVE, Tier.USUAL])
    assert [d.doc_id for d in hits] == ["doc2", "doc1", "doc3"]


def test_find_by_terms_and_order_validation():
    kb = seeded_kb(3)
    kb.get("doc2").tier = Tier.ACTIVE
    hits = kb.find_by_terms({"shared"}, [Tier.ACTIVE, Tier.USUAL])
    assert [d.doc_id for d in hits] == ["doc2", "doc0", "doc1"]
    assert kb.find_by_terms({"absent"}, [Tier.USUAL]) == []
    with pytest.raises(ValueError):
        kb.find_by_terms({"shared"}, [])
    with pytest.raises(ValueError):
        kb.find_by_concepts({"concept.0"}, [Tier.USUAL, Tier.USUAL])


def test_stats_counts_and_means():
    kb = seeded_kb(3)
    kb.get("doc0").tier = Tier.ACTIVE
    kb.get("doc0").tau = 3.0
    s = kb.stats()
    assert s.total == 3
    assert s.counts == {"active": 1, "usual": 2, "depreciated": 0}
    assert s.mean_tau["active"] == pytest.approx(3.0)
    assert s.mean_tau["usual"] == pytest.approx(1.0)
    assert s.mean_tau["depreciated"] == 0.0


def test_idf_and_max_tau():
    kb = seeded_kb(3)   # "shared" in all three docs
    assert kb.idf("shared") == pytest.approx(math.log(4 / 4) + 1.0)
    assert kb.idf("term0") == pytest.approx(math.log(4 / 2) + 1.0)
    assert kb.idf("never_seen") == pytest.approx(math.log(4 / 1) + 1.0)
    kb.get("doc1").tau = 7.5
    assert kb.max_tau() == 7.5
    assert KnowledgeBase().max_tau() == 0.0


def test_tier_order_is_search_precedence():
    assert TIER_ORDER[Tier.ACTIVE] < TIER_ORDER[Tier.USUAL] < TIER_ORDER[Tier.DEPRECIATED]


@pytest.mark.parametrize("kwargs", [
    {"rho": 0.0}, {"rho": 1.0}, {"rho": -0.2},
    {"theta_depr": 0.0}, {"theta_depr": 1.5},
    {"theta_active": 0.9}, {"tau0": 3.0},
])
def test_pheromone_params_validation(kwargs):
    with pytest.raises(ValueError):
        PheromoneParams(**kwargs)


def test_save_load_field_exact(tmp_path):
    kb = seeded_kb(3)
    kb.deposit("doc1", 4)
    kb.get("doc2").tau = 0.123456789
    kb.get("doc2").tier = Tier.DEPRECIATED
    kb.save(tmp_path / "store")
    again = KnowledgeBase.load(tmp_path / "store")
    assert len(again) == len(kb)
    for doc_id, doc in kb.docs.items():
        other = again.get(doc_id)
        assert other.tier is doc.tier
        assert other.tau == doc.tau
        assert other.request_count == doc.request_count
        assert other.last_feedback_step == doc.last_feedback_step
        assert other.record.text_terms == doc.record.text_terms
        assert other.record.concepts == doc.record.concepts
    assert again.params == kb.params
    assert again.idf("shared") == kb.idf("shared")


def test_save_empty_store(tmp_path):
    kb = KnowledgeBase()
    kb.save(tmp_path / "empty")
    assert len(KnowledgeBase.load(tmp_path / "empty")) == 0


@pytest.mark.parametrize("mutate", [
    lambda d: (d / "manifest.json").unlink(),
    lambda d: (d / "manifest.json").write_text("{not json"),
    lambda d: (d / "manifest.json").write_text('{"schema": "9"}'),
    lambda d: (d / "documents.jsonl").write_text("{broken\n"),
])
def test_load_rejects_corrupt_store(tmp_path, mutate):
    kb = seeded_kb(2)
    store = tmp_path / "store"
    kb.save(store)
    mutate(store)
    with pytest.raises(CorruptStore):
        KnowledgeBase.load(store)


def test_load_rejects_count_mismatch(tmp_path):
    kb = seeded_kb(2)
    store = tmp_path / "store"
    kb.save(store)
    body = (store / "documents.jsonl").read_text().splitlines()
    (store / "documents.jsonl").write_text(body[0] + "\n")
    with pytest.raises(CorruptStore):
        KnowledgeBase.load(store)


taus = st.floats(min_value=0.0, max_value=10.0, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(taus, min_size=1, max_size=12))
def test_reorganize_places_every_doc_by_tau_alone(tau_values):
    kb = KnowledgeBase()
    for i, tau in enumerate(tau_values):
        kb.insert(make_record(f"d{i}", ["t"]))
        kb.get(f"d{i}").tau = tau
    kb.reorganize()
    p = kb.params
    for doc in kb.docs.values():
        if doc.tau >= p.theta_active:
            assert doc.tier is Tier.ACTIVE
        elif doc.tau < p.theta_depr:
            assert doc.tier is Tier.DEPRECIATED
        else:
            assert doc.tier is Tier.USUAL
    assert kb.reorganize() == []


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=5.0, allow_nan=False),
                min_size=1, max_size=10))
def test_deposits_monotone_and_evaporation_contracts(ratings):
    kb = KnowledgeBase()
    kb.insert(make_record("d", ["t"]))
    prev = kb.get("d").tau
    for r in ratings:
        tau = kb.deposit("d", r)
        assert tau >= prev
        prev = tau
    before = kb.get("d").tau
    kb.evaporate()
    assert kb.get("d").tau == pytest.approx(before * 0.9)
    assert kb.get("d").tau <= before
