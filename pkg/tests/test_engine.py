import pytest

from semvid.config import EngineConfig
from semvid.engine import Engine
from semvid.errors import (
    InvalidRating,
    UnknownDocument,
    UnknownDomain,
    UnknownUser,
)
from semvid.harness import SyntheticSpec, generate_corpus, load_examples
from semvid.kb import Tier


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    spec = SyntheticSpec(docs_per_domain=6)
    return generate_corpus(spec, tmp_path_factory.mktemp("corpus"))


@pytest.fixture(scope="module")
def examples(corpus):
    return load_examples(corpus)


def ready_engine(corpus, examples, **cfg):
    engine = Engine(EngineConfig(**cfg))
    engine.train(examples)
    engine.ingest(corpus.descriptors)
    engine.add_user("u1", "fr", "fr")
    return engine


def test_ingest_counts_and_duplicates(corpus):
    engine = Engine(EngineConfig())
    report = engine.ingest(corpus.descriptors)
    assert report == {"ingested": len(corpus.descriptors), "failed": 0}
    report = engine.ingest(corpus.descriptors[:2])
    assert report == {"ingested": 0, "failed": 2}
    assert engine.failures[-1]["code"] == "DuplicateDocument"


def test_ingest_records_descriptor_failures(corpus, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    engine = Engine(EngineConfig())
    report = engine.ingest([bad])
    assert report == {"ingested": 0, "failed": 1}
    assert engine.failures[0]["code"] == "InvalidDescriptor"
    # the crawler hears about the failure too
    assert engine.crawler.links[str(bad)].status == "failed"


def test_training_attaches_concepts_to_stored_documents(corpus, examples):
    engine = Engine(EngineConfig())
    engine.ingest(corpus.descriptors)
    assert all(not d.record.concepts for d in engine.kb.docs.values())
    engine.train(examples)
    for doc_id, concept in corpus.labels:
        attached = dict(engine.kb.get(doc_id).record.concepts)
        assert concept in attached
        assert attached[concept] >= engine.config.attach_threshold


def test_documents_ingested_after_training_are_classified(corpus, examples):
    engine = Engine(EngineConfig())
    engine.train(examples)
    doc_id, concept = corpus.labels[0]
    engine.ingest([corpus.descriptor_path(doc_id)])
    assert concept in dict(engine.kb.get(doc_id).record.concepts)


def test_query_validates_synchronously(corpus, examples):
    engine = ready_engine(corpus, examples)
    with pytest.raises(UnknownUser):
        engine.query("ghost", "sports", "footy", 5)
    with pytest.raises(UnknownDomain):
        engine.query("u1", "cooking", "footy", 5)
    with pytest.raises(ValueError):
        engine.query("u1", "sports", "footy", 5, strategy="mystery")


def test_query_returns_planted_documents_deterministically(corpus, examples):
    engine = ready_engine(corpus, examples)
    first, report = engine.query("u1", "sports", "Football footy", 5,
                                 strategy="concept-first")
    again, _ = engine.query("u1", "sports", "Football footy", 5,
                            strategy="concept-first")
    assert [r.doc_id for r in first] == [r.doc_id for r in again]
    assert [r.score for r in first] == [r.score for r in again]
    assert first, "expected at least one hit"
    top_truth = {corpus.truth[r.doc_id] for r in first[:2]}
    assert "sports.football" in top_truth
    assert report.p_global > 0.0


def test_query_updates_history_and_facets(corpus, examples):
    engine = ready_engine(corpus, examples)
    engine.query("u1", "sports", "velo tour", 3)
    history = engine.people.profile("u1").history["sports"]
    assert [text for text, _ in history] == ["velo tour"]
    facet = engine.people.facet("u1", "sports")
    assert facet.usage == {"hybrid": 1}   # no peers yet, default strategy


def test_feedback_deposits_and_tracks_session(corpus, examples):
    engine = ready_engine(corpus, examples)
    doc_id = corpus.labels[0][0]
    tau = engine.feedback("u1", doc_id, 5)
    assert tau == pytest.approx(2.0)
    assert engine.session_ratings["u1"] == [5]
    results, report = engine.query("u1", "news", "forecast", 3)
    assert dict(report.stages)["feedback"] == pytest.approx(1.0)
    engine.feedback("u1", doc_id, 0)
    _, report = engine.query("u1", "news", "forecast", 3)
    assert dict(report.stages)["feedback"] == pytest.approx(0.5)


def test_feedback_validates_synchronously(corpus, examples):
    engine = ready_engine(corpus, examples)
    doc_id = corpus.labels[0][0]
    with pytest.raises(UnknownUser):
        engine.feedback("ghost", doc_id, 3)
    with pytest.raises(UnknownDocument):
        engine.feedback("u1", "no-such-doc", 3)
    for bad in (-1, 5.5, True, "4"):
        with pytest.raises(InvalidRating):
            engine.feedback("u1", doc_id, bad)


def test_feedback_nudges_user_preferences(corpus, examples):
    engine = ready_engine(corpus, examples)
    doc_id, concept = corpus.labels[0]
    engine.feedback("u1", doc_id, 5)
    domain = engine.ontology.domain_of(concept)
    prefs = engine.people.profile("u1").prefs[domain]
    assert prefs[concept] > 0


def test_auto_reorganize_cadence(corpus, examples):
    engine = ready_engine(corpus, examples, auto_reorganize_every=3)
    rated = corpus.labels[0][0]
    untouched = corpus.labels[1][0]
    engine.feedback("u1", rated, 0)
    engine.feedback("u1", rated, 0)
    assert engine.kb.get(untouched).tau == 1.0    # not yet evaporated
    engine.feedback("u1", rated, 0)
    assert engine.kb.get(untouched).tau == pytest.approx(0.9)


def test_manual_reorganize_evaporates_first(corpus, examples):
    engine = ready_engine(corpus, examples)
    doc_id = corpus.labels[0][0]
    engine.kb.get(doc_id).tau = 3.0
    moves = engine.reorganize()
    assert (doc_id, Tier.USUAL, Tier.ACTIVE) in moves
    assert engine.kb.get(doc_id).tier is Tier.ACTIVE
    assert engine.kb.get(doc_id).tau == pytest.approx(2.7)


def test_state_round_trip_preserves_everything(corpus, examples, tmp_path):
    engine = ready_engine(corpus, examples)
    doc_id = corpus.labels[0][0]
    engine.feedback("u1", doc_id, 4)
    engine.save_state(tmp_path / "state")

    other = Engine(EngineConfig())
    other.load_state(tmp_path / "state")
    assert set(other.kb.docs) == set(engine.kb.docs)
    assert other.kb.get(doc_id).tau == engine.kb.get(doc_id).tau
    assert other.people.profile("u1").prefs == engine.people.profile("u1").prefs
    assert other.model is not None
    # avatar agents are respawned, so queries work immediately
    results, _ = other.query("u1", "sports", "Football footy", 3)
    assert results


def test_crawl_records_descriptor_links(corpus, tmp_path):
    index = tmp_path / "index.html"
    leaf = tmp_path / "leaf.html"
    index.write_text(f'<a href="v1.json">one</a> <a href="{leaf}">next</a>')
    leaf.write_text('<a href="v2.json">two</a>')
    engine = Engine(EngineConfig())
    links = engine.crawl([str(index)], depth_limit=2)
    by_uri = {record.uri.rsplit("/", 1)[-1]: record for record in links}
    assert set(by_uri) == {"v1.json", "v2.json"}
    assert all(record.status == "pending" for record in links)


def test_message_trace_captures_query_flow(corpus, examples):
    engine = ready_engine(corpus, examples)
    engine.runtime.trace.clear()
    engine.query("u1", "sports", "footy", 2)
    kinds = [line.split("\t")[3] for line in engine.runtime.trace]
    assert kinds == ["QueryRequest", "QueryResponse"]
    senders = [line.split("\t")[1] for line in engine.runtime.trace]
    assert senders == ["engine", "avatar:u1"]


def test_custom_strategy_catalog(corpus, examples):
    engine = Engine(EngineConfig(strategies={"mine": (0.7, 0.1, 0.1, 0.1)}))
    engine.train(examples)
    engine.ingest(corpus.descriptors)
    engine.add_user("u1", "fr", "fr")
    results, _ = engine.query("u1", "sports", "footy", 3, strategy="mine")
    assert results
