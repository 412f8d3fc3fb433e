"""The agent society wired over the runtime, behind one engine facade.

Agents: crawler (link discovery), extractor (descriptor -> metadata),
classifier (concept attachment), organizer (knowledge-base authority),
one avatar per user, and a gateway collector for query responses. All
state mutations happen inside message handlers; the engine validates
inputs up front, sends messages, runs the runtime to quiescence, and
reads the results back out.
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable

from .classification import (
    ClassifierModel,
    Hyper,
    LabeledExample,
    attach_concepts,
    load_model,
    save_model,
    train,
)
from .config import EngineConfig
from .errors import (
    DuplicateDocument,
    InvalidRating,
    SemvidError,
    UnknownDocument,
    UnknownDomain,
    UnknownUser,
)
from .ingestion import LinkRecord, crawl, extract, fetch_page, load_descriptor
from .kb import RATING_MAX, RATING_MIN, KnowledgeBase, KbStats
from .ontology import OntologyStore, bundled_ontology
from .personalization import (
    AvatarProfile,
    ContextTriplet,
    FeedbackEvent,
    PersonalizationService,
    Suggestion,
)
from .pipeline import (
    STRATEGIES,
    PerformanceReport,
    RankedResult,
    RawQuery,
    StrategyWeights,
    retrieve,
)
from .runtime import Kind, Message, Runtime, RuntimeConfig
from .synonyms import StaticSynonyms, bundled_synonyms


class CrawlerAgent:
    """Owns the links store."""

    name = "crawler"

    def __init__(self) -> None:
        self.links: dict[str, LinkRecord] = {}
        self._clock = 0

    def _ensure(self, uri: str) -> LinkRecord:
        if uri not in self.links:
            self._clock += 1
            self.links[uri] = LinkRecord(uri=uri, discovered_at=self._clock)
        return self.links[uri]

    def on_message(self, rt: Runtime, msg: Message) -> None:
        if msg.kind is Kind.CRAWL_REQUEST:
            p = msg.payload
            for rec in crawl(p["seeds"], p["depth_limit"],
                             p.get("pattern", "*.json"),
                             p.get("fetch") or fetch_page):
                if rec.uri not in self.links:
                    self._clock += 1
                    self.links[rec.uri] = LinkRecord(uri=rec.uri,
                                                     discovered_at=self._clock,
                                                     status=rec.status)
        elif msg.kind is Kind.LINK_EXTRACTED:
            self._ensure(msg.payload["uri"]).status = "extracted"
        elif msg.kind is Kind.LINK_FAILED:
            self._ensure(msg.payload["uri"]).status = "failed"


class ExtractorAgent:
    name = "extractor"

    def __init__(self, engine: "Engine") -> None:
        self.engine = engine

    def on_message(self, rt: Runtime, msg: Message) -> None:
        if msg.kind is not Kind.LINK_DISCOVERED:
            return
        uri = msg.payload["uri"]
        try:
            record = extract(load_descriptor(uri), self.engine.config.shot_theta)
        except SemvidError as exc:
            self.engine.failures.append({"uri": uri, "code": exc.code,
                                         "message": str(exc)})
            rt.send(Message(self.name, "crawler", Kind.LINK_FAILED,
                            {"uri": uri, "reason": str(exc)}))
            return
        rt.send(Message(self.name, "classifier", Kind.DOCUMENT_EXTRACTED,
                        {"record": record}))
        rt.send(Message(self.name, "crawler", Kind.LINK_EXTRACTED, {"uri": uri}))


class ClassifierAgent:
    name = "classifier"

    def __init__(self, engine: "Engine") -> None:
        self.engine = engine

    def on_message(self, rt: Runtime, msg: Message) -> None:
        if msg.kind is Kind.MODEL_TRAINED:
            self.engine.model = msg.payload["model"]
        elif msg.kind is Kind.DOCUMENT_EXTRACTED:
            record = msg.payload["record"]
            if self.engine.model is not None:
                attach_concepts(self.engine.model, record,
                                self.engine.config.attach_threshold)
            rt.send(Message(self.name, "organizer", Kind.DOCUMENT_CLASSIFIED,
                            {"record": record}))


class OrganizerAgent:
    """Single writer for the knowledge base; runs the evaporation policy."""

    name = "organizer"

    def __init__(self, engine: "Engine") -> None:
        self.engine = engine
        self._deposits = 0

    def on_message(self, rt: Runtime, msg: Message) -> None:
        kb = self.engine.kb
        if msg.kind is Kind.DOCUMENT_CLASSIFIED:
            record = msg.payload["record"]
            try:
                kb.insert(record)
            except DuplicateDocument as exc:
                self.engine.failures.append({"uri": record.doc_id,
                                             "code": exc.code,
                                             "message": str(exc)})
        elif msg.kind is Kind.DEPOSIT_PHEROMONE:
            kb.deposit(msg.payload["doc_id"], msg.payload["rating"])
            self._deposits += 1
            if self._deposits % self.engine.config.auto_reorganize_every == 0:
                kb.evaporate()
                self.engine.last_migrations = kb.reorganize()
        elif msg.kind is Kind.REORGANIZE_TICK:
            kb.evaporate()
            self.engine.last_migrations = kb.reorganize()
        elif msg.kind is Kind.MODEL_TRAINED:
            model = msg.payload["model"]
            for doc_id in sorted(kb.docs):
                attach_concepts(model, kb.docs[doc_id].record,
                                self.engine.config.attach_threshold)


class AvatarAgent:
    """Every query and feedback for a user passes through their avatar."""

    def __init__(self, engine: "Engine", user_id: str) -> None:
        self.engine = engine
        self.user_id = user_id
        self.name = f"avatar:{user_id}"

    def on_message(self, rt: Runtime, msg: Message) -> None:
        engine = self.engine
        if msg.kind is Kind.QUERY_REQUEST:
            raw: RawQuery = msg.payload["raw"]
            strategy = msg.payload["strategy"]
            engine.people.record_query(self.user_id, raw.domain, raw.text,
                                       step=msg.seq)
            engine.people.record_usage(self.user_id, raw.domain, strategy)
            results, report = retrieve(
                raw, engine.catalog[strategy], engine.kb, engine.ontology,
                engine.synonyms, engine.people.profile(self.user_id),
                threshold=engine.config.map_threshold,
                m=engine.config.enrich_m,
                session_ratings=engine.session_ratings.get(self.user_id),
            )
            rt.send(Message(self.name, "gateway", Kind.QUERY_RESPONSE,
                            {"user_id": self.user_id, "results": results,
                             "report": report}))
        elif msg.kind is Kind.FEEDBACK_RECORDED:
            event: FeedbackEvent = msg.payload["event"]
            doc = engine.kb.get(event.doc_id)
            engine.people.record_feedback(event, doc.record.concepts)
            engine.session_ratings.setdefault(self.user_id, []).append(event.rating)
            rt.send(Message(self.name, "organizer", Kind.DEPOSIT_PHEROMONE,
                            {"doc_id": event.doc_id, "rating": event.rating}))


class GatewayCollector:
    name = "gateway"

    def __init__(self, engine: "Engine") -> None:
        self.engine = engine

    def on_message(self, rt: Runtime, msg: Message) -> None:
        if msg.kind is Kind.QUERY_RESPONSE:
            self.engine._responses.append(msg.payload)


class Engine:
    """Facade over the whole system for one process."""

    def __init__(self, config: EngineConfig | None = None,
                 ontology: OntologyStore | None = None,
                 synonyms: StaticSynonyms | None = None):
        self.config = config or EngineConfig()
        self.ontology = ontology or bundled_ontology()
        self.synonyms = synonyms or bundled_synonyms()
        self.kb = KnowledgeBase(self.config.pheromone)
        self.catalog: dict[str, StrategyWeights] = dict(STRATEGIES)
        for name, ws in self.config.strategies.items():
            self.catalog[name] = StrategyWeights(*ws)
        self.people = PersonalizationService(self.ontology,
                                             strategy_names=set(self.catalog),
                                             eta=self.config.eta)
        self.model: ClassifierModel | None = None
        self.failures: list[dict] = []
        self.session_ratings: dict[str, list[float]] = {}
        self.last_report: PerformanceReport | None = None
        self.last_migrations: list = []
        self._responses: list[dict] = []
        self._feedback_step = 0

        self.runtime = Runtime(RuntimeConfig(seed=self.config.seed))
        self.crawler = CrawlerAgent()
        self.runtime.spawn("crawler", self.crawler)
        self.runtime.spawn("extractor", ExtractorAgent(self))
        self.runtime.spawn("classifier", ClassifierAgent(self))
        self.runtime.spawn("organizer", OrganizerAgent(self))
        self.runtime.spawn("gateway", GatewayCollector(self))

    # -- users ---------------------------------------------------------

    def add_user(self, user_id: str, country: str = "??", language: str = "en",
                 context: ContextTriplet | None = None) -> AvatarProfile:
        profile = self.people.create_avatar(user_id, country, language, context)
        self.runtime.spawn(f"avatar:{user_id}", AvatarAgent(self, user_id))
        return profile

    def _require_user(self, user_id: str) -> None:
        if user_id not in self.people.profiles:
            raise UnknownUser(user_id)

    def _require_domain(self, domain: str) -> None:
        if not self.ontology.has_domain(domain):
            raise UnknownDomain(domain)

    # -- ingestion ------------------------------------------------------

    def crawl(self, seeds: list[str], depth_limit: int = 2,
              pattern: str = "*.json", fetch=None) -> list[LinkRecord]:
        self.runtime.send(Message("engine", "crawler", Kind.CRAWL_REQUEST,
                                  {"seeds": seeds, "depth_limit": depth_limit,
                                   "pattern": pattern, "fetch": fetch}))
        self.runtime.run_until_idle()
        return sorted(self.crawler.links.values(), key=lambda r: r.discovered_at)

    def ingest(self, paths: Iterable[str | Path]) -> dict:
        docs_before = len(self.kb)
        failures_before = len(self.failures)
        for path in paths:
            self.runtime.send(Message("engine", "extractor",
                                      Kind.LINK_DISCOVERED, {"uri": str(path)}))
        self.runtime.run_until_idle()
        return {"ingested": len(self.kb) - docs_before,
                "failed": len(self.failures) - failures_before}

    def ingest_dir(self, directory: str | Path) -> dict:
        return self.ingest(sorted(Path(directory).glob("*.json")))

    # -- training ---------------------------------------------------------

    def train(self, examples: list[LabeledExample],
              hyper: Hyper | None = None) -> ClassifierModel:
        """Train detectors, hand the model to the classifier agent, and
        re-attach concepts on everything already stored."""
        model = train(examples, hyper=hyper or Hyper(seed=self.config.seed))
        self.runtime.send(Message("engine", "classifier", Kind.MODEL_TRAINED,
                                  {"model": model}))
        self.runtime.send(Message("engine", "organizer", Kind.MODEL_TRAINED,
                                  {"model": model}))
        self.runtime.run_until_idle()
        return model

    # -- query / feedback / suggestions ------------------------------------

    def query(self, user_id: str, domain: str, text: str, k: int,
              strategy: str | None = None,
              ) -> tuple[list[RankedResult], PerformanceReport]:
        self._require_user(user_id)
        self._require_domain(domain)
        if strategy is None:
            strategy = self.people.assign_strategy(user_id, domain)
        elif strategy not in self.catalog:
            raise ValueError(f"unknown strategy {strategy!r}")
        raw = RawQuery(user_id=user_id, domain=domain, text=text, k=k)
        self.runtime.send(Message("engine", f"avatar:{user_id}",
                                  Kind.QUERY_REQUEST,
                                  {"raw": raw, "strategy": strategy}))
        self.runtime.run_until_idle()
        payload = self._responses.pop()
        self.last_report = payload["report"]
        return payload["results"], payload["report"]

    def feedback(self, user_id: str, doc_id: str, rating: float) -> float:
        self._require_user(user_id)
        self.kb.get(doc_id)
        if not isinstance(rating, (int, float)) or isinstance(rating, bool):
            raise InvalidRating(f"rating must be a number, got {rating!r}")
        if not RATING_MIN <= rating <= RATING_MAX:
            raise InvalidRating(f"rating {rating} outside [0, 5]")
        self._feedback_step += 1
        event = FeedbackEvent(user_id=user_id, doc_id=doc_id, rating=rating,
                              step=self._feedback_step)
        self.runtime.send(Message("engine", f"avatar:{user_id}",
                                  Kind.FEEDBACK_RECORDED, {"event": event}))
        self.runtime.run_until_idle()
        return self.kb.get(doc_id).tau

    def suggest(self, user_id: str, domain: str, k: int) -> list[Suggestion]:
        self._require_user(user_id)
        self._require_domain(domain)
        return self.people.suggest(user_id, domain, k)

    def reorganize(self) -> list:
        self.runtime.send(Message("engine", "organizer", Kind.REORGANIZE_TICK, {}))
        self.runtime.run_until_idle()
        return self.last_migrations

    def stats(self) -> KbStats:
        return self.kb.stats()

    # -- persistence --------------------------------------------------------

    def save_state(self, directory: str | Path) -> None:
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        self.kb.save(directory / "kb")
        self.people.save(directory)
        if self.model is not None:
            save_model(self.model, directory / "model.json")

    def load_state(self, directory: str | Path) -> None:
        directory = Path(directory)
        if (directory / "kb" / "manifest.json").exists():
            self.kb = KnowledgeBase.load(directory / "kb")
        if (directory / "profiles.jsonl").exists():
            self.people.load(directory)
            for user_id in sorted(self.people.profiles):
                name = f"avatar:{user_id}"
                if not self.runtime.has_agent(name):
                    self.runtime.spawn(name, AvatarAgent(self, user_id))
        if (directory / "model.json").exists():
            self.model = load_model(directory / "model.json")
