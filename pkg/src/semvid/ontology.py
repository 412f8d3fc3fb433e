"""Two-level concept store: common media-level concepts plus per-domain lexicons."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .errors import UnknownDomain

COMMON_DOMAIN = "common"


@dataclass
class Concept:
    id: str
    label: str
    domain: str
    synonyms: set[str] = field(default_factory=set)
    parent: str | None = None

    def __post_init__(self) -> None:
        self.synonyms = {s.lower() for s in self.synonyms}
        self.synonyms.add(self.label.lower())


@dataclass
class ConceptLexicon:
    concepts: dict[str, Concept] = field(default_factory=dict)
    domains: set[str] = field(default_factory=set)

    def add(self, concept: Concept) -> None:
        if concept.id in self.concepts:
            raise ValueError(f"duplicate concept id {concept.id!r}")
        if concept.domain != COMMON_DOMAIN and concept.domain not in self.domains:
            self.domains.add(concept.domain)
        self.concepts[concept.id] = concept

    def validate(self) -> None:
        for c in self.concepts.values():
            if c.domain != COMMON_DOMAIN and c.domain not in self.domains:
                raise ValueError(f"concept {c.id!r} references unknown domain {c.domain!r}")
        # parent edges must be acyclic
        for c in self.concepts.values():
            seen = {c.id}
            cur = c.parent
            while cur is not None:
                if cur in seen:
                    raise ValueError(f"cycle in parent edges at {cur!r}")
                seen.add(cur)
                cur = self.concepts[cur].parent if cur in self.concepts else None


@dataclass
class OntologyStore:
    """Level 1: common media concepts; level 2: one lexicon per domain."""

    level1: ConceptLexicon = field(default_factory=ConceptLexicon)
    level2: dict[str, ConceptLexicon] = field(default_factory=dict)

    def domains(self) -> list[str]:
        return sorted(self.level2)

    def has_domain(self, domain: str) -> bool:
        return domain == COMMON_DOMAIN or domain in self.level2

    def lexicon(self, domain: str) -> ConceptLexicon:
        if domain == COMMON_DOMAIN:
            return self.level1
        if domain not in self.level2:
            raise UnknownDomain(f"no lexicon for domain {domain!r}")
        return self.level2[domain]

    def candidates(self, domain: str) -> list[Concept]:
        """Concepts matchable for a domain query: the domain lexicon plus level 1."""
        lex = self.lexicon(domain)
        out = list(lex.concepts.values())
        if domain != COMMON_DOMAIN:
            out.extend(self.level1.concepts.values())
        return out

    def get(self, concept_id: str) -> Concept | None:
        if concept_id in self.level1.concepts:
            return self.level1.concepts[concept_id]
        for lex in self.level2.values():
            if concept_id in lex.concepts:
                return lex.concepts[concept_id]
        return None

    def label_of(self, concept_id: str) -> str:
        c = self.get(concept_id)
        return c.label if c else concept_id

    def domain_of(self, concept_id: str) -> str | None:
        c = self.get(concept_id)
        return c.domain if c else None

    def validate(self) -> None:
        self.level1.validate()
        known = set(self.level1.concepts)
        for lex in self.level2.values():
            lex.validate()
            known |= set(lex.concepts)
        for lex in [self.level1, *self.level2.values()]:
            for c in lex.concepts.values():
                if c.parent is not None and c.parent not in known:
                    raise ValueError(f"concept {c.id!r} has dangling parent {c.parent!r}")


def build_store(concepts: list[Concept]) -> OntologyStore:
    store = OntologyStore()
    for c in concepts:
        if c.domain == COMMON_DOMAIN:
            store.level1.add(c)
        else:
            store.level2.setdefault(c.domain, ConceptLexicon(domains={c.domain})).add(c)
    store.validate()
    return store


def load_ontology(path: str | Path) -> OntologyStore:
    """Ontology file: JSON with concepts[{id,label,domain,synonyms,parent}]."""
    raw = json.loads(Path(path).read_text(encoding="utf-8"))
    concepts = [
        Concept(
            id=c["id"],
            label=c["label"],
            domain=c.get("domain", COMMON_DOMAIN),
            synonyms=set(c.get("synonyms", [])),
            parent=c.get("parent"),
        )
        for c in raw["concepts"]
    ]
    return build_store(concepts)


def save_ontology(store: OntologyStore, path: str | Path) -> None:
    concepts = []
    for lex in [store.level1, *(store.level2[d] for d in store.domains())]:
        for cid in sorted(lex.concepts):
            c = lex.concepts[cid]
            concepts.append({
                "id": c.id,
                "label": c.label,
                "domain": c.domain,
                "synonyms": sorted(c.synonyms),
                "parent": c.parent,
            })
    Path(path).write_text(json.dumps({"concepts": concepts}, indent=2, sort_keys=True) + "\n",
                          encoding="utf-8")


def bundled_ontology() -> OntologyStore:
    return load_ontology(Path(__file__).parent / "data" / "ontology.json")
