"""User-side state: avatars, communities, facets, and preference learning.

Every user is represented by exactly one avatar profile holding context,
per-domain concept preferences (L1-normalized or all-zero), community
memberships with degrees, and query history. Communities aggregate their
members' preferences by membership degree. Facets track per-domain
strategy usage; the strategist picks the strategy most used by peers.
Feedback nudges preferences toward the concepts of well-rated documents.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

from .errors import (
    CorruptStore,
    DuplicateUser,
    InvalidRating,
    IoFailure,
    UnknownCommunity,
    UnknownUser,
)
from .kb import RATING_MAX, RATING_MIN
from .ontology import OntologyStore
from .text import tokenize

DEFAULT_STRATEGY = "hybrid"
DEFAULT_ETA = 0.1
DEVICES = ("desktop", "mobile", "tablet", "other")
CRITERIA = ("geographic", "linguistic", "interest")


@dataclass(frozen=True)
class ContextTriplet:
    location: str = "??"        # ISO country code or "??"
    time: float = 0.0
    device: str = "other"

    def __post_init__(self) -> None:
        if not (len(self.location) == 2 and (self.location == "??"
                                             or self.location.isalpha())):
            raise ValueError(f"bad location {self.location!r}")
        if self.device not in DEVICES:
            raise ValueError(f"bad device {self.device!r}")


@dataclass
class AvatarProfile:
    user_id: str
    context: ContextTriplet = field(default_factory=ContextTriplet)
    prefs: dict[str, dict[str, float]] = field(default_factory=dict)
    memberships: dict[str, float] = field(default_factory=dict)
    history: dict[str, list[tuple[str, int]]] = field(default_factory=dict)

    def top_concepts(self, domain: str, m: int) -> list[str]:
        """Up to m concept ids by descending preference weight, ties by id."""
        vec = self.prefs.get(domain, {})
        ranked = sorted(vec.items(), key=lambda kv: (-kv[1], kv[0]))
        return [cid for cid, w in ranked[:m] if w > 0]


@dataclass
class Community:
    id: str
    criterion: str
    members: dict[str, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.criterion not in CRITERIA:
            raise ValueError(f"bad criterion {self.criterion!r}")


@dataclass
class FacetState:
    user_id: str
    domain: str
    strategy: str = DEFAULT_STRATEGY
    usage: dict[str, int] = field(default_factory=dict)


@dataclass(frozen=True)
class FeedbackEvent:
    user_id: str
    doc_id: str
    rating: float
    step: int = 0


@dataclass(frozen=True)
class Suggestion:
    text: str
    source: str   # "history" or "predictive"


def _normalize(vec: dict[str, float]) -> dict[str, float]:
    total = sum(vec.values())
    if total <= 0:
        return {c: 0.0 for c in vec}
    return {c: w / total for c, w in vec.items()}


class PersonalizationService:
    """Owns all avatar, community, and facet state."""

    def __init__(self, ontology: OntologyStore,
                 strategy_names: set[str] | None = None,
                 eta: float = DEFAULT_ETA):
        self.ontology = ontology
        self.strategy_names = set(strategy_names) if strategy_names else None
        self.eta = eta
        self.profiles: dict[str, AvatarProfile] = {}
        self.communities: dict[str, Community] = {}
        self.facets: dict[tuple[str, str], FacetState] = {}

    # -- avatars -----------------------------------------------------

    def profile(self, user_id: str) -> AvatarProfile:
        try:
            return self.profiles[user_id]
        except KeyError:
            raise UnknownUser(user_id) from None

    def create_avatar(self, user_id: str, country: str, language: str,
                      context: ContextTriplet | None = None) -> AvatarProfile:
        """New member starts from the geographic community's tastes."""
        if user_id in self.profiles:
            raise DuplicateUser(user_id)
        geo_id = f"geo:{country.upper()}"
        lang_id = f"lang:{language.lower()}"
        self._ensure_community(geo_id, "geographic")
        self._ensure_community(lang_id, "linguistic")
        prefs: dict[str, dict[str, float]] = {}
        for domain in self.ontology.domains():
            vec = self.community_profile(geo_id, domain)
            if any(w > 0 for w in vec.values()):
                prefs[domain] = vec
        profile = AvatarProfile(
            user_id=user_id,
            context=context or ContextTriplet(location=country.upper()),
            prefs=prefs,
            memberships={geo_id: 1.0, lang_id: 1.0},
        )
        self.profiles[user_id] = profile
        self.communities[geo_id].members[user_id] = 1.0
        self.communities[lang_id].members[user_id] = 1.0
        return profile

    def _ensure_community(self, community_id: str, criterion: str) -> Community:
        if community_id not in self.communities:
            self.communities[community_id] = Community(id=community_id,
                                                       criterion=criterion)
        return self.communities[community_id]

    def join_community(self, user_id: str, community_id: str, criterion: str,
                       degree: float = 1.0) -> None:
        if not 0.0 < degree <= 1.0:
            raise ValueError("degree must be in (0, 1]")
        self.profile(user_id).memberships[community_id] = degree
        self._ensure_community(community_id, criterion).members[user_id] = degree

    # -- communities -------------------------------------------------

    def community_profile(self, community_id: str, domain: str) -> dict[str, float]:
        """Degree-weighted mean of member preference vectors, re-normalized."""
        try:
            community = self.communities[community_id]
        except KeyError:
            raise UnknownCommunity(community_id) from None
        acc: dict[str, float] = {}
        for member_id, degree in community.members.items():
            member = self.profiles.get(member_id)
            if member is None:
                continue
            for cid, w in member.prefs.get(domain, {}).items():
                acc[cid] = acc.get(cid, 0.0) + degree * w
        return _normalize(acc)

    # -- facets and the strategist ------------------------------------

    def facet(self, user_id: str, domain: str) -> FacetState:
        self.profile(user_id)
        key = (user_id, domain)
        if key not in self.facets:
            self.facets[key] = FacetState(user_id=user_id, domain=domain)
        return self.facets[key]

    def record_usage(self, user_id: str, domain: str, strategy: str) -> None:
        if self.strategy_names is not None and strategy not in self.strategy_names:
            raise ValueError(f"unknown strategy {strategy!r}")
        facet = self.facet(user_id, domain)
        facet.usage[strategy] = facet.usage.get(strategy, 0) + 1

    def assign_strategy(self, user_id: str, domain: str) -> str:
        """Adopt the strategy peers (community co-members) use the most."""
        profile = self.profile(user_id)
        peers: set[str] = set()
        for community_id in profile.memberships:
            community = self.communities.get(community_id)
            if community:
                peers.update(u for u in community.members if u != user_id)
        counts: Counter = Counter()
        for peer in sorted(peers):
            facet = self.facets.get((peer, domain))
            if facet:
                counts.update(facet.usage)
        positive = {name: n for name, n in counts.items() if n > 0}
        if positive:
            chosen = sorted(positive.items(), key=lambda kv: (-kv[1], kv[0]))[0][0]
        else:
            chosen = DEFAULT_STRATEGY
        self.facet(user_id, domain).strategy = chosen
        return chosen

    # -- history and suggestions --------------------------------------

    def record_query(self, user_id: str, domain: str, text: str, step: int) -> None:
        self.profile(user_id).history.setdefault(domain, []).append((text, step))

    def suggest(self, user_id: str, domain: str, k: int) -> list[Suggestion]:
        """History items by frequency (recency breaks ties), then community
        trend concepts the history does not already cover; at most k."""
        profile = self.profile(user_id)
        if k < 0:
            raise ValueError("k must be >= 0")
        out: list[Suggestion] = []
        seen: set[str] = set()

        history = profile.history.get(domain, [])
        freq: Counter = Counter(text for text, _ in history)
        latest: dict[str, int] = {}
        for text, step in history:
            latest[text] = max(step, latest.get(text, step))
        for text in sorted(freq, key=lambda t: (-freq[t], -latest[t], t)):
            if len(out) >= k:
                break
            if text.casefold() not in seen:
                out.append(Suggestion(text=text, source="history"))
                seen.add(text.casefold())

        covered = set(seen)
        for text, _ in history:
            covered.update(tokenize(text))

        trend: dict[str, float] = {}
        for community_id, degree in profile.memberships.items():
            if community_id not in self.communities:
                continue
            for cid, w in self.community_profile(community_id, domain).items():
                trend[cid] = trend.get(cid, 0.0) + degree * w
        for cid in sorted(trend, key=lambda c: (-trend[c], c)):
            if len(out) >= k:
                break
            if trend[cid] <= 0:
                break
            label = self.ontology.label_of(cid)
            if label is None or label.casefold() in covered:
                continue
            out.append(Suggestion(text=label, source="predictive"))
            covered.add(label.casefold())
        return out

    # -- feedback learning ---------------------------------------------

    def record_feedback(self, event: FeedbackEvent,
                        doc_concepts: list[tuple[str, float]]) -> AvatarProfile:
        """Nudge preferences toward the rated document's concepts, each in
        its own domain, then re-normalize the touched vectors."""
        profile = self.profile(event.user_id)
        if not isinstance(event.rating, (int, float)) or isinstance(event.rating, bool):
            raise InvalidRating(f"rating must be a number, got {event.rating!r}")
        if not RATING_MIN <= event.rating <= RATING_MAX:
            raise InvalidRating(f"rating {event.rating} outside [0, 5]")
        touched: set[str] = set()
        for cid, conf in doc_concepts:
            domain = self.ontology.domain_of(cid)
            if domain is None:
                continue
            vec = profile.prefs.setdefault(domain, {})
            vec[cid] = vec.get(cid, 0.0) + self.eta * (event.rating / RATING_MAX) * conf
            touched.add(domain)
        for domain in touched:
            profile.prefs[domain] = _normalize(profile.prefs[domain])
        return profile

    # -- persistence ---------------------------------------------------

    def save(self, directory: str | Path) -> None:
        directory = Path(directory)
        try:
            directory.mkdir(parents=True, exist_ok=True)
            lines = []
            for user_id in sorted(self.profiles):
                p = self.profiles[user_id]
                facets = {
                    domain: {"strategy": f.strategy, "usage": f.usage}
                    for (uid, domain), f in sorted(self.facets.items())
                    if uid == user_id
                }
                lines.append(json.dumps({
                    "user_id": p.user_id,
                    "context": {"location": p.context.location,
                                "time": p.context.time,
                                "device": p.context.device},
                    "prefs": p.prefs,
                    "memberships": p.memberships,
                    "history": {d: [[t, s] for t, s in h]
                                for d, h in p.history.items()},
                    "facets": facets,
                }, sort_keys=True))
            (directory / "profiles.jsonl").write_text(
                "\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")
            communities = {
                cid: {"criterion": c.criterion, "members": c.members}
                for cid, c in sorted(self.communities.items())
            }
            (directory / "communities.json").write_text(
                json.dumps(communities, sort_keys=True, indent=2),
                encoding="utf-8")
        except OSError as exc:
            raise IoFailure(str(exc)) from exc

    def load(self, directory: str | Path) -> None:
        directory = Path(directory)
        try:
            body = (directory / "profiles.jsonl").read_text(encoding="utf-8")
            communities = json.loads(
                (directory / "communities.json").read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise CorruptStore(f"missing profile file: {exc.filename}") from exc
        except OSError as exc:
            raise IoFailure(str(exc)) from exc
        except json.JSONDecodeError as exc:
            raise CorruptStore(f"bad communities file: {exc}") from exc
        self.profiles.clear()
        self.communities.clear()
        self.facets.clear()
        try:
            for cid, row in communities.items():
                self.communities[cid] = Community(
                    id=cid, criterion=row["criterion"],
                    members={u: float(d) for u, d in row["members"].items()})
            for i, line in enumerate(body.splitlines()):
                if not line.strip():
                    continue
                row = json.loads(line)
                profile = AvatarProfile(
                    user_id=row["user_id"],
                    context=ContextTriplet(**row["context"]),
                    prefs={d: {c: float(w) for c, w in vec.items()}
                           for d, vec in row["prefs"].items()},
                    memberships={c: float(d)
                                 for c, d in row["memberships"].items()},
                    history={d: [(t, int(s)) for t, s in h]
                             for d, h in row["history"].items()},
                )
                if profile.user_id in self.profiles:
                    raise CorruptStore(f"duplicate user {profile.user_id!r}")
                self.profiles[profile.user_id] = profile
                for domain, f in row.get("facets", {}).items():
                    self.facets[(profile.user_id, domain)] = FacetState(
                        user_id=profile.user_id, domain=domain,
                        strategy=f["strategy"],
                        usage={s: int(n) for s, n in f["usage"].items()})
        except CorruptStore:
            raise
        except (KeyError, ValueError, TypeError, json.JSONDecodeError) as exc:
            raise CorruptStore(f"bad profile data: {exc}") from exc
