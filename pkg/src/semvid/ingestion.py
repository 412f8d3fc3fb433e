"""Crawler and extractor: link discovery, shot segmentation, metadata extraction.

Raw video is replaced by descriptor files carrying precomputed per-frame
color histograms and transcripts; extraction turns a descriptor into an
MPEG-7-inspired metadata record (shots, keyframes, text terms) and a
storyboard summary.
"""

from __future__ import annotations

import json
import urllib.request
from collections import deque
from dataclasses import dataclass, field
from html.parser import HTMLParser
from fnmatch import fnmatch
from pathlib import Path
from urllib.parse import urldefrag, urljoin, urlparse

from .errors import EmptyFrames, InvalidDescriptor
from .text import tokenize

HIST_DIM = 48
DEFAULT_SHOT_THETA = 0.4
HIST_SUM_TOL = 1e-9


@dataclass(frozen=True)
class FrameFeature:
    t: float
    hist: tuple[float, ...]


@dataclass(frozen=True)
class Shot:
    start_idx: int
    end_idx: int
    keyframe_idx: int
    keyframe_hist: tuple[float, ...] | None = None


@dataclass
class VideoDescriptor:
    id: str
    uri: str
    title: str
    duration_s: float
    frames: list[FrameFeature]
    transcript: list[tuple[float, float, str]] = field(default_factory=list)
    captions: list[str] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    meta: dict[str, str] = field(default_factory=dict)


@dataclass
class MetadataRecord:
    doc_id: str
    title: str
    media_info: dict
    shots: list[Shot]
    text_terms: list[str]
    meta: dict[str, str]
    concepts: list[tuple[str, float]] = field(default_factory=list)


@dataclass
class Storyboard:
    doc_id: str
    keyframes: list[tuple[int, int, tuple[float, ...]]]  # (shot idx, frame idx, hist)


@dataclass
class LinkRecord:
    uri: str
    discovered_at: int
    status: str = "pending"  # pending | extracted | failed


def l1_distance(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    return sum(abs(x - y) for x, y in zip(a, b))


def _check_hist(hist: tuple[float, ...]) -> str | None:
    if any(v < 0 for v in hist):
        return "histogram has negative entries"
    if abs(sum(hist) - 1.0) > HIST_SUM_TOL:
        return f"histogram sums to {sum(hist)!r}, expected 1"
    return None


def validate_descriptor(desc: VideoDescriptor) -> None:
    """Raise InvalidDescriptor on any invariant violation."""
    if not desc.id:
        raise InvalidDescriptor("descriptor id is empty")
    if not desc.frames:
        raise InvalidDescriptor("descriptor has no frames")
    dims = {len(f.hist) for f in desc.frames}
    if len(dims) != 1:
        raise InvalidDescriptor(f"mixed histogram dimensions {sorted(dims)}")
    times = [f.t for f in desc.frames]
    if times != sorted(times):
        raise InvalidDescriptor("frames not ordered by time")
    if desc.duration_s < times[-1]:
        raise InvalidDescriptor("duration_s is below the last frame time")
    for i, f in enumerate(desc.frames):
        problem = _check_hist(f.hist)
        if problem:
            raise InvalidDescriptor(f"frame {i}: {problem}")


def load_descriptor(path: str | Path) -> VideoDescriptor:
    """Read a descriptor JSON file and validate it."""
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InvalidDescriptor(f"cannot read descriptor {path}: {exc}") from exc
    return descriptor_from_dict(raw)


def descriptor_from_dict(raw: dict) -> VideoDescriptor:
    try:
        desc = VideoDescriptor(
            id=raw["id"],
            uri=raw.get("uri", ""),
            title=raw.get("title", ""),
            duration_s=float(raw["duration_s"]),
            frames=[FrameFeature(t=float(f["t"]), hist=tuple(float(v) for v in f["hist"]))
                    for f in raw["frames"]],
            transcript=[(float(s["t0"]), float(s["t1"]), s["text"])
                        for s in raw.get("transcript", [])],
            captions=list(raw.get("captions", [])),
            tags=list(raw.get("tags", [])),
            meta=dict(raw.get("meta", {})),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InvalidDescriptor(f"malformed descriptor: {exc}") from exc
    validate_descriptor(desc)
    return desc


def descriptor_to_dict(desc: VideoDescriptor) -> dict:
    return {
        "id": desc.id,
        "uri": desc.uri,
        "title": desc.title,
        "duration_s": desc.duration_s,
        "frames": [{"t": f.t, "hist": list(f.hist)} for f in desc.frames],
        "transcript": [{"t0": t0, "t1": t1, "text": text} for t0, t1, text in desc.transcript],
        "captions": list(desc.captions),
        "tags": list(desc.tags),
        "meta": dict(desc.meta),
    }


def detect_shots(frames: list[FrameFeature], theta: float = DEFAULT_SHOT_THETA) -> list[Shot]:
    """Cut before frame i whenever L1(hist[i-1], hist[i]) > theta.

    Shots partition the frame sequence; the keyframe is the middle frame.
    """
    if not frames:
        raise EmptyFrames("cannot segment an empty frame sequence")
    if not (0 < theta <= 2):
        raise ValueError("theta must lie in (0, 2]")
    boundaries = [0]
    for i in range(1, len(frames)):
        if l1_distance(frames[i - 1].hist, frames[i].hist) > theta:
            boundaries.append(i)
    boundaries.append(len(frames))
    shots = []
    for start, nxt in zip(boundaries, boundaries[1:]):
        end = nxt - 1
        shots.append(Shot(start_idx=start, end_idx=end, keyframe_idx=(start + end) // 2))
    return shots


def extract(desc: VideoDescriptor, theta: float = DEFAULT_SHOT_THETA) -> MetadataRecord:
    """Turn a descriptor into a metadata record: shots + keyframes + text terms."""
    validate_descriptor(desc)
    shots = [
        Shot(s.start_idx, s.end_idx, s.keyframe_idx,
             keyframe_hist=desc.frames[s.keyframe_idx].hist)
        for s in detect_shots(desc.frames, theta)
    ]
    pieces = [desc.title, *(text for _, _, text in desc.transcript), *desc.captions, *desc.tags]
    terms = [t for piece in pieces for t in tokenize(piece)]
    return MetadataRecord(
        doc_id=desc.id,
        title=desc.title,
        media_info={"duration_s": desc.duration_s, "format": desc.meta.get("format", "")},
        shots=shots,
        text_terms=terms,
        meta=dict(desc.meta),
        concepts=[],
    )


def summarize(record: MetadataRecord, n: int) -> Storyboard:
    """Keyframes in order of appearance, uniformly subsampled down to n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    k = len(record.shots)
    if n >= k:
        idxs = range(k)
    elif n == 1:
        idxs = [0]
    else:
        idxs = [i * (k - 1) // (n - 1) for i in range(n)]
    return Storyboard(
        doc_id=record.doc_id,
        keyframes=[(i, record.shots[i].keyframe_idx, record.shots[i].keyframe_hist or ())
                   for i in idxs],
    )


class _HrefCollector(HTMLParser):
    def __init__(self) -> None:
        super().__init__()
        self.hrefs: list[str] = []

    def handle_starttag(self, tag: str, attrs: list[tuple[str, str | None]]) -> None:
        for name, value in attrs:
            if name == "href" and value:
                self.hrefs.append(value)


def _is_http(uri: str) -> bool:
    return urlparse(uri).scheme in ("http", "https")


def canonical_uri(uri: str, base: str | None = None) -> str:
    """Resolve uri against the page it came from; absolute paths for local files."""
    if base is not None:
        if _is_http(base):
            uri = urljoin(base, uri)
        elif not _is_http(uri):
            uri = str((Path(base).parent / uri).resolve())
    if _is_http(uri):
        return urldefrag(uri)[0]
    return str(Path(uri).resolve())


def fetch_page(uri: str, timeout: float = 5.0) -> str:
    if _is_http(uri):
        with urllib.request.urlopen(uri, timeout=timeout) as resp:
            return resp.read().decode("utf-8", errors="replace")
    return Path(uri).read_text(encoding="utf-8")


def extract_hrefs(html: str) -> list[str]:
    parser = _HrefCollector()
    parser.feed(html)
    return parser.hrefs


def crawl(
    seeds: list[str],
    depth_limit: int,
    link_pattern: str = "*.json",
    fetch=fetch_page,
) -> list[LinkRecord]:
    """Breadth-first page traversal collecting descriptor links.

    Hrefs matching link_pattern are recorded as pending video links; other
    hrefs are pages to visit (subject to depth_limit). Pages that fail to
    fetch are recorded with status "failed" and never abort the crawl.
    Every canonical uri is visited at most once.
    """
    if depth_limit < 0:
        raise ValueError("depth_limit must be >= 0")
    records: dict[str, LinkRecord] = {}
    visited: set[str] = set()
    clock = 0
    frontier: deque[tuple[str, int]] = deque()
    for seed in seeds:
        frontier.append((canonical_uri(seed), 0))
    while frontier:
        uri, depth = frontier.popleft()
        if uri in visited:
            continue
        visited.add(uri)
        try:
            html = fetch(uri)
        except Exception:
            if uri not in records:
                clock += 1
                records[uri] = LinkRecord(uri=uri, discovered_at=clock, status="failed")
            continue
        for href in extract_hrefs(html):
            target = canonical_uri(href, base=uri)
            if fnmatch(target, link_pattern):
                if target not in records:
                    clock += 1
                    records[target] = LinkRecord(uri=target, discovered_at=clock)
            elif depth + 1 <= depth_limit and target not in visited:
                frontier.append((target, depth + 1))
    return sorted(records.values(), key=lambda r: r.discovered_at)


def save_links(records: list[LinkRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(
                {"uri": r.uri, "discovered_at": r.discovered_at, "status": r.status},
                sort_keys=True) + "\n")


def load_links(path: str | Path) -> list[LinkRecord]:
    out = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        raw = json.loads(line)
        out.append(LinkRecord(uri=raw["uri"], discovered_at=raw["discovered_at"],
                              status=raw.get("status", "pending")))
    return out


def record_to_dict(record: MetadataRecord) -> dict:
    return {
        "doc_id": record.doc_id,
        "title": record.title,
        "media_info": dict(record.media_info),
        "shots": [
            {"start_idx": s.start_idx, "end_idx": s.end_idx, "keyframe_idx": s.keyframe_idx,
             "keyframe_hist": list(s.keyframe_hist) if s.keyframe_hist else None}
            for s in record.shots
        ],
        "text_terms": list(record.text_terms),
        "meta": dict(record.meta),
        "concepts": [[c, conf] for c, conf in record.concepts],
    }


def record_from_dict(raw: dict) -> MetadataRecord:
    return MetadataRecord(
        doc_id=raw["doc_id"],
        title=raw.get("title", ""),
        media_info=dict(raw.get("media_info", {})),
        shots=[
            Shot(s["start_idx"], s["end_idx"], s["keyframe_idx"],
                 keyframe_hist=tuple(s["keyframe_hist"]) if s.get("keyframe_hist") else None)
            for s in raw.get("shots", [])
        ],
        text_terms=list(raw.get("text_terms", [])),
        meta=dict(raw.get("meta", {})),
        concepts=[(c, float(conf)) for c, conf in raw.get("concepts", [])],
    )
