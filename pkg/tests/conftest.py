import random

import pytest

from semvid.ingestion import HIST_DIM, FrameFeature, MetadataRecord, Shot


def flat_hist(dim: int = HIST_DIM) -> tuple[float, ...]:
    return tuple(1.0 / dim for _ in range(dim))


def peaked_hist(bin_idx: int, dim: int = HIST_DIM) -> tuple[float, ...]:
    """Sum-1 histogram with 0.6 extra mass on one bin; two different peaks
    differ by L1 = 1.2."""
    base = 0.4 / dim
    hist = [base] * dim
    hist[bin_idx] += 0.6
    return tuple(hist)


def make_frames(peak_bins: list[int], frames_per_shot: int = 3) -> list[FrameFeature]:
    frames = []
    for b in peak_bins:
        for _ in range(frames_per_shot):
            frames.append(FrameFeature(t=float(len(frames)), hist=peaked_hist(b)))
    return frames


def make_record(doc_id: str, terms: list[str],
                concepts: list[tuple[str, float]] | None = None,
                n_shots: int = 1) -> MetadataRecord:
    shots = [Shot(start_idx=i, end_idx=i, keyframe_idx=i,
                  keyframe_hist=peaked_hist(i % HIST_DIM))
             for i in range(n_shots)]
    return MetadataRecord(
        doc_id=doc_id,
        title=doc_id,
        media_info={"duration_s": float(n_shots), "format": ""},
        shots=shots,
        text_terms=list(terms),
        meta={},
        concepts=list(concepts or []),
    )


@pytest.fixture
def rng() -> random.Random:
    return random.Random(0)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One pass/fail line per acceptance criterion at the end of the run."""
    lines = []
    for status in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(status, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance" in nodeid and "::" in nodeid:
                name = nodeid.split("::", 1)[1]
                verdict = "PASS" if status == "passed" else "FAIL"
                lines.append((name, verdict))
    if lines:
        terminalreporter.write_sep("-", "acceptance criteria")
        for name, verdict in sorted(lines):
            terminalreporter.write_line(f"[{verdict}] {name}")
