#!/usr/bin/env python3
"""Sweep the evaporation rate and measure tier-migration speed.

For each rho, two documents are tracked: one rated top marks every
cycle (evaporate, deposit 1.0) until promotion, one never rated until
depreciation. Measured cycle counts are printed next to the closed-form
prediction ceil(ln(theta_depr/tau0) / ln(1-rho)) for the neglected one.
"""

import argparse
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from semvid.harness import SyntheticSpec, generate_corpus, load_examples  # noqa: F401
from semvid.ingestion import MetadataRecord
from semvid.kb import KnowledgeBase, PheromoneParams


def _doc(doc_id: str) -> MetadataRecord:
    return MetadataRecord(doc_id=doc_id, title=doc_id, media_info={},
                          shots=[], text_terms=["t"], meta={})


def cycles_to_promote(params: PheromoneParams, limit: int = 10_000) -> int | None:
    kb = KnowledgeBase(params)
    kb.insert(_doc("hot"))
    for cycle in range(1, limit + 1):
        kb.evaporate()
        if kb.deposit("hot", 5) >= params.theta_active:
            return cycle
    return None


def cycles_to_depreciate(params: PheromoneParams, limit: int = 10_000) -> int | None:
    kb = KnowledgeBase(params)
    kb.insert(_doc("cold"))
    for cycle in range(1, limit + 1):
        kb.evaporate()
        if kb.get("cold").tau < params.theta_depr:
            return cycle
    return None


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--rhos", type=float, nargs="+",
                    default=[0.05, 0.1, 0.2, 0.3, 0.5])
    args = ap.parse_args()

    print(f"{'rho':>5} {'promote':>8} {'depreciate':>11} {'predicted':>10}")
    for rho in args.rhos:
        params = PheromoneParams(rho=rho)
        up = cycles_to_promote(params)
        down = cycles_to_depreciate(params)
        predicted = math.ceil(math.log(params.theta_depr / params.tau0)
                              / math.log(1.0 - rho))
        flag = "" if down == predicted else "  <- mismatch"
        print(f"{rho:>5.2f} {up!s:>8} {down!s:>11} {predicted:>10}{flag}")
        if rho >= 0.5 and up is None:
            print(f"{'':>5} deposits never outrun evaporation at rho={rho}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
