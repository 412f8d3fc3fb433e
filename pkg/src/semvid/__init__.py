"""Multi-agent semantic video indexing and retrieval engine.

Agents ingest descriptor files, classify them against a two-level
concept ontology, and organize them in a tiered knowledge base whose
pheromone-style trails are fed by user feedback. Queries pass through
enrichment, concept mapping, and strategy-weighted ranking; a synthetic
harness drives the full loop with simulated users.
"""

from .config import EngineConfig, load_config
from .engine import Engine
from .errors import SemvidError
from .harness import SyntheticSpec, generate_corpus, simulate
from .kb import KnowledgeBase, PheromoneParams, Tier
from .ontology import OntologyStore, bundled_ontology
from .pipeline import RawQuery, StrategyWeights, global_performance, retrieve
from .runtime import Kind, Message, Runtime, RuntimeConfig

__version__ = "0.1.0"

__all__ = [
    "Engine",
    "EngineConfig",
    "Kind",
    "KnowledgeBase",
    "Message",
    "OntologyStore",
    "PheromoneParams",
    "RawQuery",
    "Runtime",
    "RuntimeConfig",
    "SemvidError",
    "StrategyWeights",
    "SyntheticSpec",
    "Tier",
    "bundled_ontology",
    "generate_corpus",
    "global_performance",
    "load_config",
    "retrieve",
    "simulate",
    "__version__",
]
