"""Actor-style runtime hosting the agent society.

Agents are registered under unique names, communicate only through typed
messages, and are driven by :meth:`Runtime.run_until_idle`.  The default
deterministic mode delivers messages from one global FIFO queue so that
identical inputs always produce identical delivery traces; the concurrent
mode keeps per-agent mailboxes and picks the next mailbox with a seeded
RNG (fair, reproducible under a fixed seed, but not FIFO over the global
send order).
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable, Protocol, runtime_checkable

from .errors import DuplicateAgent, StepBudgetExceeded, UnknownRecipient

AgentId = str


class Kind(str, Enum):
    """Closed message vocabulary covering the agent interaction flows."""

    CRAWL_REQUEST = "CrawlRequest"
    LINK_DISCOVERED = "LinkDiscovered"
    LINK_EXTRACTED = "LinkExtracted"
    LINK_FAILED = "LinkFailed"
    DOCUMENT_EXTRACTED = "DocumentExtracted"
    DOCUMENT_CLASSIFIED = "DocumentClassified"
    MODEL_TRAINED = "ModelTrained"
    FEEDBACK_RECORDED = "FeedbackRecorded"
    DEPOSIT_PHEROMONE = "DepositPheromone"
    REORGANIZE_TICK = "ReorganizeTick"
    QUERY_REQUEST = "QueryRequest"
    QUERY_RESPONSE = "QueryResponse"
    TICK = "Tick"  # generic kind for tests and demos


@dataclass(frozen=True)
class Message:
    sender: AgentId
    to: AgentId
    kind: Kind
    payload: Any = None
    seq: int = 0  # assigned by the runtime on send


@dataclass(frozen=True)
class RuntimeConfig:
    seed: int = 0
    max_steps: int = 100_000
    deterministic: bool = True

    def __post_init__(self) -> None:
        if self.max_steps <= 0:
            raise ValueError("max_steps must be > 0")


@runtime_checkable
class Handler(Protocol):
    def on_message(self, rt: "Runtime", msg: Message) -> None: ...


class Runtime:
    """Hosts agents, routes messages, and runs them to quiescence."""

    def __init__(self, config: RuntimeConfig | None = None):
        self.config = config or RuntimeConfig()
        self._agents: dict[AgentId, Callable[["Runtime", Message], None]] = {}
        self._queue: deque[Message] = deque()  # deterministic mode
        self._mailboxes: dict[AgentId, deque[Message]] = {}  # concurrent mode
        self._seq = 0
        self._sent = 0
        self._delivered = 0
        self._rng = random.Random(self.config.seed)
        self.trace: list[str] = []

    def spawn(self, name: AgentId, handler: Handler | Callable[["Runtime", Message], None]) -> AgentId:
        if not name:
            raise ValueError("agent name must be non-empty")
        if name in self._agents:
            raise DuplicateAgent(f"agent {name!r} already registered")
        fn = handler.on_message if isinstance(handler, Handler) else handler
        self._agents[name] = fn
        self._mailboxes[name] = deque()
        return name

    def has_agent(self, name: AgentId) -> bool:
        return name in self._agents

    def send(self, msg: Message) -> Message:
        """Enqueue a message; returns it stamped with the next sequence number."""
        if msg.to not in self._agents:
            raise UnknownRecipient(f"no agent named {msg.to!r}")
        self._seq += 1
        stamped = replace(msg, seq=self._seq)
        if self.config.deterministic:
            self._queue.append(stamped)
        else:
            self._mailboxes[msg.to].append(stamped)
        self._sent += 1
        return stamped

    def _next(self) -> Message | None:
        if self.config.deterministic:
            return self._queue.popleft() if self._queue else None
        ready = sorted(name for name, box in self._mailboxes.items() if box)
        if not ready:
            return None
        return self._mailboxes[self._rng.choice(ready)].popleft()

    def _pending(self) -> int:
        if self.config.deterministic:
            return len(self._queue)
        return sum(len(box) for box in self._mailboxes.values())

    def run_until_idle(self, config: RuntimeConfig | None = None) -> int:
        """Deliver messages until every mailbox is empty.

        Raises StepBudgetExceeded when max_steps deliveries occur with
        messages still pending, so runaway agent loops surface as errors.
        """
        cfg = config or self.config
        steps = 0
        while True:
            if self._pending() == 0:
                return steps
            if steps >= cfg.max_steps:
                raise StepBudgetExceeded(
                    f"{self._pending()} message(s) pending after {steps} steps"
                )
            msg = self._next()
            assert msg is not None
            self._deliver(msg)
            steps += 1

    def _deliver(self, msg: Message) -> None:
        self.trace.append(f"{msg.seq}\t{msg.sender}\t{msg.to}\t{msg.kind.value}")
        self._delivered += 1
        self._agents[msg.to](self, msg)

    @property
    def sent_count(self) -> int:
        return self._sent

    @property
    def delivered_count(self) -> int:
        return self._delivered

    def write_trace(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.trace:
                fh.write(line + "\n")


@dataclass
class Agent:
    """Convenience base: named agent with a default no-op handler."""

    name: AgentId
    state: dict = field(default_factory=dict)

    def on_message(self, rt: Runtime, msg: Message) -> None:  # pragma: no cover
        pass
