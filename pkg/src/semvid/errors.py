"""Error vocabulary shared by every subsystem, the CLI and the HTTP API.

Each exception's class name doubles as the machine-readable error code
(``err.code``), so the CLI, the HTTP layer and the UI all speak the same
vocabulary.
"""


class SemvidError(Exception):
    """Base class for all domain errors."""

    @property
    def code(self) -> str:
        return type(self).__name__


# agent runtime
class DuplicateAgent(SemvidError):
    pass


class UnknownRecipient(SemvidError):
    pass


class StepBudgetExceeded(SemvidError):
    pass


# ingestion
class EmptyFrames(SemvidError):
    pass


class InvalidDescriptor(SemvidError):
    pass


class FetchFailed(SemvidError):
    pass


# classification
class InsufficientClasses(SemvidError):
    pass


class EmptyTrainingSet(SemvidError):
    pass


class EmptyEvaluationSet(SemvidError):
    pass


# knowledge base
class DuplicateDocument(SemvidError):
    pass


class UnknownDocument(SemvidError):
    pass


class InvalidRating(SemvidError):
    pass


class IoFailure(SemvidError):
    pass


class CorruptStore(SemvidError):
    pass


# query pipeline
class UnknownDomain(SemvidError):
    pass


class OutOfRangePerformance(SemvidError):
    pass


# personalization
class DuplicateUser(SemvidError):
    pass


class UnknownUser(SemvidError):
    pass


class UnknownCommunity(SemvidError):
    pass


# gateway
class MalformedRequest(SemvidError):
    pass
