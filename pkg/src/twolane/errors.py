"""Exception types shared across the package."""


class TwolaneError(Exception):
    """Base class for all package errors."""


class InvalidScene(TwolaneError):
    """A scene value violates a structural invariant."""


class SchemaViolation(TwolaneError):
    """A serialized record is malformed; `path` names the offending field."""

    def __init__(self, path: str, message: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if message else path)


class IdSetMismatch(TwolaneError):
    """Two scenes being diffed do not contain the same object ids."""


class UnsupportedFamily(TwolaneError):
    """Task family not known to the generator/benchmark."""


class EmptyText(TwolaneError):
    """Text given to the embedder is empty after folding."""


class DimensionMismatch(TwolaneError):
    """Vectors of different dimensions were combined."""


class TransportError(TwolaneError):
    """A remote provider could not be reached."""


class ProviderError(TwolaneError):
    """A remote provider answered with an error status."""

    def __init__(self, status: int, message: str):
        self.status = status
        super().__init__(f"provider returned {status}: {message}")


class ShapeMismatch(TwolaneError):
    """A remote provider returned the wrong vector count or dimension."""


class EmptyBank(TwolaneError):
    """Classification was attempted against a bank with no entries."""


class EmbedderMismatch(TwolaneError):
    """A bank file was written under a different embedder spec."""


class LowConfidence(TwolaneError):
    """Top retrieval score fell below the configured confidence floor."""

    def __init__(self, score: float, floor: float):
        self.score = score
        self.floor = floor
        super().__init__(f"nearest exemplar scored {score:.4f}, below floor {floor:.4f}")


class UnrecognizedTask(TwolaneError):
    """The oracle planner could not match the instruction to any family."""


class UnrecognizedIntent(TwolaneError):
    """No intent lexicon rule triggers on the instruction."""


class PlanParseError(TwolaneError):
    """Plan text from a provider is not a well-formed numbered step list."""

    def __init__(self, line: int, reason: str):
        self.line = line
        self.reason = reason
        super().__init__(f"line {line}: {reason}")


class UngrammaticalEquation(TwolaneError):
    """Equation text does not match the supported equation grammar."""


class NoIntegerSolution(TwolaneError):
    """The equation has no integer solution."""


class AnswerDoesNotFit(TwolaneError):
    """The answer is an integer but cannot be laid out as tiles (negative,
    or a multi-digit substitution into the single variable cell)."""


class MissingDigitTile(TwolaneError):
    """The scene's tile pool lacks a digit tile the answer needs."""


class LetterMultisetMismatch(TwolaneError):
    """Current letters and target word are not the same multiset."""


class ZoneFull(TwolaneError):
    """A named zone has no free cell left for a placement."""


class NoBufferCell(TwolaneError):
    """No free cell is available to park a blocking object."""


class GoalInfeasible(TwolaneError):
    """The requested goal placement cannot be reached."""


class ParseError(TwolaneError):
    """Instruction/step text rejected by the command grammar."""

    def __init__(self, position: int, expected: str):
        self.position = position
        self.expected = expected
        super().__init__(f"at {position}: expected {expected}")


class NoMatch(TwolaneError):
    """An object phrase grounded to no scene object."""

    def __init__(self, phrase: str):
        self.phrase = phrase
        super().__init__(f"no object matches {phrase!r}")


class Busy(TwolaneError):
    """The session is already executing an instruction and its queue is full."""
