"""Exception types shared across the engine.

Every error that a caller may want to catch programmatically gets its own
class; anything carrying a location into an AST exposes it as a ``path``
tuple of child indices.
"""
from __future__ import annotations


class EngineError(Exception):
    """Base class for all engine-raised errors."""


class TypeCheckError(EngineError):
    """A term failed to typecheck. ``issues`` lists the offending subterms."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class TypeIssue:
    """One typing defect: kind is UnboundVariable | TypeMismatch | WidthMismatch."""

    def __init__(self, kind: str, path: tuple, message: str):
        self.kind = kind
        self.path = path
        self.message = message

    def __str__(self):
        loc = ".".join(str(p) for p in self.path) or "root"
        return f"{self.kind} at {loc}: {self.message}"


class BudgetExceeded(EngineError):
    """Exact enumeration outgrew the configured work budget."""


class LimitExceeded(EngineError):
    """A structural cap (bit width, list length, nat bound) was exceeded."""


class ZeroMassPredicate(EngineError):
    """A Repeat predicate has probability zero, so conditioning is undefined."""


class NotWellFormed(EngineError):
    """An operation required a computation that terminates with probability 1."""


class StateTypeMismatch(EngineError):
    """An oracle was started from a state of the wrong type."""


class MissingRepeatBound(EngineError):
    """Cost accounting found a Repeat node with no iteration bound."""

    def __init__(self, path: tuple):
        self.path = path
        super().__init__(f"no iteration bound for Repeat at {'.'.join(map(str, path)) or 'root'}")


class DenominatorTooLarge(EngineError):
    """Bernoulli probability denominator exceeds the dyadic cap."""


class EntropyExhausted(EngineError):
    """A bit source ran dry while sampling."""


class ApplicabilityError(EngineError):
    """A rewrite rule's side condition failed; ``condition`` names it."""

    def __init__(self, condition: str):
        self.condition = condition
        super().__init__(condition)


class HypothesisFailed(EngineError):
    """An identical-until-bad hypothesis is falsified. ``which`` is 1 or 2."""

    def __init__(self, which: int, witness=None, detail: str = ""):
        self.which = which
        self.witness = witness
        super().__init__(f"hypothesis {which} failed{': ' + detail if detail else ''}")


class NotBijective(EngineError):
    def __init__(self, witness, detail: str = ""):
        self.witness = witness
        super().__init__(f"candidate map is not a bijection{': ' + detail if detail else ''}")


class MassMismatch(EngineError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"mass differs at {witness}")


class ContinuationMismatch(EngineError):
    def __init__(self, witness):
        self.witness = witness
        super().__init__(f"continuations differ at {witness}")


class PremiseFailed(EngineError):
    """Oracle-equivalence premise failed at a concrete (state pair, input)."""

    def __init__(self, states, query, certificate):
        self.states = states
        self.query = query
        self.certificate = certificate
        super().__init__(f"premise failed at states {states} on input {query}")


class ParseFailure(EngineError):
    """Raised by convenience wrappers when a source file has diagnostics."""

    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))
