"""Exceptions raised by kummerlag and the exit codes the CLI maps them to."""

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVARIANT = 3
EXIT_EXHAUSTED = 4
EXIT_INCONSISTENT = 5


class KummerLagError(Exception):
    """Base class for every error raised by kummerlag."""

    exit_code = 1


class InvariantError(KummerLagError, ValueError):
    """An input violates one of the documented invariants."""

    exit_code = EXIT_INVARIANT


class LatticeError(InvariantError):
    """Invalid Gram data, vectors from different lattices, bad roots, etc."""


class CertificateError(InvariantError):
    """A fibration certificate cannot be completed or fails verification."""


class ActionError(InvariantError):
    """An affine action or a modulus is not valid."""


class ModelError(InvariantError):
    """A fibration Picard model or a torsion graph is not valid."""


class EnvelopeError(InvariantError):
    """A rational envelope input is empty or malformed."""


class SearchExhausted(KummerLagError, RuntimeError):
    """The coefficient box holds no admissible vector; enlarge the bound."""

    exit_code = EXIT_EXHAUSTED


class ScenarioInconsistency(KummerLagError, ValueError):
    """A construction scenario contradicts the classification rules."""

    exit_code = EXIT_INCONSISTENT
