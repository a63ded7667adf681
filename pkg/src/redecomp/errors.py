"""Exception types shared across the pipeline.

Every operation raises a subclass of :class:`RedecompError`; batch drivers
catch these and record per-item failures instead of aborting.
"""


class RedecompError(Exception):
    """Base class for all pipeline errors."""


# --- normalization ---------------------------------------------------------

class EmptyInput(RedecompError):
    """Input has no usable content (no instruction lines, no outcomes, ...)."""


class MalformedLabel(RedecompError):
    """An address label looks numeric but cannot be parsed."""


class SymbolNotFound(RedecompError):
    """A requested function symbol is absent from an assembly listing."""

    def __init__(self, symbol: str):
        super().__init__(f"symbol not found: {symbol}")
        self.symbol = symbol


class NoFunctionFound(RedecompError):
    """Source text contains no top-level C function definition."""


class MultipleFunctions(RedecompError):
    """Source text contains more than one top-level function; pre-split it."""


class ParseFailure(RedecompError):
    """Structured input (source, rule file, pattern file) failed to parse."""


# --- index / retrieval ------------------------------------------------------

class ProviderUnavailable(RedecompError):
    """The embedding provider could not be reached."""


class DimensionMismatch(RedecompError):
    """A vector's length disagrees with the index dimension."""


class EmptyIndex(RedecompError):
    """Operation requires a non-empty index."""


class IndexTooSmall(RedecompError):
    """Index holds fewer entries than the requested k."""


class BuildRejected(RedecompError):
    """Index build refused (e.g. empty corpus)."""


class IoFailure(RedecompError):
    """Index or corpus file could not be read or written."""


class VersionMismatch(RedecompError):
    """Persisted file carries an incompatible format version."""


# --- prompting --------------------------------------------------------------

class TokenBudgetExceeded(RedecompError):
    """Rendered prompt exceeds the token cap.

    ``drop_index`` names the exemplar (0-based, lowest-scored last) the
    caller should drop before retrying.
    """

    def __init__(self, estimate: int, cap: int, drop_index: int | None = None):
        msg = f"prompt estimate {estimate} exceeds cap {cap}"
        if drop_index is not None:
            msg += f"; drop exemplar {drop_index}"
        super().__init__(msg)
        self.estimate = estimate
        self.cap = cap
        self.drop_index = drop_index


class UnknownFlag(RedecompError):
    """Rule flag is not in the registry or the descriptor is invalid."""


# --- model client -----------------------------------------------------------

class AuthFailure(RedecompError):
    """Credential missing or rejected; raised before any network activity
    when the credential is absent."""


class RateLimited(RedecompError):
    """Provider kept rate-limiting after all retries."""


class Timeout(RedecompError):
    """Provider did not answer within the configured deadline."""


class ProviderError(RedecompError):
    """Provider returned an error payload; message carries its text."""


# --- flag probing -----------------------------------------------------------

class CompilerMissing(RedecompError):
    """Requested compiler binary is not on PATH."""


class CompileFailed(RedecompError):
    """Compiler exited nonzero; ``diagnostics`` holds captured stderr."""

    def __init__(self, message: str, diagnostics: str = ""):
        super().__init__(message)
        self.diagnostics = diagnostics


class NoDecidableSamples(RedecompError):
    """Every sample for a flag failed to compile under one of the toggles."""


# --- harness / reporting ----------------------------------------------------

class SandboxFailure(RedecompError):
    """Host-level failure setting up an evaluation sandbox (not a candidate
    failure)."""


class EmptyGroup(RedecompError):
    """A distribution group has no failures to normalize over."""


class SampleSetMismatch(RedecompError):
    """Two runs cover different sample ids; message lists the difference."""

    def __init__(self, only_a: set, only_b: set):
        super().__init__(
            f"sample sets differ: only in A: {sorted(only_a)}; only in B: {sorted(only_b)}"
        )
        self.only_a = only_a
        self.only_b = only_b


class MissingMetrics(RedecompError):
    """A sample lacks structural metrics required for stratification."""
