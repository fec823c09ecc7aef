"""Typed errors raised across the dashboard toolkit.

Every failure the library can surface is a subclass of :class:`DashforgeError`,
so callers may catch the root type; the CLI maps the whole family to exit
code 1 and plain ``OSError`` to exit code 2.
"""


class DashforgeError(Exception):
    """Root of the toolkit error hierarchy."""

    #: Index of the failing action when the error escaped a script application.
    action_index: "int | None" = None


# --- config documents -------------------------------------------------------

class MalformedDocument(DashforgeError):
    """Input text could not be parsed as the expected document format."""


class SchemaViolation(DashforgeError):
    """Document parsed but violates the config schema or a type invariant."""


class VersionMismatch(DashforgeError):
    """Config document declares an unsupported schema version."""


# --- artifact loading -------------------------------------------------------

class MissingField(DashforgeError):
    """A required field is absent (or empty) in a metrics entry."""


class EmptyGroup(DashforgeError):
    """A metric group contains no entries."""


class MalformedCsv(DashforgeError):
    """CSV table is empty or has rows of inconsistent width."""


class ConstraintViolation(DashforgeError):
    """Strict-mode artifact constraint (row/column bounds) not met."""


class MalformedChart(DashforgeError):
    """Chart document lacks an inline script or a matching container element."""


class EmptyDocument(DashforgeError):
    """Artifact file is empty."""


class UnknownKind(DashforgeError):
    """File extension does not map to a component kind."""


# --- config generation ------------------------------------------------------

class CapacityExceeded(DashforgeError):
    """More components than the template grid can hold."""


class EmptyArtifactSet(DashforgeError):
    """Config generation requires at least one component."""


class UnknownTemplate(DashforgeError):
    """Template id is not registered."""


# --- modify scripts ---------------------------------------------------------

class UnknownAction(DashforgeError):
    """Script action is not one of change, delete, add, swap."""


class BadSwapArity(DashforgeError):
    """Swap action does not name exactly two coordinates."""


class FileCountMismatch(DashforgeError):
    """Add targets and supplied new files disagree in count."""


class BadCoordinate(DashforgeError):
    """Position/order pair is outside the layout grid."""


class SwapEmptySlot(DashforgeError):
    """Swap names a coordinate with no component."""


class DeleteEmptySlot(DashforgeError):
    """Delete names a coordinate with no component."""


class UnknownChangeField(DashforgeError):
    """Change names a field that is not mutable."""


class QueueExhausted(DashforgeError):
    """Add ran out of queued new files."""


class TemplateColumnMismatch(DashforgeError):
    """Coordinate sits in a column the template does not declare."""


# --- rendering --------------------------------------------------------------

class MissingRequiredSlot(DashforgeError):
    """Template lacks a required slot, or a required slot has no content."""


class IdCollision(DashforgeError):
    """Two charts rewrote to the same container id."""


class DanglingRef(DashforgeError):
    """Config references an artifact path that is not in the artifact set."""


class UnfilledSlot(DashforgeError):
    """A template slot has no value (or a placeholder survived filling)."""


class UnknownSlotValue(DashforgeError):
    """Strict fill received a value for a slot the template does not declare."""


# --- token metrics ----------------------------------------------------------

class EmptyDashboard(DashforgeError):
    """Dashboard text has no tokens; the overhead ratio is undefined."""


class TokenizerMismatch(DashforgeError):
    """Reports produced under different tokenizers cannot be compared."""


# --- LLM wire formats and providers -----------------------------------------

class MissingResultBlock(DashforgeError):
    """Response contains no <result>...</result> block."""


class UnknownIntent(DashforgeError):
    """Result block word is neither "generation" nor "modify"."""


class MalformedList(DashforgeError):
    """Result block content is not a bracketed list of quoted filenames."""


class MissingJsonBlock(DashforgeError):
    """Response contains no ```json fenced block."""


class MissingPlaceholder(DashforgeError):
    """A prompt template lacks one of its required placeholders."""


class ProviderError(DashforgeError):
    """Completion provider failed (transport, credentials, response shape)."""


class TranscriptMismatch(ProviderError):
    """Scripted replay got a prompt whose hash differs from the recording."""
