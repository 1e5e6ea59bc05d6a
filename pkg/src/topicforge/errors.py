"""Error types shared across the toolkit.

Every error carries a stable machine code so the CLI and HTTP service can
surface the same vocabulary the library uses internally.
"""


class TopicForgeError(Exception):
    """Base class; ``code`` is the stable machine-readable identifier."""

    code = "error"

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class UnknownTopicError(TopicForgeError):
    code = "unknown-topic"


class UnknownEdgeError(TopicForgeError):
    code = "unknown-edge"


class PathExplosionError(TopicForgeError):
    code = "path-explosion"


class DuplicateSlugError(TopicForgeError):
    code = "duplicate-slug"


class UnknownParentError(TopicForgeError):
    code = "unknown-parent"


class EmptyParentSetError(TopicForgeError):
    code = "empty-parent-set"


class CycleRejectedError(TopicForgeError):
    code = "cycle-rejected"


class DuplicatePairError(TopicForgeError):
    code = "duplicate-pair"


class RetiredEndpointError(TopicForgeError):
    code = "retired-endpoint"


class RootAsChildError(TopicForgeError):
    code = "root-as-child"


class WouldOrphanError(TopicForgeError):
    code = "would-orphan"


class WouldOrphanChildrenError(TopicForgeError):
    code = "would-orphan-children"

    def __init__(self, detail: str, children=()):
        super().__init__(detail)
        self.children = list(children)


class IsRootError(TopicForgeError):
    code = "is-root"


class AlreadyRetiredError(TopicForgeError):
    code = "already-retired"


class MergeWouldCycleError(TopicForgeError):
    code = "merge-would-cycle"


class SameTopicError(TopicForgeError):
    code = "same-topic"


class RetiredInputError(TopicForgeError):
    code = "retired-input"


class EmptyNameError(TopicForgeError):
    code = "empty-name"


class EnglishRequiredError(TopicForgeError):
    code = "english-required"


class UnknownItemError(TopicForgeError):
    code = "unknown-item"


class AlreadyDecidedError(TopicForgeError):
    code = "already-decided"


class EmptyCorpusError(TopicForgeError):
    code = "empty-corpus"


class StaleResultError(TopicForgeError):
    code = "stale-result"


class MissingFileError(TopicForgeError):
    code = "missing-file"


class MalformedRowError(TopicForgeError):
    code = "malformed-row"

    def __init__(self, path, line_no: int, detail: str):
        super().__init__(f"{path}:{line_no}: {detail}")
        self.path = path
        self.line_no = line_no


class DuplicateIdInFileError(TopicForgeError):
    code = "duplicate-id-in-file"


class UnknownLanguageCodeError(TopicForgeError):
    code = "unknown-language-code"


class SeqConflictError(TopicForgeError):
    code = "seq-conflict"


class ReplayError(TopicForgeError):
    code = "replay-mismatch"
