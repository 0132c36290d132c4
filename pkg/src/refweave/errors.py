"""Errors and warnings raised across the pipeline.

Every error carries a machine-readable ``code`` (module-qualified) and the
exit status the CLI maps it to: 1 for recoverable extraction failures,
2 for invalid input.
"""

from __future__ import annotations


class RefweaveError(Exception):
    code = "refweave.Error"
    exit_status = 2

    def __init__(self, message: str = ""):
        super().__init__(message)
        self.message = message


# -- pagegraph ---------------------------------------------------------------

class UnreadablePdf(RefweaveError):
    code = "pagegraph.UnreadablePdf"


class EncryptedPdf(RefweaveError):
    code = "pagegraph.EncryptedPdf"


class NoTextLayer(RefweaveError):
    """The document has no extractable text at all (scanned input)."""

    code = "pagegraph.NoTextLayer"
    exit_status = 1


class SchemaViolation(RefweaveError):
    """Input JSON breaks the schema or an invariant; ``path`` locates it."""

    code = "pagegraph.SchemaViolation"

    def __init__(self, path: str, message: str, module: str = "pagegraph"):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.code = f"{module}.SchemaViolation"


# -- layout ------------------------------------------------------------------

class UnknownCategory(RefweaveError):
    code = "layout.UnknownCategory"

    def __init__(self, name: str):
        super().__init__(f"unknown region category: {name!r}")
        self.name = name


class PageOutOfRange(RefweaveError):
    code = "layout.PageOutOfRange"


# -- refitems ----------------------------------------------------------------

class SectionNotFound(RefweaveError):
    code = "refitems.SectionNotFound"
    exit_status = 1


class NoItemsFound(RefweaveError):
    code = "refitems.NoItemsFound"
    exit_status = 1


class DuplicateKey(Warning):
    """Two captions share a (kind, number) pair; documents with appendices do this."""


# -- links -------------------------------------------------------------------

class Unresolvable(RefweaveError):
    code = "links.Unresolvable"
    exit_status = 1


# -- dataset -----------------------------------------------------------------

class EmptySection(RefweaveError):
    code = "dataset.EmptySection"
    exit_status = 1


class InvalidRatio(RefweaveError):
    code = "dataset.InvalidRatio"


# -- evalkit -----------------------------------------------------------------

class EmptyGroundTruth(Warning):
    """AP requested against an empty ground-truth set; defined as 0."""


# -- synthcorpus -------------------------------------------------------------

class Overflow(RefweaveError):
    code = "synthcorpus.Overflow"
