"""Shared exception hierarchy.

Every domain error raised by this package derives from :class:`Sv2SvtError`
so the CLI can map failures onto its documented exit codes (core validation
errors exit 4, adapter failures 3, configuration problems 2).
"""


class Sv2SvtError(Exception):
    """Base class for all errors raised by the sv2svt core."""


class ConfigError(Sv2SvtError):
    """Invalid or incomplete pipeline configuration (CLI exit code 2)."""


class AdapterError(Sv2SvtError):
    """A stage adapter failed: nonzero exit, timeout, missing or invalid
    output (CLI exit code 3)."""

    def __init__(self, stage: str, message: str, stderr: str = ""):
        self.stage = stage
        self.stderr = stderr
        detail = f"[{stage}] {message}"
        if stderr:
            detail += f"\n--- adapter stderr ---\n{stderr.rstrip()}"
        super().__init__(detail)
