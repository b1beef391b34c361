"""Reference stage adapters wrapping real pretrained models.

Each adapter is a standalone command speaking the sv2svt pipeline's
file-in/file-out protocol (segment: line-in/line-out).  Heavy dependencies
load lazily; a missing model or library exits nonzero with a diagnostic on
stderr, and ``--manifest`` always works offline.
"""

__version__ = "0.1.0"
