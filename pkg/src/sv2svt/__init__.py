"""sv2svt: deterministic singing-voice translation pipeline kernel.

Transforms a transcribed, phoneme-aligned English vocal performance plus a
frame-level melody contour into a synthesizer-ready project with Japanese
lyrics.  Learned models (transcription, alignment, melody extraction,
translation, segmentation, readings) run behind file-based subprocess
adapters; everything in this package is deterministic and offline.
"""

__version__ = "0.1.0"
