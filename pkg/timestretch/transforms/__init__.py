from .gabor import GaborFrame, dgt_analyze, dgt_synthesize, painless_dual_window
from .nsgt import NsgCoefficients, NsgSystem, nsgt_analyze, nsgt_synthesize
from .phase import princarg
from .windows import hann_window

__all__ = [
    "dgt_analyze",
    "dgt_synthesize",
    "GaborFrame",
    "hann_window",
    "NsgCoefficients",
    "NsgSystem",
    "nsgt_analyze",
    "nsgt_synthesize",
    "painless_dual_window",
    "princarg",
]
