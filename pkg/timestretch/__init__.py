from .errors import TimeStretchError
from .signal.io import Signal, read_wav, write_wav
from .vocoders import StretchResult, Vocoder, get_vocoder

__all__ = [
    "get_vocoder",
    "read_wav",
    "Signal",
    "StretchResult",
    "TimeStretchError",
    "Vocoder",
    "write_wav",
]
