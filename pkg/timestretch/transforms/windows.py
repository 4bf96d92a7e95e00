import numpy as np

from ..errors import InvalidLength


def window_offsets(length: int) -> np.ndarray:
    """Signed sample offsets of a window stored with its peak at ``length // 2``."""
    half = length // 2
    return np.arange(-half, length - half)


def hann_window(length: int) -> np.ndarray:
    """Periodic Hann window, peak-normalized, in natural order.

    Index ``k`` holds ``0.5 - 0.5 * cos(2 pi k / length)``, so the peak sits at
    ``length // 2`` (offset zero) and the window is symmetric around it. Odd
    lengths sample the same curve at whole offsets around the peak.
    """
    if length < 2:
        raise InvalidLength(f"window length must be >= 2, got {length}")
    return 0.5 + 0.5 * np.cos(2 * np.pi * window_offsets(length) / length)


def rectangular_window(length: int) -> np.ndarray:
    if length < 2 or length % 2:
        raise InvalidLength(f"window length must be even and >= 2, got {length}")
    return np.ones(length)


def circular_window(window: np.ndarray, length: int) -> np.ndarray:
    """Place ``window`` in a length-``length`` vector, centered at index 0."""
    if window.size > length:
        raise InvalidLength(f"window of {window.size} samples exceeds {length}")
    placed = np.zeros(length, dtype=window.dtype)
    placed[window_offsets(window.size) % length] = window
    return placed
