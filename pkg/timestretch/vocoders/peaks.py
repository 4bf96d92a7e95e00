"""Spectral peaks, valleys and regions of influence on half-spectrum rows."""

from dataclasses import dataclass

import numpy as np

# relative margin under which two floored magnitudes count as equal
PEAK_TOLERANCE = 1e-9


def floored_db(magnitudes: np.ndarray, reference: float, floor_db: float) -> np.ndarray:
    """``20 log10 |x|`` clipped at ``floor_db`` below ``reference``."""
    floor = reference * 10 ** (floor_db / 20)
    if floor <= 0:
        return np.full(np.shape(magnitudes), floor_db)
    return 20 * np.log10(np.maximum(magnitudes, floor) / reference)


@dataclass(frozen=True)
class FramePeaks:
    """Peaks of bins ``0..M/2`` with the valleys that separate them.

    Region ``i`` owns the channels ``(valleys[i - 1], valleys[i]]``; the first
    region starts at bin 0 and the last one ends at ``M/2``.
    """

    peaks: np.ndarray
    valleys: np.ndarray
    frequencies: np.ndarray
    size: int

    @property
    def channels(self) -> int:
        return 2 * (self.size - 1)

    @property
    def count(self) -> int:
        return self.peaks.size

    @property
    def region_bounds(self) -> np.ndarray:
        """Inclusive ``[lo, hi]`` channel range of each region."""
        lo = np.concatenate([[0], self.valleys + 1])
        hi = np.concatenate([self.valleys, [self.size - 1]])
        return np.stack([lo, hi], axis=1)

    def owners(self) -> np.ndarray:
        """Region (peak) index of every channel."""
        return np.searchsorted(self.valleys, np.arange(self.size), side="left")


def interpolate_frequency(
    alpha: float, beta: float, gamma: float, peak: int, channels: int
) -> float:
    """Parabolic peak frequency from dB magnitudes around bin ``peak``."""
    alpha, beta, gamma = (np.array([value]) for value in (alpha, beta, gamma))
    omega = interpolate_frequencies(alpha, beta, gamma, np.array([peak]), channels)
    return float(omega[0])


def interpolate_frequencies(
    alpha: np.ndarray,
    beta: np.ndarray,
    gamma: np.ndarray,
    peaks: np.ndarray,
    channels: int,
) -> np.ndarray:
    curvature = alpha - 2 * beta + gamma
    # a flat or upward parabola has no vertex inside the bin; keep the bin center
    valid = curvature < 0
    offset = np.zeros(np.shape(peaks), dtype=np.float64)
    offset[valid] = 0.5 * (alpha[valid] - gamma[valid]) / curvature[valid]
    offset = np.clip(offset, -0.5, 0.5)
    return 2 * np.pi * (peaks + offset) / channels


def find_peaks_valleys(magnitudes: np.ndarray, floor_db: float = -120.0) -> FramePeaks:
    magnitudes = np.abs(np.asarray(magnitudes, dtype=np.float64))
    size = magnitudes.size
    reference = float(magnitudes.max()) if size else 0.0
    db = floored_db(magnitudes, reference, floor_db)
    floored = np.maximum(magnitudes, reference * 10 ** (floor_db / 20))

    inner = floored[1:-1]
    strict = (inner > floored[:-2] * (1 + PEAK_TOLERANCE)) & (
        inner > floored[2:] * (1 + PEAK_TOLERANCE)
    )
    if size >= 3 and reference > 0:
        peaks = np.flatnonzero(strict) + 1
    else:
        peaks = np.zeros(0, dtype=np.int64)
    # ties between peaks resolve to the lowest channel
    valleys = np.array(
        [
            lo + int(np.argmin(floored[lo : hi + 1]))
            for lo, hi in zip(peaks[:-1], peaks[1:], strict=True)
        ],
        dtype=np.int64,
    )
    frequencies = interpolate_frequencies(
        db[peaks - 1], db[peaks], db[peaks + 1], peaks, 2 * (size - 1)
    )
    return FramePeaks(peaks.astype(np.int64), valleys, frequencies, size)


def map_peak_to_previous(
    peak: int | np.ndarray, channels: int, previous_channels: int, previous: FramePeaks
) -> int | np.ndarray:
    """Peak of the previous frame whose region holds the rescaled bin of ``peak``.

    A rescaled bin that lands exactly on a valley goes to the region above it.
    """
    scaled = np.floor(np.asarray(peak) * previous_channels / channels + 0.5)
    scaled = np.clip(scaled.astype(np.int64), 0, previous.size - 1)
    region = np.searchsorted(previous.valleys, scaled, side="right")
    mapped = previous.peaks[region]
    return int(mapped) if np.ndim(mapped) == 0 else mapped
