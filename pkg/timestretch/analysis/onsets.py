from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from loguru import logger

from ..config import OnsetConfig
from ..errors import ShapeMismatch
from ..signal.io import Signal
from ..transforms.gabor import (
    GaborFrame,
    compatible_length,
    iter_dgt_blocks,
    pad_signal,
)
from ..transforms.windows import hann_window


@dataclass(frozen=True)
class OnsetList:
    onsets: np.ndarray
    sf_curve: np.ndarray
    frame_hop: int

    def __post_init__(self) -> None:
        onsets = np.array(self.onsets, dtype=np.int64).reshape(-1)
        if onsets.size and (onsets[0] < 0 or np.any(np.diff(onsets) <= 0)):
            raise ShapeMismatch("onsets must be non-negative and strictly increasing")
        object.__setattr__(self, "onsets", onsets)
        sf_curve = np.asarray(self.sf_curve, dtype=np.float64)
        object.__setattr__(self, "sf_curve", sf_curve)

    def __len__(self) -> int:
        return self.onsets.size

    @property
    def strengths(self) -> np.ndarray:
        return self.sf_curve[self.onsets // self.frame_hop]

    def seconds(self, sample_rate: int) -> np.ndarray:
        return self.onsets / sample_rate

    def restricted(self, low: int, high: int) -> "OnsetList":
        """Keep the onsets in ``[low, high)``."""
        keep = (self.onsets >= low) & (self.onsets < high)
        return OnsetList(self.onsets[keep], self.sf_curve, self.frame_hop)


class OnsetParameters(NamedTuple):
    hop: int
    channels: int
    window_length: int


class FluxCurve(NamedTuple):
    values: np.ndarray
    # max over frames of the summed coefficient magnitudes
    peak_magnitude: float


def sf_parameters(
    sample_rate: int, config: OnsetConfig | None = None
) -> OnsetParameters:
    """Rescale the flux DGT from ``config.reference_rate`` to ``sample_rate``.

    The hop scales with the rate; channel count and window keep their ratio
    to the hop, so the transform redundancy stays the same.
    """
    config = config or OnsetConfig()
    hop = max(1, round(config.hop * sample_rate / config.reference_rate))
    channels = max(2, round(config.channels * hop / config.hop))
    window = max(2, round(config.window_length * hop / config.hop))
    window += window % 2
    return OnsetParameters(hop, channels, min(window, channels - channels % 2))


def flux_curve(
    samples: np.ndarray, hop: int, channels: int, window_length: int | None = None
) -> FluxCurve:
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1 or samples.size == 0:
        raise ShapeMismatch(f"expected a non-empty 1-D signal, got {samples.shape}")
    window_length = window_length or 2 * hop
    length = compatible_length(samples.size, hop, channels, extra=window_length)
    padded, _ = pad_signal(samples, length)
    frame = GaborFrame(hann_window(window_length), hop, channels, length)

    frames = -(-samples.size // hop)
    flux = np.zeros(frame.frames)
    peak = 0.0
    previous = None
    start = 0
    for block in iter_dgt_blocks(padded, frame):
        magnitudes = np.abs(block)
        peak = max(peak, float(magnitudes.sum(axis=0).max()))
        if previous is not None:
            magnitudes = np.concatenate([previous, magnitudes], axis=1)
        rises = np.maximum(np.diff(magnitudes, axis=1), 0.0).sum(axis=0)
        offset = start if previous is None else start - 1
        flux[offset + 1 : offset + 1 + rises.size] = rises
        previous = magnitudes[:, -1:]
        start += block.shape[1]

    # the preceding window reaches before the first sample
    flux[: min(flux.size, 1 + -(-(window_length // 2) // hop))] = 0.0
    return FluxCurve(flux[:frames], peak)


def spectral_flux(
    signal: Signal | np.ndarray,
    hop: int,
    channels: int,
    window_length: int | None = None,
) -> np.ndarray:
    """``SF[n] = sum_m max(0, |c[m, n]| - |c[m, n-1]|)`` on a Hann DGT."""
    samples = signal.samples if isinstance(signal, Signal) else signal
    return flux_curve(samples, hop, channels, window_length).values


def pick_onsets(
    sf: np.ndarray,
    hop: int,
    neighborhood: int = 10,
    bias: float = 1.5,
    floor: float = 0.0,
) -> OnsetList:
    """Frames that are strict local maxima and exceed the biased local mean."""
    if neighborhood < 1:
        raise ValueError(f"neighborhood must be >= 1, got {neighborhood}")
    sf = np.asarray(sf, dtype=np.float64)
    if sf.size < 3:
        return OnsetList(np.zeros(0, dtype=np.int64), sf, hop)

    cumulative = np.concatenate([[0.0], np.cumsum(sf)])
    index = np.arange(sf.size)
    low = np.maximum(index - neighborhood, 0)
    high = np.minimum(index + neighborhood + 1, sf.size)
    local_mean = (cumulative[high] - cumulative[low]) / (high - low)

    inner = sf[1:-1]
    is_peak = np.zeros(sf.size, dtype=bool)
    is_peak[1:-1] = (inner > sf[:-2]) & (inner > sf[2:])
    selected = is_peak & (sf > bias * local_mean) & (sf > floor)
    return OnsetList(np.flatnonzero(selected) * hop, sf, hop)


def detect_onsets(signal: Signal, config: OnsetConfig | None = None) -> OnsetList:
    config = config or OnsetConfig()
    hop, channels, window_length = sf_parameters(signal.sample_rate, config)
    curve = flux_curve(signal.samples, hop, channels, window_length)
    onsets = pick_onsets(
        curve.values,
        hop,
        neighborhood=config.neighborhood,
        bias=config.bias,
        floor=config.floor_ratio * curve.peak_magnitude,
    )
    logger.debug(
        f"Detected {len(onsets)} onset(s) with flux hop {hop}, {channels} channels, "
        f"window {window_length}"
    )
    return onsets
