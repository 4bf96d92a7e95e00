import numpy as np
from loguru import logger

from ..config import PvConfig, check_rate
from ..errors import InfeasibleRate
from ..signal.io import Signal
from ..transforms.gabor import (
    GaborFrame,
    compatible_length,
    dgt_analyze,
    dgt_synthesize,
    full_spectrum,
    pad_signal,
    painless_dual_window,
)
from ..transforms.phase import princarg
from ..transforms.windows import hann_window
from .vocoder import StretchResult, Vocoder


def channel_frequencies(channels: int) -> np.ndarray:
    """Center frequencies ``2 pi m / M`` of bins ``0..M/2`` in radians per sample."""
    return 2 * np.pi * np.arange(channels // 2 + 1) / channels


def phase_increments(phases: np.ndarray, hop: int, channels: int) -> np.ndarray:
    """Unwrapped instantaneous frequencies between consecutive columns.

    Returns ``omega = Omega_m + princarg(dphi - Omega_m a) / a`` with one
    column fewer than ``phases``.
    """
    centers = channel_frequencies(channels)[:, None]
    deviation = princarg(np.diff(phases, axis=1) - centers * hop) / hop
    return centers + deviation


def _fit_length(samples: np.ndarray, length: int) -> np.ndarray:
    if samples.size >= length:
        return samples[:length]
    return np.concatenate([samples, np.zeros(length - samples.size)])


def pv_stretch(signal: Signal, rate: float, config: PvConfig | None = None) -> Signal:
    return PhaseVocoder(config).stretch(signal, rate).signal


class PhaseVocoder(Vocoder):
    """Classical phase vocoder on a uniform painless Hann DGT."""

    name = "pv"

    def __init__(self, config: PvConfig | None = None):
        self.config = config or PvConfig()

    def stretch(self, signal: Signal, rate: float) -> StretchResult:
        rate = check_rate(rate)
        hop, channels = self.config.hop, self.config.channels
        window = hann_window(self.config.window)
        target = round(rate * len(signal))

        length = compatible_length(len(signal), hop, channels, extra=window.size)
        padded, _ = pad_signal(signal.samples, length)
        frame = GaborFrame(window, hop, channels, length)
        half = dgt_analyze(padded, frame).coefficients[: channels // 2 + 1]

        if self.config.interpolate:
            modified, synthesis_hop = self._interpolated(half, rate), hop
        else:
            synthesis_hop = round(rate * hop)
            if synthesis_hop < 1:
                raise InfeasibleRate(rate, 0.5 / hop, "synthesis hop rounds to zero")
            modified = self._unwrapped(half, synthesis_hop)

        frames = modified.shape[1]
        synthesis = GaborFrame(window, synthesis_hop, channels, frames * synthesis_hop)
        dual = painless_dual_window(synthesis)
        output = dgt_synthesize(full_spectrum(modified, channels), synthesis_hop, dual)
        realized = (
            frames * synthesis_hop / length
            if self.config.interpolate
            else synthesis_hop / hop
        )
        logger.debug(
            f"PV {self.config.label}: rate {rate}, synthesis hop {synthesis_hop}, "
            f"realized rate {realized:.6f}, {frames} frames"
        )
        return StretchResult(
            signal=signal.with_samples(_fit_length(output, target)),
            rate=rate,
            realized_rate=realized,
            redundancy=frame.redundancy,
        )

    def _unwrapped(self, half: np.ndarray, synthesis_hop: int) -> np.ndarray:
        phases = np.angle(half)
        omega = phase_increments(phases, self.config.hop, self.config.channels)
        advance = princarg(omega * synthesis_hop)
        accumulated = np.concatenate(
            [phases[:, :1], phases[:, :1] + np.cumsum(advance, axis=1)], axis=1
        )
        return np.abs(half) * np.exp(1j * princarg(accumulated))

    def _interpolated(self, half: np.ndarray, rate: float) -> np.ndarray:
        """Read the analysis grid at fractional steps of ``1 / rate`` frames."""
        hop = self.config.hop
        frames = half.shape[1]
        steps = np.arange(int(np.ceil(rate * frames))) / rate
        tail = np.zeros((half.shape[0], 2), half.dtype)
        padded = np.concatenate([half, tail], axis=1)
        magnitudes = np.abs(padded)
        phases = np.angle(padded)
        omega = phase_increments(phases, hop, self.config.channels)

        base = np.floor(steps).astype(np.int64)
        fraction = steps - base
        interpolated = (1 - fraction) * magnitudes[:, base] + fraction * magnitudes[
            :, base + 1
        ]
        advance = princarg(omega[:, base[:-1]] * hop)
        accumulated = np.concatenate(
            [phases[:, :1], phases[:, :1] + np.cumsum(advance, axis=1)], axis=1
        )
        return interpolated * np.exp(1j * princarg(accumulated))
