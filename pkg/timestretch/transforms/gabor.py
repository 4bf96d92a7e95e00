"""Uniform discrete Gabor transform in the painless case.

Windows are stored in natural order (peak at ``Lg // 2``) and every frame is
phase-referenced to its own center: the windowed segment is folded so that
the center lands on DFT index 0. Translation is circular modulo ``L``.
"""

from collections.abc import Iterator
from dataclasses import dataclass
from math import lcm
from typing import NamedTuple

import numpy as np
from scipy.fft import fft, ifft

from ..errors import InvalidLength, NotAFrame, ShapeMismatch
from .windows import window_offsets


@dataclass(frozen=True)
class GaborFrame:
    window: np.ndarray
    hop: int
    channels: int
    length: int

    def __post_init__(self) -> None:
        window = np.array(self.window, dtype=np.float64)
        if window.ndim != 1 or window.size < 2 or window.size % 2:
            raise InvalidLength(
                f"window must be a 1-D vector of even length, got {window.shape}"
            )
        if self.hop <= 0 or self.channels <= 0 or self.length <= 0:
            raise InvalidLength(
                f"hop, channels and length must be positive "
                f"(got {self.hop}, {self.channels}, {self.length})"
            )
        if self.length % self.hop:
            raise InvalidLength(
                f"signal length {self.length} is not a multiple of hop {self.hop}"
            )
        if window.size > self.channels:
            raise InvalidLength(
                f"window of {window.size} samples exceeds {self.channels} channels"
            )
        if window.size > self.length:
            raise InvalidLength(
                f"window of {window.size} samples exceeds signal length {self.length}"
            )
        window.setflags(write=False)
        object.__setattr__(self, "window", window)

    @property
    def frames(self) -> int:
        return self.length // self.hop

    @property
    def positions(self) -> np.ndarray:
        return np.arange(self.frames) * self.hop

    @property
    def redundancy(self) -> float:
        return self.channels / self.hop


@dataclass(frozen=True)
class DgtCoefficients:
    """Coefficient matrix of shape ``(channels, frames)``."""

    coefficients: np.ndarray
    frame: GaborFrame

    def __post_init__(self) -> None:
        shape = (self.frame.channels, self.frame.frames)
        if self.coefficients.shape != shape:
            raise ShapeMismatch(
                f"coefficients of shape {self.coefficients.shape}, expected {shape}"
            )


class PaddedSignal(NamedTuple):
    samples: np.ndarray
    padding: int


def compatible_length(length: int, hop: int, channels: int, extra: int = 0) -> int:
    """Smallest multiple of ``lcm(hop, channels)`` that is ``>= length + extra``."""
    block = lcm(hop, channels)
    return -(-(length + extra) // block) * block


def pad_signal(samples: np.ndarray, length: int) -> PaddedSignal:
    samples = np.asarray(samples)
    if samples.size > length:
        raise ShapeMismatch(f"cannot pad {samples.size} samples down to {length}")
    padding = length - samples.size
    tail = np.zeros(padding, samples.dtype)
    return PaddedSignal(np.concatenate([samples, tail]), padding)


def analyze_frames(
    samples: np.ndarray,
    positions: np.ndarray,
    window: np.ndarray,
    channels: int,
) -> np.ndarray:
    """Windowed, center-referenced DFTs at ``positions``, one row per frame."""
    offsets = window_offsets(window.size)
    index = (np.asarray(positions)[:, None] + offsets[None, :]) % samples.size
    folded = np.zeros((index.shape[0], channels), dtype=np.result_type(samples, window))
    folded[:, offsets % channels] = samples[index] * window
    return fft(folded, axis=1)


def overlap_add(
    output_length: int,
    positions: np.ndarray,
    offsets: np.ndarray,
    segments: np.ndarray,
) -> np.ndarray:
    """Circularly accumulate ``segments[n]`` at ``positions[n] + offsets``."""
    index = (np.asarray(positions)[:, None] + offsets[None, :]) % output_length
    index = index.ravel()
    segments = segments.ravel()
    summed = np.bincount(index, weights=segments.real, minlength=output_length)
    if np.iscomplexobj(segments):
        summed = summed + 1j * np.bincount(
            index, weights=segments.imag, minlength=output_length
        )
    return summed


def dgt_analyze(samples: np.ndarray, frame: GaborFrame) -> DgtCoefficients:
    samples = np.asarray(samples)
    if samples.ndim != 1 or samples.size != frame.length:
        raise ShapeMismatch(
            f"signal of shape {samples.shape} does not match "
            f"frame length {frame.length}"
        )
    columns = analyze_frames(samples, frame.positions, frame.window, frame.channels)
    return DgtCoefficients(columns.T, frame)


def iter_dgt_blocks(
    samples: np.ndarray, frame: GaborFrame, block: int = 256
) -> Iterator[np.ndarray]:
    """Yield the DGT of ``samples`` as consecutive ``(channels, <=block)`` slices."""
    samples = np.asarray(samples)
    if samples.size != frame.length:
        raise ShapeMismatch(
            f"signal of {samples.size} samples does not match "
            f"frame length {frame.length}"
        )
    positions = frame.positions
    for start in range(0, positions.size, block):
        yield analyze_frames(
            samples, positions[start : start + block], frame.window, frame.channels
        ).T


def dgt_diagonal(frame: GaborFrame) -> np.ndarray:
    """Frame-operator diagonal ``d[l] = sum_n M g[l - na]^2`` over the whole signal."""
    offsets = window_offsets(frame.window.size)
    period = np.bincount(
        offsets % frame.hop,
        weights=frame.channels * frame.window**2,
        minlength=frame.hop,
    )
    return np.tile(period, frame.frames)


def painless_dual_window(frame: GaborFrame) -> np.ndarray:
    diagonal = dgt_diagonal(frame)
    bad = np.flatnonzero(diagonal <= 0)
    if bad.size:
        raise NotAFrame(bad)
    offsets = window_offsets(frame.window.size)
    return frame.window / diagonal[offsets % frame.length]


def dgt_synthesize(
    coefficients: DgtCoefficients | np.ndarray,
    hop: int,
    dual: np.ndarray,
    real: bool = True,
) -> np.ndarray:
    """Inverse DGT by overlap-add at ``n * hop``, giving ``frames * hop`` samples."""
    matrix = (
        coefficients.coefficients
        if isinstance(coefficients, DgtCoefficients)
        else np.asarray(coefficients)
    )
    if matrix.ndim != 2:
        raise ShapeMismatch(f"expected a 2-D coefficient matrix, got {matrix.shape}")
    channels, frames = matrix.shape
    dual = np.asarray(dual, dtype=np.float64)
    if dual.size > channels:
        raise ShapeMismatch(
            f"dual window of {dual.size} samples exceeds {channels} channels"
        )
    offsets = window_offsets(dual.size)
    segments = channels * ifft(matrix, axis=0)[offsets % channels, :].T * dual
    if real:
        segments = segments.real
    return overlap_add(frames * hop, np.arange(frames) * hop, offsets, segments)


def full_spectrum(half: np.ndarray, channels: int, axis: int = 0) -> np.ndarray:
    """Extend bins ``0..channels // 2`` to a conjugate-symmetric spectrum."""
    half = np.moveaxis(np.asarray(half), axis, 0)
    if half.shape[0] != channels // 2 + 1 or channels % 2:
        raise ShapeMismatch(
            f"{half.shape[0]} half-spectrum bins do not fit {channels} channels"
        )
    mirrored = np.conj(half[1 : channels // 2][::-1])
    return np.moveaxis(np.concatenate([half, mirrored], axis=0), 0, axis)
