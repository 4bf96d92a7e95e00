"""Painless nonstationary Gabor transform with ragged coefficient rows.

Each frame ``n`` uses the window ``windows[assignment[n]]`` centered at
``centers[n]`` and ``channels[n]`` frequency channels. Because every window
fits into its own DFT length, the frame operator is diagonal and synthesis
reduces to overlap-add followed by a pointwise division.
"""

import json
import os
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from loguru import logger
from scipy.fft import ifft

from ..errors import InvalidLength, IoError, NotAFrame, ShapeMismatch
from .gabor import GaborFrame, analyze_frames, overlap_add
from .windows import window_offsets


@dataclass(frozen=True)
class NsgSystem:
    windows: tuple[np.ndarray, ...]
    centers: np.ndarray
    assignment: np.ndarray
    channels: np.ndarray
    length: int

    def __post_init__(self) -> None:
        windows = tuple(np.array(w, dtype=np.float64) for w in self.windows)
        for j, window in enumerate(windows):
            if window.ndim != 1 or window.size < 2 or window.size % 2:
                raise InvalidLength(
                    f"window {j} must be 1-D of even length, got {window.shape}"
                )
            if window.size > self.length:
                raise InvalidLength(
                    f"window {j} ({window.size} samples) exceeds length {self.length}"
                )
            window.setflags(write=False)
        centers = np.array(self.centers, dtype=np.int64)
        assignment = np.array(self.assignment, dtype=np.int64)
        channels = np.array(self.channels, dtype=np.int64)
        if not (centers.ndim == assignment.ndim == channels.ndim == 1) or not (
            centers.size == assignment.size == channels.size
        ):
            raise ShapeMismatch(
                "centers, assignment and channels must be 1-D of equal size"
            )
        if centers.size == 0:
            raise ShapeMismatch("a system needs at least one frame")
        increasing = np.all(np.diff(centers) > 0)
        if centers[0] < 0 or centers[-1] >= self.length or not increasing:
            raise ShapeMismatch(
                f"centers must be strictly increasing within [0, {self.length})"
            )
        if assignment.min() < 0 or assignment.max() >= len(windows):
            raise ShapeMismatch("window assignment refers to a missing window")
        if np.unique(assignment).size != len(windows):
            raise ShapeMismatch("every window must be used by at least one frame")
        odd = channels % 2 == 1
        if odd.any():
            logger.debug(f"Rounding {int(odd.sum())} odd channel count(s) up to even")
            channels = channels + odd
        lengths = np.array([w.size for w in windows])[assignment]
        too_short = np.flatnonzero(lengths > channels)
        if too_short.size:
            raise InvalidLength(
                f"frames {too_short[:8].tolist()} have fewer channels "
                "than window samples"
            )
        for array in (centers, assignment, channels):
            array.setflags(write=False)
        object.__setattr__(self, "windows", windows)
        object.__setattr__(self, "centers", centers)
        object.__setattr__(self, "assignment", assignment)
        object.__setattr__(self, "channels", channels)

    @property
    def frames(self) -> int:
        return self.centers.size

    @property
    def window_lengths(self) -> np.ndarray:
        return np.array([w.size for w in self.windows])[self.assignment]

    @property
    def max_window(self) -> int:
        return max(w.size for w in self.windows)

    def groups(self) -> dict[tuple[int, int], np.ndarray]:
        """Frame indices grouped by ``(window index, channel count)``."""
        keys = np.stack([self.assignment, self.channels], axis=1)
        unique, inverse = np.unique(keys, axis=0, return_inverse=True)
        inverse = inverse.reshape(-1)
        return {
            (int(j), int(m)): np.flatnonzero(inverse == k)
            for k, (j, m) in enumerate(unique)
        }


@dataclass(frozen=True)
class NsgCoefficients:
    rows: tuple[np.ndarray, ...]
    system: NsgSystem

    def __post_init__(self) -> None:
        rows = tuple(np.asarray(row) for row in self.rows)
        if len(rows) != self.system.frames:
            raise ShapeMismatch(
                f"{len(rows)} coefficient rows for {self.system.frames} frames"
            )
        pairs = zip(rows, self.system.channels, strict=True)
        for n, (row, channels) in enumerate(pairs):
            if row.ndim != 1 or row.size != channels:
                raise ShapeMismatch(
                    f"row {n} has shape {row.shape}, expected ({channels},)"
                )
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)

    def __getitem__(self, n: int) -> np.ndarray:
        return self.rows[n]

    @property
    def size(self) -> int:
        return sum(row.size for row in self.rows)


class FrameDiagonal(NamedTuple):
    values: np.ndarray
    minimum: float


def uniform_system(frame: GaborFrame) -> NsgSystem:
    """The stationary special case: one window, centers ``n * hop``, ``M`` channels."""
    return NsgSystem(
        windows=(frame.window,),
        centers=frame.positions,
        assignment=np.zeros(frame.frames, dtype=np.int64),
        channels=np.full(frame.frames, frame.channels),
        length=frame.length,
    )


def nsgt_analyze(samples: np.ndarray, system: NsgSystem) -> NsgCoefficients:
    samples = np.asarray(samples)
    if samples.ndim != 1 or samples.size != system.length:
        raise ShapeMismatch(
            f"signal of shape {samples.shape} does not match "
            f"system length {system.length}"
        )
    rows: list[np.ndarray | None] = [None] * system.frames
    for (j, channels), frames in system.groups().items():
        spectra = analyze_frames(
            samples, system.centers[frames], system.windows[j], channels
        )
        for n, spectrum in zip(frames, spectra, strict=True):
            rows[n] = spectrum
    return NsgCoefficients(tuple(rows), system)


def frame_diagonal(system: NsgSystem) -> FrameDiagonal:
    values = np.zeros(system.length)
    for (j, channels), frames in system.groups().items():
        window = system.windows[j]
        weights = np.broadcast_to(channels * window**2, (frames.size, window.size))
        values += overlap_add(
            system.length, system.centers[frames], window_offsets(window.size), weights
        )
    minimum = float(values.min())
    logger.debug(f"Frame diagonal over {system.length} samples, minimum {minimum:.6g}")
    return FrameDiagonal(values, minimum)


def _checked_diagonal(system: NsgSystem) -> np.ndarray:
    diagonal = frame_diagonal(system)
    if diagonal.minimum <= 0:
        raise NotAFrame(np.flatnonzero(diagonal.values <= 0))
    return diagonal.values


def canonical_dual_windows(system: NsgSystem) -> list[np.ndarray]:
    """Per-frame canonical dual windows ``g_j(n)[o] / S[a_n + o]``."""
    diagonal = _checked_diagonal(system)
    duals = []
    for center, j in zip(system.centers, system.assignment, strict=True):
        window = system.windows[j]
        index = (center + window_offsets(window.size)) % system.length
        duals.append(window / diagonal[index])
    return duals


def nsgt_synthesize(
    coefficients: NsgCoefficients | Sequence[np.ndarray],
    system: NsgSystem,
    duals: Sequence[np.ndarray] | None = None,
    real: bool = True,
) -> np.ndarray:
    """Overlap-add synthesis on ``system``.

    Without ``duals`` the frames are painted with the analysis windows and
    the sum is divided by the frame diagonal. With explicit ``duals`` (one
    per frame) they are painted directly and no division takes place.
    """
    if isinstance(coefficients, NsgCoefficients):
        coefficients = coefficients.rows
    rows = NsgCoefficients(tuple(coefficients), system).rows
    if duals is not None and len(duals) != system.frames:
        raise ShapeMismatch(f"{len(duals)} dual windows for {system.frames} frames")
    diagonal = None if duals is not None else _checked_diagonal(system)
    output = np.zeros(system.length, dtype=np.float64 if real else np.complex128)
    for (j, channels), frames in system.groups().items():
        offsets = window_offsets(system.windows[j].size)
        block = np.stack([rows[n] for n in frames])
        segments = channels * ifft(block, axis=1)[:, offsets % channels]
        if duals is None:
            segments = segments * system.windows[j]
        else:
            segments = segments * np.stack([duals[n] for n in frames])
        if real:
            segments = segments.real
        output += overlap_add(system.length, system.centers[frames], offsets, segments)
    if diagonal is not None:
        output /= diagonal
    return output


def redundancy(system: NsgSystem) -> float:
    return float(system.channels.sum()) / system.length


def dump_coefficients(coefficients: NsgCoefficients, path: str | os.PathLike) -> None:
    """Write ``frame,bin,real,imag`` records as CSV or JSON, chosen by suffix."""
    path = Path(path)
    frames = np.concatenate(
        [np.full(row.size, n) for n, row in enumerate(coefficients.rows)]
    )
    bins = np.concatenate([np.arange(row.size) for row in coefficients.rows])
    values = np.concatenate(coefficients.rows).astype(np.complex128)
    try:
        if path.suffix == ".json":
            records = {
                "length": coefficients.system.length,
                "centers": coefficients.system.centers.tolist(),
                "channels": coefficients.system.channels.tolist(),
                "rows": [
                    {"real": row.real.tolist(), "imag": row.imag.tolist()}
                    for row in coefficients.rows
                ],
            }
            path.write_text(json.dumps(records))
        else:
            table = np.column_stack([frames, bins, values.real, values.imag])
            np.savetxt(
                path,
                table,
                fmt=["%d", "%d", "%.10e", "%.10e"],
                delimiter=",",
                header="frame,bin,real,imag",
                comments="",
            )
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    logger.debug(f"Dumped {values.size} coefficients to {path}")
