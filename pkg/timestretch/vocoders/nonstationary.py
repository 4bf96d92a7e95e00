"""Phase vocoder on scale frames with peak phase locking.

Onsets fix where the short windows go. Between onsets the analysis frame
uses long windows, and synthesis runs on the same windows at the stretched
centers of a :class:`StretchPlan`. Phases are estimated at spectral peaks
only and every other channel is locked to the peak of its region.
"""

import os
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np
from loguru import logger

from ..analysis.onsets import OnsetList, detect_onsets
from ..analysis.scale_frames import (
    StretchPlan,
    build_synthesis_sequence,
    stretch_plan,
)
from ..config import NspvConfig, check_rate
from ..errors import IoError, ShapeMismatch, StateMismatch
from ..signal.io import Signal
from ..transforms.gabor import full_spectrum, pad_signal
from ..transforms.nsgt import (
    NsgCoefficients,
    NsgSystem,
    nsgt_analyze,
    nsgt_synthesize,
    redundancy,
)
from ..transforms.phase import princarg
from .peaks import FramePeaks, find_peaks_valleys, floored_db, map_peak_to_previous
from .vocoder import StretchResult, Vocoder


@dataclass(frozen=True)
class PhaseState:
    """Synthesis phases and analysis magnitudes of the previous frame."""

    phases: np.ndarray
    magnitudes: np.ndarray
    peaks: FramePeaks

    @property
    def channels(self) -> int:
        return self.peaks.channels

    def check(self) -> None:
        size = self.peaks.size
        if self.phases.shape != (size,) or self.magnitudes.shape != (size,):
            raise StateMismatch(
                f"phase state holds {self.phases.shape} phases and "
                f"{self.magnitudes.shape} magnitudes for {size} bins"
            )


class FrameUpdate(NamedTuple):
    row: np.ndarray
    state: PhaseState
    peak_updates: int
    reinitialized: int


def propagate_frame(
    row: np.ndarray,
    synthesis_hop: int,
    state: PhaseState | None,
    peaks: FramePeaks | None = None,
    transient: bool = False,
    eps_db: float = 2.0,
    floor_db: float = -120.0,
) -> FrameUpdate:
    """Synthesis coefficients of one frame from its analysis row.

    ``row`` is the full row of ``M_n`` coefficients and ``synthesis_hop`` the
    distance to the previous synthesis center. Without a usable previous
    state (first frame, or either frame without peaks) the analysis phases
    are taken as they are.
    """
    row = np.asarray(row)
    channels = row.size
    if channels < 2 or channels % 2:
        raise ShapeMismatch(f"row of {channels} channels is not even")
    half = row[: channels // 2 + 1]
    magnitudes = np.abs(half)
    analysis_phases = np.angle(half)
    if peaks is None:
        peaks = find_peaks_valleys(magnitudes, floor_db)
    if peaks.size != half.size:
        raise ShapeMismatch(f"peaks cover {peaks.size} bins, row has {half.size}")

    if state is None or peaks.count == 0 or state.peaks.count == 0:
        phases = analysis_phases
        peak_updates, reinitialized = 0, half.size
    else:
        state.check()
        previous = map_peak_to_previous(
            peaks.peaks, channels, state.channels, state.peaks
        )
        peak_phases = state.phases[previous] + peaks.frequencies * synthesis_hop
        owner = peaks.owners()
        phases = (
            peak_phases[owner] + analysis_phases - analysis_phases[peaks.peaks][owner]
        )
        peak_updates, reinitialized = peaks.count, 0
        if transient:
            reference = max(float(magnitudes.max()), float(state.magnitudes.max()))
            current = floored_db(magnitudes, reference, floor_db)
            before = floored_db(state.magnitudes[previous][owner], reference, floor_db)
            reset = current > before + eps_db
            # DC and Nyquist keep the locked phase
            reset[0] = reset[-1] = False
            phases = np.where(reset, analysis_phases, phases)
            reinitialized = int(reset.sum())

    phases = princarg(phases)
    modified = magnitudes * np.exp(1j * phases)
    # a real signal has real DC and Nyquist coefficients
    modified[[0, -1]] = modified[[0, -1]].real
    return FrameUpdate(
        row=full_spectrum(modified, channels),
        state=PhaseState(phases, magnitudes, peaks),
        peak_updates=peak_updates,
        reinitialized=reinitialized,
    )


@dataclass(frozen=True)
class NspvResult(StretchResult):
    plan: StretchPlan
    onsets: OnsetList
    analysis_system: NsgSystem
    synthesis_system: NsgSystem
    coefficients: NsgCoefficients
    synthesis_coefficients: NsgCoefficients
    peaks: tuple[FramePeaks, ...]
    peak_updates: np.ndarray
    reinitialized: np.ndarray

    @property
    def peak_counts(self) -> np.ndarray:
        return np.array([frame.count for frame in self.peaks])

    def dump_peaks(self, path: str | os.PathLike) -> None:
        """CSV of ``frame,bin,frequency,region_lo,region_hi``, one line per peak."""
        path = Path(path)
        lines = ["frame,bin,frequency,region_lo,region_hi"]
        for n, frame in enumerate(self.peaks):
            bounds = frame.region_bounds
            for i, peak in enumerate(frame.peaks):
                lo, hi = bounds[i]
                lines.append(f"{n},{peak},{frame.frequencies[i]:.9g},{lo},{hi}")
        try:
            path.write_text("\n".join(lines) + "\n")
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc


def nspv_stretch(
    signal: Signal, rate: float, config: NspvConfig | None = None
) -> Signal:
    return NonstationaryPhaseVocoder(config).stretch(signal, rate).signal


class NonstationaryPhaseVocoder(Vocoder):
    name = "nspv"

    def __init__(self, config: NspvConfig | None = None):
        self.config = config or NspvConfig()

    def stretch(self, signal: Signal, rate: float) -> NspvResult:
        rate = check_rate(rate)
        frames = self.config.frames
        onsets = detect_onsets(signal, self.config.onsets)

        # trailing silence keeps the circular wrap away from the signal
        length = len(signal) + frames.max_win
        padded, _ = pad_signal(signal.samples, length)
        analysis, synthesis = build_synthesis_sequence(onsets, length, rate, frames)
        plan = stretch_plan(analysis, synthesis, rate)

        analysis_system = analysis.to_system()
        synthesis_system = plan.synthesis.to_system()
        coefficients = nsgt_analyze(padded, analysis_system)

        rows = []
        peaks = []
        updates = np.zeros(len(coefficients), dtype=np.int64)
        reinitialized = np.zeros(len(coefficients), dtype=np.int64)
        state = None
        for n, row in enumerate(coefficients.rows):
            update = propagate_frame(
                row,
                int(plan.synthesis_hops[n - 1]) if n else 0,
                state,
                transient=bool(analysis.transient[n]),
                eps_db=self.config.eps_db,
                floor_db=self.config.floor_db,
            )
            rows.append(update.row)
            peaks.append(update.state.peaks)
            updates[n] = update.peak_updates
            reinitialized[n] = update.reinitialized
            state = update.state

        synthesis_coefficients = NsgCoefficients(tuple(rows), synthesis_system)
        output = nsgt_synthesize(synthesis_coefficients, synthesis_system)
        target = round(rate * len(signal))
        samples = output[:target]

        peakless = sum(1 for frame in peaks if frame.count == 0)
        if peakless and peakless == len(peaks) and np.any(signal.samples):
            logger.warning("No spectral peaks in any frame; phases were not propagated")
        red = redundancy(analysis_system)
        logger.debug(
            f"NSPV: rate {rate}, compensated {plan.compensated_rate:.6f}, "
            f"{len(onsets)} onset(s), {len(coefficients)} frames, "
            f"{peakless} peakless, redundancy {red:.3f}"
        )
        return NspvResult(
            signal=signal.with_samples(samples),
            rate=rate,
            realized_rate=samples.size / len(signal),
            redundancy=red,
            plan=plan,
            onsets=onsets,
            analysis_system=analysis_system,
            synthesis_system=synthesis_system,
            coefficients=coefficients,
            synthesis_coefficients=synthesis_coefficients,
            peaks=tuple(peaks),
            peak_updates=updates,
            reinitialized=reinitialized,
        )
