"""Scale frames: dyadic window ladders between onsets.

Windows are ``min_win * 2**k`` samples long. A scale-0 window sits on every
onset; between two onsets the scale climbs one step at a time, holds a
plateau and climbs back down. Equal neighbours overlap by a third of their
length, unequal ones by two thirds of the shorter window.
"""

import json
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from loguru import logger

from ..config import ScaleFrameConfig, check_rate
from ..errors import InfeasibleRate, IoError, ShapeMismatch
from ..transforms.nsgt import NsgSystem
from ..transforms.windows import hann_window
from .onsets import OnsetList


def equal_hop(length: int) -> int:
    """Center distance of two windows of ``length`` samples overlapping by 1/3."""
    return length - length // 3


def step_hop(shorter: int, longer: int) -> int:
    """Center distance of two windows overlapping by 2/3 of the shorter one."""
    return (shorter + longer) // 2 - (2 * shorter) // 3


@dataclass(frozen=True)
class WindowSequence:
    centers: np.ndarray
    scales: np.ndarray
    channels: np.ndarray
    transient: np.ndarray
    length: int
    min_win: int

    def __post_init__(self) -> None:
        centers = np.array(self.centers, dtype=np.int64)
        scales = np.array(self.scales, dtype=np.int64)
        channels = np.array(self.channels, dtype=np.int64)
        transient = np.array(self.transient, dtype=bool)
        if not (centers.size == scales.size == channels.size == transient.size):
            raise ShapeMismatch("window sequence fields differ in length")
        if centers.size == 0:
            raise ShapeMismatch("a window sequence needs at least one frame")
        increasing = np.all(np.diff(centers) > 0)
        if centers[0] < 0 or centers[-1] >= self.length or not increasing:
            raise ShapeMismatch(
                f"centers must be strictly increasing within [0, {self.length})"
            )
        for name, value in (
            ("centers", centers),
            ("scales", scales),
            ("channels", channels),
            ("transient", transient),
        ):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return self.centers.size

    @property
    def window_lengths(self) -> np.ndarray:
        return self.min_win * 2**self.scales

    @property
    def max_window(self) -> int:
        return int(self.window_lengths.max())

    def with_centers(self, centers: np.ndarray, length: int) -> "WindowSequence":
        return WindowSequence(
            centers, self.scales, self.channels, self.transient, length, self.min_win
        )

    def to_system(self) -> NsgSystem:
        """Hann scale frame on this sequence, one prototype per scale in use."""
        used, assignment = np.unique(self.scales, return_inverse=True)
        return NsgSystem(
            windows=tuple(hann_window(self.min_win * 2 ** int(k)) for k in used),
            centers=self.centers,
            assignment=assignment.reshape(-1),
            channels=self.channels,
            length=self.length,
        )


@dataclass(frozen=True)
class StretchPlan:
    analysis: WindowSequence
    synthesis_centers: np.ndarray
    rate: float
    compensated_rate: float
    target_length: int
    analysis_hops: np.ndarray = field(init=False)
    synthesis_hops: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        centers = np.array(self.synthesis_centers, dtype=np.int64)
        if centers.size != len(self.analysis):
            raise ShapeMismatch(
                f"{centers.size} synthesis centers for {len(self.analysis)} frames"
            )
        object.__setattr__(self, "synthesis_centers", centers)
        analysis_hops = np.diff(self.analysis.centers, append=self.analysis.length)
        object.__setattr__(self, "analysis_hops", analysis_hops)
        object.__setattr__(
            self, "synthesis_hops", np.diff(centers, append=self.target_length)
        )

    @property
    def local_rates(self) -> np.ndarray:
        return self.synthesis_hops / self.analysis_hops

    @property
    def synthesis(self) -> WindowSequence:
        return self.analysis.with_centers(self.synthesis_centers, self.target_length)

    def to_dict(self) -> dict:
        return {
            "rate": self.rate,
            "compensated_rate": self.compensated_rate,
            "analysis_length": self.analysis.length,
            "target_length": self.target_length,
            "analysis_centers": self.analysis.centers.tolist(),
            "synthesis_centers": self.synthesis_centers.tolist(),
            "scales": self.analysis.scales.tolist(),
            "channels": self.analysis.channels.tolist(),
            "transient": self.analysis.transient.tolist(),
            "analysis_hops": self.analysis_hops.tolist(),
            "synthesis_hops": self.synthesis_hops.tolist(),
            "local_rates": self.local_rates.tolist(),
        }

    def dump_json(self, path: str | os.PathLike) -> None:
        path = Path(path)
        try:
            path.write_text(json.dumps(self.to_dict(), indent=2))
        except OSError as exc:
            raise IoError(f"cannot write {path}: {exc}") from exc


def _even_hops(span: int, count: int) -> list[int]:
    edges = np.round(np.linspace(0, span, count + 1)).astype(np.int64)
    return np.diff(edges).tolist()


def _segment_scales(gap: int, config: ScaleFrameConfig) -> tuple[list[int], list[int]]:
    """Scales and hops of the frames from one boundary up to the next (excluded)."""
    lengths = config.scale_lengths
    ascent = [0]
    for k in range(config.num_scales - 1):
        ascent.append(ascent[-1] + step_hop(lengths[k], lengths[k + 1]))

    top = 0
    for k in range(config.num_scales - 1, 0, -1):
        span = gap - 2 * ascent[k]
        if span >= 0 and (span == 0 or 2 * span >= equal_hop(lengths[k])):
            top = k
            break
        if span >= 0:
            top = k - 1
            break

    if top == 0:
        count = max(1, -(-gap // equal_hop(lengths[0])))
        return [0] * count, _even_hops(gap, count)

    span = gap - 2 * ascent[top]
    up = [step_hop(lengths[k], lengths[k + 1]) for k in range(top)]
    plateau = -(-span // equal_hop(lengths[top])) if span else 0
    scales = list(range(top)) + [top] * (plateau + 1) + list(range(top - 1, 0, -1))
    hops = up + (_even_hops(span, plateau) if plateau else []) + up[::-1]
    return scales, hops


def build_window_sequence(
    onsets: OnsetList | np.ndarray,
    length: int,
    config: ScaleFrameConfig | None = None,
) -> WindowSequence:
    """Scale-0 frames on the onsets and dyadic ladders in between, circular in L."""
    config = config or ScaleFrameConfig()
    positions = onsets.onsets if isinstance(onsets, OnsetList) else np.asarray(onsets)
    positions = np.asarray(positions, dtype=np.int64)
    margin = config.min_win // 2
    kept = positions[(positions >= margin) & (positions <= length - margin)]
    if kept.size < positions.size:
        logger.warning(
            f"Dropped {positions.size - kept.size} onset(s) within {margin} samples "
            f"of the signal edges"
        )

    boundaries = [0, *kept.tolist(), length]
    centers: list[int] = []
    scales: list[int] = []
    transient: list[bool] = []
    segments = zip(boundaries[:-1], boundaries[1:], strict=True)
    for i, (start, stop) in enumerate(segments):
        segment_scales, hops = _segment_scales(stop - start, config)
        position = start
        for j, (scale, hop) in enumerate(zip(segment_scales, hops, strict=True)):
            centers.append(position)
            scales.append(scale)
            transient.append(j == 0 and i > 0)
            position += hop

    scale_array = np.array(scales, dtype=np.int64)
    channels = np.maximum(config.min_win * 2**scale_array, config.min_channels)
    channels += channels % 2
    sequence = WindowSequence(
        np.array(centers),
        scale_array,
        channels,
        np.array(transient),
        length,
        config.min_win,
    )
    logger.debug(
        f"Window sequence: {len(sequence)} frames over {length} samples, "
        f"{int(sequence.transient.sum())} transient"
    )
    return sequence


def build_synthesis_sequence(
    onsets: OnsetList | np.ndarray,
    length: int,
    rate: float,
    config: ScaleFrameConfig | None = None,
) -> tuple[WindowSequence, WindowSequence]:
    """Paired analysis and synthesis sequences sharing scales and channel counts.

    For stretching the ladder is built between the relocated onsets on the
    stretched timeline and its centers are mapped back to the input. For
    compression it is built on the input and mapped forward, so both
    timelines keep at least the nominal overlap.
    """
    rate = check_rate(rate)
    config = config or ScaleFrameConfig()
    positions = onsets.onsets if isinstance(onsets, OnsetList) else np.asarray(onsets)
    positions = np.asarray(positions, dtype=np.int64)
    target = round(rate * length)

    if rate >= 1:
        relocated = np.round(rate * positions).astype(np.int64)
        synthesis = build_window_sequence(relocated, target, config)
        centers = np.round(synthesis.centers / rate).astype(np.int64)
        centers = np.minimum(centers, length - 1)
        if np.any(np.diff(centers) <= 0):
            raise InfeasibleRate(rate, 1.0, "mapped analysis centers collide")
        analysis = synthesis.with_centers(centers, length)
    else:
        analysis = build_window_sequence(positions, length, config)
        centers = np.round(rate * analysis.centers).astype(np.int64)
        centers = np.minimum(centers, target - 1)
        if target < len(analysis) or np.any(np.diff(centers) <= 0):
            minimum = len(analysis) / length
            raise InfeasibleRate(
                rate, minimum, "compressed frame centers collide"
            )
        synthesis = analysis.with_centers(centers, target)
    return analysis, synthesis


def stretch_plan(
    analysis: WindowSequence, synthesis: WindowSequence, rate: float
) -> StretchPlan:
    """Freeze hops around transient frames at rate 1 and rescale the rest.

    Free hops follow the distances between ``synthesis`` centers, scaled by
    one common factor so that the output keeps the total length
    ``round(rate * L)``. Integer hops are obtained by rounding the cumulative
    positions. ``compensated_rate`` is the rate left for the free analysis
    hops once the frozen ones are taken out.
    """
    rate = check_rate(rate)
    if len(analysis) != len(synthesis):
        raise ShapeMismatch(
            f"analysis has {len(analysis)} frames, synthesis {len(synthesis)}"
        )
    target = round(rate * analysis.length)
    hops = np.diff(analysis.centers, append=analysis.length).astype(np.float64)

    frozen = np.zeros(hops.size, dtype=bool)
    flagged = np.flatnonzero(analysis.transient)
    frozen[flagged] = True
    frozen[flagged - 1] = True

    frozen_total = hops[frozen].sum()
    free_total = hops[~frozen].sum()
    minimum = (frozen_total + np.count_nonzero(~frozen)) / analysis.length
    if free_total == 0:
        if frozen_total != target:
            raise InfeasibleRate(rate, minimum, "every hop is frozen by a transient")
        compensated = 1.0
    else:
        compensated = (target - frozen_total) / free_total
        if compensated <= 0:
            raise InfeasibleRate(rate, minimum, "transient spans exceed target length")

    distances = np.diff(synthesis.centers, append=synthesis.length)
    free_distance = distances[~frozen].sum()
    factor = (target - frozen_total) / free_distance if free_total else 0.0
    scaled = np.where(frozen, hops, factor * distances)
    positions = np.round(np.concatenate([[0.0], np.cumsum(scaled)])).astype(np.int64)
    positions[-1] = target
    if np.any(np.diff(positions) < 1):
        raise InfeasibleRate(rate, minimum, "a synthesis hop rounds to zero")

    plan = StretchPlan(analysis, positions[:-1], rate, float(compensated), target)
    logger.debug(
        f"Stretch plan: rate {rate}, compensated {compensated:.6f}, "
        f"{int(frozen.sum())} frozen hop(s), target {target} samples"
    )
    return plan
