import os
from pathlib import Path
from typing import NamedTuple

import numpy as np
from loguru import logger

from ..config import SpectrogramConfig
from ..errors import IoError
from ..signal.io import Signal
from ..transforms.gabor import (
    GaborFrame,
    compatible_length,
    iter_dgt_blocks,
    pad_signal,
)
from ..transforms.windows import hann_window


class Spectrogram(NamedTuple):
    values: np.ndarray
    hop: int
    channels: int
    sample_rate: int


def _samples(signal: Signal | np.ndarray) -> np.ndarray:
    return signal.samples if isinstance(signal, Signal) else np.asarray(signal)


def _frame(length: int, config: SpectrogramConfig, extra: int = 0) -> GaborFrame:
    padded = compatible_length(length, config.hop, config.channels, extra=extra)
    window = hann_window(config.window_length)
    return GaborFrame(window, config.hop, config.channels, padded)


def error_measure(
    reference: Signal | np.ndarray,
    estimate: Signal | np.ndarray,
    config: SpectrogramConfig | None = None,
) -> float:
    """Relative L2 distance of DGT magnitudes, ``|| |S_ref| - |S| || / || |S_ref| ||``.

    Both signals are zero-padded to a common length before analysis.
    """
    config = config or SpectrogramConfig()
    first = _samples(reference)
    second = _samples(estimate)
    frame = _frame(max(first.size, second.size), config, extra=config.window_length)
    first, _ = pad_signal(first, frame.length)
    second, _ = pad_signal(second, frame.length)

    difference = 0.0
    energy = 0.0
    for left, right in zip(
        iter_dgt_blocks(first, frame), iter_dgt_blocks(second, frame), strict=True
    ):
        magnitudes = np.abs(left)
        difference += float(np.sum((magnitudes - np.abs(right)) ** 2))
        energy += float(np.sum(magnitudes**2))
    if energy == 0:
        if difference == 0:
            return 0.0
        logger.warning("Reference signal is silent; error measure is infinite")
        return float("inf")
    return float(np.sqrt(difference / energy))


def spectrogram(signal: Signal, config: SpectrogramConfig | None = None) -> Spectrogram:
    """dB magnitudes of bins ``0..M/2`` per frame, floored at ``config.floor_db``."""
    config = config or SpectrogramConfig()
    frame = _frame(len(signal), config)
    padded, _ = pad_signal(signal.samples, frame.length)
    floor = 10 ** (config.floor_db / 20)
    columns = [
        20 * np.log10(np.maximum(np.abs(block[: config.channels // 2 + 1]), floor))
        for block in iter_dgt_blocks(padded, frame)
    ]
    return Spectrogram(
        np.concatenate(columns, axis=1), config.hop, config.channels, signal.sample_rate
    )


def spectrogram_export(
    signal: Signal,
    path: str | os.PathLike,
    config: SpectrogramConfig | None = None,
) -> Spectrogram:
    """Write the spectrogram as CSV: one row per channel, one column per frame."""
    path = Path(path)
    result = spectrogram(signal, config)
    header = (
        f"hop={result.hop},channels={result.channels},sample_rate={result.sample_rate}"
    )
    try:
        np.savetxt(path, result.values, fmt="%.6f", delimiter=",", header=header)
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    logger.debug(f"Wrote {result.values.shape} spectrogram to {path}")
    return result


def read_spectrogram(path: str | os.PathLike) -> Spectrogram:
    path = Path(path)
    try:
        with path.open() as handle:
            header = handle.readline().lstrip("#").strip()
        values = np.loadtxt(path, delimiter=",", ndmin=2)
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    fields = dict(item.split("=") for item in header.split(","))
    return Spectrogram(
        values, int(fields["hop"]), int(fields["channels"]), int(fields["sample_rate"])
    )
