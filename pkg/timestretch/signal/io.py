import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import soundfile as sf
from loguru import logger

from ..errors import CorruptFile, InvalidSignal, IoError, UnsupportedFormat

_SUPPORTED_SUBTYPES = {"PCM_16", "FLOAT"}
_SUPPORTED_CONTAINERS = {"WAV", "WAVEX"}


@dataclass(frozen=True)
class Signal:
    """Mono real-valued sample buffer together with its sample rate."""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64)
        if samples.ndim != 1 or samples.size == 0:
            raise InvalidSignal(
                f"expected a non-empty 1-D sample vector, got shape {samples.shape}"
            )
        if not np.isfinite(samples).all():
            raise InvalidSignal("signal contains NaN or Inf samples")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate <= 0:
            raise InvalidSignal(f"invalid sample rate {self.sample_rate}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def with_samples(self, samples: np.ndarray) -> "Signal":
        return Signal(samples, self.sample_rate)


def _check_riff(path: Path) -> None:
    data = path.read_bytes()
    if len(data) < 12:
        raise CorruptFile(f"{path}: file too short for a RIFF header")
    riff, _, wave = struct.unpack("<4sI4s", data[:12])
    if riff != b"RIFF" or wave != b"WAVE":
        raise UnsupportedFormat(f"{path}: not a RIFF/WAVE file")
    offset = 12
    while offset < len(data):
        if offset + 8 > len(data):
            raise CorruptFile(f"{path}: truncated chunk header at byte {offset}")
        chunk_id, size = struct.unpack("<4sI", data[offset : offset + 8])
        end = offset + 8 + size
        if end > len(data):
            raise CorruptFile(
                f"{path}: chunk {chunk_id!r} declares {size} bytes "
                f"but only {len(data) - offset - 8} remain"
            )
        offset = end + (size % 2)


def read_wav(path: str | os.PathLike) -> Signal:
    path = Path(path)
    if not path.is_file():
        raise IoError(f"input file not found: {path}")
    _check_riff(path)
    try:
        info = sf.info(str(path))
    except RuntimeError as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    if info.format not in _SUPPORTED_CONTAINERS or info.subtype not in (
        _SUPPORTED_SUBTYPES
    ):
        raise UnsupportedFormat(
            f"{path}: {info.format}/{info.subtype} is not PCM 16-bit or float 32-bit"
        )
    if info.channels not in (1, 2):
        raise UnsupportedFormat(f"{path}: {info.channels} channels, expected 1 or 2")
    try:
        data, rate = sf.read(str(path), dtype="float64", always_2d=True)
    except RuntimeError as exc:
        raise CorruptFile(f"{path}: {exc}") from exc
    if data.shape[0] == 0:
        raise CorruptFile(f"{path}: no audio frames")
    samples = data.mean(axis=1) if data.shape[1] > 1 else data[:, 0]
    logger.debug(
        f"Read {path}: {data.shape[0]} frames, {info.channels} channel(s), "
        f"{info.subtype} at {rate} Hz"
    )
    return Signal(samples, rate)


def write_wav(path: str | os.PathLike, signal: Signal) -> None:
    """Write ``signal`` as IEEE float 32-bit mono; no clipping is applied."""
    path = Path(path)
    try:
        sf.write(
            str(path),
            signal.samples.astype(np.float32),
            signal.sample_rate,
            subtype="FLOAT",
            format="WAV",
        )
    except (RuntimeError, OSError) as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc
    logger.debug(f"Wrote {path}: {len(signal)} samples at {signal.sample_rate} Hz")
