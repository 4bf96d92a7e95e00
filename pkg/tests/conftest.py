import numpy as np
import pytest

from timestretch.signal.io import Signal


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def wav_path(tmp_path):
    return tmp_path / "signal.wav"


def click_train(
    length: int = 32000,
    spacing: int = 4000,
    first: int = 4000,
    sample_rate: int = 16000,
) -> tuple[Signal, np.ndarray]:
    """Unit impulses every ``spacing`` samples starting at ``first``."""
    positions = np.arange(first, length - spacing // 2, spacing)
    samples = np.zeros(length)
    samples[positions] = 1.0
    return Signal(samples, sample_rate), positions


def relative_error(reference: np.ndarray, estimate: np.ndarray) -> float:
    return float(np.linalg.norm(reference - estimate) / np.linalg.norm(reference))
