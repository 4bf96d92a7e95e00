import struct

import numpy as np
import pytest
import soundfile as sf
from numpy.testing import assert_allclose, assert_array_equal

from timestretch.errors import CorruptFile, InvalidSignal, IoError, UnsupportedFormat
from timestretch.signal.io import Signal, read_wav, write_wav


def test_signal_rejects_bad_input():
    with pytest.raises(InvalidSignal):
        Signal(np.zeros(0), 16000)
    with pytest.raises(InvalidSignal):
        Signal(np.zeros((2, 2)), 16000)
    with pytest.raises(InvalidSignal):
        Signal(np.array([0.0, np.nan]), 16000)
    with pytest.raises(InvalidSignal):
        Signal(np.zeros(4), 0)


def test_signal_is_read_only():
    signal = Signal([0.0, 1.0], 8000)
    assert signal.samples.dtype == np.float64
    assert len(signal) == 2
    assert signal.duration == pytest.approx(2 / 8000)
    with pytest.raises(ValueError):
        signal.samples[0] = 1.0


def test_read_pcm16_scaling(wav_path):
    sf.write(
        wav_path, np.array([0, 16384, -16384], dtype=np.int16), 16000, subtype="PCM_16"
    )
    signal = read_wav(wav_path)
    assert signal.sample_rate == 16000
    assert_array_equal(signal.samples, [0.0, 0.5, -0.5])


def test_read_stereo_is_averaged(wav_path):
    sf.write(wav_path, np.array([[1.0, 0.0]], dtype=np.float32), 16000, subtype="FLOAT")
    assert_array_equal(read_wav(wav_path).samples, [0.5])


def test_round_trip_float(wav_path, rng):
    samples = rng.uniform(-1, 1, 4410)
    write_wav(wav_path, Signal(samples, 44100))
    signal = read_wav(wav_path)
    assert signal.sample_rate == 44100
    assert len(signal) == samples.size
    assert np.max(np.abs(signal.samples - samples)) <= 2.0**-23


def test_write_single_zero(wav_path):
    write_wav(wav_path, Signal([0.0], 16000))
    info = sf.info(wav_path)
    assert info.subtype == "FLOAT"
    assert info.frames == 1


def test_write_does_not_clip(wav_path):
    write_wav(wav_path, Signal([2.0, -3.0], 16000))
    assert_allclose(read_wav(wav_path).samples, [2.0, -3.0])


def test_missing_file(tmp_path):
    with pytest.raises(IoError):
        read_wav(tmp_path / "missing.wav")


def test_not_riff(wav_path):
    wav_path.write_bytes(b"OggS" + b"\0" * 40)
    with pytest.raises(UnsupportedFormat):
        read_wav(wav_path)


def test_truncated_chunk(wav_path):
    header = struct.pack("<4sI4s", b"RIFF", 100, b"WAVE")
    wav_path.write_bytes(header + struct.pack("<4sI", b"fmt ", 16) + b"\0" * 4)
    with pytest.raises(CorruptFile):
        read_wav(wav_path)


def test_unsupported_subtype(wav_path):
    sf.write(wav_path, np.zeros(16), 16000, subtype="PCM_24")
    with pytest.raises(UnsupportedFormat):
        read_wav(wav_path)


def test_write_to_missing_directory(tmp_path):
    with pytest.raises(IoError):
        write_wav(tmp_path / "nowhere" / "out.wav", Signal([0.0], 16000))
