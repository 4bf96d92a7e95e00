import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from timestretch.errors import InvalidLength, NotAFrame, ShapeMismatch
from timestretch.transforms.gabor import (
    GaborFrame,
    dgt_analyze,
    dgt_diagonal,
    dgt_synthesize,
    painless_dual_window,
)
from timestretch.transforms.nsgt import (
    NsgSystem,
    canonical_dual_windows,
    dump_coefficients,
    frame_diagonal,
    nsgt_analyze,
    nsgt_synthesize,
    redundancy,
    uniform_system,
)
from timestretch.transforms.windows import hann_window, rectangular_window


def random_system(rng: np.random.Generator, max_length: int = 8192) -> NsgSystem:
    """Painless Hann system whose windows always cover the gaps between centers."""
    length = int(rng.integers(256, max_length + 1))
    hops = rng.integers(8, 65, size=length // 8)
    centers = np.concatenate([[0], np.cumsum(hops)])
    centers = centers[centers < length]
    widest_gap = max(int(np.diff(centers).max(initial=0)), length - int(centers[-1]))
    lengths = 2 * widest_gap + 2 * rng.integers(1, 40, size=3)
    assignment = rng.integers(0, 3, size=centers.size)
    assignment[:3] = [0, 1, 2]
    channels = lengths[assignment] + 2 * rng.integers(0, 20, size=centers.size)
    return NsgSystem(
        windows=tuple(hann_window(int(n)) for n in lengths),
        centers=centers,
        assignment=assignment,
        channels=channels,
        length=length,
    )


def naive_nsgt(samples: np.ndarray, system: NsgSystem) -> list[np.ndarray]:
    rows = []
    for center, j, channels in zip(
        system.centers, system.assignment, system.channels, strict=True
    ):
        window = system.windows[j]
        half = window.size // 2
        row = np.zeros(channels, dtype=np.complex128)
        for m in range(channels):
            for k, value in enumerate(window):
                offset = k - half
                phase = np.exp(-2j * np.pi * m * offset / channels)
                row[m] += samples[(center + offset) % system.length] * value * phase
        rows.append(row)
    return rows


def test_perfect_reconstruction_on_random_systems(rng):
    for _ in range(100):
        system = random_system(rng)
        samples = rng.standard_normal(system.length)
        output = nsgt_synthesize(nsgt_analyze(samples, system), system)
        error = np.linalg.norm(output - samples) / np.linalg.norm(samples)
        assert error <= 1e-10


def test_complex_reconstruction(rng):
    system = random_system(rng, max_length=1024)
    samples = rng.standard_normal(system.length) + 1j * rng.standard_normal(
        system.length
    )
    output = nsgt_synthesize(nsgt_analyze(samples, system), system, real=False)
    assert_allclose(output, samples, atol=1e-10)


def test_matches_naive_sum(rng):
    for _ in range(5):
        system = random_system(rng, max_length=512)
        samples = rng.standard_normal(system.length)
        coefficients = nsgt_analyze(samples, system)
        for row, expected in zip(
            coefficients.rows, naive_nsgt(samples, system), strict=True
        ):
            assert_allclose(row, expected, atol=1e-10)


def test_uniform_system_matches_dgt(rng):
    frame = GaborFrame(hann_window(64), 16, 64, 1024)
    system = uniform_system(frame)
    samples = rng.standard_normal(1024)
    dgt = dgt_analyze(samples, frame).coefficients
    nsgt = nsgt_analyze(samples, system)
    assert_allclose(np.stack(nsgt.rows, axis=1), dgt, atol=1e-10)
    assert_allclose(frame_diagonal(system).values, dgt_diagonal(frame))
    assert_allclose(
        nsgt_synthesize(nsgt, system),
        dgt_synthesize(dgt, 16, painless_dual_window(frame)),
        atol=1e-10,
    )


def test_impulse_at_first_center():
    system = NsgSystem(
        windows=(hann_window(16), hann_window(32)),
        centers=[0, 8, 24, 40],
        assignment=[0, 1, 1, 0],
        channels=[16, 32, 32, 16],
        length=64,
    )
    samples = np.zeros(64)
    samples[0] = 1.0
    assert_allclose(nsgt_analyze(samples, system)[0], np.ones(16), atol=1e-14)


def test_single_rectangular_frame():
    system = NsgSystem((rectangular_window(64),), [0], [0], [64], 64)
    diagonal = frame_diagonal(system)
    assert_allclose(diagonal.values, 64.0)
    assert diagonal.minimum == 64.0
    assert redundancy(system) == 1.0


def test_uniform_redundancy():
    frame = GaborFrame(hann_window(1024), 256, 1024, 8192)
    assert redundancy(uniform_system(frame)) == 4.0


def test_gap_is_reported_then_rejected():
    system = NsgSystem((rectangular_window(8),), [0, 32], [0, 0], [8, 8], 64)
    diagonal = frame_diagonal(system)
    assert diagonal.minimum == 0.0
    assert np.count_nonzero(diagonal.values == 0) == 48
    coefficients = nsgt_analyze(np.ones(64), system)
    with pytest.raises(NotAFrame):
        nsgt_synthesize(coefficients, system)


def test_explicit_duals_match_division(rng):
    system = random_system(rng, max_length=2048)
    samples = rng.standard_normal(system.length)
    coefficients = nsgt_analyze(samples, system)
    duals = canonical_dual_windows(system)
    assert_allclose(
        nsgt_synthesize(coefficients, system, duals=duals),
        nsgt_synthesize(coefficients, system),
        atol=1e-12,
    )


def test_zero_coefficients(rng):
    system = random_system(rng, max_length=1024)
    rows = [np.zeros(m, dtype=complex) for m in system.channels]
    assert_allclose(nsgt_synthesize(rows, system), 0.0)


def test_system_validation():
    with pytest.raises(ShapeMismatch):
        NsgSystem((hann_window(8),), [4, 2], [0, 0], [8, 8], 16)
    with pytest.raises(ShapeMismatch):
        NsgSystem((hann_window(8), hann_window(4)), [0, 8], [0, 0], [8, 8], 16)
    with pytest.raises(InvalidLength):
        NsgSystem((hann_window(8),), [0, 8], [0, 0], [4, 8], 16)
    with pytest.raises(ShapeMismatch):
        NsgSystem((hann_window(8),), [0, 8], [0, 0], [8, 8, 8], 16)


def test_odd_channel_counts_round_up():
    system = NsgSystem((hann_window(8),), [0, 8], [0, 0], [9, 8], 16)
    assert system.channels.tolist() == [10, 8]


def test_row_shape_is_checked(rng):
    system = random_system(rng, max_length=512)
    rows = [np.zeros(m + 2, dtype=complex) for m in system.channels]
    with pytest.raises(ShapeMismatch):
        nsgt_synthesize(rows, system)


def test_dump_coefficients(tmp_path, rng):
    system = NsgSystem(
        (hann_window(8), hann_window(16)), [0, 8, 16], [0, 1, 0], [8, 16, 8], 32
    )
    coefficients = nsgt_analyze(rng.standard_normal(32), system)

    csv = tmp_path / "coefs.csv"
    dump_coefficients(coefficients, csv)
    table = np.loadtxt(csv, delimiter=",", skiprows=1)
    assert table.shape == (32, 4)
    assert_allclose(table[8:24, 2] + 1j * table[8:24, 3], coefficients[1], atol=1e-8)

    records = tmp_path / "coefs.json"
    dump_coefficients(coefficients, records)
    loaded = json.loads(records.read_text())
    assert loaded["channels"] == [8, 16, 8]
    assert len(loaded["rows"][1]["real"]) == 16
