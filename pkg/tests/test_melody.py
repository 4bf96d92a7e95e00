import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal
from pydantic import ValidationError

from timestretch.errors import InvalidRate
from timestretch.evaluation.melody import (
    MelodySpec,
    Note,
    key_frequency,
    perfect_stretch,
    synth_melody,
)


def test_key_frequency():
    assert key_frequency(49) == pytest.approx(440.0)
    assert key_frequency(61) == pytest.approx(880.0)


def test_single_flat_note_is_a_sinusoid():
    spec = MelodySpec(notes=[Note(key=49, duration=0.5)], amplitudes=[1.0, 0, 0, 0])
    signal = synth_melody(spec)
    t = np.arange(8000) / 16000
    assert_allclose(signal.samples, np.sin(2 * np.pi * 440 * t), atol=1e-12)


def test_length_is_the_total_duration():
    spec = MelodySpec.random(11)
    assert len(synth_melody(spec)) == round(spec.duration * 16000)
    assert spec.length == len(synth_melody(spec))


def test_partials_above_nyquist_are_dropped():
    note = Note(key=88, duration=0.25)
    full = synth_melody(MelodySpec(notes=[note], amplitudes=[1.0, 1.0]))
    fundamental = synth_melody(MelodySpec(notes=[note], amplitudes=[1.0]))
    assert_allclose(full.samples, fundamental.samples)


def test_random_melodies():
    spec = MelodySpec.random(7)
    assert spec == MelodySpec.random(7)
    assert 4 <= len(spec.notes) <= 10
    assert {note.duration for note in spec.notes} <= {0.5, 1.0}
    steps = np.diff([note.key for note in spec.notes])
    assert np.all(np.isin(np.abs(steps), [1, 2]))
    for note in spec.notes:
        assert 0.005 <= note.attack <= 0.030
        assert 0.020 <= note.release <= 0.100


def test_perfect_stretch_at_rate_one():
    spec = MelodySpec.random(2)
    assert_array_equal(perfect_stretch(spec, 1.0).samples, synth_melody(spec).samples)


def test_perfect_stretch_scales_durations_only():
    spec = MelodySpec(notes=[Note(key=40, duration=0.5), Note(key=42, duration=1.0)])
    stretched = spec.stretched(2.0)
    assert [note.duration for note in stretched.notes] == [1.0, 2.0]
    assert [note.frequency for note in stretched.notes] == [
        note.frequency for note in spec.notes
    ]
    assert len(perfect_stretch(spec, 2.0)) == 48000


def test_perfect_stretch_rate_range():
    spec = MelodySpec.random(0)
    with pytest.raises(InvalidRate):
        perfect_stretch(spec, 4.0)
    with pytest.raises(InvalidRate):
        perfect_stretch(spec, 0.25)


def test_validation():
    with pytest.raises(ValidationError):
        Note(key=0, duration=1.0)
    with pytest.raises(ValidationError):
        MelodySpec(notes=[])
    with pytest.raises(ValidationError):
        MelodySpec(notes=[Note(key=40, duration=1.0)], amplitudes=[-1.0])
