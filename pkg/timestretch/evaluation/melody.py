"""Synthetic melodies and their perfectly stretched counterparts."""

from __future__ import annotations

import numpy as np
from pydantic import BaseModel, Field, field_validator

from ..errors import InvalidRate
from ..signal.io import Signal

SAMPLE_RATE = 16000
NOTE_DURATIONS = (0.5, 1.0)
# rates for which the regenerated melody is taken as ground truth
PERFECT_RATE_RANGE = (0.5, 3.75)


def key_frequency(key: int) -> float:
    """Equal-tempered piano key ``key`` (A4 is key 49) in Hz."""
    return 440.0 * 2 ** ((key - 49) / 12)


class Note(BaseModel):
    key: int = Field(ge=1, le=88)
    duration: float = Field(gt=0)
    attack: float = Field(0.0, ge=0)
    release: float = Field(0.0, ge=0)
    phases: list[float] = Field(default_factory=lambda: [0.0] * 4)

    @property
    def frequency(self) -> float:
        return key_frequency(self.key)


class MelodySpec(BaseModel):
    seed: int | None = None
    sample_rate: int = Field(SAMPLE_RATE, gt=0)
    notes: list[Note] = Field(min_length=1)
    amplitudes: list[float] = Field(default_factory=lambda: [0.5**h for h in range(4)])

    @field_validator("amplitudes")
    @classmethod
    def _non_negative(cls, amplitudes: list[float]) -> list[float]:
        if not amplitudes or any(a < 0 for a in amplitudes):
            raise ValueError("harmonic amplitudes must be non-negative")
        return amplitudes

    @property
    def duration(self) -> float:
        return sum(note.duration for note in self.notes)

    @property
    def length(self) -> int:
        return round(self.duration * self.sample_rate)

    @classmethod
    def random(cls, seed: int) -> MelodySpec:
        """4 to 10 notes of 0.5 s or 1 s moving by one or two semitones."""
        rng = np.random.default_rng(seed)
        count = int(rng.integers(4, 11))
        key = int(rng.integers(33, 62))
        notes = []
        for _ in range(count):
            notes.append(
                Note(
                    key=key,
                    duration=float(rng.choice(NOTE_DURATIONS)),
                    attack=float(rng.uniform(0.005, 0.030)),
                    release=float(rng.uniform(0.020, 0.100)),
                    phases=rng.uniform(0, 2 * np.pi, 4).tolist(),
                )
            )
            key += int(rng.choice([-2, -1, 1, 2]))
            # reflect at the ends of the keyboard
            if key < 1:
                key = 2 - key
            elif key > 88:
                key = 176 - key
        return cls(seed=seed, notes=notes)

    def stretched(self, rate: float) -> MelodySpec:
        notes = [
            note.model_copy(
                update={
                    "duration": note.duration * rate,
                    "attack": note.attack * rate,
                    "release": note.release * rate,
                }
            )
            for note in self.notes
        ]
        return self.model_copy(update={"notes": notes})


def _envelope(count: int, attack: int, release: int) -> np.ndarray:
    if attack + release > count:
        scale = count / (attack + release)
        attack, release = int(attack * scale), int(release * scale)
    envelope = np.ones(count)
    if attack:
        envelope[:attack] = np.arange(attack) / attack
    if release:
        envelope[count - release :] = np.arange(release, 0, -1) / release
    return envelope


def synth_melody(spec: MelodySpec) -> Signal:
    rate = spec.sample_rate
    boundaries = np.round(
        np.cumsum([0.0] + [note.duration for note in spec.notes]) * rate
    ).astype(np.int64)
    samples = np.zeros(int(boundaries[-1]))
    spans = zip(spec.notes, boundaries[:-1], boundaries[1:], strict=True)
    for note, start, stop in spans:
        count = int(stop - start)
        if count == 0:
            continue
        t = np.arange(count) / rate
        tone = np.zeros(count)
        for h, amplitude in enumerate(spec.amplitudes):
            frequency = (h + 1) * note.frequency
            if amplitude == 0 or frequency >= rate / 2:
                continue
            phase = note.phases[h] if h < len(note.phases) else 0.0
            tone += amplitude * np.sin(2 * np.pi * frequency * t + phase)
        attack, release = round(note.attack * rate), round(note.release * rate)
        envelope = _envelope(count, attack, release)
        samples[start:stop] = envelope * tone
    return Signal(samples, rate)


def perfect_stretch(spec: MelodySpec, rate: float) -> Signal:
    """The melody regenerated with every duration and envelope time scaled."""
    low, high = PERFECT_RATE_RANGE
    if not (low <= rate <= high):
        raise InvalidRate(rate, f"[{low}, {high}]")
    return synth_melody(spec.stretched(rate))
