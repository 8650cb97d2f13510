"""Additive synthesis of test material and bundled interference clips.

Provides deterministic stand-ins for real recordings: harmonic notes and
chords rendered with a handful of timbres, plus four short synthetic
interference sounds (a filtered noise burst, a low-frequency thump, a
broadband scrape and a bouncing impulse train).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal


class SynthError(ValueError):
    """Invalid synthesis request, for example partials above Nyquist."""


A3_HZ = 220.0


def pitch_hz(semitones: float, reference: float = A3_HZ) -> float:
    """Frequency of a pitch given in semitones relative to A3."""
    return reference * 2.0 ** (semitones / 12.0)


@dataclass(frozen=True)
class Timbre:
    """Partial recipe of the additive synthesizer."""

    name: str
    n_partials: int
    partial_decay: float = 1.0
    even_weight: float = 1.0


TIMBRES = (
    Timbre("bright", n_partials=10, partial_decay=1.0),
    Timbre("mellow", n_partials=6, partial_decay=2.0),
    Timbre("reedy", n_partials=9, partial_decay=1.3, even_weight=0.4),
    Timbre("thin", n_partials=4, partial_decay=0.7),
)


def synthesize_note(
    f0: float,
    duration: float,
    sample_rate: float,
    n_partials: int = 8,
    partial_decay: float = 1.0,
    amplitude: float = 1.0,
    even_weight: float = 1.0,
    ramp: float = 0.015,
) -> np.ndarray:
    """One harmonic note: partials at k*f0 with amplitudes 1/k**partial_decay.

    Attack and release are linear ramps of ``ramp`` seconds (at least 10 ms).
    Raises :class:`SynthError` when the highest partial would alias.
    """
    if f0 <= 0 or duration <= 0:
        raise SynthError("f0 and duration must be positive")
    if n_partials < 1:
        raise SynthError("need at least one partial")
    if f0 * n_partials >= sample_rate / 2.0:
        raise SynthError(
            f"partial {n_partials} of f0={f0:.1f} Hz reaches "
            f"{f0 * n_partials:.1f} Hz, at or above Nyquist"
        )
    if ramp < 0.010:
        raise SynthError("ramps shorter than 10 ms click audibly")
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    x = np.zeros(n)
    for k in range(1, n_partials + 1):
        w = amplitude / k**partial_decay
        if k % 2 == 0:
            w *= even_weight
        x += w * np.sin(2.0 * np.pi * k * f0 * t + 0.37 * k)
    r = min(int(round(ramp * sample_rate)), n // 2)
    if r > 0:
        env = np.ones(n)
        env[:r] = np.arange(1, r + 1) / r
        env[-r:] = env[:r][::-1]
        x *= env
    return x


def render_events(
    events,
    sample_rate: float,
    timbre: Timbre = TIMBRES[0],
    lead: float = 0.15,
    amplitude: float = 0.8,
):
    """Render a sequence of (frequencies, duration) events back to back.

    Each event may hold one frequency (a note) or several (a chord). Returns
    the samples together with the (start, end) sample span of every event.
    """
    head = int(round(lead * sample_rate))
    chunks = [np.zeros(head)]
    spans = []
    cursor = head
    for freqs, duration in events:
        freqs = tuple(float(f) for f in np.atleast_1d(freqs))
        note = None
        for f0 in freqs:
            n_part = min(timbre.n_partials, int((sample_rate / 2.0 - 1.0) // f0))
            if n_part < 1:
                raise SynthError(f"fundamental {f0:.1f} Hz is above Nyquist")
            tone = synthesize_note(
                f0,
                duration,
                sample_rate,
                n_partials=n_part,
                partial_decay=timbre.partial_decay,
                amplitude=amplitude / len(freqs),
                even_weight=timbre.even_weight,
            )
            note = tone if note is None else note + tone
        chunks.append(note)
        spans.append((cursor, cursor + len(note)))
        cursor += len(note)
    chunks.append(np.zeros(head))
    return np.concatenate(chunks), spans


INTERFERENCE_KINDS = ("cough", "door_slam", "chair_drag", "drop")


def interference_clip(
    kind: str, sample_rate: float, duration: float = 0.4, seed: int = 0
) -> np.ndarray:
    """One synthetic interference sound, normalized to unit RMS.

    Kinds: "cough" (band-passed noise burst), "door_slam" (low-frequency
    thump), "chair_drag" (modulated broadband scrape), "drop" (decaying
    impulse train).
    """
    if kind not in INTERFERENCE_KINDS:
        raise SynthError(f"unknown interference kind {kind!r}")
    rng = np.random.default_rng(seed + 1000 * INTERFERENCE_KINDS.index(kind))
    n = int(round(duration * sample_rate))
    t = np.arange(n) / sample_rate
    nyq = sample_rate / 2.0
    if kind == "cough":
        noise = rng.standard_normal(n)
        b, a = scipy.signal.butter(4, [300 / nyq, 1800 / nyq], btype="band")
        x = scipy.signal.lfilter(b, a, noise)
        env = (t / 0.03) * np.exp(1.0 - t / 0.03) + 0.4 * np.exp(
            -((t - 0.55 * duration) ** 2) / (2 * 0.04**2)
        )
        x *= env
    elif kind == "door_slam":
        thump = np.cos(2 * np.pi * 62.0 * t) * np.exp(-t / 0.08)
        b, a = scipy.signal.butter(4, 350 / nyq, btype="low")
        rumble = scipy.signal.lfilter(b, a, rng.standard_normal(n)) * np.exp(-t / 0.05)
        x = thump + 0.5 * rumble
    elif kind == "chair_drag":
        noise = rng.standard_normal(n)
        b, a = scipy.signal.butter(2, [120 / nyq, min(6000, nyq * 0.9) / nyq], btype="band")
        x = scipy.signal.lfilter(b, a, noise)
        x *= 0.7 + 0.3 * np.sin(2 * np.pi * 9.0 * t)
        fade = min(int(0.05 * sample_rate), n // 4)
        env = np.ones(n)
        env[:fade] = np.linspace(1.0 / fade, 1.0, fade)
        env[-fade:] = env[:fade][::-1]
        x *= env
    elif kind == "drop":
        x = np.zeros(n)
        pos, gap, amp = 0, 0.11, 1.0
        while pos < n and gap > 0.015:
            hit = rng.standard_normal(max(int(0.012 * sample_rate), 8))
            hit *= np.exp(-np.arange(len(hit)) / (0.003 * sample_rate))
            end = min(pos + len(hit), n)
            x[pos:end] += amp * hit[: end - pos]
            pos += int(gap * sample_rate)
            gap *= 0.62
            amp *= 0.7
    else:
        raise SynthError(f"unknown interference kind {kind!r}")
    rms = float(np.sqrt(np.mean(x**2)))
    if rms == 0:
        raise SynthError("degenerate interference clip")
    return x / rms


# Pitches as semitone offsets from A3. Every event list holds at least one
# pitch occurring three times (a safely repeated target) and one interior
# pitch occurring once (a non-repeated target).
MELODIES = (
    ((0,), (3,), (0,), (7,), (0,), (3,), (5,)),
    ((2,), (2,), (10,), (5,), (2,), (5,), (9,)),
    ((-5,), (0,), (4,), (0,), (-5,), (0,), (2,)),
    ((7,), (12,), (7,), (3,), (7,), (12,), (0,)),
    ((5,), (8,), (5,), (12,), (1,), (5,), (8,)),
)

CHORD_PROGRESSIONS = (
    ((0, 4, 7), (5, 9, 12), (0, 4, 7), (7, 11, 14), (0, 4, 7), (5, 9, 12), (2, 5, 9)),
    ((-3, 0, 4), (2, 5, 9), (-3, 0, 4), (4, 7, 11), (-3, 0, 4), (2, 5, 9), (0, 3, 7)),
    ((0, 3, 7), (5, 8, 12), (0, 3, 7), (-2, 2, 5), (0, 3, 7), (5, 8, 12), (3, 7, 10)),
    ((4, 7, 11), (0, 4, 7), (4, 7, 11), (9, 12, 16), (4, 7, 11), (0, 4, 7), (5, 9, 12)),
    ((2, 6, 9), (7, 10, 14), (2, 6, 9), (-1, 2, 6), (2, 6, 9), (7, 10, 14), (4, 8, 11)),
)


def melody_events(index: int, note_duration: float = 0.6):
    """Event list (frequencies, duration) for one of the bundled melodies."""
    pattern = MELODIES[index % len(MELODIES)]
    return tuple((tuple(pitch_hz(s) for s in ev), note_duration) for ev in pattern)


def chord_events(index: int, note_duration: float = 0.6):
    """Event list for one of the bundled chord progressions."""
    pattern = CHORD_PROGRESSIONS[index % len(CHORD_PROGRESSIONS)]
    return tuple((tuple(pitch_hz(s) for s in ev), note_duration) for ev in pattern)
