"""Synthetic instrumented-knife streams for desk-scale testing.

The real dataset is available only on request, so this generator plants
contact signatures into a 100 Hz stream: proximity ramps down as the blade
approaches, sits low during contact, and recovers afterwards; the
accelerometer carries transients at contact boundaries and extra vibration
while cutting; gyro and magnetometer wander slowly.  Replicate-level
variation (signal levels, approach speed, raw channel offsets) emulates the
piece-to-piece differences that separate the by-replicate split from the
superficial one.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import NOMINAL_PERIOD_MS, Replicate

__all__ = ["SynthSpec", "synth_sensor_stream", "make_corpus"]


@dataclass(frozen=True)
class SynthSpec:
    """Recipe for one synthetic replicate."""

    id: str
    cut_type: str
    n_samples: int = 1462
    contact_intervals: tuple[tuple[float, float], ...] = ()  # (on_ms, off_ms), disjoint
    proximity_far: float = 180.0
    proximity_near: float = 40.0
    approach_ms: float = 120.0
    release_ms: float = 30.0
    descend_accel: float = 1.5
    accel_transient: float = 6.0
    transient_ms: float = 30.0
    contact_vibration: float = 1.2
    noise_proximity: float = 1.5
    noise_accel: float = 0.3
    noise_gyro: float = 0.2
    noise_mag: float = 0.15
    channel_offsets: tuple[float, ...] = (0.0,) * 10  # per-replicate raw offsets

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        last_off = -1.0
        for on, off in self.contact_intervals:
            if not on < off:
                raise ValueError(f"empty contact interval ({on}, {off})")
            if on <= last_off:
                raise ValueError("contact intervals overlap or are unordered")
            last_off = off
        if len(self.channel_offsets) != 10:
            raise ValueError("channel_offsets must have 10 entries")


def synth_sensor_stream(spec: SynthSpec, seed: int = 0) -> Replicate:
    """Generate one replicate from a spec; deterministic under the seed.

    The ground-truth contact column follows the planted intervals exactly,
    and with all noise amplitudes at zero the waveform is the exact planted
    signal.
    """
    rng = np.random.default_rng(seed)
    n = spec.n_samples
    t = np.arange(n, dtype=float) * NOMINAL_PERIOD_MS

    contact = np.zeros(n, np.uint8)
    for on, off in spec.contact_intervals:
        contact[(t >= on) & (t < off)] = 1

    # proximity: far baseline, linear approach ramp, low plateau, release ramp
    prox = np.full(n, spec.proximity_far)
    drop = spec.proximity_far - spec.proximity_near
    for on, off in spec.contact_intervals:
        if spec.approach_ms > 0:
            ramp = (t >= on - spec.approach_ms) & (t < on)
            prox[ramp] = spec.proximity_far - drop * (1.0 - (on - t[ramp]) / spec.approach_ms)
        prox[(t >= on) & (t < off)] = spec.proximity_near
        if spec.release_ms > 0:
            rel = (t >= off) & (t < off + spec.release_ms)
            prox = np.where(
                rel, np.minimum(prox, spec.proximity_near + drop * (t - off) / spec.release_ms), prox
            )

    accel = np.zeros((n, 3))
    for on, off in spec.contact_intervals:
        # the hand pauses, then drops into the cut just before contact and
        # retracts out of it after release; the drop occupies the 10-100 ms
        # pre-contact band, which is what makes imminent contact predictable
        accel[(t > on - 100.5) & (t <= on - 9.5), 2] -= spec.descend_accel
        accel[(t >= off) & (t < off + spec.release_ms), 2] += spec.descend_accel
        for boundary in (on, off):
            w = max(spec.transient_ms / 2.0, 1e-9)
            bump = spec.accel_transient * np.exp(-0.5 * ((t - boundary) / w) ** 2)
            accel[:, 2] += bump
            accel[:, 0] += 0.5 * bump
    in_contact = contact == 1
    if spec.contact_vibration > 0 and in_contact.any():
        accel[in_contact] += rng.normal(0.0, spec.contact_vibration, (int(in_contact.sum()), 3))

    # slow hand motion on the gyro, near-constant field on the magnetometer
    phase = 2.0 * np.pi * t / max(t[-1], 1.0)
    gyro = np.column_stack(
        [0.8 * np.sin(phase), 0.5 * np.sin(2.0 * phase + 1.0), 0.3 * np.cos(phase)]
    )
    mag = np.tile([32.0, -14.0, 47.0], (n, 1)).astype(float)

    features = np.column_stack([prox, accel, gyro, mag])
    sigmas = np.array(
        [spec.noise_proximity]
        + [spec.noise_accel] * 3
        + [spec.noise_gyro] * 3
        + [spec.noise_mag] * 3
    )
    if (sigmas > 0).any():
        features = features + rng.normal(0.0, 1.0, features.shape) * sigmas
    features = features + np.asarray(spec.channel_offsets)

    return Replicate(spec.id, spec.cut_type, t, features, contact)


# --- corpus builder ----------------------------------------------------------

_PATTERNS = {
    # (number of contact intervals, mean contact ms, mean gap ms)
    "slicing": (9, 1120.0, 420.0),
    "trimming": (3, 3400.0, 1200.0),
    "cubing": (15, 660.0, 260.0),
}


def _random_intervals(rng, n_samples: int, cut_type: str) -> tuple[tuple[float, float], ...]:
    n_int, mean_on, mean_gap = _PATTERNS[cut_type]
    horizon = n_samples * NOMINAL_PERIOD_MS
    intervals = []
    cursor = rng.uniform(0.6, 1.4) * mean_gap
    for _ in range(n_int):
        on_len = rng.uniform(0.6, 1.4) * mean_on
        if cursor + on_len > horizon - mean_gap:
            break
        intervals.append((round(cursor), round(cursor + on_len)))
        cursor += on_len + rng.uniform(0.6, 1.4) * mean_gap
    return tuple(intervals)


def make_corpus(
    replicates_per_type: int = 9,
    n_samples: int = 1462,
    drift: float = 0.0,
    seed: int = 0,
) -> list[Replicate]:
    """Build a corpus of synthetic replicates across the three cut types.

    `drift` scales replicate-to-replicate variation: contact proximity level,
    approach speed, transient strength, and raw channel offsets all vary
    between replicates when drift > 0, which is what makes unseen-replicate
    (rwt) evaluation harder than the superficial split.
    """
    rng = np.random.default_rng(seed)
    corpus = []
    for cut_type in _PATTERNS:
        for i in range(replicates_per_type):
            near = 40.0 + drift * rng.normal(0.0, 30.0)
            approach = 120.0 * (1.0 + drift * rng.uniform(-0.4, 0.4))
            transient = 6.0 * (1.0 + drift * rng.uniform(-0.6, 0.6))
            vibration = 1.2 * (1.0 + drift * rng.uniform(-0.7, 2.0))
            offsets = tuple(drift * rng.normal(0.0, 8.0, 10))
            spec = SynthSpec(
                id=f"{cut_type}-{i:02d}",
                cut_type=cut_type,
                n_samples=n_samples,
                contact_intervals=_random_intervals(rng, n_samples, cut_type),
                proximity_near=float(np.clip(near, 5.0, 120.0)),
                approach_ms=float(max(approach, 40.0)),
                accel_transient=float(max(transient, 1.0)),
                contact_vibration=float(max(vibration, 0.2)),
                noise_proximity=1.5 + drift * 12.0,
                channel_offsets=offsets,
            )
            corpus.append(synth_sensor_stream(spec, seed=int(rng.integers(2**31))))
    return corpus
