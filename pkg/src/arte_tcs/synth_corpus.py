"""Deterministic synthetic road audio.

Each road class is an AR-filtered excitation built from a resonant pole
pair shared by every class plus a class-specific pair; stone and gravel
add dense impulse bursts on top of the white drive. A shared broadband
noise bed at 10 dB SNR keeps the classes from separating trivially.
"""

import os
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .arte_dsp import AudioClip, extract_raw, mix_noise, sample_frames, write_wav
from .arte_classifier import FeatureDataset
from .errors import ConfigError
from .tire_road import RoadType

DEFAULT_SAMPLE_RATE = 16000
DEFAULT_DURATION_S = 3.5
FRAMES_PER_CLASS = 30
OVERLAP_SNR_DB = 10.0


@dataclass(frozen=True)
class ClassSpec:
    road: RoadType
    poles: tuple
    excitation: str = "white"
    impulse_rate: float = 0.0
    gain: float = 1.0

    def validate(self):
        if not 2 <= len(self.poles) <= 4:
            raise ConfigError("need 2-4 AR poles, got %d" % len(self.poles))
        if any(abs(p) >= 1.0 for p in self.poles):
            raise ConfigError("AR poles must lie inside the unit circle")
        if self.excitation not in ("white", "impulsive"):
            raise ConfigError("excitation must be 'white' or 'impulsive'")
        if self.excitation == "impulsive" and self.impulse_rate <= 0.0:
            raise ConfigError("impulsive excitation needs a positive rate")
        if self.gain <= 0.0:
            raise ConfigError("gain must be positive")
        return self


def _pair(freq_hz, radius, sample_rate=DEFAULT_SAMPLE_RATE):
    theta = 2.0 * np.pi * freq_hz / sample_rate
    p = radius * np.exp(1j * theta)
    return (p, np.conj(p))


# Every class carries the same 1 kHz body resonance; only the second
# pole pair and the excitation statistics identify the surface.
_SHARED = _pair(1000.0, 0.88)

DEFAULT_SPECS = {
    RoadType.ASPHALT: ClassSpec(RoadType.ASPHALT,
                                _SHARED + _pair(800.0, 0.80)),
    RoadType.STONE: ClassSpec(RoadType.STONE,
                              _SHARED + _pair(1800.0, 0.80),
                              excitation="impulsive", impulse_rate=160.0),
    RoadType.GRAVEL: ClassSpec(RoadType.GRAVEL,
                               _SHARED + _pair(1200.0, 0.80),
                               excitation="impulsive", impulse_rate=320.0),
    RoadType.SNOW: ClassSpec(RoadType.SNOW,
                             _SHARED + _pair(300.0, 0.80)),
}


def synth_clip(spec, duration_s=DEFAULT_DURATION_S,
               sample_rate=DEFAULT_SAMPLE_RATE, seed=0):
    """AR-filtered excitation, peak-normalized to 0.9, labeled."""
    spec.validate()
    if duration_s < 0.5:
        raise ConfigError("clip duration must be at least 0.5 s")
    n = int(round(duration_s * sample_rate))
    rng = np.random.default_rng(seed)
    drive = spec.gain * rng.standard_normal(n)
    if spec.excitation == "impulsive":
        hits = rng.random(n) < spec.impulse_rate / sample_rate
        count = int(hits.sum())
        drive[hits] += (rng.uniform(3.0, 6.0, count)
                        * rng.choice((-1.0, 1.0), count))
    a = np.poly(spec.poles)
    if np.max(np.abs(a.imag)) > 1e-9:
        raise ConfigError("AR poles must come in conjugate pairs")
    x = lfilter([1.0], a.real, drive)
    x *= 0.9 / np.max(np.abs(x))
    return AudioClip(samples=x, sample_rate=sample_rate,
                     label=spec.road).validate()


def overlap_noise(n, sample_rate=DEFAULT_SAMPLE_RATE, seed=0):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x *= 0.9 / np.max(np.abs(x))
    return AudioClip(samples=x, sample_rate=sample_rate)


def class_clip(road, seed=0, duration_s=DEFAULT_DURATION_S,
               sample_rate=DEFAULT_SAMPLE_RATE, specs=None,
               snr_db=OVERLAP_SNR_DB):
    """One noisy labeled clip for a road class, deterministic in seed."""
    specs = DEFAULT_SPECS if specs is None else specs
    k = list(RoadType).index(road)
    clip = synth_clip(specs[road], duration_s, sample_rate,
                      seed=1000 * seed + k)
    noise = overlap_noise(len(clip.samples), sample_rate,
                          seed=1000 * seed + 999)
    return mix_noise(clip, noise, snr_db)


def build_corpus(seed=0, frames_per_class=FRAMES_PER_CLASS,
                 duration_s=DEFAULT_DURATION_S,
                 sample_rate=DEFAULT_SAMPLE_RATE, specs=None,
                 snr_db=OVERLAP_SNR_DB):
    """Labeled 20-dim feature rows, frames_per_class per road."""
    rows, labels = [], []
    for k, road in enumerate(RoadType):
        clip = class_clip(road, seed, duration_s, sample_rate, specs, snr_db)
        frames = sample_frames(clip, frames_per_class,
                               seed=1000 * seed + 500 + k)
        for frame in frames:
            rows.append(extract_raw(frame))
            labels.append(road)
    ds = FeatureDataset(np.vstack(rows), labels).validate()
    return ds.fit_normalization()


def export_wavs(root, seed=0, clips_per_class=1,
                duration_s=DEFAULT_DURATION_S,
                sample_rate=DEFAULT_SAMPLE_RATE, specs=None,
                snr_db=OVERLAP_SNR_DB):
    """Write `<root>/<road>/<seed>_<index>.wav` files; returns the paths."""
    specs = DEFAULT_SPECS if specs is None else specs
    paths = []
    for road in RoadType:
        sub = os.path.join(root, road.name.lower())
        os.makedirs(sub, exist_ok=True)
        for i in range(clips_per_class):
            clip = class_clip(road, seed + i, duration_s, sample_rate,
                              specs, snr_db)
            path = os.path.join(sub, "%d_%d.wav" % (seed, i))
            write_wav(path, clip)
            paths.append(path)
    return paths
