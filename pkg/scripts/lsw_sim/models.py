"""Value types shared by the simulator and the processing chain."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from .constants import (
    DECAY_LENGTH_M,
    DETECTION_CUTOFF_M,
    EXCITATION_AMPLITUDE,
    EXCITATION_FREQUENCY_HZ,
    LEAK_FRACTION,
    NOISE_REGIMES,
    SAMPLE_RATE_HZ,
    SOUND_SPEED_M_S,
    STANDING_WAVE_PHASE_RAD,
)


@dataclass(frozen=True)
class ExcitationConfig:
    """Continuous sinusoidal drive of the transmitting piezo."""

    frequency_hz: float = EXCITATION_FREQUENCY_HZ
    sample_rate_hz: float = SAMPLE_RATE_HZ
    amplitude: float = EXCITATION_AMPLITUDE

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if not 0 < self.frequency_hz < self.sample_rate_hz / 2:
            raise ValueError(
                f"frequency_hz {self.frequency_hz} violates Nyquist for {self.sample_rate_hz} Hz"
            )
        if self.amplitude < 0:
            raise ValueError(f"amplitude must be >= 0, got {self.amplitude}")

    @property
    def wavelength_m(self) -> float:
        return SOUND_SPEED_M_S / self.frequency_hz


@dataclass
class SampleBuffer:
    """
    Uniformly sampled real signal.

    carrier_hz is set on excitation buffers and carried through the channel
    so later stages know which wavelength shaped the proximity pattern.
    """

    samples: np.ndarray
    sample_rate_hz: float
    start_time_s: float = 0.0
    carrier_hz: Optional[float] = None

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64).reshape(-1)
        if self.sample_rate_hz <= 0:
            raise ValueError(f"sample_rate_hz must be positive, got {self.sample_rate_hz}")
        if not np.all(np.isfinite(self.samples)):
            raise ValueError("SampleBuffer samples must be finite")

    def __len__(self) -> int:
        return len(self.samples)

    @property
    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz

    @property
    def end_time_s(self) -> float:
        return self.start_time_s + self.duration_s

    def times(self) -> np.ndarray:
        return self.start_time_s + np.arange(len(self.samples)) / self.sample_rate_hz


@dataclass(frozen=True)
class DisturbanceEvent:
    """Carrier amplitude bump caused by a pose change altering the channel."""

    start_s: float
    duration_s: float
    magnitude: float


@dataclass(frozen=True)
class SelfDetectionEvent:
    """The arm's own linkage passing the surface at a virtual distance."""

    start_s: float
    duration_s: float
    equivalent_distance_m: float


@dataclass(frozen=True)
class ChannelModel:
    """Surface channel h, leaky field shape, noise levels and event schedules."""

    surface_gain: float = 1.0
    leak_fraction: float = LEAK_FRACTION
    sound_speed_m_s: float = SOUND_SPEED_M_S
    decay_length_m: float = DECAY_LENGTH_M
    detection_cutoff_m: float = DETECTION_CUTOFF_M
    mechanical_noise_level: float = NOISE_REGIMES['lab']['mechanical_noise_level']
    electrical_tone_level: float = NOISE_REGIMES['lab']['electrical_tone_level']
    floor_level: float = NOISE_REGIMES['lab']['floor_level']
    disturbance_events: Tuple[DisturbanceEvent, ...] = ()
    self_detection_events: Tuple[SelfDetectionEvent, ...] = ()
    rng_seed: int = 0
    phase_rad: float = STANDING_WAVE_PHASE_RAD

    def __post_init__(self):
        if not 0 < self.leak_fraction < 1:
            raise ValueError(f"leak_fraction must be in (0, 1), got {self.leak_fraction}")
        if self.decay_length_m <= 0:
            raise ValueError(f"decay_length_m must be positive, got {self.decay_length_m}")
        if self.detection_cutoff_m <= 0:
            raise ValueError(f"detection_cutoff_m must be positive, got {self.detection_cutoff_m}")
        if self.sound_speed_m_s <= 0:
            raise ValueError(f"sound_speed_m_s must be positive, got {self.sound_speed_m_s}")
        for name in ('mechanical_noise_level', 'electrical_tone_level', 'floor_level'):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    def with_reach(self, scale: float) -> 'ChannelModel':
        """Copy with the leaky-field reach (decay length and cutoff) scaled."""
        if scale <= 0:
            raise ValueError(f"reach scale must be positive, got {scale}")
        return dataclasses.replace(
            self,
            decay_length_m=self.decay_length_m * scale,
            detection_cutoff_m=self.detection_cutoff_m * scale,
        )

    def with_regime(self, regime: 'NoiseRegime') -> 'ChannelModel':
        return dataclasses.replace(
            self,
            mechanical_noise_level=regime.mechanical_noise_level,
            electrical_tone_level=regime.electrical_tone_level,
            floor_level=regime.floor_level,
        )

    def silent(self) -> 'ChannelModel':
        """Copy with every noise source switched off."""
        return dataclasses.replace(
            self, mechanical_noise_level=0.0, electrical_tone_level=0.0, floor_level=0.0
        )


@dataclass(frozen=True)
class NoiseRegime:
    """Background noise and robot-motion statistics of one recording condition."""

    name: str
    mechanical_noise_level: float
    electrical_tone_level: float
    floor_level: float
    disturbance_rate_hz: float = 0.0
    disturbance_magnitude_range: Tuple[float, float] = (0.0, 0.0)
    self_detection_rate_hz: float = 0.0

    @classmethod
    def preset(cls, name: str) -> 'NoiseRegime':
        if name not in NOISE_REGIMES:
            raise ValueError(f"Unknown noise regime '{name}', expected one of {sorted(NOISE_REGIMES)}")
        return cls(name=name, **NOISE_REGIMES[name])


@dataclass(frozen=True)
class ObstacleTrajectory:
    """
    Obstacle distance to the surface over time.

    Distances are piecewise-linear between knots and clamped outside them.
    The proximity term only exists inside present_interval_s.
    """

    knot_times_s: Tuple[float, ...]
    knot_distances_m: Tuple[float, ...]
    location_gain: float = 1.0
    present_interval_s: Tuple[float, float] = field(default=(0.0, float('inf')))

    def __post_init__(self):
        times = np.asarray(self.knot_times_s, dtype=float)
        dists = np.asarray(self.knot_distances_m, dtype=float)
        if times.size == 0 or times.shape != dists.shape:
            raise ValueError("trajectory needs matching, non-empty time and distance knots")
        if np.any(np.diff(times) <= 0):
            raise ValueError("trajectory knot times must be strictly increasing")
        if np.any(dists < 0):
            raise ValueError("trajectory distances must be >= 0")
        if not 0 <= self.location_gain <= 1:
            raise ValueError(f"location_gain must be in [0, 1], got {self.location_gain}")
        start, end = self.present_interval_s
        if end < start:
            raise ValueError(f"present interval ends before it starts: {self.present_interval_s}")

    def distance_at(self, times_s) -> np.ndarray:
        return np.interp(np.asarray(times_s, dtype=float), self.knot_times_s, self.knot_distances_m)

    def is_present(self, times_s) -> np.ndarray:
        t = np.asarray(times_s, dtype=float)
        start, end = self.present_interval_s
        return (t >= start) & (t <= end)

    @classmethod
    def approach(
        cls,
        start_distance_m: float,
        speed_m_s: float,
        contact_time_s: float,
        location_gain: float = 1.0,
        start_time_s: float = 0.0,
    ) -> 'ObstacleTrajectory':
        """Constant-velocity approach that reaches the surface at contact_time_s."""
        if speed_m_s <= 0:
            raise ValueError(f"approach speed must be positive, got {speed_m_s}")
        if contact_time_s <= start_time_s:
            raise ValueError("contact must happen after the trajectory starts")
        begin = contact_time_s - start_distance_m / speed_m_s
        if begin < start_time_s:
            begin = start_time_s
            start_distance_m = speed_m_s * (contact_time_s - start_time_s)
        return cls(
            knot_times_s=(begin, contact_time_s),
            knot_distances_m=(start_distance_m, 0.0),
            location_gain=location_gain,
            present_interval_s=(start_time_s, contact_time_s),
        )

    @classmethod
    def retreat(
        cls,
        speed_m_s: float,
        duration_s: float,
        start_distance_m: float = 0.0,
        location_gain: float = 1.0,
        start_time_s: float = 0.0,
    ) -> 'ObstacleTrajectory':
        """Constant-velocity retreat starting at start_distance_m."""
        if speed_m_s <= 0 or duration_s <= 0:
            raise ValueError("retreat speed and duration must be positive")
        end = start_time_s + duration_s
        return cls(
            knot_times_s=(start_time_s, end),
            knot_distances_m=(start_distance_m, start_distance_m + speed_m_s * duration_s),
            location_gain=location_gain,
            present_interval_s=(start_time_s, end),
        )

    @classmethod
    def static(
        cls, distance_m: float, start_s: float, end_s: float, location_gain: float = 1.0
    ) -> 'ObstacleTrajectory':
        return cls(
            knot_times_s=(start_s,),
            knot_distances_m=(distance_m,),
            location_gain=location_gain,
            present_interval_s=(start_s, end_s),
        )
