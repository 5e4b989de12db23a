"""
Synthetic received-signal generator.

The received signal is the carrier passed through the surface channel,
perturbed by the leaky-field standing wave of a nearby obstacle, robot
pose disturbances and self-detections, plus mechanical and electrical
noise:

    r[n] = h * (1 + gain * g(d) + disturbance + self_mod) * s[n] + noise[n]
"""

import logging
from typing import Optional

import numpy as np
from scipy import signal

from .constants import (
    AIR_JITTER_RATE_HZ,
    AIR_PATH_ATTENUATION,
    ELECTRICAL_TONE_HZ,
    EXCITATION_FREQUENCY_HZ,
    MECHANICAL_CORNER_HZ,
    MECHANICAL_STOP_DB,
    MECHANICAL_TRANSITION_HZ,
    SELF_DETECTION_START_CUTOFFS,
)
from .models import ChannelModel, ExcitationConfig, ObstacleTrajectory, SampleBuffer

logger = logging.getLogger(__name__)

# Independent random streams per noise source
_STREAM_MECHANICAL = 0
_STREAM_FLOOR = 1
_STREAM_TONE = 2
_STREAM_AIR = 3
_STREAM_COUNT = 4


def _streams(seed: int):
    children = np.random.SeedSequence(seed).spawn(_STREAM_COUNT)
    return [np.random.default_rng(child) for child in children]


def gen_excitation(cfg: ExcitationConfig, duration_s: float) -> SampleBuffer:
    """Sine drive s[n] = A sin(2 pi f n / Fs)."""
    if duration_s <= 0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    n = int(round(duration_s * cfg.sample_rate_hz))
    phase = 2 * np.pi * cfg.frequency_hz * np.arange(n) / cfg.sample_rate_hz
    return SampleBuffer(
        cfg.amplitude * np.sin(phase),
        cfg.sample_rate_hz,
        0.0,
        carrier_hz=cfg.frequency_hz,
    )


def standing_wave_profile(distances_m, wavelength_m: float, channel: ChannelModel) -> np.ndarray:
    """Vectorised standing-wave modulation g(d)."""
    d = np.asarray(distances_m, dtype=float)
    if wavelength_m <= 0:
        raise ValueError(f"wavelength_m must be positive, got {wavelength_m}")
    if np.any(d < 0):
        raise ValueError("distance must be >= 0")
    return (
        channel.leak_fraction
        * np.exp(-d / channel.decay_length_m)
        * np.cos(4 * np.pi * d / wavelength_m + channel.phase_rad)
    )


def standing_wave_gain(d_m: float, wavelength_m: float, channel: ChannelModel) -> float:
    """
    Modulation depth of the leaky field for an obstacle d_m from the surface.

    Extrema are lambda/2 apart and the envelope decays with e-folding
    length decay_length_m.
    """
    return float(standing_wave_profile(d_m, wavelength_m, channel))


def _mechanical_shaping_taps(sample_rate_hz: float) -> np.ndarray:
    nyquist = sample_rate_hz / 2
    numtaps, beta = signal.kaiserord(MECHANICAL_STOP_DB, MECHANICAL_TRANSITION_HZ / nyquist)
    numtaps |= 1
    return signal.firwin(
        numtaps,
        MECHANICAL_CORNER_HZ - MECHANICAL_TRANSITION_HZ / 2,
        window=('kaiser', beta),
        fs=sample_rate_hz,
    )


def gen_noise(channel: ChannelModel, duration_s: float, sample_rate_hz: float) -> SampleBuffer:
    """
    Robot noise: low-passed mechanical noise, a 30 kHz electrical tone and a broadband floor.

    Levels are RMS for the random parts and peak amplitude for the tone.
    """
    if duration_s <= 0:
        raise ValueError(f"duration_s must be positive, got {duration_s}")
    if sample_rate_hz <= 0:
        raise ValueError(f"sample_rate_hz must be positive, got {sample_rate_hz}")

    n = int(round(duration_s * sample_rate_hz))
    mech_rng, floor_rng, tone_rng, _ = _streams(channel.rng_seed)
    noise = np.zeros(n)

    # Draws happen regardless of level so each stream is consumed identically
    taps = _mechanical_shaping_taps(sample_rate_hz)
    # len(taps) - 1 extra draws keep the shaped noise stationary up to both edges
    white = mech_rng.standard_normal(n + len(taps) - 1)
    if channel.mechanical_noise_level > 0:
        shaped = signal.oaconvolve(white, taps, mode='valid')
        noise += channel.mechanical_noise_level * shaped / np.sqrt(np.sum(taps ** 2))

    floor = floor_rng.standard_normal(n)
    if channel.floor_level > 0:
        noise += channel.floor_level * floor

    tone_phase = tone_rng.uniform(0, 2 * np.pi)
    if channel.electrical_tone_level > 0:
        if ELECTRICAL_TONE_HZ >= sample_rate_hz / 2:
            logger.warning(f"Electrical tone {ELECTRICAL_TONE_HZ} Hz above Nyquist, skipped")
        else:
            t = np.arange(n) / sample_rate_hz
            noise += channel.electrical_tone_level * np.sin(2 * np.pi * ELECTRICAL_TONE_HZ * t + tone_phase)

    return SampleBuffer(noise, sample_rate_hz, 0.0)


def _check_schedule(channel: ChannelModel, start_s: float, end_s: float):
    eps = 1e-9
    for event in (*channel.disturbance_events, *channel.self_detection_events):
        if event.duration_s <= 0:
            raise ValueError(f"event duration must be positive: {event}")
        if event.start_s < start_s - eps or event.start_s + event.duration_s > end_s + eps:
            raise ValueError(f"event {event} outside buffer [{start_s}, {end_s}]")


def disturbance_profile(channel: ChannelModel, times_s: np.ndarray) -> np.ndarray:
    out = np.zeros_like(times_s)
    for event in channel.disturbance_events:
        phase = (times_s - event.start_s) / event.duration_s
        inside = (phase >= 0) & (phase <= 1)
        out[inside] += event.magnitude * 0.5 * (1 - np.cos(2 * np.pi * phase[inside]))
    return out


def self_detection_profile(channel: ChannelModel, times_s: np.ndarray, wavelength_m: float) -> np.ndarray:
    """Linkage approaches to its equivalent distance at the event midpoint, then retreats."""
    out = np.zeros_like(times_s)
    far = SELF_DETECTION_START_CUTOFFS * channel.detection_cutoff_m
    for event in channel.self_detection_events:
        phase = (times_s - event.start_s) / event.duration_s
        inside = (phase >= 0) & (phase <= 1)
        if not np.any(inside):
            continue
        closeness = 1 - np.abs(2 * phase[inside] - 1)
        virtual = far + (event.equivalent_distance_m - far) * closeness
        out[inside] += standing_wave_profile(np.maximum(virtual, 0.0), wavelength_m, channel)
    return out


def proximity_profile(
    trajectory: Optional[ObstacleTrajectory],
    channel: ChannelModel,
    times_s: np.ndarray,
    wavelength_m: float,
) -> np.ndarray:
    out = np.zeros_like(times_s)
    if trajectory is None or trajectory.location_gain == 0:
        return out
    present = trajectory.is_present(times_s)
    if np.any(present):
        d = trajectory.distance_at(times_s[present])
        out[present] = trajectory.location_gain * standing_wave_profile(d, wavelength_m, channel)
    return out


def _carrier_wavelength(excitation: SampleBuffer, channel: ChannelModel, frequency_hz: Optional[float]) -> float:
    f = frequency_hz or excitation.carrier_hz or EXCITATION_FREQUENCY_HZ
    return channel.sound_speed_m_s / f


def simulate_received(
    excitation: SampleBuffer,
    channel: ChannelModel,
    trajectory: Optional[ObstacleTrajectory] = None,
    frequency_hz: Optional[float] = None,
) -> SampleBuffer:
    """Pass the excitation through the surface channel."""
    if len(excitation) == 0:
        raise ValueError("excitation buffer is empty")
    _check_schedule(channel, excitation.start_time_s, excitation.end_time_s)

    wavelength = _carrier_wavelength(excitation, channel, frequency_hz)
    t = excitation.times()
    modulation = (
        proximity_profile(trajectory, channel, t, wavelength)
        + disturbance_profile(channel, t)
        + self_detection_profile(channel, t, wavelength)
    )
    noise = gen_noise(channel, excitation.duration_s, excitation.sample_rate_hz).samples
    received = channel.surface_gain * (1 + modulation) * excitation.samples + noise
    return SampleBuffer(received, excitation.sample_rate_hz, excitation.start_time_s, excitation.carrier_hz)


def air_path_control(
    excitation: SampleBuffer,
    channel: ChannelModel,
    trajectory: Optional[ObstacleTrajectory] = None,
) -> SampleBuffer:
    """
    Detached-transducer control run.

    The carrier only reaches the receiver over the air, so it is much weaker
    and the obstacle produces amplitude jitter with no distance pattern.
    """
    if len(excitation) == 0:
        raise ValueError("excitation buffer is empty")
    t = excitation.times()
    air_rng = _streams(channel.rng_seed)[_STREAM_AIR]
    knot_count = int(np.ceil(excitation.duration_s * AIR_JITTER_RATE_HZ)) + 2
    knots_t = excitation.start_time_s + np.arange(knot_count) / AIR_JITTER_RATE_HZ
    knots_v = air_rng.uniform(-1.0, 1.0, knot_count)
    jitter = np.zeros_like(t)
    if trajectory is not None and trajectory.location_gain > 0:
        present = trajectory.is_present(t)
        jitter[present] = (
            trajectory.location_gain * channel.leak_fraction * np.interp(t[present], knots_t, knots_v)
        )
    noise = gen_noise(channel, excitation.duration_s, excitation.sample_rate_hz).samples
    gain = channel.surface_gain / AIR_PATH_ATTENUATION
    received = gain * (1 + jitter) * excitation.samples + noise
    return SampleBuffer(received, excitation.sample_rate_hz, excitation.start_time_s, excitation.carrier_hz)
