"""
Leaky-surface-wave signal simulator.

Generates seeded synthetic received signals: the surface-borne carrier,
the standing-wave pattern of an approaching obstacle, robot noise, channel
disturbances and self-detections.

Usage:
    from scripts.lsw_sim import ExcitationConfig, ChannelModel, ObstacleTrajectory
    from scripts.lsw_sim import gen_excitation, simulate_received

    s = gen_excitation(ExcitationConfig(), duration_s=2.0)
    traj = ObstacleTrajectory.approach(0.3, speed_m_s=0.2, contact_time_s=1.8)
    r = simulate_received(s, ChannelModel(rng_seed=7), traj)
"""

from .audio_io import read_buffer, read_raw, read_wav, write_buffer, write_raw, write_wav
from .catalog import Catalog, MaterialProfile, ObjectProfile, load_catalog
from .channel import (
    air_path_control,
    gen_excitation,
    gen_noise,
    simulate_received,
    standing_wave_gain,
    standing_wave_profile,
)
from .models import (
    ChannelModel,
    DisturbanceEvent,
    ExcitationConfig,
    NoiseRegime,
    ObstacleTrajectory,
    SampleBuffer,
    SelfDetectionEvent,
)

__all__ = [
    # Types
    'ChannelModel',
    'DisturbanceEvent',
    'ExcitationConfig',
    'NoiseRegime',
    'ObstacleTrajectory',
    'SampleBuffer',
    'SelfDetectionEvent',
    # Synthesis
    'air_path_control',
    'gen_excitation',
    'gen_noise',
    'simulate_received',
    'standing_wave_gain',
    'standing_wave_profile',
    # Catalog
    'Catalog',
    'MaterialProfile',
    'ObjectProfile',
    'load_catalog',
    # Audio
    'read_buffer',
    'read_raw',
    'read_wav',
    'write_buffer',
    'write_raw',
    'write_wav',
]
