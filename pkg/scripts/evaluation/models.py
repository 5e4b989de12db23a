"""Evaluation value types."""

from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd

from scripts.lsw_sim.catalog import ObjectProfile

from .constants import SCENARIOS, SPEED_RANGES, TRIALS_PER_SCENARIO


@dataclass(frozen=True)
class ScenarioSpec:
    """
    One field-study scenario. negatives defaults to the number of positive
    trials (class-balanced); negative_only runs have no positives.
    """

    scenario: str
    trials: int = TRIALS_PER_SCENARIO
    object_profiles: Tuple[ObjectProfile, ...] = ()
    approach_speed_range_m_s: Optional[Tuple[float, float]] = None
    seed: int = 0
    negatives: Optional[int] = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario '{self.scenario}', expected one of {list(SCENARIOS)}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.negatives is not None and self.negatives < 0:
            raise ValueError(f"negatives must be >= 0, got {self.negatives}")
        low, high = self.speed_range
        if not 0 < low <= high:
            raise ValueError(f"approach speeds must be positive and ordered, got {self.speed_range}")
        if self.has_positives and not self.object_profiles:
            raise ValueError("positive scenarios need at least one object profile")
        for profile in self.object_profiles:
            if not 0 < profile.location_gain <= 1:
                raise ValueError(f"object {profile.name}: location_gain must be in (0, 1]")
            if profile.cutoff_scale <= 0:
                raise ValueError(f"object {profile.name}: cutoff_scale must be positive")

    @property
    def speed_range(self) -> Tuple[float, float]:
        return tuple(self.approach_speed_range_m_s or SPEED_RANGES[self.scenario])

    @property
    def has_positives(self) -> bool:
        return self.scenario != 'negative_only'

    @property
    def n_positives(self) -> int:
        return self.trials if self.has_positives else 0

    @property
    def n_negatives(self) -> int:
        if self.negatives is not None:
            return self.negatives
        return self.trials

    def to_dict(self) -> dict:
        data = asdict(self)
        data['approach_speed_range_m_s'] = list(self.speed_range)
        data['object_profiles'] = [asdict(p) for p in self.object_profiles]
        return data


@dataclass
class RocCurve:
    """Operating points ordered by decreasing threshold; a trial is positive when score > threshold."""

    thresholds: np.ndarray
    tpr: np.ndarray
    fpr: np.ndarray
    area_under_curve: float
    best_index: int

    @property
    def best_threshold(self) -> float:
        return float(self.thresholds[self.best_index])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({'threshold': self.thresholds, 'tpr': self.tpr, 'fpr': self.fpr})


@dataclass
class SweepPoint:
    """One micro-benchmark setting."""

    sweep: str
    label: str
    value: float
    location_gain: float
    cutoff_scale: float = 1.0
    surface_gain: float = 1.0


@dataclass
class MicroTrial:
    point: SweepPoint
    trial: int
    speed_m_s: float
    alarm_time_s: Optional[float]
    distance_m: float

    @property
    def detected(self) -> bool:
        return self.alarm_time_s is not None


@dataclass
class TrialRecord:
    id: int
    label: int
    scenario: str
    day: str
    object: Optional[str] = None
    speed_m_s: Optional[float] = None
    contact_time_s: Optional[float] = None
    segment_start_s: float = 0.0
    disturbances: int = 0
    self_detections: int = 0
    segment_file: Optional[str] = None
    sha256: Optional[str] = None

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class FieldDataset:
    """Manifest plus the segments it lists (envelope samples, one array per trial)."""

    manifest: dict
    segments: dict = field(default_factory=dict)

    @property
    def trials(self) -> List[dict]:
        return self.manifest['trials']

    def ids(self, label: Optional[int] = None) -> List[int]:
        return [t['id'] for t in self.trials if label is None or t['label'] == label]

    def trial(self, trial_id: int) -> dict:
        return next(t for t in self.trials if t['id'] == trial_id)
