"""Tests for the micro-benchmark sweeps."""

import pytest

from scripts.evaluation import (
    SweepPoint,
    angle_sweep,
    location_sweep,
    material_sweep,
    micro_benchmark_max_distance,
)
from scripts.lsw_sim import load_catalog

PERPENDICULAR = SweepPoint(sweep='angle', label='0 deg', value=0.0, location_gain=1.0)
OBLIQUE = SweepPoint(sweep='angle', label='120 deg', value=120.0, location_gain=0.085)


@pytest.fixture(scope='module')
def catalog():
    return load_catalog()


def test_sweep_points_follow_catalog(catalog):
    angles = angle_sweep(catalog)
    assert [p.value for p in angles] == [0.0, 60.0, 120.0, 180.0, 240.0, 300.0]
    assert angles[2].location_gain == pytest.approx(0.085)
    locations = location_sweep(catalog)
    assert locations[0].value == 0.0
    assert all(p.sweep == 'location' for p in locations)


def test_non_coupling_materials_get_zero_gain(catalog):
    points = material_sweep(catalog)
    assert len(points) == len(catalog.materials)
    for point, material in zip(points, catalog.materials):
        assert (point.location_gain == 0.0) == (not material.couples)
    assert any(p.location_gain == 0.0 for p in points)


def test_wider_gain_detects_further():
    table = micro_benchmark_max_distance([PERPENDICULAR, OBLIQUE], trials_per_point=2, seed=1, workers=2, progress=False)
    assert list(table['label']) == ['0 deg', '120 deg']
    perpendicular, oblique = table['max_distance_cm']
    assert perpendicular > oblique > 0


def test_zero_gain_never_detects():
    silent = SweepPoint(sweep='material', label='foil', value=1.0, location_gain=0.0)
    table = micro_benchmark_max_distance([silent], trials_per_point=2, seed=2, workers=1, progress=False)
    row = table.iloc[0]
    assert row['detections'] == 0
    assert row['max_distance_cm'] == 0.0
    assert row['trials'] == 2


def test_invalid_trial_count():
    with pytest.raises(ValueError):
        micro_benchmark_max_distance([PERPENDICULAR], trials_per_point=0, progress=False)


@pytest.mark.slow
def test_perpendicular_anchor_distance():
    table = micro_benchmark_max_distance([PERPENDICULAR], trials_per_point=13, seed=0, progress=False)
    assert table.iloc[0]['max_distance_cm'] == pytest.approx(18.3, rel=0.15)


@pytest.mark.slow
def test_oblique_shorter_than_perpendicular_at_full_count():
    table = micro_benchmark_max_distance([PERPENDICULAR, OBLIQUE], trials_per_point=13, seed=3, progress=False)
    perpendicular, oblique = table['max_distance_cm']
    assert oblique < perpendicular
    assert oblique == pytest.approx(10.9, rel=0.25)
