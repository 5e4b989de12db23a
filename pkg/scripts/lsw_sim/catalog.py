"""Object, material, angle and location catalog loaded from YAML."""

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import yaml

from scripts.common.validation import validate_schema

from .constants import DEFAULT_CATALOG_PATH

logger = logging.getLogger(__name__)

CATALOG_SCHEMA = {
    'type': 'object',
    'required': ['objects', 'materials', 'angles', 'locations'],
    'properties': {
        'version': {'type': 'integer'},
        'objects': {
            'type': 'array',
            'minItems': 1,
            'items': {
                'type': 'object',
                'required': ['name', 'location_gain', 'cutoff_scale'],
                'properties': {
                    'name': {'type': 'string'},
                    'location_gain': {'type': 'number', 'exclusiveMinimum': 0, 'maximum': 1},
                    'cutoff_scale': {'type': 'number', 'exclusiveMinimum': 0},
                },
            },
        },
        'materials': {
            'type': 'array',
            'items': {
                'type': 'object',
                'required': ['name', 'surface_gain', 'cutoff_scale', 'couples'],
                'properties': {
                    'name': {'type': 'string'},
                    'surface_gain': {'type': 'number', 'exclusiveMinimum': 0},
                    'cutoff_scale': {'type': 'number', 'exclusiveMinimum': 0},
                    'couples': {'type': 'boolean'},
                },
            },
        },
        'angles': {'type': 'object'},
        'locations': {'type': 'object'},
    },
}


@dataclass(frozen=True)
class ObjectProfile:
    name: str
    location_gain: float
    cutoff_scale: float


@dataclass(frozen=True)
class MaterialProfile:
    name: str
    surface_gain: float
    cutoff_scale: float
    couples: bool = True


@dataclass
class Catalog:
    objects: List[ObjectProfile] = field(default_factory=list)
    materials: List[MaterialProfile] = field(default_factory=list)
    angles: Dict[float, float] = field(default_factory=dict)
    locations: Dict[float, float] = field(default_factory=dict)

    def object(self, name: str) -> ObjectProfile:
        for profile in self.objects:
            if profile.name == name:
                return profile
        raise KeyError(f"Unknown object profile: {name}")


def load_catalog(path: Optional[Path] = None) -> Catalog:
    """Read and validate the catalog YAML."""
    path = Path(path or DEFAULT_CATALOG_PATH)
    if not path.exists():
        raise FileNotFoundError(f"Catalog not found: {path}")

    with open(path, 'r', encoding='utf-8') as f:
        data = yaml.safe_load(f)
    if not data:
        raise ValueError(f"Catalog is empty: {path}")

    ok, error = validate_schema(data, CATALOG_SCHEMA)
    if not ok:
        raise ValueError(f"Invalid catalog {path}: {error}")

    catalog = Catalog(
        objects=[ObjectProfile(**o) for o in data['objects']],
        materials=[MaterialProfile(**m) for m in data['materials']],
        angles={float(k): float(v) for k, v in data['angles'].items()},
        locations={float(k): float(v) for k, v in data['locations'].items()},
    )
    logger.debug(
        f"Loaded catalog {path}: {len(catalog.objects)} objects, {len(catalog.materials)} materials"
    )
    return catalog
