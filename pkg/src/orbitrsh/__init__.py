"""Orbit-breaking towers, covariant matrix representations and RSH decompositions
for rotations and odometers twisted by a line bundle."""

__version__ = "0.1.0"

from .bundle import LineBundle, cocycle_check
from .dynsys import ArcRegion, CylinderRegion, Odometer, Rotation, apply, membership, region_map, sample
from .model import Model
from .towers import first_return_partition, validate_towers

__all__ = [
    "ArcRegion",
    "CylinderRegion",
    "LineBundle",
    "Model",
    "Odometer",
    "Rotation",
    "apply",
    "cocycle_check",
    "first_return_partition",
    "membership",
    "region_map",
    "sample",
    "validate_towers",
]
