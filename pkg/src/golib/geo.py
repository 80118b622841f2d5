"""Great-circle distance on a spherical Earth (mean radius 6371.0 km)."""
from __future__ import annotations

import math

from .errors import CoordinateOutOfRange

EARTH_RADIUS_KM = 6371.0


def check_coordinates(latitude: float, longitude: float) -> None:
    if not (-90.0 <= latitude <= 90.0):
        raise CoordinateOutOfRange(f"latitude {latitude} outside [-90, 90]")
    if not (-180.0 <= longitude <= 180.0):
        raise CoordinateOutOfRange(f"longitude {longitude} outside [-180, 180]")


def haversine_km(lat1: float, lon1: float, lat2: float, lon2: float) -> float:
    check_coordinates(lat1, lon1)
    check_coordinates(lat2, lon2)
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = math.radians(lat2 - lat1)
    dlam = math.radians(lon2 - lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.atan2(math.sqrt(a), math.sqrt(1.0 - a))
