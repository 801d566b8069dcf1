"""Spectral bands and their slot capacities on a 12.5 GHz grid."""

from __future__ import annotations

from enum import Enum

GRID_GHZ = 12.5


class Band(str, Enum):
    C = "C"
    L = "L"
    S = "S"

    @property
    def capacity(self) -> int:
        return BAND_CAPACITY[self]

    @classmethod
    def parse(cls, value: str | Band) -> Band:
        if isinstance(value, Band):
            return value
        try:
            return cls(str(value).strip().upper())
        except ValueError:
            raise ValueError(f"unknown band {value!r}; expected one of C, L, S") from None

    def __str__(self) -> str:
        return self.value


# Fixed slot counts; C+L = 868 working slots, S = 732 backup slots.
BAND_CAPACITY: dict[Band, int] = {Band.C: 320, Band.L: 548, Band.S: 732}

WORKING_BANDS: tuple[Band, ...] = (Band.C, Band.L)
BACKUP_BAND: Band = Band.S


def band_capacity(band: Band | str) -> int:
    """Number of 12.5 GHz slots in ``band``."""
    return BAND_CAPACITY[Band.parse(band)]
