"""Lightpath requests and admitted lightpaths."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from mbnetsim.bands import BACKUP_BAND, WORKING_BANDS, Band
from mbnetsim.routing import Path
from mbnetsim.spectrum import SlotRange

BPSK = 1


class Role(str, Enum):
    WORKING = "working"
    BACKUP = "backup"


@dataclass(frozen=True)
class LightpathRequest:
    s: int
    d: int
    requested_slots: int
    k: int = 3
    m: int = BPSK

    def __post_init__(self) -> None:
        if self.s == self.d:
            raise ValueError("request source and destination must differ")
        if self.requested_slots < 1:
            raise ValueError(f"requested_slots must be >= 1, got {self.requested_slots}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.m != BPSK:
            raise ValueError("only BPSK (modulation level 1) is supported")


@dataclass(frozen=True)
class Lightpath:
    id: int
    path: Path
    band: Band
    range: SlotRange
    role: Role

    def __post_init__(self) -> None:
        if self.role is Role.WORKING and self.band not in WORKING_BANDS:
            raise ValueError(f"working lightpath cannot use the {self.band.value} band")
        if self.role is Role.BACKUP and self.band is not BACKUP_BAND:
            raise ValueError(f"backup lightpath must use the S band, got {self.band.value}")

    @property
    def slot_edge_units(self) -> int:
        return self.range.width * len(self.path.edges)
