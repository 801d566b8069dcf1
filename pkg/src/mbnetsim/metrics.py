"""Per-run result record."""

from __future__ import annotations

from dataclasses import dataclass, fields


@dataclass
class ScenarioMetrics:
    scenario: str
    load_erlang: float
    seed: int
    offered: int
    blocked: int
    blocking_probability: float
    util_C_mean: float
    util_L_mean: float
    util_S_mean: float
    util_C_peak: float
    util_L_peak: float
    util_S_peak: float
    backup_share_factor: float
    # None when the run injected no failures
    restorability: float | None
    runtime_s: float

    def __post_init__(self) -> None:
        if self.offered and abs(self.blocking_probability - self.blocked / self.offered) > 1e-12:
            raise ValueError("blocking_probability must equal blocked / offered")

    @classmethod
    def columns(cls) -> list[str]:
        return [f.name for f in fields(cls)]

    def without_runtime(self) -> tuple:
        return tuple(getattr(self, c) for c in self.columns() if c != "runtime_s")
