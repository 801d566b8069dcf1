"""GOSNR estimate of a candidate lightpath and the admission gate.

The estimate accumulates noise span by span: every amplified span of a band
contributes the same linear noise-to-signal ratio, so a path of ``n`` spans
has ``GOSNR = g / n`` with ``g`` the per-span linear GOSNR of the band. The
per-span figures are configuration, not physics; only their ordering
(C best, S worst) and the degradation with distance matter to the scheme.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from mbnetsim.bands import Band
from mbnetsim.routing import Path


def _default_span_gosnr() -> dict[Band, float]:
    return {Band.C: 21.0, Band.L: 20.0, Band.S: 18.0}


def _default_thresholds() -> dict[int, float]:
    return {1: 9.0}


class UnknownModulation(KeyError):
    def __str__(self) -> str:
        return Exception.__str__(self)


@dataclass(frozen=True)
class QotParams:
    span_length_km: float = 80.0
    per_band_span_gosnr_db: Mapping[Band, float] = field(default_factory=_default_span_gosnr)
    # modulation level -> minimum GOSNR in dB; level 1 is BPSK
    threshold_db: Mapping[int, float] = field(default_factory=_default_thresholds)

    def __post_init__(self) -> None:
        if not self.span_length_km > 0:
            raise ValueError(f"span_length_km must be > 0, got {self.span_length_km}")
        span = {Band.parse(b): float(v) for b, v in self.per_band_span_gosnr_db.items()}
        missing = set(Band) - set(span)
        if missing:
            raise ValueError(f"per_band_span_gosnr_db lacks bands {sorted(b.value for b in missing)}")
        if span[Band.S] > span[Band.C]:
            raise ValueError("S-band per-span GOSNR must not exceed the C-band value")
        object.__setattr__(self, "per_band_span_gosnr_db", span)
        object.__setattr__(self, "threshold_db", {int(m): float(v) for m, v in self.threshold_db.items()})


@dataclass(frozen=True)
class GosnrReport:
    gosnr_db: float
    span_count: int
    acceptable: bool


def span_count(path: Path, params: QotParams) -> int:
    """Amplified spans along ``path``: ``ceil(length / span)`` per edge, at least one each."""
    if not path.edges:
        raise ValueError("path has no edges")
    total = 0
    for length in path.lengths_km:
        total += max(1, math.ceil(length / params.span_length_km))
    return total


def gosnr_db_for_spans(n_spans: int, span_gosnr_db: float) -> float:
    g = 10.0 ** (span_gosnr_db / 10.0)
    return 10.0 * math.log10(1.0 / (n_spans / g))


def gosnr_acceptable(report: GosnrReport | float, m: int, params: QotParams) -> bool:
    """Inclusive threshold test for modulation level ``m``."""
    try:
        threshold = params.threshold_db[m]
    except KeyError:
        raise UnknownModulation(f"no GOSNR threshold for modulation level {m}") from None
    value = report.gosnr_db if isinstance(report, GosnrReport) else float(report)
    return value >= threshold


def path_gosnr(path: Path, band: Band, params: QotParams, m: int = 1) -> GosnrReport:
    n = span_count(path, params)
    g_db = gosnr_db_for_spans(n, params.per_band_span_gosnr_db[band])
    return GosnrReport(g_db, n, gosnr_acceptable(g_db, m, params))
