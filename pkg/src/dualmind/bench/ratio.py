"""Leela Ratio arithmetic for comparing CPU and GPU engine compute."""

from __future__ import annotations

from dataclasses import dataclass

# The factor printed for the TCEC operands below. 1.5e8 / 1.4e5 is 1071.43,
# so the printed value presumably came from unrounded speeds.
PRINTED_FACTOR = 1084.0
TCEC_SF_NPS = 1.5e8
TCEC_LC_NPS = 1.4e5


@dataclass(frozen=True)
class RatioInputs:
    sf_nps: float
    lc_nps: float
    sf_nodes: float
    lc_nodes: float

    def __post_init__(self):
        for name in ("sf_nps", "lc_nps", "sf_nodes", "lc_nodes"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def factor(self) -> float:
        return leela_factor(self.sf_nps, self.lc_nps)

    @property
    def ratio(self) -> float:
        return leela_ratio(self.factor, self.lc_nodes, self.sf_nodes)


def leela_factor(sf_nps: float, lc_nps: float) -> float:
    """F = CPU-engine nps / GPU-engine nps."""
    if lc_nps == 0:
        raise ZeroDivisionError("lc_nps must be non-zero")
    return sf_nps / lc_nps


def leela_ratio(factor: float, lc_nodes: float, sf_nodes: float) -> float:
    """R = F * GPU-engine nodes / CPU-engine nodes."""
    if sf_nodes == 0:
        raise ZeroDivisionError("sf_nodes must be non-zero")
    if lc_nodes <= 0:
        raise ValueError("lc_nodes must be positive")
    return factor * lc_nodes / sf_nodes


def interpret_ratio(r: float, gpu: str = "LCZero", cpu: str = "Stockfish") -> str:
    if r > 1:
        return f"{gpu} received {r:.1f}x more effective compute"
    if r < 1:
        return f"{cpu} received {1 / r:.1f}x more effective compute"
    return "both engines received equal effective compute"
