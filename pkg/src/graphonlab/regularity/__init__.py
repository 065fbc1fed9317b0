"""Weak regularity: deviation, energy refinement and the coarse-partition witness."""

from __future__ import annotations

from .deviation import (
    DeviationWitness,
    EnergyTrace,
    deviation_exact,
    deviation_heuristic,
    deviation_value,
    energy,
    fk_partition,
)
from .io import load_partition, load_report, save_partition, save_report
from .refuter import RefuteVerdict, WitnessReport, refute_cf, refute_verify

__all__ = [
    "DeviationWitness", "EnergyTrace", "RefuteVerdict", "WitnessReport",
    "deviation_exact", "deviation_heuristic", "deviation_value", "energy",
    "fk_partition", "load_partition", "load_report", "refute_cf",
    "refute_verify", "save_partition", "save_report",
]
