"""JSON files for partitions and witness reports.

A partition file holds ``{"grid": n, "parts": [...]}`` where each part is
either ``{"intervals": [["a", "b"], ...]}`` with exact rational endpoints or
``{"blocks": [[index, "p/q"], ...]}`` listing the blocks it meets with the
fraction of each block it covers.
"""

from __future__ import annotations

import json
from pathlib import Path

from ..sets import PartitionSpec
from .refuter import WitnessReport


def save_partition(P: PartitionSpec, path) -> None:
    Path(path).write_text(json.dumps(P.to_dict(), indent=1) + "\n")


def load_partition(path) -> PartitionSpec:
    return PartitionSpec.from_dict(json.loads(Path(path).read_text()))


def save_report(report: WitnessReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict(), indent=1) + "\n")


def load_report(path) -> WitnessReport:
    return WitnessReport.from_dict(json.loads(Path(path).read_text()))
