"""Result records shared by the experiments."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


def to_jsonable(obj):
    """Recursively convert numpy scalars and arrays into plain Python values."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not np.isfinite(obj):
        return repr(obj)
    return obj


@dataclass
class StatReport:
    """Outcome of one check: statistics, tolerances and a verdict.

    ``verdict`` is ``"pass"``, ``"fail"`` or ``"warn"``; by default it
    follows ``passed``.
    """

    name: str
    statistics: dict
    tolerance: dict
    passed: bool
    provenance: str = ""
    verdict: str = ""
    notes: list = field(default_factory=list)

    def __post_init__(self):
        self.passed = bool(self.passed)
        if not self.verdict:
            self.verdict = "pass" if self.passed else "fail"

    def to_dict(self) -> dict:
        return to_jsonable(asdict(self))
