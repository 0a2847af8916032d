from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np


@dataclass(frozen=True, eq=False)
class StepRecord:
    """Everything one accepted step leaves behind.

    ``t`` and ``y_start`` describe the start of the step, ``y`` the accepted
    state at ``t + h``.  ``stages`` and ``stage_derivs`` are ``s x dim``
    arrays with abscissae ``c`` (in units of ``h``).  ``y_half`` / ``f_half``
    are the midpoint value and ``f`` there, when the method provides them.
    """

    t: float
    h: float
    y_start: np.ndarray
    y: np.ndarray
    stages: np.ndarray
    stage_derivs: np.ndarray
    c: np.ndarray
    y_half: Optional[np.ndarray] = None
    f_half: Optional[np.ndarray] = None
    method: str = ""

    @property
    def t_end(self) -> float:
        return self.t + self.h


def attach_f_half(record: StepRecord, problem) -> StepRecord:
    """Evaluate ``f`` once at the midpoint value, if not already known."""
    if record.f_half is not None:
        return record
    if record.y_half is None:
        raise ValueError("record has no midpoint value")
    f = np.asarray(problem.rhs(record.t + 0.5 * record.h, record.y_half), dtype=float)
    return replace(record, f_half=f)
