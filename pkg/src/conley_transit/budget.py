"""Search budget resolution for exhaustive enumerations."""

from __future__ import annotations

import os

DEFAULT_BUDGET = 1 << 20
ENV_VAR = "CONLEY_TRANSIT_BUDGET"


def resolve_budget(budget: int | None = None) -> int:
    if budget is not None:
        return budget
    raw = os.environ.get(ENV_VAR)
    if raw:
        return int(raw)
    return DEFAULT_BUDGET
