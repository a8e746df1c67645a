"""Report containers shared by the scenario runner and the CLI emitters.

The per-level row schema is a fixed contract: CSV output uses exactly these
columns in exactly this order, so downstream plotting scripts can rely on
column positions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

__all__ = ["ROW_COLUMNS", "StageVerdict", "ScenarioReport"]

ROW_COLUMNS = (
    "t",
    "r",
    "area",
    "H",
    "grad_w",
    "F",
    "G",
    "dF_fd",
    "dF_cf",
    "dG_fd",
    "dG_cf",
    "cap",
    "cap_ratio_to_exp_t",
    "gb",
    "willmore",
    "holder_gap",
)

_STATUSES = ("pass", "fail", "not-applicable")


@dataclass(frozen=True)
class StageVerdict:
    """Outcome of one named stage: pass | fail | not-applicable, with a reason."""

    name: str
    status: str
    reason: str

    def __post_init__(self):
        if self.status not in _STATUSES:
            raise ValueError(f"verdict status must be one of {_STATUSES}, got {self.status!r}")

    @property
    def passed(self) -> bool:
        return self.status == "pass"


@dataclass
class ScenarioReport:
    """Everything one scenario run produced.

    ``rows`` holds per-level dicts keyed by ROW_COLUMNS (possibly empty for
    scenarios without level sampling); ``constants`` holds fitted constants;
    ``failed_hypothesis`` names the first broken hypothesis gate, or None
    when no gate failed.
    """

    config: dict
    columns: tuple = ROW_COLUMNS
    rows: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    constants: dict = field(default_factory=dict)
    failed_hypothesis: str | None = None

    def verdict(self, name: str) -> StageVerdict:
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(f"no stage named {name!r} in this report")

    @property
    def all_passed(self) -> bool:
        return all(v.status != "fail" for v in self.verdicts)
