"""Power and area roll-up for an N-class deployment.

Component figures are the per-instance values for a 10-column crossbar
design; everything except the WTA is instantiated once per class.
"""

from __future__ import annotations

from dataclasses import dataclass

COMPONENTS = ("crossbar", "current_buffer", "ivc", "comparator", "wta")


@dataclass(frozen=True)
class ComponentCost:
    name: str
    power: float  # W
    area: float  # um^2
    per_class: bool = True

    def __post_init__(self):
        if self.name not in COMPONENTS:
            raise ValueError(f"unknown component {self.name!r}")
        if self.power < 0 or self.area < 0:
            raise ValueError(f"{self.name}: power and area must be non-negative")


DEFAULT_TABLE = (
    ComponentCost("crossbar", 5e-6, 1.36),
    ComponentCost("current_buffer", 149e-6, 280.0),
    ComponentCost("ivc", 41.1e-3, 1638.7),
    ComponentCost("comparator", 17e-9, 0.5183),
    ComponentCost("wta", 47.34e-12, 1.555, per_class=False),
)


@dataclass(frozen=True)
class CostReport:
    n_classes: int
    components: tuple[ComponentCost, ...]
    # subtotal per component = instance cost x instance count
    subtotals: dict[str, tuple[float, float]]
    total_power: float
    total_area: float

    def to_dict(self) -> dict:
        return {
            "n_classes": self.n_classes,
            "components": [
                {
                    "name": c.name,
                    "per_class": c.per_class,
                    "instances": self.n_classes if c.per_class else 1,
                    "unit_power_W": c.power,
                    "unit_area_um2": c.area,
                    "power_W": self.subtotals[c.name][0],
                    "area_um2": self.subtotals[c.name][1],
                }
                for c in self.components
            ],
            "total_power_W": self.total_power,
            "total_power_mW": self.total_power * 1e3,
            "total_area_um2": self.total_area,
        }


def estimate(n_classes: int, table=DEFAULT_TABLE) -> CostReport:
    if n_classes < 0:
        raise ValueError(f"n_classes must be >= 0, got {n_classes}")
    names = [c.name for c in table]
    dupes = sorted({n for n in names if names.count(n) > 1})
    missing = [n for n in COMPONENTS if n not in names]
    if dupes or missing:
        raise ValueError(f"cost table: duplicate {dupes}, missing {missing}")
    subtotals = {}
    for c in table:
        count = n_classes if c.per_class else 1
        subtotals[c.name] = (c.power * count, c.area * count)
    return CostReport(
        n_classes,
        tuple(table),
        subtotals,
        sum(p for p, _ in subtotals.values()),
        sum(a for _, a in subtotals.values()),
    )


def table_with_overrides(overrides: dict, base=DEFAULT_TABLE) -> tuple[ComponentCost, ...]:
    """Replace power/area of named components, e.g. ``{"ivc": {"power": 1e-3}}``."""
    by_name = {c.name: c for c in base}
    for name, vals in overrides.items():
        if name not in by_name:
            raise ValueError(f"unknown component {name!r}")
        if not isinstance(vals, dict) or set(vals) - {"power", "area"}:
            raise ValueError(f"override for {name!r} must map 'power'/'area' to numbers")
        c = by_name[name]
        by_name[name] = ComponentCost(name, float(vals.get("power", c.power)),
                                      float(vals.get("area", c.area)), c.per_class)
    return tuple(by_name[n] for n in COMPONENTS)
