"""Per-flight survey economics for competing acquisition platforms."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass, fields
from importlib import resources

from ._validation import check_non_negative, check_positive
from .errors import EconomicsError


@dataclass(frozen=True)
class PlatformSpec:
    name: str
    aircraft_cost_usd: float
    flight_duration_h: float
    cruise_speed_kmh: float
    coverage_speed_kmh: float
    swath_width_km: float
    line_spacing_m: float
    daily_ops_cost_usd: float
    safety_score: int
    workday_h: float = 8.0

    def __post_init__(self):
        check_non_negative("aircraft_cost_usd", self.aircraft_cost_usd, EconomicsError)
        for name in ("flight_duration_h", "cruise_speed_kmh", "coverage_speed_kmh",
                     "swath_width_km", "line_spacing_m", "daily_ops_cost_usd", "workday_h"):
            check_positive(f"{self.name}: {name}", getattr(self, name), EconomicsError)
        if int(self.safety_score) != self.safety_score or not 1 <= self.safety_score <= 10:
            raise EconomicsError(f"{self.name}: safety_score must be an integer in 1..10")


@dataclass(frozen=True)
class MetricsRow:
    flights_per_day: float
    ops_cost_per_flight_usd: float
    distance_per_flight_km: float
    cost_per_line_km_usd: float
    coverage_area_km2: float
    flight_time_per_km_s: float


def derived_metrics(p: PlatformSpec) -> MetricsRow:
    flights = p.workday_h / p.flight_duration_h
    per_flight = p.daily_ops_cost_usd / flights
    distance = p.flight_duration_h * p.cruise_speed_kmh
    return MetricsRow(
        flights_per_day=flights,
        ops_cost_per_flight_usd=per_flight,
        distance_per_flight_km=distance,
        cost_per_line_km_usd=per_flight / distance,
        coverage_area_km2=p.swath_width_km * p.flight_duration_h * p.coverage_speed_kmh,
        flight_time_per_km_s=3600.0 / p.coverage_speed_kmh,
    )


# column -> (where it lives, favourable direction)
FLAGGED_COLUMNS = {
    "aircraft_cost_usd": ("spec", min),
    "flight_duration_h": ("spec", max),
    "safety_score": ("spec", max),
    "line_spacing_m": ("spec", min),
    "daily_ops_cost_usd": ("spec", min),
    "ops_cost_per_flight_usd": ("metrics", min),
    "coverage_area_km2": ("metrics", max),
    "cost_per_line_km_usd": ("metrics", min),
    "flight_time_per_km_s": ("metrics", min),
}

# Relative tolerance for calling two values tied. Speeds back-solved from
# seconds-per-km do not survive a float round trip exactly.
_TIE_RTOL = 1e-9


@dataclass(frozen=True)
class ComparisonRow:
    spec: PlatformSpec
    metrics: MetricsRow
    best: frozenset

    def value(self, column):
        src = self.spec if hasattr(self.spec, column) else self.metrics
        return getattr(src, column)

    def as_record(self):
        rec = {"name": self.spec.name}
        rec.update({k: v for k, v in asdict(self.spec).items() if k != "name"})
        rec.update(asdict(self.metrics))
        rec["best"] = sorted(self.best)
        return rec


def compare_platforms(platforms) -> list[ComparisonRow]:
    platforms = list(platforms)
    if not platforms:
        raise EconomicsError("no platforms to compare")
    metrics = [derived_metrics(p) for p in platforms]
    best = [set() for _ in platforms]
    for column, (where, pick) in FLAGGED_COLUMNS.items():
        vals = [getattr(p if where == "spec" else m, column) for p, m in zip(platforms, metrics)]
        target = pick(vals)
        scale = max(abs(target), 1e-300)
        for i, v in enumerate(vals):
            if abs(v - target) <= _TIE_RTOL * scale:
                best[i].add(column)
    return [ComparisonRow(p, m, frozenset(b)) for p, m, b in zip(platforms, metrics, best)]


def platforms_from_json(text):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise EconomicsError(f"platform file is not valid JSON: {exc}") from exc
    if not isinstance(data, list):
        raise EconomicsError("platform file must hold a JSON array")
    known = {f.name for f in fields(PlatformSpec)}
    out = []
    for item in data:
        # extra keys (e.g. values as printed in a source table) are kept out of PlatformSpec
        kwargs = {k: v for k, v in item.items() if k in known}
        try:
            out.append(PlatformSpec(**kwargs))
        except TypeError as exc:
            raise EconomicsError(f"bad platform entry {item.get('name', '?')!r}: {exc}") from exc
    return out


def reference_platforms():
    """The four reference platforms bundled with the package."""
    text = resources.files("suspmag.data").joinpath("reference_platforms.json").read_text()
    return platforms_from_json(text)


_CSV_COLUMNS = ["name", "aircraft_cost_usd", "flight_duration_h", "cruise_speed_kmh",
                "coverage_speed_kmh", "swath_width_km", "line_spacing_m", "daily_ops_cost_usd",
                "safety_score", "workday_h", "flights_per_day", "ops_cost_per_flight_usd",
                "distance_per_flight_km", "cost_per_line_km_usd", "coverage_area_km2",
                "flight_time_per_km_s", "best"]


def comparison_csv(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(_CSV_COLUMNS)
    for row in rows:
        rec = row.as_record()
        rec["best"] = ";".join(rec["best"])
        writer.writerow([rec[c] if not isinstance(rec[c], float) else repr(rec[c])
                         for c in _CSV_COLUMNS])
    return buf.getvalue()


_TEXT_ROWS = [
    ("Cost of aircraft ($)", "aircraft_cost_usd", "{:,.0f}"),
    ("Flight duration (h)", "flight_duration_h", "{:g}"),
    ("Safety (1-10)", "safety_score", "{:d}"),
    ("Coverage per flight (km2)", "coverage_area_km2", "{:.1f}"),
    ("Line spacing (m)", "line_spacing_m", "{:g}"),
    ("Flights per day", "flights_per_day", "{:.2f}"),
    ("Ops cost per flight ($)", "ops_cost_per_flight_usd", "{:,.2f}"),
    ("Distance per flight (km)", "distance_per_flight_km", "{:,.1f}"),
    ("Cost per line km ($/km)", "cost_per_line_km_usd", "{:,.2f}"),
    ("Flight time per km (s/km)", "flight_time_per_km_s", "{:.0f}"),
    ("Operating cost ($/day)", "daily_ops_cost_usd", "{:,.0f}"),
]


def comparison_text(rows):
    """Aligned table, one column per platform; favourable values starred.

    Money is rounded to cents here and nowhere else.
    """
    header = ["Metric"] + [r.spec.name for r in rows]
    body = []
    for label, column, fmt in _TEXT_ROWS:
        cells = [label]
        for r in rows:
            val = r.value(column)
            cell = fmt.format(int(val) if fmt == "{:d}" else val)
            cells.append(cell + ("*" if column in r.best else ""))
        body.append(cells)
    widths = [max(len(line[i]) for line in [header] + body) for i in range(len(header))]

    def fmt_line(cells):
        return "  ".join(c.ljust(w) if i == 0 else c.rjust(w)
                         for i, (c, w) in enumerate(zip(cells, widths)))

    lines = [fmt_line(header), "  ".join("-" * w for w in widths)]
    lines += [fmt_line(c) for c in body]
    lines.append("* favourable value")
    return "\n".join(lines) + "\n"
