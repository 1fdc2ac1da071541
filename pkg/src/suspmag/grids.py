"""Gridded total-magnetic-intensity comparison between two survey platforms.

Grids are regular rasters stored north-to-south. ``origin_easting_m`` and
``origin_northing_m`` locate the south-west corner of the grid extent, so the
centre of row ``i`` / column ``j`` sits at::

    easting  = origin_easting_m  + (j + 0.5) * cell_size_m
    northing = origin_northing_m + (n_rows - i - 0.5) * cell_size_m

No-data cells are held as NaN in memory and written with the grid's sentinel.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, fields

import numpy as np

from ._validation import check_positive
from .errors import GridError, GridParseError, RegistrationError

DEFAULT_NODATA = -99999.0
RATIO_EPSILON_NT = 1e-6
DEFAULT_MODE_BIN_NT = 1.0

_HEADER_KEYS = ("ncols", "nrows", "origin_easting_m", "origin_northing_m", "cell_size_m",
                "nodata", "units")


@dataclass(frozen=True, eq=False)
class MagGrid:
    values: np.ndarray
    origin_easting_m: float
    origin_northing_m: float
    cell_size_m: float
    nodata: float = DEFAULT_NODATA
    units: str = "nT"
    crs_label: str = ""

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim != 2 or vals.shape[0] < 1 or vals.shape[1] < 1:
            raise GridError(f"grid values must be a non-empty 2-D array, got shape {vals.shape}")
        if np.any(np.isinf(vals)):
            raise GridError("grid values must be finite or no-data")
        check_positive("cell_size_m", self.cell_size_m, GridError)
        if not math.isfinite(self.nodata):
            raise GridError("no-data sentinel must be a finite number")
        vals[vals == self.nodata] = np.nan
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n_rows(self):
        return self.values.shape[0]

    @property
    def n_cols(self):
        return self.values.shape[1]

    @property
    def valid(self):
        return ~np.isnan(self.values)

    @property
    def extent(self):
        """``(min_easting, max_easting, min_northing, max_northing)``."""
        x0, y0, cs = self.origin_easting_m, self.origin_northing_m, self.cell_size_m
        return x0, x0 + self.n_cols * cs, y0, y0 + self.n_rows * cs

    def cell_centers(self):
        """Easting and northing of every cell centre, each shaped like ``values``."""
        cs = self.cell_size_m
        e = self.origin_easting_m + (np.arange(self.n_cols) + 0.5) * cs
        n = self.origin_northing_m + (self.n_rows - np.arange(self.n_rows) - 0.5) * cs
        return np.meshgrid(e, n)

    def with_values(self, values, units=None):
        return MagGrid(values, self.origin_easting_m, self.origin_northing_m, self.cell_size_m,
                       self.nodata, self.units if units is None else units, self.crs_label)

    def same_values(self, other):
        return np.array_equal(self.values, other.values, equal_nan=True)

    def __eq__(self, other):
        if not isinstance(other, MagGrid):
            return NotImplemented
        meta = ("origin_easting_m", "origin_northing_m", "cell_size_m", "nodata", "units",
                "crs_label")
        return all(getattr(self, k) == getattr(other, k) for k in meta) and self.same_values(other)

    __hash__ = None


def _fmt(x):
    x = float(x)
    return repr(int(x)) if x.is_integer() and abs(x) < 1e15 else repr(x)


def write_grid(grid: MagGrid) -> str:
    lines = [
        f"# ncols {grid.n_cols}",
        f"# nrows {grid.n_rows}",
        f"# origin_easting_m {_fmt(grid.origin_easting_m)}",
        f"# origin_northing_m {_fmt(grid.origin_northing_m)}",
        f"# cell_size_m {_fmt(grid.cell_size_m)}",
        f"# nodata {_fmt(grid.nodata)}",
        f"# units {grid.units}",
    ]
    if grid.crs_label:
        lines.append(f"# crs {grid.crs_label}")
    sentinel = _fmt(grid.nodata)
    for row in grid.values:
        lines.append(" ".join(sentinel if math.isnan(v) else _fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def parse_grid(text) -> MagGrid:
    """Parse the ``#``-header text format; accepts a string or a text stream."""
    if not isinstance(text, str):
        text = text.read()
    header = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            parts = line[1:].strip().split(None, 1)
            if not parts:
                continue
            key = parts[0]
            if key in header:
                raise GridParseError(f"duplicate header key {key!r}", lineno)
            header[key] = (parts[1].strip() if len(parts) > 1 else "", lineno)
            continue
        tokens = line.split()
        try:
            vals = [float(t) for t in tokens]
        except ValueError:
            raise GridParseError(f"non-numeric value in row: {line[:60]!r}", lineno) from None
        if not all(math.isfinite(v) for v in vals):
            raise GridParseError("non-finite value in row", lineno)
        rows.append((vals, lineno))

    missing = [k for k in _HEADER_KEYS if k not in header]
    if missing:
        raise GridParseError(f"missing header field(s): {', '.join(missing)}")

    def number(key, cast=float):
        value, lineno = header[key]
        try:
            return cast(value)
        except ValueError:
            raise GridParseError(f"bad value for {key}: {value!r}", lineno) from None

    ncols, nrows = number("ncols", int), number("nrows", int)
    if ncols < 1 or nrows < 1:
        raise GridParseError("ncols and nrows must be positive")
    if len(rows) != nrows:
        raise GridError(f"dimension mismatch: header declares {nrows} rows, body has {len(rows)}")
    for vals, lineno in rows:
        if len(vals) != ncols:
            raise GridParseError(f"expected {ncols} values, found {len(vals)}", lineno)
    return MagGrid(
        values=np.array([r for r, _ in rows], dtype=float),
        origin_easting_m=number("origin_easting_m"),
        origin_northing_m=number("origin_northing_m"),
        cell_size_m=number("cell_size_m"),
        nodata=number("nodata"),
        units=header["units"][0],
        crs_label=header.get("crs", ("", 0))[0],
    )


def read_grid(path) -> MagGrid:
    with open(path, encoding="utf-8") as fh:
        return parse_grid(fh.read())


# --- sampling -------------------------------------------------------------

def _fractional_index(grid, easting, northing):
    cs = grid.cell_size_m
    col = (np.asarray(easting, dtype=float) - grid.origin_easting_m) / cs - 0.5
    top = grid.origin_northing_m + grid.n_rows * cs
    row = (top - np.asarray(northing, dtype=float)) / cs - 0.5
    return row, col


def _axis_weights(f, n):
    f = np.clip(f, 0.0, n - 1)
    if n == 1:
        i0 = np.zeros(f.shape, dtype=int)
        return i0, i0, np.zeros(f.shape)
    i0 = np.minimum(np.floor(f).astype(int), n - 2)
    return i0, i0 + 1, f - i0


def sample_bilinear(grid: MagGrid, easting, northing):
    """Bilinear interpolation between cell centres.

    Points between the outermost centres and the grid edge take the edge
    values. A point is no-data when any cell carrying non-zero weight is.
    """
    row, col = _fractional_index(grid, easting, northing)
    r0, r1, tr = _axis_weights(row, grid.n_rows)
    c0, c1, tc = _axis_weights(col, grid.n_cols)
    v = grid.values
    bad = np.zeros(np.shape(row), dtype=bool)
    for ri, wr in ((r0, 1.0 - tr), (r1, tr)):
        for ci, wc in ((c0, 1.0 - tc), (c1, tc)):
            bad |= (wr * wc > 0) & np.isnan(v[ri, ci])
    # nested lerps reproduce equal neighbours exactly, unlike a weighted sum
    v00, v01 = np.nan_to_num(v[r0, c0]), np.nan_to_num(v[r0, c1])
    v10, v11 = np.nan_to_num(v[r1, c0]), np.nan_to_num(v[r1, c1])
    upper = v00 + tc * (v01 - v00)
    lower = v10 + tc * (v11 - v10)
    return np.where(bad, np.nan, upper + tr * (lower - upper))


def sample_nearest(grid: MagGrid, easting, northing):
    row, col = _fractional_index(grid, easting, northing)
    r = np.clip(np.floor(row + 0.5).astype(int), 0, grid.n_rows - 1)
    c = np.clip(np.floor(col + 0.5).astype(int), 0, grid.n_cols - 1)
    return grid.values[r, c]


_SAMPLERS = {"bilinear": sample_bilinear, "nearest": sample_nearest}


def resample(src: MagGrid, target_cell_size_m, method="bilinear") -> MagGrid:
    """Regrid onto a new cell size over the same origin and (rounded) extent."""
    target = check_positive("target_cell_size_m", target_cell_size_m, GridError)
    if method not in _SAMPLERS:
        raise GridError(f"unknown resampling method {method!r}; use bilinear or nearest")
    x_min, x_max, y_min, y_max = src.extent
    n_cols = int(round((x_max - x_min) / target))
    n_rows = int(round((y_max - y_min) / target))
    if n_cols < 1 or n_rows < 1:
        raise GridError(
            f"empty overlap: a {target:g} m cell does not fit the "
            f"{x_max - x_min:g} x {y_max - y_min:g} m extent")
    shell = MagGrid(np.zeros((n_rows, n_cols)), src.origin_easting_m, src.origin_northing_m,
                    target, src.nodata, src.units, src.crs_label)
    e, n = shell.cell_centers()
    return shell.with_values(_SAMPLERS[method](src, e, n))


# --- statistics -----------------------------------------------------------

@dataclass(frozen=True)
class GridStats:
    mean_nT: float
    median_nT: float
    mode_nT: float
    stddev_nT: float
    min_nT: float
    max_nT: float
    valid_cell_count: int

    def to_dict(self):
        return asdict(self)


def histogram_mode(values, bin_width):
    """Centre of the most populated bin; bins are centred on multiples of
    ``bin_width`` offset from the minimum, ties go to the lowest bin."""
    values = np.asarray(values, dtype=float)
    lo = values.min()
    idx = np.floor((values - lo) / bin_width + 0.5).astype(np.int64)
    counts = np.bincount(idx)
    return float(lo + int(np.argmax(counts)) * bin_width)


def descriptive_stats(grid: MagGrid, mode_bin_nT=DEFAULT_MODE_BIN_NT) -> GridStats:
    """Summary statistics over valid cells; ``stddev_nT`` is the population value."""
    check_positive("mode_bin_nT", mode_bin_nT, GridError)
    vals = grid.values[grid.valid]
    if vals.size == 0:
        raise GridError("grid has no valid cells")
    return GridStats(
        mean_nT=float(np.mean(vals)),
        median_nT=float(np.median(vals)),
        mode_nT=histogram_mode(vals, mode_bin_nT),
        stddev_nT=float(np.std(vals)),
        min_nT=float(vals.min()),
        max_nT=float(vals.max()),
        valid_cell_count=int(vals.size),
    )


# --- comparisons ----------------------------------------------------------

def check_registration(a: MagGrid, b: MagGrid):
    tol = 1e-9 * a.cell_size_m
    if a.values.shape != b.values.shape:
        raise RegistrationError(
            f"grids are not co-registered: shapes {a.values.shape} and {b.values.shape}")
    for key in ("origin_easting_m", "origin_northing_m", "cell_size_m"):
        if abs(getattr(a, key) - getattr(b, key)) > tol:
            raise RegistrationError(
                f"grids are not co-registered: {key} {getattr(a, key)!r} vs {getattr(b, key)!r}")


def ratio_compare(a: MagGrid, b: MagGrid, epsilon_nT=RATIO_EPSILON_NT):
    """Cellwise ``a / b``.

    Returns
    -------
    (MagGrid, int)
        The ratio grid and the number of cells blanked because ``|b|`` fell
        below ``epsilon_nT``.
    """
    check_registration(a, b)
    both = a.valid & b.valid
    guarded = both & (np.abs(np.nan_to_num(b.values)) <= epsilon_nT)
    ok = both & ~guarded
    out = np.full(a.values.shape, np.nan)
    out[ok] = a.values[ok] / b.values[ok]
    return a.with_values(out, units="ratio"), int(np.count_nonzero(guarded))


def subtract_compare(a: MagGrid, b: MagGrid, offset_policy="zero-min"):
    """``a - b`` shifted by a constant so the comparison map is non-negative.

    ``offset_policy`` is ``"zero-min"`` (offset = ``max(0, -min(a - b))``),
    ``"none"``, or a number used as the offset directly.
    """
    check_registration(a, b)
    diff = a.values - b.values
    valid = ~np.isnan(diff)
    if offset_policy == "zero-min":
        offset = max(0.0, -float(diff[valid].min())) if valid.any() else 0.0
    elif offset_policy == "none":
        offset = 0.0
    elif isinstance(offset_policy, (int, float)) and math.isfinite(offset_policy):
        offset = float(offset_policy)
    else:
        raise GridError(f"unknown offset policy {offset_policy!r}")
    return a.with_values(diff + offset), offset


@dataclass(frozen=True)
class SignalRatio:
    ratio: float
    correlation: float
    n_cells: int

    def to_dict(self):
        return asdict(self)


def _pearson(x, y):
    xc = x - x.mean()
    yc = y - y.mean()
    denom = math.sqrt(float(np.dot(xc, xc)) * float(np.dot(yc, yc)))
    return float(np.dot(xc, yc)) / denom if denom > 0 else math.nan


def signal_ratio(a: MagGrid, b: MagGrid, epsilon_nT=RATIO_EPSILON_NT) -> SignalRatio:
    """Mean cellwise ratio of ``a`` to ``b`` plus their Pearson correlation.

    The correlation is NaN when either grid is constant over the shared cells.
    """
    check_registration(a, b)
    ok = a.valid & b.valid
    ok &= np.abs(np.nan_to_num(b.values)) > epsilon_nT
    n = int(np.count_nonzero(ok))
    if n < 2:
        raise GridError(f"signal ratio needs at least 2 jointly valid cells, found {n}")
    av, bv = a.values[ok], b.values[ok]
    return SignalRatio(float(np.mean(av / bv)), _pearson(av, bv), n)


# --- profiles -------------------------------------------------------------

@dataclass(frozen=True)
class ProfileSample:
    chainage_m: float
    tmi_a_nT: float
    tmi_b_nT: float
    elevation_m: float
    difference_nT: float


def _inside(grid, e, n):
    x_min, x_max, y_min, y_max = grid.extent
    return x_min <= e <= x_max and y_min <= n <= y_max


def extract_profile(a: MagGrid, b: MagGrid, elevation: MagGrid, polyline, step_m):
    """Sample both TMI grids and the terrain at every ``step_m`` along a polyline."""
    step = check_positive("step_m", step_m, GridError)
    pts = [(float(e), float(n)) for e, n in polyline]
    if len(pts) < 2:
        raise GridError("profile polyline needs at least two vertices")
    for k, (e, n) in enumerate(pts):
        for label, g in (("grid a", a), ("grid b", b), ("elevation", elevation)):
            if not _inside(g, e, n):
                raise GridError(f"vertex {k} ({e:g}, {n:g}) lies outside the {label} extent")
    seg = np.array([math.dist(p, q) for p, q in zip(pts, pts[1:])])
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    total = cum[-1]
    if total == 0:
        raise GridError("profile polyline has zero length")
    count = int(math.floor(total / step + 1e-9)) + 1
    chain = np.arange(count) * step
    k = np.clip(np.searchsorted(cum, chain, side="right") - 1, 0, len(seg) - 1)
    safe = np.where(seg[k] > 0, seg[k], 1.0)
    t = np.clip((chain - cum[k]) / safe, 0.0, 1.0)
    p0 = np.array(pts)[k]
    p1 = np.array(pts)[k + 1]
    e = p0[:, 0] + t * (p1[:, 0] - p0[:, 0])
    n = p0[:, 1] + t * (p1[:, 1] - p0[:, 1])
    ta = sample_bilinear(a, e, n)
    tb = sample_bilinear(b, e, n)
    z = sample_bilinear(elevation, e, n)
    return [ProfileSample(float(c), float(x), float(y), float(h), float(x - y))
            for c, x, y, h in zip(chain, ta, tb, z)]


def difference_elevation_correlation(samples):
    """Pearson correlation of the along-profile TMI difference with terrain height."""
    pairs = [(s.difference_nT, s.elevation_m) for s in samples
             if math.isfinite(s.difference_nT) and math.isfinite(s.elevation_m)]
    if len(pairs) < 3:
        raise GridError(f"need at least 3 valid profile samples, found {len(pairs)}")
    d = np.array([p[0] for p in pairs])
    z = np.array([p[1] for p in pairs])
    r = _pearson(d, z)
    if math.isnan(r):
        raise GridError("difference or elevation has zero variance along the profile")
    return r


# --- tabular output -------------------------------------------------------

def _csv(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def profile_csv(samples):
    names = [f.name for f in fields(ProfileSample)]
    return _csv(names, [[getattr(s, k) for k in names] for s in samples])


def stats_csv(stats: GridStats):
    d = stats.to_dict()
    return _csv(list(d), [list(d.values())])
