"""Box counting for graphs of curves and surfaces, and log-log dimension fits.

A column of width delta is sampled at ``samples_per_column`` evenly spaced
points including both column edges; adjacent columns share their edge sample.
The graph over the column meets floor(max/delta) - floor(min/delta) + 1 boxes.
"""

import math
from dataclasses import asdict, dataclass
from typing import Optional, Tuple

import numpy as np

from .errors import DomainError

WINDOW_TOP = 2.0 ** -4
WINDOW_FLOOR = 2.0 ** -20  # finest scale we are willing to count at
MIN_SCALES = 4
MIN_OCTAVES = 2.0
DEFAULT_SPC = 32
_CHUNK = 1 << 21  # samples per evaluation chunk


@dataclass(frozen=True)
class DimFit:
    scales: Tuple[float, ...]
    counts: Tuple[int, ...]
    slope: float
    intercept: float
    r2: float
    window: Optional[Tuple[float, float]] = None
    window_note: str = ""

    def to_dict(self):
        return asdict(self)

    def rows(self):
        """(delta, count, log(1/delta), log(count)) per scale."""
        return [(d, n, -math.log(d), math.log(n)) for d, n in zip(self.scales, self.counts)]


def _check(delta, spc):
    if not delta > 0.0:
        raise DomainError(f"delta must be > 0, got {delta!r}")
    if delta > 1.0:
        raise DomainError(f"delta must be <= 1, got {delta!r}")
    if spc < 4:
        raise DomainError(f"samples per column must be >= 4, got {spc}")


def _columns(delta):
    return max(1, math.ceil(1.0 / delta - 1e-9))


def _column_extrema(fn, delta, spc, ncol):
    """Per-column (min, max) of fn along [0, 1] with shared edge samples."""
    step = spc - 1
    lo = np.empty(ncol)
    hi = np.empty(ncol)
    per = max(1, _CHUNK // step)
    for c0 in range(0, ncol, per):
        c1 = min(ncol, c0 + per)
        j = np.arange(c0 * step, c1 * step + 1)
        x = np.minimum(j * (delta / step), 1.0)
        v = fn(x)
        body = v[:-1].reshape(c1 - c0, step)
        lo[c0:c1] = np.minimum(body.min(axis=1), v[step::step])
        hi[c0:c1] = np.maximum(body.max(axis=1), v[step::step])
    return lo, hi


def box_count_curve(g, delta, samples_per_column=DEFAULT_SPC):
    """Number of delta-boxes met by the graph of g over [0, 1]."""
    _check(delta, samples_per_column)
    if g.dim != 1:
        raise DomainError(f"box_count_curve needs a curve, got dimension {g.dim}")
    lo, hi = _column_extrema(g, delta, samples_per_column, _columns(delta))
    return int((np.floor(hi / delta) - np.floor(lo / delta) + 1).sum())


def box_count_surface(g, delta, samples_per_cell=DEFAULT_SPC // 4):
    """Number of delta-cubes met by the graph of g over [0, 1]^2."""
    _check(delta, samples_per_cell)
    if g.dim != 2:
        raise DomainError(f"box_count_surface needs a surface, got dimension {g.dim}")
    ncol = _columns(delta)
    step = samples_per_cell - 1
    t = np.minimum(np.arange(ncol * step + 1) * (delta / step), 1.0)
    total = 0
    for i in range(ncol):
        xs = t[i * step: i * step + samples_per_cell]
        v = g(xs[:, None], t[None, :])
        body = v[:, :-1].reshape(samples_per_cell, ncol, step)
        edge = v[:, step::step]
        lo = np.minimum(body.min(axis=(0, 2)), edge.min(axis=0))
        hi = np.maximum(body.max(axis=(0, 2)), edge.max(axis=0))
        total += int((np.floor(hi / delta) - np.floor(lo / delta) + 1).sum())
    return total


def box_count_piecewise(g, lo, hi, val, delta):
    """Exact box count for a curve that is constant on sorted intervals [lo_i, hi_i]
    (value val_i) and linear in between. ``g`` supplies the column-edge values.

    This is the samples_per_column -> infinity limit of box_count_curve.
    """
    _check(delta, 4)
    ncol = _columns(delta)
    edges = g(np.minimum(np.arange(ncol + 1) * delta, 1.0))
    mn = np.minimum(edges[:-1], edges[1:])
    mx = np.maximum(edges[:-1], edges[1:])
    for ends in (lo, hi):
        col = np.minimum((ends / delta).astype(np.int64), ncol - 1)
        starts = np.flatnonzero(np.r_[True, col[1:] != col[:-1]])
        cols = col[starts]
        mn[cols] = np.minimum(mn[cols], np.minimum.reduceat(val, starts))
        mx[cols] = np.maximum(mx[cols], np.maximum.reduceat(val, starts))
    return int((np.floor(mx / delta) - np.floor(mn / delta) + 1).sum())


def fit_dimension(scales, counts, window=None, window_note=""):
    """Least-squares slope of log N against log(1/delta)."""
    d = np.asarray(scales, dtype=np.float64)
    n = np.asarray(counts, dtype=np.float64)
    if d.size != n.size:
        raise DomainError("scales and counts differ in length")
    if d.size < MIN_SCALES:
        raise DomainError(f"need at least {MIN_SCALES} scales, got {d.size}")
    if np.any(d <= 0) or np.any(n <= 0):
        raise DomainError("scales and counts must be positive")
    if math.log2(d.max() / d.min()) < MIN_OCTAVES - 1e-12:
        raise DomainError(f"scales must span at least {MIN_OCTAVES:g} octaves")
    order = np.argsort(-d)
    d, n = d[order], n[order]
    X = -np.log(d)
    Y = np.log(n)
    slope, intercept = np.polyfit(X, Y, 1)
    resid = Y - (slope * X + intercept)
    ss = float(((Y - Y.mean()) ** 2).sum())
    r2 = 1.0 - float((resid ** 2).sum()) / ss if ss > 0 else 1.0
    return DimFit(tuple(float(v) for v in d), tuple(int(v) for v in n), float(slope),
                  float(intercept), r2, window, window_note)


def dyadic_scales(top, bottom):
    """2^-j for every integer j with bottom <= 2^-j <= top."""
    j0 = math.ceil(-math.log2(top) - 1e-12)
    j1 = math.floor(-math.log2(bottom) + 1e-12)
    return [2.0 ** -j for j in range(j0, j1 + 1)]


def parse_scales(text):
    """'2^-4..2^-14' (dyadic range) or a comma list of numbers / 2^-j terms."""
    def one(tok):
        tok = tok.strip()
        if tok.startswith("2^"):
            return 2.0 ** float(tok[2:])
        return float(tok)

    if ".." in text:
        a, b = text.split("..", 1)
        hi, lo = sorted((one(a), one(b)), reverse=True)
        return dyadic_scales(hi, lo)
    return sorted((one(t) for t in text.split(",") if t.strip()), reverse=True)


def clamped_window(levels, top=WINDOW_TOP, floor=WINDOW_FLOOR):
    """Scales covering the closed window [max(c_K, floor), top].

    Dyadic scales inside the window plus its lower endpoint c_K when that is
    reachable, so the fit sees the whole window rather than stopping up to an
    octave short. When fewer than MIN_SCALES result (shallow constructions) the
    window is extended below c_K and the note says so.
    Returns (scales, note).
    """
    cK = float(levels.c[-1])
    bottom = max(cK, floor)
    scales = dyadic_scales(top, bottom)
    if cK >= floor and cK < scales[-1] * (1 - 1e-9) and cK <= top:
        scales.append(cK)
    note = "clamped to [c_K, 2^-4]" if cK >= floor else f"clamped to [{floor:.3g}, 2^-4] (c_K finer)"
    if len(scales) < MIN_SCALES or math.log2(scales[0] / scales[-1]) < MIN_OCTAVES:
        scales = [top * 2.0 ** -j for j in range(MIN_SCALES)]
        note = f"extended below c_K = {cK:.4g} to reach {MIN_SCALES} scales"
    return scales, note


def box_dimension(g, scales, samples_per_column=DEFAULT_SPC, window=None, window_note=""):
    """Box counts at each scale and the fitted slope."""
    count = box_count_curve if g.dim == 1 else box_count_surface
    counts = [count(g, d, samples_per_column) for d in scales]
    return fit_dimension(scales, counts, window, window_note)


def witness_dimension(w, exact=True, samples_per_column=DEFAULT_SPC, floor=None):
    """Box-count fit of a witness graph over its clamped scale window.

    ``exact`` counts from the witness breakpoints, which makes the full window
    down to c_K affordable; otherwise columns are sampled and the window is
    floored at 2^-20.
    """
    if floor is None:
        floor = 0.0 if exact else WINDOW_FLOOR
    scales, note = clamped_window(w.levels, floor=floor)
    window = (min(scales), max(scales))
    if not exact:
        return box_dimension(w, scales, samples_per_column, window, note)
    lo, hi, val = w.breakpoints()
    counts = [box_count_piecewise(w, lo, hi, val, d) for d in scales]
    return fit_dimension(scales, counts, window, note + "; exact piecewise counts")
