"""Truncated fat Cantor set: nested interval geometry, point coding, the
natural measure and the coding constant C_eps.

Level k consists of ``m_k = b_1 * ... * b_k`` closed intervals of common
length ``c_k = L_k / m_k``. Each level-(k+1) interval sits inside a level-k
parent; the ``b_{k+1}`` children of a parent are equally spaced and flush with
the parent's endpoints, so 0 and 1 remain interval endpoints at every level.
Nothing is materialised per interval: geometry is recomputed from base-``b``
digits on demand.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import math

import numpy as np

from . import kernels
from .errors import ConfigError, ConstructionError, DomainError

TOWER_BRANCHING = (27, 729)
BRANCHING_CAP = 729


def default_schedule(lam, max_depth):
    """L_k = lam + (1 - lam) 2^-k for k = 0..K."""
    return tuple(lam + (1.0 - lam) * 2.0 ** -k for k in range(max_depth + 1))


def tower_branching(max_depth):
    """27 and 729 at levels 1-2 (so m_k = 3^(3^k)), then capped at 729."""
    return tuple((TOWER_BRANCHING + (BRANCHING_CAP,) * max_depth)[:max_depth])


@dataclass(frozen=True)
class CantorConfig:
    max_depth: int
    branching: Tuple[int, ...]
    lam: float = 0.5
    schedule: Optional[Tuple[float, ...]] = None

    def __post_init__(self):
        if not isinstance(self.max_depth, (int, np.integer)) or self.max_depth < 1:
            raise ConfigError("max_depth", f"must be an integer >= 1, got {self.max_depth!r}")
        object.__setattr__(self, "branching", tuple(int(b) for b in self.branching))
        if len(self.branching) != self.max_depth:
            raise ConfigError(
                "branching", f"needs {self.max_depth} entries, got {len(self.branching)}")
        if any(b < 2 for b in self.branching):
            raise ConfigError("branching", "every level needs at least 2 sub-intervals")
        if not 0.0 < self.lam < 1.0:
            raise ConfigError("lambda", f"must lie in (0, 1), got {self.lam!r}")
        if self.schedule is None:
            object.__setattr__(self, "schedule", default_schedule(self.lam, self.max_depth))
        sched = tuple(float(v) for v in self.schedule)
        object.__setattr__(self, "schedule", sched)
        if len(sched) != self.max_depth + 1:
            raise ConfigError("schedule", f"needs L_0..L_K ({self.max_depth + 1} values)")
        if sched[0] != 1.0:
            raise ConfigError("schedule", "L_0 must be 1")
        for k, v in enumerate(sched[1:], start=1):
            if not self.lam < v < 1.0:
                raise ConfigError("schedule", f"L_{k} = {v!r} not in (lambda, 1)")

    @classmethod
    def tower(cls, max_depth=2, lam=0.5):
        return cls(max_depth, tower_branching(max_depth), lam)

    @classmethod
    def from_dict(cls, d):
        if "max_depth" not in d:
            raise ConfigError("max_depth", "missing")
        K = d["max_depth"]
        if isinstance(K, bool) or not isinstance(K, int):
            raise ConfigError("max_depth", f"must be an integer, got {K!r}")
        lam = d.get("lambda", d.get("lam", 0.5))
        try:
            lam = float(lam)
        except (TypeError, ValueError):
            raise ConfigError("lambda", f"not a number: {lam!r}") from None
        br = d.get("branching", "tower")
        if isinstance(br, str):
            if br != "tower":
                raise ConfigError("branching", f"unknown preset {br!r}")
            br = tower_branching(K) if K >= 1 else ()
        elif isinstance(br, int):
            br = (br,) * K
        return cls(K, tuple(br), lam, d.get("schedule"))

    def to_dict(self):
        return {"max_depth": self.max_depth, "branching": list(self.branching),
                "lambda": self.lam, "schedule": list(self.schedule)}

    @property
    def is_tower_exact(self):
        """True when every level has exactly 3^(3^k) intervals."""
        return self.max_depth <= 2 and self.branching == TOWER_BRANCHING[: self.max_depth]


@dataclass(frozen=True)
class PointCode:
    """Interval indices i_1..i_depth (1-based, per level) of a point of E_K."""
    indices: Tuple[int, ...]
    digits: Tuple[int, ...] = field(repr=False, default=())
    point: Optional[float] = None

    @property
    def depth(self):
        return len(self.indices)


@dataclass(frozen=True)
class Gap:
    """x lies in a complementary interval first opened at ``level``."""
    level: int
    left: float
    right: float
    prefix: Tuple[int, ...]  # digits down to the gap level; the left flank is child prefix[-1]


class CantorLevels:
    """Immutable level geometry for a :class:`CantorConfig`."""

    def __init__(self, config):
        self.config = config
        K = config.max_depth
        b = config.branching
        L = config.schedule
        counts = [1]
        for bk in b:
            counts.append(counts[-1] * bk)
        self.counts = tuple(counts)  # m_0..m_K as exact ints
        self.c = np.array([L[k] / float(counts[k]) for k in range(K + 1)])
        self.c[0] = 1.0
        self.s = np.zeros(K + 1)
        for k in range(1, K + 1):
            if not b[k - 1] * self.c[k] < self.c[k - 1]:
                raise ConstructionError(
                    k, f"{b[k - 1]} children of length {self.c[k]:.6g} do not fit "
                       f"(with positive gaps) in a parent of length {self.c[k - 1]:.6g}")
            self.s[k] = (self.c[k - 1] - self.c[k]) / (b[k - 1] - 1)
        self.branching = np.asarray(b, dtype=np.int64)
        self.c.setflags(write=False)
        self.s.setflags(write=False)
        self.branching.setflags(write=False)

    @property
    def depth(self):
        return self.config.max_depth

    def length(self, k):
        return float(self.c[k])

    def measure(self, k):
        """L_k: total length of E_k, closed form."""
        return self.config.schedule[k]

    def tv_bound(self):
        """Total-variation distance between normalised nu|E_K and normalised nu."""
        LK = self.config.schedule[-1]
        return (LK - self.config.lam) / LK

    def digits(self, k, i):
        """Base-b digits d_1..d_k (0-based) of the 1-based level-k index i."""
        if not 1 <= k <= self.depth:
            raise DomainError(f"level {k} outside 1..{self.depth}")
        if not 1 <= i <= self.counts[k]:
            raise DomainError(f"index {i} outside 1..{self.counts[k]} at level {k}")
        r = i - 1
        out = []
        for j in range(k, 0, -1):
            r, d = divmod(r, int(self.branching[j - 1]))
            out.append(d)
        return tuple(reversed(out))

    def index(self, digits):
        """1-based level-len(digits) index of a digit path."""
        r = 0
        for j, d in enumerate(digits):
            r = r * int(self.branching[j]) + int(d)
        return r + 1

    def interval(self, k, i):
        """Closed interval I_{k,i} as (start, end)."""
        if k == 0:
            return 0.0, 1.0
        dig = np.asarray([self.digits(k, i)], dtype=np.int64)
        lo, hi = kernels.positions(dig, self.branching[:k], self.c, self.s)
        return float(lo[0]), float(hi[0])

    def table(self):
        """Rows (k, m_k, c_k, L_k) for k = 0..K."""
        return [(k, self.counts[k], float(self.c[k]), self.config.schedule[k])
                for k in range(self.depth + 1)]


def build_levels(config):
    return CantorLevels(config)


def _code_from_digits(levels, digits, point=None):
    idx = []
    r = 0
    for j, d in enumerate(digits):
        r = r * int(levels.branching[j]) + int(d)
        idx.append(r + 1)
    return PointCode(tuple(idx), tuple(int(d) for d in digits), point)


def locate(x, levels) -> Union[PointCode, Gap]:
    """Code of x to depth K, or the gap containing it."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"x = {x!r} outside [0, 1]")
    dig, gap, xl, xr = kernels.locate(np.array([float(x)]), levels.branching, levels.c, levels.s)
    g = int(gap[0])
    if g == 0:
        return _code_from_digits(levels, dig[0], float(x))
    return Gap(g, float(xl[0]), float(xr[0]), tuple(int(d) for d in dig[0, :g]))


def n_of_pair(x: PointCode, y: PointCode) -> int:
    """Deepest level at which x and y share an interval (0 if none)."""
    if x.point is not None and y.point is not None and x.point == y.point:
        raise DomainError("n(x, y) is undefined for x == y")
    n = 0
    for a, b in zip(x.indices, y.indices):
        if a != b:
            break
        n += 1
    return n


def n_of_pairs(dx, dy):
    """Vectorised n(x, y) from digit arrays of shape (N, K)."""
    diff = np.asarray(dx) != np.asarray(dy)
    any_diff = diff.any(axis=1)
    return np.where(any_diff, diff.argmax(axis=1), diff.shape[1]).astype(np.int64)


def sample_nu_coded(levels, rng, size):
    """Draw ``size`` points from nu|E_K (normalised) with their digit codes."""
    K = levels.depth
    digits = rng.integers(0, levels.branching, size=(size, K), dtype=np.int64)
    lo, hi = kernels.positions(digits, levels.branching, levels.c, levels.s)
    x = lo + rng.random(size) * (hi - lo)
    return x, digits


def sample_nu(levels, rng, size=None):
    """Uniform point of E_K: uniform deepest interval, then uniform inside it."""
    x, _ = sample_nu_coded(levels, rng, 1 if size is None else size)
    return float(x[0]) if size is None else x


def c_epsilon(eps, levels=None, n_max=64):
    """Smallest constant with 2^n(x,y) <= C |x - y|^(-eps/2) on F.

    Uses |x - y| <= 3^(-3^n) for n >= 1 (and <= 1 for n = 0). With ``levels``
    the bound is taken level by level from c_n instead, which covers
    capped or custom branching.
    """
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps = {eps!r} outside (0, 1)")
    if levels is not None:
        return max(2.0 ** n * float(levels.c[n]) ** (eps / 2) for n in range(levels.depth + 1))
    best = 1.0
    prev = -math.inf
    for n in range(1, n_max + 1):
        # log of 2^n 3^(-3^n eps/2); the sequence rises then falls
        val = n * math.log(2.0) - 3.0 ** n * (eps / 2) * math.log(3.0)
        if val < prev:
            break
        best = max(best, math.exp(val))
        prev = val
    return best


def points_from_digits(levels, digits, u):
    """Points at relative offsets ``u`` in [0, 1] inside the deepest intervals."""
    lo, hi = kernels.positions(np.ascontiguousarray(digits, dtype=np.int64),
                               levels.branching, levels.c, levels.s)
    return lo + np.asarray(u) * (hi - lo)


def pair_with_level(levels, n, rng):
    """A random pair of E_K points with n(x, y) == n exactly, as two PointCodes."""
    K = levels.depth
    if not 0 <= n < K:
        raise DomainError(f"n must lie in 0..{K - 1}, got {n}")
    b = levels.branching
    dx = rng.integers(0, b, size=K, dtype=np.int64)
    dy = rng.integers(0, b, size=K, dtype=np.int64)
    dy[:n] = dx[:n]
    shift = rng.integers(1, b[n])
    dy[n] = (dx[n] + shift) % b[n]
    pts = points_from_digits(levels, np.stack([dx, dy]), rng.random(2))
    return (_code_from_digits(levels, dx, float(pts[0])),
            _code_from_digits(levels, dy, float(pts[1])))
