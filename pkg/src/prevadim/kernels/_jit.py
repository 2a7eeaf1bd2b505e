"""numba kernels. Same arithmetic, same summation order as ``_np`` so both
backends return bit-identical results."""

import numba as nb
import numpy as np

from .constants import GOLDEN, M1, M2, ROOT

njit_kwargs = {"nogil": True, "cache": True, "fastmath": False}

_GOLDEN = np.uint64(GOLDEN)
_M1 = np.uint64(M1)
_M2 = np.uint64(M2)
_ROOT = np.uint64(ROOT)


@nb.njit(inline="always", **njit_kwargs)
def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


@nb.njit(inline="always", **njit_kwargs)
def _step(key, d):
    return _mix(key ^ ((np.uint64(d) + np.uint64(1)) * _GOLDEN))


@nb.njit(inline="always", **njit_kwargs)
def _bit(key, seedkey, fill):
    if fill >= 0:
        return float(fill)
    return float(_mix(key ^ seedkey) >> np.uint64(63))


@nb.njit(**njit_kwargs)
def mix64(z):
    out = np.empty_like(z)
    for i in range(z.size):
        out[i] = _mix(z[i])
    return out


@nb.njit(**njit_kwargs)
def path_keys(digits):
    n, depth = digits.shape
    keys = np.empty((n, depth), dtype=np.uint64)
    for i in range(n):
        key = _ROOT
        for k in range(depth):
            key = _step(key, digits[i, k])
            keys[i, k] = key
    return keys


@nb.njit(**njit_kwargs)
def phi_from_keys(keys, seedkey, fill):
    n, depth = keys.shape
    out = np.zeros(n)
    for i in range(n):
        acc = 0.0
        w = 1.0
        for k in range(depth):
            w *= 0.5
            acc += w * _bit(keys[i, k], seedkey, fill)
        out[i] = acc
    return out


@nb.njit(**njit_kwargs)
def bit_matrix(keys, seedkeys):
    m = seedkeys.size
    depth = keys.size
    out = np.empty((m, depth), dtype=np.uint8)
    for j in range(m):
        for k in range(depth):
            out[j, k] = np.uint8(_mix(seedkeys[j] ^ keys[k]) >> np.uint64(63))
    return out


@nb.njit(**njit_kwargs)
def positions(digits, branching, c, s):
    n, depth = digits.shape
    lo = np.zeros(n)
    hi = np.ones(n)
    for i in range(n):
        a = 0.0
        e = 1.0
        for k in range(depth):
            d = digits[i, k]
            ck = c[k + 1]
            if d == branching[k] - 1:
                a = e - ck
            else:
                a = a + d * s[k + 1]
                e = a + ck
        lo[i] = a
        hi[i] = e
    return lo, hi


@nb.njit(**njit_kwargs)
def locate(x, branching, c, s):
    n = x.size
    depth = branching.size
    digits = np.full((n, depth), -1, dtype=np.int64)
    gap = np.zeros(n, dtype=np.int64)
    xl = np.full(n, np.nan)
    xr = np.full(n, np.nan)
    for i in range(n):
        xi = x[i]
        a = 0.0
        e = 1.0
        for k in range(depth):
            b = branching[k]
            ck = c[k + 1]
            sk = s[k + 1]
            d = np.int64(np.floor((xi - a) / sk))
            if d < 0:
                d = 0
            elif d > b - 1:
                d = b - 1
            if d == b - 1:
                ca = e - ck
                ce = e
            else:
                ca = a + d * sk
                ce = ca + ck
            if xi < ca and d > 0:
                dl = d - 1
            elif xi > ce:
                dl = d
            else:
                digits[i, k] = d
                a = ca
                e = ce
                continue
            digits[i, k] = dl
            gap[i] = k + 1
            xl[i] = a + dl * sk + ck
            if dl + 1 == b - 1:
                xr[i] = e - ck
            else:
                xr[i] = a + (dl + 1) * sk
            break
    return digits, gap, xl, xr


@nb.njit(**njit_kwargs)
def phi_at(x, branching, c, s, seedkey, fill):
    n = x.size
    depth = branching.size
    digits, gap, xl, xr = locate(x, branching, c, s)
    out = np.empty(n)
    for i in range(n):
        g = gap[i]
        key = _ROOT
        acc = 0.0
        w = 1.0
        if g == 0:
            for k in range(depth):
                key = _step(key, digits[i, k])
                w *= 0.5
                acc += w * _bit(key, seedkey, fill)
            out[i] = acc
            continue
        lvl = g - 1
        for k in range(lvl):
            key = _step(key, digits[i, k])
            w *= 0.5
            acc += w * _bit(key, seedkey, fill)
        w *= 0.5
        kl = _step(key, digits[i, lvl])
        kr = _step(key, digits[i, lvl] + 1)
        pl = acc + w * _bit(kl, seedkey, fill)
        pr = acc + w * _bit(kr, seedkey, fill)
        for k in range(lvl + 1, depth):
            w *= 0.5
            kl = _step(kl, branching[k] - 1)
            kr = _step(kr, 0)
            pl += w * _bit(kl, seedkey, fill)
            pr += w * _bit(kr, seedkey, fill)
        t = (x[i] - xl[i]) / (xr[i] - xl[i])
        out[i] = pl + (pr - pl) * t
    return out
