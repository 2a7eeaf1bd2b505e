"""Pure-numpy kernels. Vectorised over points, looping over construction levels."""

import numpy as np

from .constants import GOLDEN, M1, M2, ROOT

_GOLDEN = np.uint64(GOLDEN)
_M1 = np.uint64(M1)
_M2 = np.uint64(M2)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S63 = np.uint64(63)
_ONE = np.uint64(1)


def mix64(z):
    z = np.asarray(z, dtype=np.uint64)
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


def _step_key(key, d):
    return mix64(key ^ ((d.astype(np.uint64) + _ONE) * _GOLDEN))


def _bit(key, seedkey, fill):
    if fill >= 0:
        return np.full(np.shape(key), float(fill))
    return (mix64(key ^ np.uint64(seedkey)) >> _S63).astype(np.float64)


def path_keys(digits):
    n, depth = digits.shape
    keys = np.empty((n, depth), dtype=np.uint64)
    key = np.full(n, ROOT, dtype=np.uint64)
    for k in range(depth):
        key = _step_key(key, digits[:, k])
        keys[:, k] = key
    return keys


def phi_from_keys(keys, seedkey, fill):
    n, depth = keys.shape
    acc = np.zeros(n)
    w = 1.0
    for k in range(depth):
        w *= 0.5
        acc += w * _bit(keys[:, k], seedkey, fill)
    return acc


def bit_matrix(keys, seedkeys):
    # keys: (K,) path keys of one point; seedkeys: (M,) labelings
    h = mix64(seedkeys[:, None] ^ keys[None, :])
    return (h >> _S63).astype(np.uint8)


def positions(digits, branching, c, s):
    n, depth = digits.shape
    lo = np.zeros(n)
    hi = np.ones(n)
    for k in range(depth):
        b = branching[k]
        ck = c[k + 1]
        d = digits[:, k]
        last = d == b - 1
        new_lo = np.where(last, hi - ck, lo + d * s[k + 1])
        hi = np.where(last, hi, new_lo + ck)
        lo = new_lo
    return lo, hi


def _descend(keys, acc, lo_k, depth, branching, seedkey, fill, rightmost):
    # continue the series from level lo_k (exclusive) to depth along extreme children
    w = 0.5 ** (lo_k + 1)
    key = keys
    for k in range(lo_k + 1, depth):
        d = np.full(key.shape, branching[k] - 1 if rightmost else 0, dtype=np.int64)
        key = _step_key(key, d)
        w *= 0.5
        acc = acc + w * _bit(key, seedkey, fill)
    return acc


def locate(x, branching, c, s):
    """Batch locate. Returns digits (N, K) (-1 past a gap), gap level (0 if in E_K),
    and flanking endpoints (nan for points in E_K)."""
    x = np.asarray(x, dtype=np.float64)
    n = x.size
    depth = len(branching)
    digits = np.full((n, depth), -1, dtype=np.int64)
    gap = np.zeros(n, dtype=np.int64)
    xl = np.full(n, np.nan)
    xr = np.full(n, np.nan)
    lo = np.zeros(n)
    hi = np.ones(n)
    act = np.arange(n)
    for k in range(depth):
        if act.size == 0:
            break
        b = branching[k]
        ck = c[k + 1]
        sk = s[k + 1]
        xa, a, e = x[act], lo[act], hi[act]
        d = np.clip(np.floor((xa - a) / sk), 0, b - 1).astype(np.int64)
        ca = np.where(d == b - 1, e - ck, a + d * sk)
        ce = np.where(d == b - 1, e, ca + ck)
        below = (xa < ca) & (d > 0)
        above = xa > ce
        inside = ~(below | above)
        # gap between children (dl, dl + 1)
        dl = np.where(below, d - 1, d)
        g = ~inside
        if g.any():
            gi = act[g]
            dlg = dl[g]
            left_end = np.where(dlg == b - 1, e[g], a[g] + dlg * sk + ck)
            right_start = np.where(dlg + 1 == b - 1, e[g] - ck, a[g] + (dlg + 1) * sk)
            digits[gi, k] = dlg
            gap[gi] = k + 1
            xl[gi] = left_end
            xr[gi] = right_start
        ii = act[inside]
        digits[ii, k] = d[inside]
        lo[ii] = ca[inside]
        hi[ii] = ce[inside]
        act = ii
    return digits, gap, xl, xr


def phi_at(x, branching, c, s, seedkey, fill):
    x = np.asarray(x, dtype=np.float64)
    depth = len(branching)
    digits, gap, xl, xr = locate(x, branching, c, s)
    out = np.empty(x.size)
    inside = gap == 0
    if inside.any():
        out[inside] = phi_from_keys(path_keys(digits[inside]), seedkey, fill)
    for g in np.unique(gap[~inside]):
        sel = np.flatnonzero(gap == g)
        lvl = g - 1
        dig = digits[sel, : g]
        keys = path_keys(dig)
        prefix = phi_from_keys(keys[:, :lvl], seedkey, fill) if lvl > 0 else np.zeros(sel.size)
        w = 0.5 ** g
        kl = keys[:, lvl]
        kr = _step_key(keys[:, lvl - 1] if lvl > 0 else np.full(sel.size, ROOT, dtype=np.uint64), dig[:, lvl] + 1)
        pl = _descend(kl, prefix + w * _bit(kl, seedkey, fill), lvl, depth, branching, seedkey, fill, True)
        pr = _descend(kr, prefix + w * _bit(kr, seedkey, fill), lvl, depth, branching, seedkey, fill, False)
        t = (x[sel] - xl[sel]) / (xr[sel] - xl[sel])
        out[sel] = pl + (pr - pl) * t
    return out
