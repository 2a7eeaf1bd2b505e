"""The witness functions phi_omega (and their surface extensions) and the
lifted graph measures nu_{omega,f}."""

import numpy as np

from . import kernels
from .cantor import sample_nu_coded
from .errors import DomainError
from .functions import FunctionHandle
from .labeling import Labeling

MAX_BREAKPOINT_INTERVALS = 1 << 25


class WitnessFunction(FunctionHandle):
    """phi_omega truncated at the construction depth K.

    On E_K: sum_{k<=K} 2^-k omega(I_{k, i_k(x)}). On a gap: linear
    interpolation between the values at the two flanking endpoints of F.
    For ``dim >= 2`` only the first coordinate is used.
    """

    def __init__(self, levels, labeling, dim=1):
        if labeling.levels is None:
            labeling = Labeling(labeling.seed, levels, labeling.fill)
        self.levels = levels
        self.labeling = labeling
        super().__init__(dim, self._evaluate, f"phi[{labeling.seed}]" if labeling.fill is None
                         else f"phi[fill={labeling.fill}]")

    @property
    def depth(self):
        return self.levels.depth

    def _phi1(self, x):
        flat = np.ascontiguousarray(x, dtype=np.float64).ravel()
        if flat.size and (flat.min() < 0.0 or flat.max() > 1.0):
            raise DomainError("phi is defined on [0, 1]")
        lv = self.levels
        out = kernels.phi_at(flat, lv.branching, lv.c, lv.s,
                             self.labeling.seedkey, self.labeling.fill_code)
        return out.reshape(np.shape(x))

    def _evaluate(self, *coords):
        x = coords[0]
        if len(coords) == 1:
            return self._phi1(x)
        shape = np.broadcast_shapes(*(c.shape for c in coords))
        return np.broadcast_to(self._phi1(x), shape).copy()

    def breakpoints(self, chunk=1 << 19):
        """Sorted (lo, hi, value) of the level-K intervals; phi is constant on each.

        Between consecutive intervals phi is linear, so these arrays describe
        the truncated function exactly.
        """
        lv = self.levels
        m = lv.counts[-1]
        if m > MAX_BREAKPOINT_INTERVALS:
            raise DomainError(f"{m} level-{lv.depth} intervals is too many to enumerate")
        lo = np.empty(m)
        hi = np.empty(m)
        val = np.empty(m)
        radix = np.cumprod(lv.branching[::-1])[::-1]  # m_K / m_{k-1}
        for a in range(0, m, chunk):
            idx = np.arange(a, min(m, a + chunk), dtype=np.int64)
            digits = (idx[:, None] % radix[None, :]) // np.append(radix[1:], 1)[None, :]
            l, h = kernels.positions(digits, lv.branching, lv.c, lv.s)
            lo[a:a + idx.size] = l
            hi[a:a + idx.size] = h
            val[a:a + idx.size] = self.on_codes(digits)
        return lo, hi, val

    def on_codes(self, digits):
        """phi at points of E_K given their digit codes (N, K)."""
        keys = kernels.path_keys(np.ascontiguousarray(digits, dtype=np.int64))
        return kernels.phi_from_keys(keys, self.labeling.seedkey, self.labeling.fill_code)


def witness(levels, seed=None, fill=None, dim=1):
    lab = Labeling(0 if seed is None else seed, levels, fill)
    return WitnessFunction(levels, lab, dim)


def eval_phi(w, x):
    """phi_omega(x); scalar in, scalar out."""
    if w.dim != 1:
        raise DomainError("eval_phi expects a one-dimensional witness")
    out = w(np.asarray(x, dtype=np.float64))
    return float(out) if np.ndim(out) == 0 else out


def surface_extend(w, d):
    """phi_{d,omega}(x_1, ..., x_d) = phi_omega(x_1)."""
    if w.dim != 1:
        raise DomainError("surface_extend expects a one-dimensional witness")
    if d < 2:
        raise DomainError(f"surface dimension must be >= 2, got {d}")
    return WitnessFunction(w.levels, w.labeling, d)


def sample_graph_coded(w, f, rng, size):
    """Draw from nu_{omega,f}; returns (x, height, digits)."""
    if f.dim != 1:
        raise DomainError("the graph measure is defined for one-dimensional f")
    x, digits = sample_nu_coded(w.levels, rng, size)
    height = w.on_codes(digits) + f(x)
    return x, height, digits


def sample_graph_measure(w, f, rng, size=None):
    """(x, phi(x) + f(x)) with x ~ nu; one point or an (size, 2) array."""
    x, h, _ = sample_graph_coded(w, f, rng, 1 if size is None else size)
    pts = np.column_stack([x, h])
    return (float(pts[0, 0]), float(pts[0, 1])) if size is None else pts
