"""Evaluable continuous functions on [0,1]^d with pointwise algebra, plus a
small text syntax (``fn-spec``) used by the CLI.

fn-spec grammar::

    spec := term ('+' term)*
    term := [number '*'] name [':' key=value (',' key=value)*]

e.g. ``10*linear``, ``weierstrass:a=0.5,b=3 + 0.1*sinxy``, ``phi``.
"""

import numbers
import re

import numpy as np

from .errors import DomainError


class FunctionHandle:
    """A vectorised map [0,1]^d -> R.

    ``fn`` receives ``d`` broadcastable float arrays and returns an array of
    the broadcast shape.
    """

    def __init__(self, dim, fn, name="f"):
        if dim < 1:
            raise DomainError(f"dimension must be >= 1, got {dim}")
        self.dim = int(dim)
        self._fn = fn
        self.name = name

    def __call__(self, *coords):
        if len(coords) != self.dim:
            raise DomainError(f"{self.name} takes {self.dim} coordinate(s), got {len(coords)}")
        arrs = [np.asarray(c, dtype=np.float64) for c in coords]
        out = np.asarray(self._fn(*arrs), dtype=np.float64)
        shape = np.broadcast_shapes(*(a.shape for a in arrs))
        if out.shape != shape:
            out = np.broadcast_to(out, shape).copy()
        return out

    def on_grid(self, n):
        """Values on the closed uniform grid with n points per axis (C order, x first)."""
        t = np.linspace(0.0, 1.0, n)
        mesh = np.meshgrid(*([t] * self.dim), indexing="ij")
        return self(*mesh)

    def _coerce(self, other):
        if isinstance(other, FunctionHandle):
            if other.dim != self.dim:
                raise DomainError(f"dimension mismatch: {self.dim} vs {other.dim}")
            return other
        if isinstance(other, numbers.Real):
            return constant(float(other), self.dim)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        f, g = self, other
        return FunctionHandle(self.dim, lambda *x: f(*x) + g(*x), f"({f.name} + {g.name})")

    __radd__ = __add__

    def __mul__(self, a):
        if not isinstance(a, numbers.Real):
            return NotImplemented
        a = float(a)
        f = self
        return FunctionHandle(self.dim, lambda *x: a * f(*x), f"{a!r}*{f.name}")

    __rmul__ = __mul__

    def __neg__(self):
        return -1.0 * self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __repr__(self):
        return f"FunctionHandle(dim={self.dim}, name={self.name!r})"


def constant(c, dim=1):
    c = float(c)
    return FunctionHandle(dim, lambda *x: np.full(np.broadcast_shapes(*(a.shape for a in x)), c),
                          f"const({c!r})")


def zero(dim=1):
    h = constant(0.0, dim)
    h.name = "zero"
    return h


def coordinate(j, dim=1):
    if not 0 <= j < dim:
        raise DomainError(f"coordinate {j} out of range for dimension {dim}")
    return FunctionHandle(dim, lambda *x: x[j] + 0.0, "xyz"[j] if j < 3 else f"x{j}")


def linear(dim=1):
    """g(x_1, ..., x_d) = x_1."""
    h = coordinate(0, dim)
    h.name = "linear"
    return h


def weierstrass(a=0.5, b=3.0, terms=30, dim=1):
    """W(x) = sum_{k=0}^{terms} a^k cos(b^k pi x_1); box dimension 2 + log a / log b."""
    if not (0 < a < 1 and a * b > 1):
        raise DomainError(f"need 0 < a < 1 < ab, got a={a}, b={b}")
    amp = a ** np.arange(terms + 1)
    freq = np.pi * b ** np.arange(terms + 1)

    def fn(*x):
        t = x[0]
        out = np.zeros(t.shape)
        for ak, wk in zip(amp, freq):
            out += ak * np.cos(wk * t)
        return out

    return FunctionHandle(dim, fn, f"weierstrass(a={a!r},b={b!r})")


def sin_xy(freq=4.0):
    """sin(freq * pi * x * y) on [0,1]^2."""
    return FunctionHandle(2, lambda x, y: np.sin(freq * np.pi * x * y), f"sinxy({freq!r})")


def ridge(center=0.5):
    """-(y - center)^2 on [0,1]^2."""
    return FunctionHandle(2, lambda x, y: -(y - center) ** 2 + 0.0 * x, f"ridge({center!r})")


def trig_surface(rng, modes=4, scale=1.0):
    """Random smooth surface sum_j a_j sin(2 pi (u_j x + v_j y) + t_j)."""
    a = rng.normal(size=modes) * scale / modes
    uv = rng.integers(-4, 5, size=(modes, 2))
    t = rng.uniform(0, 2 * np.pi, size=modes)

    def fn(x, y):
        out = np.zeros(np.broadcast_shapes(x.shape, y.shape))
        for j in range(modes):
            out += a[j] * np.sin(2 * np.pi * (uv[j, 0] * x + uv[j, 1] * y) + t[j])
        return out

    return FunctionHandle(2, fn, "trig")


_TERM = re.compile(r"^\s*(?:(?P<coef>[-+]?[0-9.]+(?:[eE][-+]?\d+)?)\s*\*\s*)?"
                   r"(?P<name>[a-z_][a-z0-9_]*)\s*(?::(?P<args>[^+]*))?\s*$")


def _parse_args(text):
    out = {}
    if not text:
        return out
    for item in text.split(","):
        if "=" not in item:
            raise DomainError(f"bad argument {item!r} (expected key=value)")
        k, v = item.split("=", 1)
        out[k.strip()] = float(v)
    return out


def parse_fn_spec(spec, dim=1, witness=None):
    """Build a FunctionHandle from fn-spec text.

    ``witness`` supplies the ``phi`` term (a WitnessFunction of matching dimension).
    """
    terms = [t for t in re.split(r"(?<![0-9][eE])\+", spec.replace(" ", "")) if t]
    if not terms:
        raise DomainError(f"empty fn-spec {spec!r}")
    total = None
    for term in terms:
        m = _TERM.match(term)
        if m is None:
            raise DomainError(f"cannot parse fn-spec term {term!r}")
        name = m["name"]
        kw = _parse_args(m["args"])
        if name == "zero":
            h = zero(dim)
        elif name in ("const", "constant"):
            h = constant(kw.get("c", 0.0), dim)
        elif name in ("linear", "x"):
            h = linear(dim)
        elif name == "y":
            h = coordinate(1, dim)
        elif name == "xplusy":
            h = coordinate(0, dim) + coordinate(1, dim)
        elif name == "weierstrass":
            h = weierstrass(kw.get("a", 0.5), kw.get("b", 3.0), int(kw.get("terms", 30)), dim)
        elif name == "sinxy":
            _need_dim(name, dim, 2)
            h = sin_xy(kw.get("freq", 4.0))
        elif name == "ridge":
            _need_dim(name, dim, 2)
            h = ridge(kw.get("center", 0.5))
        elif name in ("phi", "witness"):
            if witness is None:
                raise DomainError("the phi term needs a witness function (seed + config)")
            if witness.dim != dim:
                raise DomainError(f"witness has dimension {witness.dim}, expected {dim}")
            h = witness
        else:
            raise DomainError(f"unknown function name {name!r}")
        if m["coef"] is not None:
            h = float(m["coef"]) * h
        total = h if total is None else total + h
    if total is not witness:
        total.name = spec
    return total


def _need_dim(name, dim, want):
    if dim != want:
        raise DomainError(f"{name} is defined on [0,1]^{want}, requested dimension {dim}")
