"""Numerical checks of the inequalities in the dimension-2 proof chain.

Every check returns a :class:`VerificationReport`. A row passes when the
computed value is at most the bound plus the row's declared numerical error
(quadrature error, or three Monte Carlo standard errors). Rows whose numerics
could not be certified are marked ``inconclusive`` rather than failed.
"""

import math
import warnings
from dataclasses import dataclass, field
from typing import Any, Dict, List

import numpy as np
from scipy import integrate, stats

from . import kernels
from .cantor import (CantorConfig, PointCode, build_levels, c_epsilon, n_of_pair, n_of_pairs,
                     sample_nu, sample_nu_coded)
from .energy import check_eps, energy_mc, graph_energy
from .errors import DomainError
from .labeling import draw_seeds, seed_keys, split
from .witness import witness

PASS, FAIL, INCONCLUSIVE = "pass", "fail", "inconclusive"
QUAD_RTOL = 1e-4
GEOM_TOL = 8 * np.finfo(float).eps  # absolute slack for recomputed interval geometry
ENERGY_DEPTH = 24
KS_TOL = 0.01


def energy_levels(depth=ENERGY_DEPTH, lam=0.5):
    """Branching 27, 729, then capped at 729, deep enough that truncation is invisible to
    Monte Carlo energies (a depth-2 truncation has infinite graph energy)."""
    return build_levels(CantorConfig.tower(depth, lam))


@dataclass
class Row:
    params: Dict[str, Any]
    value: float
    bound: float
    error: float = 0.0
    status: str = PASS
    note: str = ""

    @property
    def margin(self):
        return self.bound - self.value

    def to_dict(self):
        return {"params": self.params, "value": self.value, "bound": self.bound,
                "margin": self.margin, "error": self.error, "status": self.status,
                "note": self.note}


def _judge(value, bound, error):
    if not (math.isfinite(value) and math.isfinite(bound)):
        return INCONCLUSIVE
    return PASS if value <= bound + error else FAIL


@dataclass
class VerificationReport:
    lemma: str
    grid: Dict[str, Any]
    rows: List[Row] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def status(self):
        states = {r.status for r in self.rows}
        if self.errors or FAIL in states:
            return FAIL
        return INCONCLUSIVE if INCONCLUSIVE in states else PASS

    @property
    def passed(self):
        return self.status == PASS

    def add(self, params, value, bound, error=0.0, note="", status=None):
        row = Row(params, float(value), float(bound), float(error),
                  status or _judge(value, bound, error), note)
        self.rows.append(row)
        return row

    def merge(self, other):
        self.rows.extend(other.rows)
        self.errors.extend(other.errors)
        return self

    def to_dict(self):
        return {"lemma": self.lemma, "grid": self.grid,
                "rows": [r.to_dict() for r in self.rows], "pass": self.passed,
                "status": self.status, "errors": list(self.errors), "extra": self.extra}


# ---------------------------------------------------------------- integral bound

def _quad(fn, a, b, breaks, rtol):
    pts = sorted({a, b, *[t for t in breaks if a < t < b]})
    total = 0.0
    err = 0.0
    ok = True
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        for lo, hi in zip(pts[:-1], pts[1:]):
            try:
                v, e = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=rtol, limit=500)
            except integrate.IntegrationWarning:
                v, e = integrate.quad(fn, lo, hi, epsabs=0.0, epsrel=rtol, limit=500,
                                      full_output=1)[:2]
                ok = False
            total += v
            err += e
    return total, err, ok


def real_integral(p, q, r, eps, rtol=QUAD_RTOL * 1e-2):
    """The double integral over [0,p]^2 of (q^2 + (a - b + r)^2)^(eps - 1).

    Integrating along the diagonals u = a - b leaves the weight (p - |u|) on
    [-p, p]; the peak at u = -r (width ~q) and the kink at u = 0 become
    breakpoints. Returns (value, abs error estimate, converged).
    """
    def fn(u):
        return (p - abs(u)) * (q * q + (u + r) ** 2) ** (eps - 1.0)

    width = max(q, 1e-300)
    breaks = [0.0, -r, -r - width, -r + width]
    return _quad(fn, -p, p, breaks, rtol)


def verify_real_integral(p, q, r, eps, rtol=QUAD_RTOL):
    """Check the real-integral bound 6 p / q^(1 - eps) at one parameter point."""
    if not (0.0 < p <= 1.0 and 0.0 < q <= 1.0):
        raise DomainError(f"p, q must lie in (0, 1], got p={p!r}, q={q!r}")
    if not 0.0 < eps < 0.25:
        raise DomainError(f"eps = {eps!r} outside (0, 1/4)")
    rep = VerificationReport("real-integral", {"p": [p], "q": [q], "r": [r], "eps": [eps]})
    _real_row(rep, p, q, r, eps, rtol)
    return rep


def _real_row(rep, p, q, r, eps, rtol):
    v1, e1, ok1 = real_integral(p, q, r, eps, rtol * 1e-2)
    v2, e2, ok2 = real_integral(p, q, r, eps, rtol * 5e-3)
    declared = rtol * abs(v2)
    # self-check: halving the tolerance must move the value by less than the declared error
    converged = ok1 and ok2 and abs(v1 - v2) < declared and e2 < declared
    bound = 6.0 * p * q ** (eps - 1.0)
    params = {"p": p, "q": q, "r": r, "eps": eps}
    if not converged:
        return rep.add(params, v2, bound, declared, "quadrature did not converge", INCONCLUSIVE)
    return rep.add(params, v2, bound, declared)


def real_integral_grid(js=range(9), eps_values=(0.01, 0.1, 0.2)):
    """Default sweep: p, q in {2^-j}, r in {0, +-q, +-1}."""
    out = []
    for eps in eps_values:
        for jp in js:
            for jq in js:
                p, q = 2.0 ** -jp, 2.0 ** -jq
                for r in (0.0, q, -q, 1.0, -1.0):
                    out.append((p, q, r, eps))
    return out


def verify_real_integral_grid(points=None, rtol=QUAD_RTOL):
    points = real_integral_grid() if points is None else list(points)
    rep = VerificationReport("real-integral", {
        "p": sorted({pt[0] for pt in points}), "q": sorted({pt[1] for pt in points}),
        "r": "0, +-q, +-1", "eps": sorted({pt[3] for pt in points}), "rtol": rtol})
    for p, q, r, eps in points:
        _real_row(rep, p, q, r, eps, rtol)
    return rep


# ---------------------------------------------------------------- coding bounds

def _log3log3(q):
    return np.log(np.log(1.0 / q) / math.log(3.0)) / math.log(3.0)


def verify_nxy_bound(levels, M, rng, eps_values=(0.1, 0.5), chunk=1 << 18):
    """Sample M nu-pairs and check the coding bounds.

    Always: |x - y| <= c_n(x,y). Tower-exact constructions only:
    n <= log3 log3 1/|x - y| for n >= 1, and 2^n <= C_eps |x - y|^(-eps/2).
    """
    faithful = levels.config.is_tower_exact
    rep = VerificationReport("nxy", {"pairs": int(M), "eps": list(eps_values),
                                     "config": levels.config.to_dict()})
    rep.extra["coverage"] = "full" if faithful else "partial (intermediate step only)"
    consts = {eps: c_epsilon(eps) for eps in eps_values}
    rep.extra["C_eps"] = {str(k): v for k, v in consts.items()}
    c = np.asarray(levels.c)
    worst_step = -np.inf
    worst_lemma = np.inf
    worst_pow = {eps: -np.inf for eps in eps_values}
    viol = {"step": 0, "loglog": 0, **{f"pow2[{e}]": 0 for e in eps_values}}
    hist = np.zeros(levels.depth + 1, dtype=np.int64)
    done = 0
    for r, m in zip(split(rng, max(1, -(-M // chunk))), _sizes(M, chunk)):
        x, dx = sample_nu_coded(levels, r, m)
        y, dy = sample_nu_coded(levels, r, m)
        q = np.abs(x - y)
        keep = q > 0.0
        q, n = q[keep], n_of_pairs(dx[keep], dy[keep])
        done += q.size
        hist += np.bincount(n, minlength=levels.depth + 1)
        excess = q - c[n]
        worst_step = max(worst_step, float(excess.max(initial=-np.inf)))
        viol["step"] += int(np.count_nonzero(excess > GEOM_TOL))
        if faithful:
            deep = n >= 1
            if deep.any():
                slack = _log3log3(q[deep]) - n[deep]
                worst_lemma = min(worst_lemma, float(slack.min()))
                viol["loglog"] += int(np.count_nonzero(slack < 0))
            for eps in eps_values:
                # log2 of 2^n / (C q^(-eps/2))
                lhs = n - np.log2(consts[eps]) + (eps / 2) * np.log2(q)
                worst_pow[eps] = max(worst_pow[eps], float(lhs.max()))
                viol[f"pow2[{eps}]"] += int(np.count_nonzero(lhs > 1e-12))
    rep.extra["pairs_used"] = done
    rep.extra["n_histogram"] = hist.tolist()
    rep.extra["violations"] = viol
    rep.add({"check": "|x-y| <= c_n"}, worst_step, 0.0, GEOM_TOL,
            note="value = max(|x-y| - c_n)")
    if faithful:
        if hist[1:].sum():
            rep.add({"check": "n <= log3 log3 1/|x-y|"}, -worst_lemma, 0.0,
                    note="value = -min(log3log3(1/|x-y|) - n) over n >= 1")
        for eps in eps_values:
            rep.add({"check": "2^n <= C_eps |x-y|^(-eps/2)", "eps": eps}, worst_pow[eps], 0.0,
                    1e-12, note="value = max log2(2^n |x-y|^(eps/2) / C_eps)")
    return rep


def _sizes(M, chunk):
    full, rest = divmod(int(M), chunk)
    return [chunk] * full + ([rest] if rest else [])


# ---------------------------------------------------------------- increment expectation

def _as_code(levels, x):
    if isinstance(x, PointCode):
        return x
    from .cantor import locate
    code = locate(float(x), levels)
    if not isinstance(code, PointCode):
        raise DomainError(f"x = {x!r} is not in E_K")
    return code


def increment_samples(levels, x, y, seeds):
    """phi_omega(x), phi_omega(y) and the tail sums X, Y for each labeling seed."""
    K = levels.depth
    keys = kernels.path_keys(np.array([x.digits, y.digits], dtype=np.int64))
    sk = seed_keys(seeds)
    bx = kernels.bit_matrix(keys[0], sk).astype(np.float64)
    by = kernels.bit_matrix(keys[1], sk).astype(np.float64)
    w = 2.0 ** -np.arange(1, K + 1)
    n = n_of_pair(x, y)
    return bx @ w, by @ w, bx[:, n:] @ w[n:], by[:, n:] @ w[n:], n


def verify_increment_expectation(x, y, f, eps, M, rng, levels, ks_level=None):
    """Monte Carlo check of the expected-kernel bound 6 C_eps / |x - y|^(1 - eps/2).

    Also checks that the tail sums X, Y over levels > n(x, y) look uniform on
    [0, 2^-n] (one-sample KS against the continuous law). The KS bound is the
    2^-(K - n) discretisation gap plus max(0.01, the 0.1% KS critical value).
    """
    check_eps(eps)
    if eps >= 0.25:
        raise DomainError(f"eps = {eps!r} outside (0, 1/4)")
    x, y = _as_code(levels, x), _as_code(levels, y)
    if x.point == y.point:
        raise DomainError("x and y must differ")
    q = abs(x.point - y.point)
    seeds = draw_seeds(rng, M)
    px, py, X, Y, n = increment_samples(levels, x, y, seeds)
    cdiff = float(f(np.array([x.point]))[0] - f(np.array([y.point]))[0])
    kern = (q * q + (px - py + cdiff) ** 2) ** (eps - 1.0)
    mean = float(kern.mean())
    se = float(kern.std(ddof=1) / math.sqrt(M))
    C = c_epsilon(eps)
    bound = 6.0 * C * q ** (eps / 2 - 1.0)
    params = {"x": x.point, "y": y.point, "n": n, "eps": eps, "f": getattr(f, "name", "f")}
    rep = VerificationReport("increment", {**params, "labelings": int(M)})
    premise = 2.0 ** n <= C * q ** (-eps / 2)
    rep.extra.update(C_eps=C, stderr=se, premise_pow2=bool(premise),
                     atom_gap=2.0 ** -(levels.depth - n))
    rep.add({**params, "check": "expectation"}, mean, bound, 3 * se,
            note="" if premise else "pair violates 2^n <= C_eps |x-y|^(-eps/2)")
    gap = 2.0 ** -(levels.depth - n)
    crit = max(KS_TOL, 1.95 / math.sqrt(M))
    for name, sample in (("X", X), ("Y", Y)):
        ks = stats.kstest(sample * 2.0 ** n, "uniform").statistic
        rep.add({**params, "check": f"KS {name} ~ U[0, 2^-n]"}, float(ks), gap + crit)
    return rep


def verify_increment_set(levels, pairs, fns, eps_values, M, rng):
    rep = VerificationReport("increment", {"pairs": len(pairs), "eps": list(eps_values),
                                           "f": [f.name for f in fns], "labelings": int(M)})
    streams = iter(split(rng, len(pairs) * len(fns) * len(eps_values)))
    for x, y in pairs:
        for f in fns:
            for eps in eps_values:
                rep.merge(verify_increment_expectation(x, y, f, eps, M, next(streams), levels))
    return rep


# ---------------------------------------------------------------- expected-energy chain

def expected_energy_experiment(f, eps, M, N, rng, levels=None, nu_pairs=None,
                               partitions=1, workers=None):
    """E_omega I_{2-2eps}(nu_{omega,f}) against 6 C_eps I_{1-eps/2}(nu).

    The left side averages graph_energy over M labelings (its stderr is the
    spread across labelings over sqrt(M)); the right side is energy_mc on nu.
    C_eps is taken from the level geometry so it covers every pair in E_K.
    """
    check_eps(eps)
    levels = energy_levels() if levels is None else levels
    nu_pairs = 10 * N if nu_pairs is None else nu_pairs
    r_lab, r_graph, r_nu, r_nu2 = split(rng, 4)
    seeds = draw_seeds(r_lab, M)
    means = np.empty(M)
    growth = np.empty(M)
    mism = 0
    for j, (seed, r) in enumerate(zip(seeds, split(r_graph, M))):
        est = graph_energy(witness(levels, int(seed)), f, eps, N, r, partitions, workers)
        means[j] = est.mean
        growth[j] = est.growth
        mism += est.form_mismatches
    lhs = float(means.mean())
    lhs_se = float(means.std(ddof=1) / math.sqrt(M)) if M > 1 else float("inf")

    def nu(r, m):
        return sample_nu(levels, r, m)

    I_half = energy_mc(nu, 1.0 - eps / 2, nu_pairs, r_nu, partitions, workers)
    I_full = energy_mc(nu, 1.0 - eps, nu_pairs, r_nu2, partitions, workers)
    C = c_epsilon(eps, levels)
    bound = 6.0 * C * I_half.mean
    comb = math.sqrt(lhs_se ** 2 + (6.0 * C * I_half.stderr) ** 2)
    rep = VerificationReport("expected-energy", {
        "eps": eps, "labelings": int(M), "pairs": int(N), "nu_pairs": int(nu_pairs),
        "f": getattr(f, "name", "f"), "config": levels.config.to_dict(),
        "partitions": int(partitions)})
    rep.add({"check": "E I_{2-2eps}(nu_wf) <= 6 C_eps I_{1-eps/2}(nu)"}, lhs, bound, 3 * comb)
    rep.add({"check": "growth I_{1-eps/2}(nu)"}, I_half.growth, 1.02)
    rep.add({"check": "growth I_{1-eps}(nu)"}, I_full.growth, 1.02)
    rep.add({"check": "kernel forms bit-equal"}, mism, 0)
    rep.extra.update(C_eps=C, lhs=lhs, lhs_stderr=lhs_se, combined_stderr=comb,
                     I_half=I_half.to_dict(), I_full=I_full.to_dict(),
                     graph_growth_median=float(np.median(growth)),
                     graph_growth_max=float(growth.max()))
    return rep


# ---------------------------------------------------------------- Fubini

def verify_fubini(levels, f, eps, pairs, M, rng):
    """Average-over-labelings-then-pairs against pairs-then-labelings on a fixed pair grid.

    The two orders use independent labeling streams, so agreement is a
    statistical statement: |A - B| <= 3 * combined stderr.
    """
    check_eps(eps)
    r_pts, r_a, r_b = split(rng, 3)
    x, dx = sample_nu_coded(levels, r_pts, pairs)
    y, dy = sample_nu_coded(levels, r_pts, pairs)
    keys_x = kernels.path_keys(dx)
    keys_y = kernels.path_keys(dy)
    q2 = (x - y) ** 2
    c = f(x) - f(y)

    def kernel_matrix(r):
        sk = seed_keys(draw_seeds(r, M))
        w = 2.0 ** -np.arange(1, levels.depth + 1)
        out = np.empty((M, pairs))
        for p in range(pairs):
            bx = kernels.bit_matrix(keys_x[p], sk).astype(np.float64)
            by = kernels.bit_matrix(keys_y[p], sk).astype(np.float64)
            out[:, p] = (q2[p] + ((bx - by) @ w + c[p]) ** 2) ** (eps - 1.0)
        return out

    A_mat = kernel_matrix(r_a)
    B_mat = kernel_matrix(r_b)
    per_pair = A_mat.mean(axis=0)  # E_omega first
    A = float(per_pair.mean())
    per_lab = B_mat.mean(axis=1)  # integrate over pairs first
    B = float(per_lab.mean())
    se_A = float(np.sqrt((A_mat.var(axis=0, ddof=1) / M).sum()) / pairs)
    se_B = float(per_lab.std(ddof=1) / math.sqrt(M))
    comb = math.sqrt(se_A ** 2 + se_B ** 2)
    rep = VerificationReport("fubini", {"pairs": int(pairs), "labelings": int(M), "eps": eps,
                                        "f": getattr(f, "name", "f")})
    rep.add({"check": "|E then integrate - integrate then E|"}, abs(A - B), 0.0, 3 * comb)
    rep.extra.update(expect_first=A, integrate_first=B, stderr=comb)
    return rep


def default_pair_set(levels, count, rng, n_values=(0, 1, 2)):
    """``count`` pairs cycling through the requested n(x, y) values."""
    from .cantor import pair_with_level
    streams = split(rng, count)
    return [pair_with_level(levels, n_values[i % len(n_values)], streams[i])
            for i in range(count)]


__all__ = ["VerificationReport", "Row", "energy_levels", "real_integral", "verify_real_integral",
           "verify_real_integral_grid", "real_integral_grid", "verify_nxy_bound",
           "verify_increment_expectation", "verify_increment_set", "increment_samples",
           "expected_energy_experiment", "verify_fubini", "default_pair_set"]
