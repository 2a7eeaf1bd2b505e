import numpy as np
import pytest

from prevadim.cantor import PointCode, locate, pair_with_level, sample_nu_coded
from prevadim.errors import DomainError
from prevadim.functions import linear, zero
from prevadim.labeling import Labeling, bit, make_rng
from prevadim.witness import eval_phi, sample_graph_measure, surface_extend, witness


def series(lv, seed, code):
    lab = Labeling(seed, lv)
    return sum(2.0 ** -k * bit(lab, k, i) for k, i in enumerate(code.indices, start=1))


def test_phi_on_E_K_is_the_bit_series(tower2):
    w = witness(tower2, 31)
    x, _ = sample_nu_coded(tower2, make_rng(1), 200)
    for xi in x:
        code = locate(float(xi), tower2)
        assert isinstance(code, PointCode)
        assert eval_phi(w, float(xi)) == series(tower2, 31, code)


def test_phi_interpolates_linearly_on_gaps(tower2):
    w = witness(tower2, 5)
    g = locate(0.5 * (tower2.length(1) + tower2.interval(1, 2)[0]), tower2)
    a, b = eval_phi(w, g.left), eval_phi(w, g.right)
    t = np.linspace(0, 1, 11)
    got = w(g.left + t * (g.right - g.left))
    assert np.allclose(got, a + t * (b - a), rtol=0, atol=1e-15)


def test_sentinel_labelings(tower2):
    x = np.linspace(0, 1, 100001)
    assert np.all(witness(tower2, fill=0)(x) == 0.0)
    on_F, _ = sample_nu_coded(tower2, make_rng(2), 1000)
    ones = witness(tower2, fill=1)
    assert np.all(ones(on_F) == 1 - 2.0 ** -2)
    assert np.all(ones(x) == 1 - 2.0 ** -2)


@pytest.mark.parametrize("n", [0, 1, 2])
def test_same_level_n_interval_close(tower3, n):
    rng = make_rng(10 + n)
    for s in range(20):
        w = witness(tower3, s)
        x, y = pair_with_level(tower3, n, rng)
        assert abs(eval_phi(w, x.point) - eval_phi(w, y.point)) <= 2.0 ** -n


def test_continuity_under_refinement(tower2):
    w = witness(tower2, 3)
    jumps = [np.abs(np.diff(w(np.linspace(0, 1, m)))).max() for m in (10 ** 4, 10 ** 5, 10 ** 6)]
    assert jumps[0] > jumps[1] > jumps[2]


def test_surface_extension(tower2):
    w = witness(tower2, 9)
    w2 = surface_extend(w, 2)
    x = np.linspace(0, 1, 33)
    grid = w2.on_grid(33)
    assert np.all(grid == w(x)[:, None])
    with pytest.raises(DomainError):
        surface_extend(w, 1)
    with pytest.raises(DomainError):
        w(np.array([1.5]))


def test_breakpoints_agree_with_phi(tower2):
    w = witness(tower2, 11)
    lo, hi, val = w.breakpoints()
    assert lo.size == 27 * 729
    assert np.all(np.diff(lo) > 0) and np.all(hi > lo)
    assert np.array_equal(w(lo), val) and np.array_equal(w(hi), val)


def test_graph_measure(tower2):
    pts = sample_graph_measure(witness(tower2, fill=0), zero(), make_rng(0), 500)
    assert np.all(pts[:, 1] == 0.0)
    x, h = sample_graph_measure(witness(tower2, 4), linear(), make_rng(0))
    assert h == pytest.approx(eval_phi(witness(tower2, 4), x) + x, abs=1e-15)


def test_evaluation_is_deterministic(tower3):
    x = make_rng(6).random(1000)
    assert np.array_equal(witness(tower3, 77)(x), witness(tower3, 77)(x))
