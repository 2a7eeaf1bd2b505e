import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prevadim.errors import DomainError
from prevadim.functions import FunctionHandle, coordinate, sin_xy, trig_surface, zero
from prevadim.horizon import SurfaceGrid, horizon, verify_horizon_shift
from prevadim.labeling import make_rng
from prevadim.witness import surface_extend, witness


def test_sum_of_coordinates():
    g = SurfaceGrid.sample(coordinate(0, 2) + coordinate(1, 2), 65)
    assert np.array_equal(horizon(g), g.x + 1.0)


def test_parabola_peak_on_odd_grid():
    g = FunctionHandle(2, lambda x, y: -(y - 0.5) ** 2 + 0 * x)
    assert np.all(horizon(SurfaceGrid.sample(g, 129)) == 0.0)


def test_extended_witness_horizon_is_phi(tower2):
    w = witness(tower2, 12)
    grid = SurfaceGrid.sample(surface_extend(w, 2), 257)
    assert np.array_equal(horizon(grid), w(grid.x))


@pytest.mark.parametrize("f", [zero(2), sin_xy()])
def test_shift_identity(tower2, f):
    dev = verify_horizon_shift(f, witness(tower2, 3), 256)
    assert dev <= 1e-12
    if f.name == "zero":
        assert dev == 0.0


def test_errors(tower2):
    with pytest.raises(DomainError):
        SurfaceGrid(0, np.empty((0, 0)))
    with pytest.raises(DomainError):
        SurfaceGrid(2, np.array([[0.0, np.nan], [1.0, 2.0]]))
    with pytest.raises(DomainError):
        verify_horizon_shift(zero(1), witness(tower2, 0), 16)
    g = SurfaceGrid.sample(zero(2), 4)
    with pytest.raises(ValueError):
        g.heights[0, 0] = 1.0


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.floats(0.0, 2.0))
def test_monotone_and_contractive(seed, shift):
    rng = make_rng(seed)
    f, g = trig_surface(rng), trig_surface(rng)
    n = 33
    hf = f.on_grid(n)
    bump = np.abs(g.on_grid(n)) + shift
    Hf = horizon(SurfaceGrid(n, hf))
    Hup = horizon(SurfaceGrid(n, hf + bump))
    assert np.all(Hup >= Hf)
    hg = g.on_grid(n)
    Hg = horizon(SurfaceGrid(n, hg))
    assert np.abs(Hf - Hg).max() <= np.abs(hf - hg).max()
