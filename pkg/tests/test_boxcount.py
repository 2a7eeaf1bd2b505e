import math

import numpy as np
import pytest

from prevadim.boxcount import (box_count_curve, box_count_piecewise, box_count_surface,
                               box_dimension, clamped_window, dyadic_scales, fit_dimension,
                               parse_scales, witness_dimension)
from prevadim.errors import DomainError
from prevadim.functions import FunctionHandle, coordinate, linear, zero
from prevadim.witness import surface_extend, witness


def test_curve_examples():
    assert box_count_curve(zero(), 1 / 100) == 100
    n = box_count_curve(linear(), 1 / 100)
    assert 100 <= n <= 200


def test_surface_examples():
    assert box_count_surface(zero(2), 1 / 32) == 1024
    assert 1024 <= box_count_surface(coordinate(0, 2), 1 / 32) <= 2048


def test_surface_of_extended_witness_factorises(tower2):
    w = witness(tower2, 4)
    for delta in (1 / 32, 1 / 64):
        curve = box_count_curve(w, delta, 8)
        surf = box_count_surface(surface_extend(w, 2), delta, 8)
        assert abs(surf - curve * math.ceil(1 / delta)) <= 1e-3 * surf


def test_power_law_fit():
    d = [2.0 ** -j for j in range(4, 12)]
    fit = fit_dimension(d, [round(x ** -1.5) for x in d])
    assert fit.slope == pytest.approx(1.5, abs=1e-3) and fit.r2 == pytest.approx(1.0, abs=1e-6)
    fit = box_dimension(zero(), dyadic_scales(2 ** -4, 2 ** -10))
    assert abs(fit.slope - 1.0) <= 0.02


def test_refusals():
    with pytest.raises(DomainError):
        fit_dimension([0.1, 0.05, 0.025], [10, 20, 40])
    with pytest.raises(DomainError):
        fit_dimension([0.1, 0.09, 0.08, 0.07], [10, 11, 12, 13])
    for bad in (0.0, -1.0):
        with pytest.raises(DomainError):
            box_count_curve(zero(), bad)


def test_counts_grow_as_boxes_shrink(tower2):
    w = witness(tower2, 1)
    counts = [box_count_curve(w, 2.0 ** -j) for j in range(3, 12)]
    assert all(a < b for a, b in zip(counts, counts[1:]))


def test_piecewise_is_the_dense_sampling_limit(tower2):
    w = witness(tower2, 2)
    lo, hi, val = w.breakpoints()
    for delta in (2.0 ** -5, 2.0 ** -9, tower2.c[-1] * 3):
        exact = box_count_piecewise(w, lo, hi, val, delta)
        dense = box_count_curve(w, delta, 512)
        assert dense <= exact <= dense * 1.002


def test_piecewise_on_a_step_function():
    # step at 0.3 from 0 to 0.5, linear ramp of width 0.1 between
    lo, hi, val = np.array([0.0, 0.4]), np.array([0.3, 1.0]), np.array([0.0, 0.5])
    g = FunctionHandle(1, lambda x: np.interp(x, [0, 0.3, 0.4, 1], [0, 0, 0.5, 0.5]))
    assert box_count_piecewise(g, lo, hi, val, 0.1) == box_count_curve(g, 0.1, 4096)


def test_scale_parsing_and_window(tower2):
    assert parse_scales("2^-4..2^-6") == [2 ** -4, 2 ** -5, 2 ** -6]
    assert parse_scales("0.5, 2^-3") == [0.5, 0.125]
    scales, note = clamped_window(tower2)
    assert scales[0] == 2 ** -4 and scales[-1] == tower2.c[-1]
    assert "c_K" in note


def test_witness_dimension_fields(tower2):
    fit = witness_dimension(witness(tower2, 0))
    assert fit.window == (tower2.c[-1], 2 ** -4)
    assert 1.6 <= fit.slope < 2.0
    assert len(fit.rows()) == len(fit.scales)
