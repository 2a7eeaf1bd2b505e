import numpy as np
import pytest

from prevadim.energy import (doubling_ratio, energy_mc, graph_energy, growth_diagnostic,
                             tail_index, uniform_sampler)
from prevadim.errors import DomainError, SamplingError
from prevadim.functions import linear, zero
from prevadim.labeling import make_rng
from prevadim.witness import witness


def test_s_zero_is_exactly_one():
    est = energy_mc(uniform_sampler, 0.0, 1000, make_rng(0))
    assert est.mean == 1.0 and est.stderr == 0.0


def test_uniform_half_close_to_closed_form():
    est = energy_mc(uniform_sampler, 0.5, 200000, make_rng(1))
    assert abs(est.mean - 8 / 3) <= 4 * est.stderr
    assert est.growth < 1.02


def test_refusals():
    with pytest.raises(DomainError):
        energy_mc(uniform_sampler, 0.5, 99, make_rng(0))
    with pytest.raises(DomainError):
        energy_mc(uniform_sampler, -0.1, 1000, make_rng(0))
    with pytest.raises(SamplingError):
        energy_mc(lambda r, m: np.zeros(m), 0.5, 1000, make_rng(0))


def test_partitioned_result_is_a_function_of_seed_and_partitions():
    a = energy_mc(uniform_sampler, 0.5, 10000, make_rng(2), partitions=4)
    b = energy_mc(uniform_sampler, 0.5, 10000, make_rng(2), partitions=4, workers=3)
    assert a == b


@pytest.mark.parametrize("alpha,diverges", [(0.6, True), (0.8, True), (1.5, False), (3.0, False)])
def test_growth_tracks_tail_index(alpha, diverges):
    v = make_rng(3).pareto(alpha, 200000) + 1.0
    assert tail_index(v) == pytest.approx(alpha, rel=0.15)
    g = growth_diagnostic(v)
    assert (g > 1.1) if diverges else (g == 1.0)


def test_doubling_ratio_of_constant():
    assert doubling_ratio(np.ones(800)) == 1.0


def test_uniform_three_halves_flagged():
    est = energy_mc(uniform_sampler, 1.5, 100000, make_rng(4))
    assert est.diverging and est.growth > 1.1


def test_graph_energy_kernel_forms_and_eps_range(tower2):
    w = witness(tower2, 1)
    est = graph_energy(w, linear(), 0.2, 2000, make_rng(5))
    assert est.form_mismatches == 0 and est.s == pytest.approx(1.6)
    for eps in (0.0, 0.3, -0.1):
        with pytest.raises(DomainError):
            graph_energy(w, zero(), eps, 2000, make_rng(5))


def test_graph_energy_deep_construction_is_stable(deep):
    est = graph_energy(witness(deep, 2), zero(), 0.25, 100000, make_rng(6))
    assert est.growth <= 1.02


def test_graph_energy_beyond_two_diverges(deep):
    # s = 2.5 on the same measure: plain kernel sample at exponent 2.5
    from prevadim.cantor import sample_nu

    w = witness(deep, 2)

    def lifted(r, m):
        x = sample_nu(deep, r, m)
        return np.column_stack([x, w(x)])

    assert energy_mc(lifted, 2.5, 100000, make_rng(7)).growth > 1.1
