import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kernel_embed.errors import InvalidArgument, ResourceLimit
from kernel_embed.measure import NATURALS, atomic_measure, interval, tensor_power, uniform_grid_measure


def test_grid_midpoints():
    m = uniform_grid_measure(0, 1, 4)
    assert m.atoms == (0.125, 0.375, 0.625, 0.875)
    assert list(m.weights) == [0.25] * 4
    assert m.is_probability


def test_grid_single_cell():
    m = uniform_grid_measure(0, 1, 1)
    assert m.atoms == (0.5,) and list(m.weights) == [1.0]


def test_grid_mass_two_is_not_probability():
    m = uniform_grid_measure(0, 2, 2)
    assert m.atoms == (0.5, 1.5) and list(m.weights) == [1.0, 1.0]
    assert m.total_mass == 2.0 and not m.is_probability


@pytest.mark.parametrize("args", [(0, 1, 0), (1, 1, 3), (2, 1, 3)])
def test_grid_errors(args):
    with pytest.raises(InvalidArgument):
        uniform_grid_measure(*args)


def test_atomic_mass():
    m = atomic_measure([1, 2, 3], [1, 1 / 4, 1 / 9])
    assert m.total_mass == pytest.approx(49 / 36, rel=1e-15)
    assert m.domain == NATURALS


def test_atomic_single_probability():
    assert atomic_measure([1], [1.0]).is_probability


def test_atomic_negative_weight():
    with pytest.raises(InvalidArgument):
        atomic_measure([1, 2], [0.5, -0.1])


def test_atomic_duplicate_atom():
    with pytest.raises(InvalidArgument):
        atomic_measure([0.3, 0.3], [0.5, 0.5])


@pytest.mark.parametrize("atoms", [[0, 1], [1, 0.5], [-2, 3]])
def test_atomic_mixed_or_nonnatural(atoms):
    with pytest.raises(InvalidArgument):
        atomic_measure(atoms, [0.5, 0.5])


def test_atomic_outside_domain():
    with pytest.raises(InvalidArgument):
        atomic_measure([0.5, 2.0], [0.5, 0.5], interval(0, 1))


def test_weights_are_read_only():
    m = atomic_measure([1], [1.0])
    with pytest.raises(ValueError):
        m.weights[0] = 2.0


def test_probability_tolerance():
    assert atomic_measure([1, 2], [0.5, 0.5 + 5e-13]).is_probability
    assert not atomic_measure([1, 2], [0.5, 0.5 + 5e-12]).is_probability


def test_tensor_power_probability():
    m = tensor_power(uniform_grid_measure(0, 1, 3), 3)
    assert len(m) == 27 and m.is_probability


def test_tensor_power_two_atoms():
    m = tensor_power(atomic_measure([1, 2], [0.5, 0.5]), 2)
    assert len(m) == 4
    assert list(m.weights) == [0.25] * 4
    assert m.atoms[1] == (1, 2)


def test_tensor_power_cap():
    with pytest.raises(ResourceLimit):
        tensor_power(uniform_grid_measure(0, 1, 10), 7, cap=10**6)


@settings(max_examples=60, deadline=None)
@given(
    st.lists(st.floats(0.01, 3.0), min_size=1, max_size=5),
    st.integers(1, 4),
)
def test_tensor_power_mass(weights, d):
    m = atomic_measure(list(range(1, len(weights) + 1)), weights)
    p = tensor_power(m, d)
    assert math.isclose(p.total_mass, m.total_mass**d, rel_tol=1e-12)


@settings(max_examples=100, deadline=None)
@given(st.integers(1, 5000))
def test_unit_grid_has_unit_mass(m):
    assert abs(uniform_grid_measure(0, 1, m).total_mass - 1.0) <= 1e-14


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(0, 10, allow_nan=False), min_size=1, max_size=20))
def test_atomic_invariants(weights):
    m = atomic_measure(list(range(1, len(weights) + 1)), weights)
    assert np.all(m.weights >= 0)
    assert len(set(m.atoms)) == len(m.atoms)
    assert m.is_probability == (abs(m.total_mass - 1) <= 1e-12)
