import numpy as np
import pytest
from hypothesis import given, strategies as st

from crossdiff.diagnostics import discrete_mass, lumped_norm, osc, relative_l2_error
from crossdiff.mesh_fe import Mesh, NodalField

m3 = Mesh.uniform(0, 1, 3)


def test_osc_examples():
    assert osc(NodalField(m3, [0, 1, 0])) == pytest.approx(1.0)
    assert osc(NodalField(m3, [0, 1, 2])) == 0.0
    assert osc(NodalField(m3, [3, 3, 3])) == 0.0


def test_osc_needs_uniform_mesh():
    with pytest.raises(ValueError):
        osc(NodalField(Mesh([0.0, 0.2, 1.0]), [0, 1, 0]))


vals = st.lists(st.floats(-10, 10), min_size=3, max_size=40)


@given(vals, st.floats(0.1, 10))
def test_osc_scale_invariant_and_nonnegative(v, c):
    m = Mesh.uniform(0, 1, len(v))
    u = NodalField(m, v)
    assert osc(u) >= 0
    assert osc(c * u) == osc(u)


@given(st.lists(st.floats(-10, 10), min_size=3, max_size=40, unique=True))
def test_osc_strictly_monotone_zero(v):
    m = Mesh.uniform(0, 1, len(v))
    assert osc(NodalField(m, np.sort(v))) == 0.0


def test_osc_plateau_counts():
    # sign(0) = 0 makes a flat-then-rising profile count as one kink
    assert osc(NodalField(m3, [0, 0, 1])) == pytest.approx(0.5)


def test_relative_error_examples():
    m = Mesh.uniform(-2, 2, 41)
    f = lambda t, x: np.cos(x) + 2
    ref = NodalField(m, f(0, m.nodes))
    assert relative_l2_error(ref, f, 0.0) == 0.0
    assert relative_l2_error(2.0 * ref, f, 0.0) == pytest.approx(1.0)
    E, c = 3.0, 0.3
    const = lambda t, x: np.full_like(x, E)
    u = NodalField(m, np.full(41, E + c))
    assert relative_l2_error(u, const, 0.0) == pytest.approx(abs(c) / abs(E))


def test_relative_error_zero_exact_is_absolute():
    m = Mesh.uniform(0, 1, 5)
    u = NodalField.constant(m, 0.5)
    assert relative_l2_error(u, lambda t, x: np.zeros_like(x), 0.0) == pytest.approx(lumped_norm(u))


def test_mass():
    assert discrete_mass(NodalField.constant(Mesh.uniform(-2, 2, 11), 1.0)) == pytest.approx(4.0)
