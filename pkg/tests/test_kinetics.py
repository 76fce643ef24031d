import numpy as np
import pytest
from hypothesis import given, strategies as st

from crossdiff.kinetics import F, D, ND, DriftField, F1_F2, LotkaVolterraParams, f_i

inv = LotkaVolterraParams.invasion()
coef = st.floats(-5, 5)
dens = st.floats(0, 10)


@st.composite
def lv_params(draw):
    a = (draw(coef), draw(coef))
    b = ((draw(coef), draw(coef)), (draw(coef), draw(coef)))
    return LotkaVolterraParams(a, b, D)


def test_invasion_coefficients():
    assert inv.alpha == (1.0, 1.0)
    assert inv.beta == ((1.0, 1.0), (2.0, 2.0))


def test_nd_structure_enforced():
    with pytest.raises(ValueError):
        LotkaVolterraParams((1, 2), ((1, 1), (1, 1)), ND)
    with pytest.raises(ValueError):
        LotkaVolterraParams((1, 1), ((1, 2), (1, 1)), ND)
    with pytest.raises(ValueError):
        LotkaVolterraParams((1, np.inf), ((1, 1), (1, 1)), D)


def test_f_examples():
    assert f_i(1, 0.5, 0.5, inv) == 0.0
    assert f_i(1, 0.0, 0.7, inv) == 0.0
    assert f_i(2, 0.3, 0.0, inv) == 0.0
    nd = LotkaVolterraParams.nondifferentiated(1.0, 1.0)
    assert f_i(1, 0.25, 0.75, nd) == 0.0


def test_F_examples():
    nd = LotkaVolterraParams.nondifferentiated(1.0, 1.0)
    assert F(0.3, 0.7, nd) == pytest.approx(0.0)
    assert f_i(1, 1.0, 0.0, inv) == 0.0 and f_i(2, 1.0, 0.0, inv) == 0.0
    assert F(1.0, 0.0, inv) == 0.0


def test_F1_F2_examples():
    u = 1.7
    F1, F2 = F1_F2(u, 0.0, inv)
    assert F2 == 0.0 and F1 == pytest.approx(f_i(2, 0.0, u, inv))
    F1, F2 = F1_F2(u, 1.0, inv)
    assert F2 == 0.0 and F1 == pytest.approx(f_i(1, u, 0.0, inv))
    # u1 = u2 = 1/2: f1 = 0, f2 = -1/2 by hand
    assert F1_F2(1.0, 0.5, inv) == (pytest.approx(-0.5), pytest.approx(0.25))


def test_F1_F2_needs_positive_density():
    with pytest.raises(ValueError):
        F1_F2(0.0, 0.5, inv)
    with pytest.raises(ValueError):
        F1_F2(np.array([1.0, -1.0]), np.array([0.5, 0.5]), inv)


@given(lv_params(), st.floats(1e-3, 10), st.floats(1e-3, 1 - 1e-3))
def test_F1_F2_against_quotient_form(p, u, r):
    F1, F2 = F1_F2(u, r, p)
    u1, u2 = r * u, (1 - r) * u
    assert F1 == pytest.approx(F(u1, u2, p), abs=1e-9)
    quotient = r * (1 - r) * (f_i(1, u1, u2, p) / u1 - f_i(2, u1, u2, p) / u2)
    assert F2 == pytest.approx(quotient, rel=1e-9, abs=1e-9)
    lhs = F2 * u1 * u2
    rhs = r * (1 - r) * (u2 * f_i(1, u1, u2, p) - u1 * f_i(2, u1, u2, p))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


@given(lv_params(), dens)
def test_no_spontaneous_generation(p, v):
    assert f_i(1, 0.0, v, p) == 0.0
    assert f_i(2, v, 0.0, p) == 0.0


def test_F1_F2_vectorized():
    u = np.array([0.5, 1.0, 2.0])
    r = np.array([0.0, 0.5, 1.0])
    F1, F2 = F1_F2(u, r, inv)
    assert F1.shape == (3,) and F2[0] == 0 and F2[2] == 0


def test_drift():
    q = DriftField.zero()
    assert not np.any(q.nodal(0.3, np.linspace(-1, 1, 5)))
    q.check_boundary(0.0, -1, 1)
    bad = DriftField.from_function(lambda t, x: x)
    with pytest.raises(ValueError):
        bad.check_boundary(0.0, -1, 1)
    good = DriftField.from_function(lambda t, x: (1 - x**2) * t)
    good.check_boundary(2.0, -1, 1)
