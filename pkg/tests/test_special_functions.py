from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st
from scipy.linalg import expm
from scipy.special import eval_genlaguerre
from sympy.physics.wigner import wigner_3j as sympy_3j

from tomokit.special_functions import (
    ACTIVE,
    PASSIVE,
    HalfInteger,
    gauss_legendre,
    laguerre_assoc,
    projections,
    twice,
    uniform_periodic,
    wigner_3j,
    wigner_D,
    wigner_D_matrix,
    wigner_small_d,
)

from conftest import angular_momentum


def test_twice_accepts_exact_types():
    assert twice(1) == 2
    assert twice(Fraction(3, 2)) == 3
    assert twice("5/2") == 5
    assert twice(HalfInteger(7)) == 7


@pytest.mark.parametrize("bad", [0.5, True])
def test_twice_rejects_floats_and_bools(bad):
    with pytest.raises(TypeError):
        twice(bad)


def test_twice_rejects_thirds():
    with pytest.raises(ValueError):
        twice(Fraction(1, 3))


def test_projections_descend():
    assert [str(m) for m in projections(Fraction(3, 2))] == ["3/2", "1/2", "-1/2", "-3/2"]


def test_3j_known_values():
    assert wigner_3j(1, 1, 0, 0, 0, 0) == pytest.approx(-1 / np.sqrt(3), abs=1e-14)
    half = Fraction(1, 2)
    assert wigner_3j(half, half, 1, half, -half, 0) == pytest.approx(1 / np.sqrt(6), abs=1e-14)


def test_3j_selection_rules_give_zero():
    assert wigner_3j(1, 1, 1, 1, 0, 0) == 0.0  # m sum
    assert wigner_3j(1, 1, 3, 0, 0, 0) == 0.0  # triangle
    assert wigner_3j(1, 1, 1, 0, 0, 0) == 0.0  # odd j sum with m = 0


def _all_3j(max_j2):
    for a in range(max_j2 + 1):
        for b in range(max_j2 + 1):
            for c in range(abs(a - b), a + b + 1, 2):
                for x in range(-a, a + 1, 2):
                    for y in range(-b, b + 1, 2):
                        z = -x - y
                        if abs(z) <= c:
                            yield a, b, c, x, y, z


def test_3j_matches_sympy_exhaustively_up_to_two():
    worst = 0.0
    for a, b, c, x, y, z in _all_3j(4):
        args = [sympy.Rational(v, 2) for v in (a, b, c, x, y, z)]
        ref = float(sympy_3j(*args))
        got = wigner_3j(*(HalfInteger(v) for v in (a, b, c, x, y, z)))
        worst = max(worst, abs(ref - got))
    assert worst < 1e-12


def test_3j_orthogonality_large_j():
    # at fixed m3 the squares sum to 1/(2 j3 + 1); over all m1, m2 they sum to 1
    j1, j2 = 12, Fraction(19, 2)
    for j3 in [Fraction(5, 2), Fraction(31, 2), Fraction(43, 2)]:
        total = 0.0
        for m1 in projections(j1):
            for m2 in projections(j2):
                m3 = -(m1.value + m2.value)
                if abs(m3) <= j3:
                    total += wigner_3j(j1, j2, j3, m1, m2, m3) ** 2
        assert total == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("j2", [1, 2, 3, 4, 5])
def test_small_d_matches_matrix_exponential(j2):
    _, jy, _ = angular_momentum(j2)
    for theta in [0.0, 0.3, 1.7, np.pi]:
        ref = expm(-1j * theta * jy)
        ms = projections(HalfInteger(j2))
        got = np.array([[wigner_small_d(HalfInteger(j2), a, b, theta) for b in ms] for a in ms])
        assert np.max(np.abs(got - ref)) < 1e-12


def test_small_d_spin_half_closed_form():
    h = Fraction(1, 2)
    t = 0.8
    assert wigner_small_d(h, h, h, t) == pytest.approx(np.cos(t / 2))
    assert wigner_small_d(h, h, -h, t) == pytest.approx(-np.sin(t / 2))


def test_D_matrix_is_zyz_rotation():
    j2 = 3
    jx, jy, jz = angular_momentum(j2)
    phi, theta, gamma = 0.4, 1.1, -0.7
    ref = expm(-1j * phi * jz) @ expm(-1j * theta * jy) @ expm(-1j * gamma * jz)
    got = wigner_D_matrix(HalfInteger(j2), phi, theta, gamma)
    assert np.max(np.abs(got - ref)) < 1e-12


def test_passive_is_inverse_rotation():
    j = Fraction(3, 2)
    args = (0.4, 1.1, -0.7)
    act = wigner_D_matrix(j, *args, convention=ACTIVE)
    pas = wigner_D_matrix(j, *args, convention=PASSIVE)
    # element-wise: D_passive[m', m] = conj(D_active[m, m'])
    assert np.max(np.abs(pas - act.conj().T)) < 1e-14


def test_unknown_convention():
    with pytest.raises(ValueError):
        wigner_D(1, 0, 0, 0.1, 0.2, 0.3, convention="sideways")


@settings(max_examples=40, deadline=None)
@given(j2=st.integers(0, 12), theta=st.floats(0, np.pi), phi=st.floats(-4, 4), gamma=st.floats(-4, 4))
def test_D_matrix_unitary(j2, theta, phi, gamma):
    d = wigner_D_matrix(HalfInteger(j2), phi, theta, gamma)
    assert np.max(np.abs(d @ d.conj().T - np.eye(j2 + 1))) < 1e-11


@settings(max_examples=40, deadline=None)
@given(n=st.integers(0, 25), k=st.integers(0, 10), x=st.floats(0, 30))
def test_laguerre_matches_scipy(n, k, x):
    ref = eval_genlaguerre(n, k, x)
    assert laguerre_assoc(n, k, x) == pytest.approx(ref, rel=1e-9, abs=1e-9)


def test_laguerre_array_and_errors():
    x = np.linspace(0, 5, 7)
    assert np.allclose(laguerre_assoc(4, 2, x), eval_genlaguerre(4, 2, x))
    with pytest.raises(ValueError):
        laguerre_assoc(-1, 0, 1.0)


def test_gauss_legendre_exact_through_degree():
    rule = gauss_legendre(6, 0.0, 2.0)
    for p in range(12):
        assert rule.integrate(rule.nodes ** p) == pytest.approx(2.0 ** (p + 1) / (p + 1), rel=1e-13)
    with pytest.raises(ValueError):
        gauss_legendre(4, 1.0, 1.0)
    with pytest.raises(ValueError):
        gauss_legendre(0)


def test_uniform_periodic_integrates_trig():
    rule = uniform_periodic(9)
    for m in range(1, 9):
        assert abs(rule.integrate(np.exp(1j * m * rule.nodes))) < 1e-13
    assert rule.integrate(np.ones(9)) == pytest.approx(2 * np.pi)
