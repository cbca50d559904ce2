import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from degauss.fock import (
    StateVector,
    oscillator_wavefunction,
    oscillator_wavefunctions,
    squeezed_vacuum,
    truncation_error,
)
from degauss.homodyne import quadrature_variance
from degauss.optics import DensityMatrix


def _hermite_function_mp(n, x, dps=50):
    # psi_n(x) = H_n(x) exp(-x^2/2) / sqrt(2^n n! sqrt(pi)), physicists' Hermite
    with mpmath.workdps(dps):
        x = mpmath.mpf(x)
        norm = mpmath.sqrt(2 ** n * mpmath.factorial(n) * mpmath.sqrt(mpmath.pi))
        return float(mpmath.hermite(n, x) * mpmath.exp(-x * x / 2) / norm)


def _squeezed_weight_mp(s, n):
    with mpmath.workdps(40):
        k = n // 2
        c = (
            mpmath.tanh(s) ** k
            * mpmath.sqrt(mpmath.factorial(2 * k))
            / (2 ** k * mpmath.factorial(k) * mpmath.sqrt(mpmath.cosh(s)))
        )
        return c * c


def test_coefficients_at_s043():
    c = squeezed_vacuum(0.43, 10).amps.real
    assert c[0] == pytest.approx(0.96, abs=0.005)
    assert c[2] == pytest.approx(0.27, abs=0.005)
    assert c[4] == pytest.approx(0.10, abs=0.005)


def test_coefficients_match_high_precision():
    c = squeezed_vacuum(0.43, 10).amps.real
    for n in range(0, 11, 2):
        assert c[n] ** 2 == pytest.approx(float(_squeezed_weight_mp(0.43, n)), rel=1e-13)


def test_zero_squeezing_is_vacuum():
    np.testing.assert_array_equal(squeezed_vacuum(0.0, 4).amps, [1, 0, 0, 0, 0])


def test_norm_close_to_one_at_defaults():
    assert abs(squeezed_vacuum(0.43, 10).norm - 1) < 1e-4


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        squeezed_vacuum(-0.1, 10)
    with pytest.raises(ValueError):
        squeezed_vacuum(0.43, -1)
    # s=1.5 keeps a large weight above n=2
    with pytest.raises(ValueError, match="discards"):
        squeezed_vacuum(1.5, 2)


def test_truncation_error_against_long_sum():
    # independent oracle: sum the closed-form weights out to n=200
    with mpmath.workdps(40):
        tail = sum(_squeezed_weight_mp(0.43, n) for n in range(12, 201, 2))
    eps = truncation_error(0.43, 10)
    assert eps < 1e-4
    assert eps == pytest.approx(float(tail), rel=1e-9)


def test_truncation_error_edge_cases():
    assert truncation_error(0.0, 0) == 0.0
    assert truncation_error(0.0, 7) == 0.0
    assert truncation_error(0.43, 2) > truncation_error(0.43, 4)


@settings(max_examples=40, deadline=None)
@given(st.floats(0.0, 0.8), st.integers(6, 14))
def test_truncation_error_monotone_in_cutoff(s, n_max):
    assert truncation_error(s, n_max + 2) <= truncation_error(s, n_max)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.0, 0.8), st.integers(0, 16))
def test_squeezed_vacuum_parity_and_normalization(s, n_max):
    eps = truncation_error(s, n_max)
    if eps > 1e-2:
        with pytest.raises(ValueError):
            squeezed_vacuum(s, n_max)
        return
    psi = squeezed_vacuum(s, n_max)
    assert np.all(psi.amps[1::2] == 0)
    assert abs(1 - psi.norm - eps) < 1e-12
    assert psi.truncation_error == eps
    assert 1 - eps - 1e-15 <= psi.norm <= 1 + 1e-15


def test_wavefunction_examples():
    assert oscillator_wavefunction(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-15)
    assert oscillator_wavefunction(1, 0.0) == 0.0
    expected = _hermite_function_mp(10, 3.0)
    assert oscillator_wavefunction(10, 3.0) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 12, 30])
@pytest.mark.parametrize("x", [-4.2, -0.7, 0.3, 2.5])
def test_wavefunctions_match_high_precision(n, x):
    expected = _hermite_function_mp(n, x)
    assert oscillator_wavefunction(n, x) == pytest.approx(expected, rel=1e-10, abs=1e-300)


def test_high_order_does_not_overflow():
    values = oscillator_wavefunctions(200, np.linspace(-25, 25, 11))
    assert np.all(np.isfinite(values))
    assert oscillator_wavefunction(150, 1.1) == pytest.approx(_hermite_function_mp(150, 1.1), rel=1e-9)


def test_ground_state_variance_is_half():
    xs = np.linspace(-10, 10, 20001)
    psi0 = oscillator_wavefunction(0, xs)
    assert np.trapezoid(xs ** 2 * psi0 ** 2, xs) == pytest.approx(0.5, abs=1e-12)


def test_orthonormality_up_to_twelve():
    # psi_12 reaches beyond |x| = 5, so the check runs on a wider grid
    xs = np.linspace(-8, 8, 3201)
    table = oscillator_wavefunctions(12, xs)
    gram = np.trapezoid(table[:, None, :] * table[None, :, :], xs, axis=-1)
    np.testing.assert_allclose(gram, np.eye(13), atol=1e-6)


def test_squeezed_variance_identity():
    for s in (0.1, 0.43, 0.6):
        target = np.exp(-2 * s) / 2
        v = quadrature_variance(DensityMatrix.from_state(squeezed_vacuum(s, 60)), np.pi / 2)
        assert v == pytest.approx(target, abs=1e-12)
        psi = squeezed_vacuum(s, 10)
        v = quadrature_variance(DensityMatrix.from_state(psi), np.pi / 2)
        assert v == pytest.approx(target, abs=200 * psi.truncation_error)


def test_state_vector_validation():
    with pytest.raises(ValueError):
        StateVector([])
    with pytest.raises(ValueError):
        StateVector.fock(3, 2)
    psi = StateVector([3.0, 4.0])
    assert psi.n_max == 1
    assert psi.normalized().norm == pytest.approx(1.0)
