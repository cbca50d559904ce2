"""Truncated single-mode Fock space: squeezed vacuum and oscillator wavefunctions.

Quadrature convention used throughout the package:

* vacuum quadrature variance is 1/2 (shot-noise level),
* ``x_theta = x cos(theta) + p sin(theta)``,
* ``theta = 0`` is the amplified quadrature of :func:`squeezed_vacuum`,
  ``theta = pi/2`` the squeezed one.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

DEFAULT_NMAX = 10
MAX_TRUNCATION_ERROR = 1e-2

# cutoff used to sum the closed-form tail weight
_TAIL_CUTOFF = 2000


@dataclass(frozen=True)
class StateVector:
    """Pure state on the Fock basis ``|0>, ..., |n_max>``."""

    amps: np.ndarray
    truncation_error: float = field(default=0.0, compare=False)

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 1 or amps.size == 0:
            raise ValueError("amplitudes must be a non-empty 1-d sequence")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def n_max(self) -> int:
        return self.amps.size - 1

    @property
    def norm(self) -> float:
        return float(np.vdot(self.amps, self.amps).real)

    def normalized(self) -> StateVector:
        n = self.norm
        if n <= 0:
            raise ValueError("cannot normalize the zero vector")
        return StateVector(self.amps / np.sqrt(n), self.truncation_error)

    @classmethod
    def fock(cls, n: int, n_max: int) -> StateVector:
        if not 0 <= n <= n_max:
            raise ValueError(f"need 0 <= n <= n_max, got n={n}, n_max={n_max}")
        amps = np.zeros(n_max + 1, dtype=complex)
        amps[n] = 1.0
        return cls(amps)


def _squeezed_log_weights(s: float, n_max: int) -> np.ndarray:
    """log |c_{2k}|^2 for 2k <= n_max; requires s > 0."""
    k = np.arange(n_max // 2 + 1)
    return (
        -np.log(np.cosh(s))
        + 2 * k * np.log(np.tanh(s))
        + gammaln(2 * k + 1)
        - 2 * (k * np.log(2) + gammaln(k + 1))
    )


def squeezed_vacuum(s: float, n_max: int = DEFAULT_NMAX) -> StateVector:
    """Squeezed vacuum truncated at ``n_max`` photons.

    The even amplitudes are ``c_2k = (tanh s)^k sqrt((2k)!) / (2^k k! sqrt(cosh s))``,
    all odd amplitudes vanish.  The state is not renormalized after truncation;
    the discarded weight is stored on ``truncation_error``.

    Raises:
        ValueError: for ``s < 0`` or a cutoff discarding more than 1e-2 of the norm.
    """
    if s < 0:
        raise ValueError(f"squeezing parameter must be non-negative, got {s}")
    if n_max < 0:
        raise ValueError(f"n_max must be non-negative, got {n_max}")
    eps = truncation_error(s, n_max)
    if eps > MAX_TRUNCATION_ERROR:
        raise ValueError(
            f"n_max={n_max} discards {eps:.3g} of the norm at s={s} "
            f"(limit {MAX_TRUNCATION_ERROR})"
        )
    amps = np.zeros(n_max + 1)
    if s == 0:
        amps[0] = 1.0
    else:
        amps[::2] = np.exp(0.5 * _squeezed_log_weights(s, n_max))
    return StateVector(amps, truncation_error=eps)


def truncation_error(s: float, n_max: int) -> float:
    """Norm of the squeezed vacuum carried by photon numbers above ``n_max``."""
    if s < 0:
        raise ValueError(f"squeezing parameter must be non-negative, got {s}")
    if s == 0:
        return 0.0
    # Sum the small tail directly rather than forming 1 - sum(head).
    w = np.exp(_squeezed_log_weights(s, max(_TAIL_CUTOFF, 2 * n_max + 2)))
    k0 = n_max // 2 + 1
    tail = float(np.sum(w[k0:]))
    # geometric remainder beyond the summation cutoff (ratio -> tanh^2 s)
    ratio = np.tanh(s) ** 2
    tail += float(w[-1] * ratio / (1 - ratio))
    return tail


def oscillator_wavefunction(n: int, x):
    """Harmonic-oscillator eigenfunction ``psi_n(x)`` with vacuum variance 1/2.

    Uses the normalized three-term recurrence, so no factorials are formed and
    large ``n`` does not overflow.
    """
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return oscillator_wavefunctions(n, x)[n]


def oscillator_wavefunctions(n_max: int, x) -> np.ndarray:
    """Table of ``psi_0..psi_{n_max}`` at ``x``; shape ``(n_max + 1,) + x.shape``."""
    x = np.asarray(x, dtype=float)
    out = np.empty((n_max + 1,) + x.shape)
    out[0] = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    if n_max >= 1:
        out[1] = np.sqrt(2.0) * x * out[0]
    for n in range(1, n_max):
        out[n + 1] = (
            np.sqrt(2.0 / (n + 1)) * x * out[n] - np.sqrt(n / (n + 1)) * out[n - 1]
        )
    return out
