"""Linear-optics channels acting on truncated Fock states.

Beam path modelled here: the signal is split on a tap-off beamsplitter, the
reflected arm goes (through an optional loss) to a threshold photodetector,
and the transmitted arm is kept when the detector clicks.  Homodyne
inefficiency is a Bernoulli loss applied afterwards.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import comb

from .fock import StateVector, _squeezed_log_weights

CLICK_PROBABILITY_FLOOR = 1e-12


class DegenerateConditioningError(ValueError):
    """The conditioning event has (numerically) zero probability."""


@dataclass(frozen=True)
class DensityMatrix:
    rho: np.ndarray

    def __post_init__(self):
        rho = np.array(self.rho, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        rho.setflags(write=False)
        object.__setattr__(self, "rho", rho)

    @property
    def n_max(self) -> int:
        return self.rho.shape[0] - 1

    @property
    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(0.5 * (self.rho + self.rho.conj().T))

    def photon_numbers(self) -> np.ndarray:
        return np.diag(self.rho).real.copy()

    @classmethod
    def from_state(cls, psi: StateVector) -> DensityMatrix:
        """Projector onto ``psi``, renormalized (truncated states lose a little norm)."""
        psi = psi.normalized()
        return cls(np.outer(psi.amps, psi.amps.conj()))

    @classmethod
    def fock(cls, n: int, n_max: int) -> DensityMatrix:
        return cls.from_state(StateVector.fock(n, n_max))


@dataclass(frozen=True)
class TwoModeState:
    """Amplitudes ``a[n, m]`` on ``|n>_1 |m>_2``; mode 1 goes to the homodyne
    detector, mode 2 to the photodetector."""

    amps: np.ndarray

    def __post_init__(self):
        amps = np.array(self.amps, dtype=complex)
        if amps.ndim != 2 or amps.shape[0] != amps.shape[1]:
            raise ValueError(f"two-mode amplitudes must be square, got {amps.shape}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)

    @property
    def n_max(self) -> int:
        return self.amps.shape[0] - 1

    @property
    def norm(self) -> float:
        return float(np.sum(np.abs(self.amps) ** 2))

    def reduced(self) -> DensityMatrix:
        """Mode-1 state with mode 2 traced out."""
        return DensityMatrix(self.amps @ self.amps.conj().T)


@dataclass(frozen=True)
class ChannelParams:
    R: float
    eta: float = 1.0
    eta_apd: float = 1.0

    def __post_init__(self):
        check_reflectivity(self.R)
        check_efficiency(self.eta, "eta")
        check_efficiency(self.eta_apd, "eta_apd")

    @property
    def eta_tot(self) -> float:
        """Efficiency seen by the unconditioned homodyne signal."""
        return self.eta * (1 - self.R)


def check_reflectivity(R):
    if not 0 <= R < 1:
        raise ValueError(f"reflectivity must lie in [0, 1), got {R}")


def check_efficiency(eta, name="eta"):
    if not 0 < eta <= 1:
        raise ValueError(f"{name} must lie in (0, 1], got {eta}")


def beamsplitter_split(psi: StateVector, R: float, n_max: int | None = None) -> TwoModeState:
    """Mix ``psi`` with vacuum on a beamsplitter of reflectivity ``R``.

    ``|n>|0> -> sum_k sqrt(C(n, k)) t^(n-k) r^k |n-k>|k>`` with ``r = sqrt(R)``,
    ``t = sqrt(1 - R)``.  Photon number is conserved so nothing leaks out of the
    truncated product space.
    """
    check_reflectivity(R)
    if n_max is None:
        n_max = psi.n_max
    if n_max < psi.n_max:
        raise ValueError(f"n_max={n_max} is below the input cutoff {psi.n_max}")
    r, t = np.sqrt(R), np.sqrt(1 - R)
    out = np.zeros((n_max + 1, n_max + 1), dtype=complex)
    for n, c in enumerate(psi.amps):
        if c == 0:
            continue
        k = np.arange(n + 1)
        out[n - k, k] += c * np.sqrt(comb(n, k)) * t ** (n - k) * r ** k
    return TwoModeState(out)


def apd_loss(state: TwoModeState, eta_apd: float) -> tuple[DensityMatrix, float]:
    """Condition mode 1 on a click of a detector with efficiency ``eta_apd``.

    Loss on the detector arm followed by the click POVM ``1 - |0><0|`` is the
    effective POVM ``sum_m (1 - (1 - eta_apd)^m) |m><m|``.  Returns the
    normalized conditional mode-1 state and the click probability.
    """
    check_efficiency(eta_apd, "eta_apd")
    m = np.arange(state.n_max + 1)
    weights = 1.0 - (1.0 - eta_apd) ** m
    a = state.amps
    rho = (a * weights) @ a.conj().T
    p_click = float(np.trace(rho).real)
    if p_click < CLICK_PROBABILITY_FLOOR:
        raise DegenerateConditioningError(
            f"click probability {p_click:.3g} is too small to condition on"
        )
    return DensityMatrix(rho / p_click), p_click


def condition_on_click(state: TwoModeState) -> tuple[DensityMatrix, float]:
    """Ideal threshold detector: ``apd_loss`` at unit efficiency."""
    return apd_loss(state, 1.0)


def _bernoulli_map(rho: np.ndarray, eta: float) -> np.ndarray:
    # rho'_{m,n} = sum_k (1-eta)^k B_k rho B_k^T with B_k|n> = sqrt(C(n,k) eta^(n-k)) |n-k>.
    # Real-coefficient form so that eta > 1 yields the exact inverse map.
    dim = rho.shape[0]
    n = np.arange(dim)
    out = np.zeros_like(rho, dtype=complex)
    for k in range(dim):
        src = n[k:]
        b = np.zeros((dim, dim))
        b[src - k, src] = np.sqrt(comb(src, k) * eta ** (src - k))
        out += (1 - eta) ** k * (b @ rho @ b.T)
    return out


def loss_channel(rho: DensityMatrix, eta: float) -> DensityMatrix:
    """Pure-loss channel of transmission ``eta`` (lossy beamsplitter)."""
    check_efficiency(eta)
    if eta == 1:
        return rho
    return DensityMatrix(_bernoulli_map(rho.rho, eta))


def analytic_conditional_small_r(s: float, R: float) -> StateVector:
    """Small-reflectivity conditional state ``beta|1> + sqrt(2) gamma t^2 |3>``.

    ``beta`` and ``gamma`` are the two- and four-photon squeezed-vacuum
    amplitudes, ``t^2 = 1 - R``.
    """
    if s <= 0:
        raise ValueError("conditional state is undefined for s = 0")
    check_reflectivity(R)
    c = np.zeros(5)
    c[::2] = np.exp(0.5 * _squeezed_log_weights(s, 4))
    amps = np.zeros(4, dtype=complex)
    amps[1] = c[2]
    amps[3] = np.sqrt(2) * c[4] * (1 - R)
    return StateVector(amps).normalized()


def fidelity(rho: DensityMatrix, psi: StateVector) -> float:
    """``<psi|rho|psi>``; a shorter ``psi`` is zero-padded to ``rho``'s cutoff."""
    amps = psi.amps
    if amps.size > rho.rho.shape[0]:
        if np.any(amps[rho.rho.shape[0]:] != 0):
            raise ValueError(
                f"state cutoff {psi.n_max} exceeds density-matrix cutoff {rho.n_max}"
            )
        amps = amps[: rho.rho.shape[0]]
    amps = np.pad(amps, (0, rho.rho.shape[0] - amps.size))
    return float(np.vdot(amps, rho.rho @ amps).real)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    if a.rho.shape != b.rho.shape:
        raise ValueError("density matrices have different cutoffs")
    d = a.rho - b.rho
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(0.5 * (d + d.conj().T)))))
