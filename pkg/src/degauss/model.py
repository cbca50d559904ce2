"""Parameter set of the conditioning experiment and the states it produces."""

from __future__ import annotations

from dataclasses import dataclass

from .fock import DEFAULT_NMAX, squeezed_vacuum
from .optics import (
    DensityMatrix,
    check_efficiency,
    check_reflectivity,
    apd_loss,
    beamsplitter_split,
    loss_channel,
)


@dataclass(frozen=True)
class ModelParams:
    """Squeezing ``s``, tap-off reflectivity ``R``, homodyne efficiency ``eta``,
    photodetector-arm efficiency ``eta_apd`` and modal purity ``xi``."""

    s: float
    R: float
    eta: float = 1.0
    xi: float = 1.0
    eta_apd: float = 1.0
    n_max: int = DEFAULT_NMAX

    def __post_init__(self):
        if self.s < 0:
            raise ValueError(f"s must be non-negative, got {self.s}")
        check_reflectivity(self.R)
        check_efficiency(self.eta, "eta")
        check_efficiency(self.eta_apd, "eta_apd")
        if not 0 <= self.xi <= 1:
            raise ValueError(f"xi must lie in [0, 1], got {self.xi}")
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")

    @property
    def eta_tot(self) -> float:
        return self.eta * (1 - self.R)

    def replace(self, **changes) -> ModelParams:
        fields = {k: getattr(self, k) for k in self.__dataclass_fields__}
        fields.update(changes)
        return ModelParams(**fields)


def _source(s: float, n_max: int):
    # renormalized so that every state downstream has unit trace
    return squeezed_vacuum(s, n_max).normalized()


def conditional_state(s: float, R: float, eta_apd: float = 1.0,
                      n_max: int = DEFAULT_NMAX) -> tuple[DensityMatrix, float]:
    """Homodyne-arm state given a click, before homodyne losses, and p_click."""
    two_mode = beamsplitter_split(_source(s, n_max), R)
    return apd_loss(two_mode, eta_apd)


def unconditional_state(s: float, R: float, n_max: int = DEFAULT_NMAX) -> DensityMatrix:
    """Homodyne-arm state irrespective of the detector outcome."""
    return beamsplitter_split(_source(s, n_max), R).reduced()


def homodyne_states(params: ModelParams) -> tuple[DensityMatrix, DensityMatrix, float]:
    """Conditioned and unconditioned states as seen by the homodyne detector
    (loss ``eta`` applied), plus the click probability."""
    cond, p_click = conditional_state(params.s, params.R, params.eta_apd, params.n_max)
    uncond = unconditional_state(params.s, params.R, params.n_max)
    return loss_channel(cond, params.eta), loss_channel(uncond, params.eta), p_click


def measured_state(params: ModelParams) -> DensityMatrix:
    """State whose quadrature statistics are ``xi P_cond + (1 - xi) P_uncond``."""
    cond, uncond, _ = homodyne_states(params)
    xi = params.xi
    return DensityMatrix(xi * cond.rho + (1 - xi) * uncond.rho)
