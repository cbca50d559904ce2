"""Simulation of photon-subtracted squeezed light: conditioning on a
photodetector click, homodyne sampling and Wigner-function tomography."""

from .fock import StateVector, oscillator_wavefunction, squeezed_vacuum, truncation_error
from .homodyne import PdfTable, mixed_pdf, quadrature_pdf, quadrature_variance, variance_db
from .model import ModelParams, measured_state
from .optics import (
    ChannelParams,
    DensityMatrix,
    TwoModeState,
    analytic_conditional_small_r,
    apd_loss,
    beamsplitter_split,
    condition_on_click,
    fidelity,
    loss_channel,
)
from .sampler import QuadratureHistogram, RunConfig, draw_samples, histogram, simulate_experiment
from .tomography import (
    WignerGrid,
    correct_efficiency,
    radon_reconstruct,
    symmetrize,
    wigner_at,
    wigner_direct,
    wigner_origin_parity,
)

__version__ = "0.1.0"
