"""Wigner functions: direct evaluation, reconstruction from quadrature
histograms by filtered back-projection, and homodyne-efficiency correction."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import bisect
from scipy.special import eval_genlaguerre, gammaln

from .homodyne import PdfTable, _plain
from .model import ModelParams, measured_state
from .optics import DensityMatrix, _bernoulli_map
from .sampler import QuadratureHistogram

DEFAULT_GRID = np.linspace(-4.0, 4.0, 81)
DEFAULT_CUTOFF = 6.0
# negative eigenvalues of a corrected state beyond this are an error
UNPHYSICAL_TOLERANCE = 1e-3
_CHUNK = 4096
# knot spacing of the filtered projections; spline error ~ (step * cutoff)^4
_KNOT_STEP = 0.01


class UnphysicalStateError(ValueError):
    pass


class NoSignChangeError(ValueError):
    pass


@dataclass(frozen=True)
class WignerGrid:
    """``w[i, j] = W(xs[i], ps[j])``."""

    xs: np.ndarray
    ps: np.ndarray
    w: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def integral(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.w, self.ps, axis=1), self.xs))

    @property
    def max(self) -> float:
        return float(self.w.max())

    def value_at(self, x: float, p: float) -> float:
        """Bilinear interpolation of the grid."""
        i = np.clip(np.searchsorted(self.xs, x) - 1, 0, self.xs.size - 2)
        j = np.clip(np.searchsorted(self.ps, p) - 1, 0, self.ps.size - 2)
        tx = (x - self.xs[i]) / (self.xs[i + 1] - self.xs[i])
        tp = (p - self.ps[j]) / (self.ps[j + 1] - self.ps[j])
        w = self.w
        return float(
            (1 - tx) * (1 - tp) * w[i, j] + tx * (1 - tp) * w[i + 1, j]
            + (1 - tx) * tp * w[i, j + 1] + tx * tp * w[i + 1, j + 1]
        )

    @property
    def origin(self) -> float:
        return self.value_at(0.0, 0.0)

    def to_csv(self, path) -> None:
        with Path(path).open("w") as fh:
            for key, value in sorted(self.meta.items()):
                fh.write(f"# {key} = {_plain(value)!r}\n")
            fh.write("x,p,w\n")
            for i, x in enumerate(self.xs):
                for j, p in enumerate(self.ps):
                    fh.write(f"{float(x)!r},{float(p)!r},{float(self.w[i, j])!r}\n")

    def to_gnuplot(self, path) -> None:
        """Write gnuplot's ``matrix nonuniform`` layout: the first row holds the
        p values, each further row an x value followed by ``W(x, p)``."""
        with Path(path).open("w") as fh:
            fh.write(" ".join([str(self.ps.size)] + [repr(float(p)) for p in self.ps]) + "\n")
            for i, x in enumerate(self.xs):
                fh.write(" ".join([repr(float(x))] + [repr(float(v)) for v in self.w[i]]) + "\n")


def _kernel(m: int, n: int, alpha: np.ndarray) -> np.ndarray:
    # Wigner function of |m><n| for m >= n; alpha = (x + i p) / sqrt(2)
    r2 = 4 * np.abs(alpha) ** 2
    pref = (-1) ** n * np.exp(0.5 * (gammaln(n + 1) - gammaln(m + 1))) / np.pi
    return pref * (2 * np.conj(alpha)) ** (m - n) * np.exp(-0.5 * r2) * eval_genlaguerre(n, m - n, r2)


def wigner_at(rho: DensityMatrix, x, p) -> np.ndarray:
    """Wigner function of ``rho`` at broadcastable phase-space points ``(x, p)``."""
    alpha = (np.asarray(x, dtype=float) + 1j * np.asarray(p, dtype=float)) / np.sqrt(2)
    w = np.zeros(alpha.shape)
    r = rho.rho
    for m in range(rho.n_max + 1):
        w += r[m, m].real * _kernel(m, m, alpha).real
        for n in range(m):
            # rho_nm W[|n><m|] is the conjugate of rho_mn W[|m><n|] for Hermitian rho
            w += 2 * (r[m, n] * _kernel(m, n, alpha)).real
    return w


def wigner_direct(rho: DensityMatrix, xs=None, ps=None) -> WignerGrid:
    """Wigner function from the density matrix via Laguerre-polynomial kernels."""
    xs = DEFAULT_GRID if xs is None else np.asarray(xs, dtype=float)
    ps = xs if ps is None else np.asarray(ps, dtype=float)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    return WignerGrid(xs, ps, wigner_at(rho, X, P), {"source": "direct"})


def wigner_origin_parity(rho: DensityMatrix) -> float:
    """``W(0, 0) = (1/pi) sum_n (-1)^n rho_nn``."""
    signs = (-1.0) ** np.arange(rho.n_max + 1)
    return float(np.dot(signs, np.diag(rho.rho).real) / np.pi)


def symmetrize(h):
    """Average each bin with its mirror image about ``x = 0``.

    Counts become real-valued weights.  A :class:`PdfTable` on a grid symmetric
    about 0 is symmetrized the same way.
    """
    if isinstance(h, PdfTable):
        if not np.allclose(h.xs, -h.xs[::-1], atol=1e-12):
            raise ValueError("symmetrization needs a grid symmetric about 0")
        return PdfTable(h.xs, 0.5 * (h.ps + h.ps[::-1]), h.theta, dict(h.meta))
    if not np.allclose(h.edges, -h.edges[::-1], atol=1e-12):
        raise ValueError("symmetrization needs bin edges symmetric about 0")
    counts = 0.5 * (h.counts + h.counts[::-1]).astype(float)
    return QuadratureHistogram(h.theta, h.edges, counts, h.total)


def _ramp_antiderivative(v: np.ndarray, cutoff: float) -> np.ndarray:
    # d/dv of this is the ramp kernel  K(v) = int_{-kc}^{kc} |k| exp(i k v) dk
    with np.errstate(invalid="ignore", divide="ignore"):
        out = 4 * np.sin(0.5 * cutoff * v) ** 2 / v
    return np.where(v == 0, 0.0, out)


def _as_piecewise_density(proj) -> tuple[float, np.ndarray, np.ndarray]:
    """(theta, edges, density) with the density constant on each cell."""
    if isinstance(proj, QuadratureHistogram):
        if proj.total <= 0 or proj.counts.sum() <= 0:
            raise ValueError(f"empty histogram at theta={proj.theta}")
        return proj.theta, proj.edges, proj.density()
    if isinstance(proj, PdfTable):
        xs = proj.xs
        mid = 0.5 * (xs[1:] + xs[:-1])
        edges = np.concatenate([[xs[0] - 0.5 * (xs[1] - xs[0])], mid,
                                [xs[-1] + 0.5 * (xs[-1] - xs[-2])]])
        support = proj.ps > 0
        return proj.theta, edges, np.where(support, proj.ps, 0.0)
    raise TypeError(f"cannot reconstruct from {type(proj).__name__}")


def filtered_projection(edges, density, us, cutoff: float) -> np.ndarray:
    """Convolution of a piecewise-constant density with the band-limited ramp
    kernel, evaluated exactly at the points ``us``."""
    us = np.asarray(us, dtype=float)
    flat = us.ravel()
    keep = density != 0
    lo, hi, dens = edges[:-1][keep], edges[1:][keep], density[keep]
    out = np.empty(flat.size)
    for start in range(0, flat.size, _CHUNK):
        u = flat[start:start + _CHUNK, None]
        f = _ramp_antiderivative(hi - u, cutoff) - _ramp_antiderivative(lo - u, cutoff)
        out[start:start + _CHUNK] = f @ dens
    return out.reshape(us.shape)


def _filtered_projection_spline(edges, density, us, cutoff: float) -> np.ndarray:
    # exact values on a 1-d knot grid, cubic spline onto the rotated coordinates
    reach = float(np.max(np.abs(us)))
    n = 2 * int(np.ceil(reach / _KNOT_STEP)) + 3
    knots = np.linspace(-(n // 2) * _KNOT_STEP, (n // 2) * _KNOT_STEP, n)
    q = filtered_projection(edges, density, knots, cutoff)
    return CubicSpline(knots, q)(us)


def radon_reconstruct(projections, xs=None, ps=None,
                      filter_cutoff: float = DEFAULT_CUTOFF) -> WignerGrid:
    """Filtered back-projection of quadrature densities at equally spaced phases.

    ``projections`` is a sequence of :class:`QuadratureHistogram` or
    :class:`PdfTable`.  Each density is filtered with the ramp kernel cut off at
    ``|k| = filter_cutoff`` and back-projected with weight ``pi / N``:
    ``W(x, p) = 1 / (4 pi N) * sum_theta q_theta(x cos(theta) + p sin(theta))``.
    """
    projections = list(projections)
    phases = np.mod([p.theta for p in projections], np.pi)
    if len(np.unique(np.round(phases, 12))) < 2:
        raise ValueError("reconstruction needs at least two distinct phases")
    xs = DEFAULT_GRID if xs is None else np.asarray(xs, dtype=float)
    ps = xs if ps is None else np.asarray(ps, dtype=float)
    X, P = np.meshgrid(xs, ps, indexing="ij")
    w = np.zeros(X.shape)
    for proj in projections:
        theta, edges, density = _as_piecewise_density(proj)
        u = X * np.cos(theta) + P * np.sin(theta)
        w += _filtered_projection_spline(edges, density, u, filter_cutoff)
    w /= 4 * np.pi * len(projections)
    meta = {"source": "reconstructed", "filter_cutoff": filter_cutoff,
            "phases": len(projections)}
    return WignerGrid(xs, ps, w, meta)


def correct_efficiency(rho_measured: DensityMatrix, eta: float) -> DensityMatrix:
    """Undo a pure-loss channel of transmission ``eta`` on the truncated space.

    Raises:
        ValueError: for ``eta`` outside (0.5, 1], where the inverse series diverges.
        UnphysicalStateError: if the result has an eigenvalue below -1e-3.
    """
    if not 0.5 < eta <= 1:
        raise ValueError(
            f"efficiency correction needs 0.5 < eta <= 1, got {eta}; "
            "the inverse loss map is unstable at or below 1/2"
        )
    if eta == 1:
        return rho_measured
    rho = _bernoulli_map(rho_measured.rho, 1 / eta)
    rho = 0.5 * (rho + rho.conj().T)
    vals, vecs = np.linalg.eigh(rho)
    if vals.min() < -UNPHYSICAL_TOLERANCE:
        raise UnphysicalStateError(
            f"corrected state has eigenvalue {vals.min():.3g} < {-UNPHYSICAL_TOLERANCE}"
        )
    if vals.min() < 0:
        vals = np.clip(vals, 0, None)
        rho = (vecs * vals) @ vecs.conj().T
        rho /= np.trace(rho).real
    return DensityMatrix(rho)


def measured_origin_value(params: ModelParams) -> float:
    return wigner_origin_parity(measured_state(params))


def negativity_threshold(params: ModelParams, xi_lo: float = 0.5, xi_hi: float = 1.0,
                         xtol: float = 1e-8) -> float:
    """Modal purity at which the measured-model ``W(0, 0)`` changes sign."""
    if not 0 <= xi_lo < xi_hi <= 1:
        raise ValueError(f"invalid xi range [{xi_lo}, {xi_hi}]")
    f = lambda xi: measured_origin_value(params.replace(xi=xi))
    f_lo, f_hi = f(xi_lo), f(xi_hi)
    if f_lo * f_hi > 0:
        raise NoSignChangeError(
            f"W(0,0) keeps its sign on xi in [{xi_lo}, {xi_hi}] "
            f"({f_lo:.4f} .. {f_hi:.4f})"
        )
    return float(bisect(f, xi_lo, xi_hi, xtol=xtol))
