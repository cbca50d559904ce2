"""Homodyne quadrature statistics of single-mode states."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .fock import oscillator_wavefunctions
from .optics import DensityMatrix

SHOT_NOISE_VARIANCE = 0.5
DEFAULT_XS = np.linspace(-5.0, 5.0, 2001)

# a density integrating below this over the grid means the grid is too narrow
MIN_GRID_MASS = 0.999


class GridRangeError(ValueError):
    pass


@dataclass(frozen=True)
class PdfTable:
    """Quadrature density ``ps`` tabulated on the regular grid ``xs`` at phase ``theta``."""

    xs: np.ndarray
    ps: np.ndarray
    theta: float
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        xs = np.array(self.xs, dtype=float)
        ps = np.array(self.ps, dtype=float)
        if xs.shape != ps.shape or xs.ndim != 1 or xs.size < 2:
            raise ValueError("xs and ps must be matching 1-d arrays of length >= 2")
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ps", ps)

    @property
    def integral(self) -> float:
        return float(np.trapezoid(self.ps, self.xs))

    def moments(self) -> tuple[float, float]:
        """Grid-integrated mean and variance."""
        mass = self.integral
        mean = np.trapezoid(self.xs * self.ps, self.xs) / mass
        var = np.trapezoid((self.xs - mean) ** 2 * self.ps, self.xs) / mass
        return float(mean), float(var)

    def at(self, x):
        return np.interp(x, self.xs, self.ps)

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write(f"# theta = {float(self.theta)!r}\n")
            for key, value in sorted(self.meta.items()):
                fh.write(f"# {key} = {_plain(value)!r}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["x", "density"])
            for x, p in zip(self.xs, self.ps):
                writer.writerow([repr(float(x)), repr(float(p))])

    @classmethod
    def from_csv(cls, path) -> PdfTable:
        header, rows = read_commented_csv(path)
        if "theta" not in header:
            raise ValueError(f"{path}: missing '# theta = ...' header")
        data = np.array(rows, dtype=float)
        theta = float(header.pop("theta"))
        return cls(data[:, 0], data[:, 1], theta, meta=header)


def _plain(value):
    return value.item() if isinstance(value, np.generic) else value


def read_commented_csv(path) -> tuple[dict, list]:
    """Parse ``# key = value`` comment lines plus a headed two-column CSV body."""
    header, rows = {}, []
    with Path(path).open() as fh:
        body = []
        for line in fh:
            if line.startswith("#"):
                key, sep, value = line[1:].partition("=")
                if sep:
                    header[key.strip()] = value.strip().strip("'\"")
            elif line.strip():
                body.append(line)
    reader = csv.reader(body)
    next(reader, None)
    for row in reader:
        rows.append([float(v) for v in row])
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return header, rows


def quadrature_pdf(rho: DensityMatrix, theta: float, xs=None) -> PdfTable:
    """Density of ``x_theta`` outcomes.

    ``P(x) = sum_{m,n} rho_mn exp(i (n - m) theta) psi_m(x) psi_n(x)``.
    """
    xs = DEFAULT_XS if xs is None else np.asarray(xs, dtype=float)
    psi = oscillator_wavefunctions(rho.n_max, xs)
    n = np.arange(rho.n_max + 1)
    phased = rho.rho * np.exp(1j * (n[None, :] - n[:, None]) * theta)
    ps = np.einsum("mn,mx,nx->x", phased, psi, psi)
    ps = np.clip(ps.real, 0.0, None)
    table = PdfTable(xs, ps, theta)
    mass = table.integral
    if mass < MIN_GRID_MASS:
        raise GridRangeError(
            f"grid [{xs[0]}, {xs[-1]}] holds only {mass:.5f} of the probability"
        )
    return table


def mixed_pdf(p_cond: PdfTable, p_uncond: PdfTable, xi: float) -> PdfTable:
    """Convex mixture ``xi * p_cond + (1 - xi) * p_uncond``."""
    if not 0 <= xi <= 1:
        raise ValueError(f"xi must lie in [0, 1], got {xi}")
    if not np.array_equal(p_cond.xs, p_uncond.xs) or p_cond.theta != p_uncond.theta:
        raise ValueError("mixture components must share grid and phase")
    return PdfTable(p_cond.xs, xi * p_cond.ps + (1 - xi) * p_uncond.ps, p_cond.theta)


def _quadrature_operator(dim: int, theta: float) -> np.ndarray:
    a = np.diag(np.sqrt(np.arange(1, dim)), 1)
    return (a * np.exp(-1j * theta) + a.T * np.exp(1j * theta)) / np.sqrt(2)


def quadrature_moments(rho: DensityMatrix, theta: float) -> tuple[float, float]:
    """Mean and variance of ``x_theta`` from ladder-operator matrix elements."""
    # pad by one level so that x^2 is exact on the truncated support
    dim = rho.n_max + 2
    r = np.zeros((dim, dim), dtype=complex)
    r[:-1, :-1] = rho.rho
    x = _quadrature_operator(dim, theta)
    mean = np.trace(r @ x).real
    second = np.trace(r @ x @ x).real
    return float(mean), float(second - mean ** 2)


def quadrature_variance(rho: DensityMatrix, theta: float) -> float:
    return quadrature_moments(rho, theta)[1]


def variance_db(v: float) -> float:
    """Variance relative to the shot-noise level, in dB."""
    if v <= 0:
        raise ValueError(f"variance must be positive, got {v}")
    return float(10 * np.log10(v / SHOT_NOISE_VARIANCE))
