"""Monte-Carlo homodyne acquisition: per-pulse quadrature samples and histograms.

Random numbers come from numpy's PCG64 generator (128-bit state).  Each phase
of a run draws from its own stream seeded by ``(seed, phase index)`` so the
output does not depend on evaluation order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy import stats

from .homodyne import PdfTable, mixed_pdf, quadrature_pdf, read_commented_csv
from .model import ModelParams, homodyne_states

DEFAULT_PHASES = tuple(k * np.pi / 6 for k in range(6))


@dataclass(frozen=True)
class RunConfig:
    phases: tuple = DEFAULT_PHASES
    pulses_per_phase: int = 5000
    bins: int = 40
    range: tuple = (-5.0, 5.0)
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(float(t) for t in self.phases))
        object.__setattr__(self, "range", tuple(float(r) for r in self.range))
        if not self.phases:
            raise ValueError("at least one phase is required")
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if not self.range[0] < self.range[1]:
            raise ValueError(f"empty histogram range {self.range}")
        if self.pulses_per_phase < 1:
            raise ValueError("pulses_per_phase must be >= 1")

    @staticmethod
    def equally_spaced(n_phases: int) -> tuple:
        return tuple(k * np.pi / n_phases for k in range(n_phases))


@dataclass(frozen=True)
class QuadratureHistogram:
    """Binned quadrature samples at one phase.

    ``counts`` may hold real-valued weights (after symmetrization).  ``total``
    includes samples that fell outside the binned range.
    """

    theta: float
    edges: np.ndarray
    counts: np.ndarray
    total: int

    def __post_init__(self):
        edges = np.asarray(self.edges, dtype=float)
        counts = np.asarray(self.counts)
        if edges.ndim != 1 or edges.size != counts.size + 1:
            raise ValueError("need len(edges) == len(counts) + 1")
        if np.any(np.diff(edges) <= 0):
            raise ValueError("bin edges must be strictly increasing")
        if np.any(counts < 0):
            raise ValueError("negative bin count")
        if counts.sum() > self.total + 1e-9 * max(self.total, 1):
            raise ValueError("binned counts exceed the sample total")
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "counts", counts)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[1:] + self.edges[:-1])

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.edges)

    @property
    def out_of_range(self) -> float:
        return self.total - float(self.counts.sum())

    def density(self) -> np.ndarray:
        """Counts normalized to a probability density over all ``total`` samples."""
        if self.total <= 0:
            raise ValueError("histogram holds no samples")
        return self.counts / (self.total * self.widths)

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            fh.write(f"# theta = {float(self.theta)!r}\n")
            fh.write(f"# total = {int(self.total)}\n")
            fh.write(f"# x_min = {float(self.edges[0])!r}\n")
            fh.write(f"# x_max = {float(self.edges[-1])!r}\n")
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(["bin_center", "count"])
            for c, n in zip(self.centers, self.counts):
                n = int(n) if float(n).is_integer() else float(n)
                writer.writerow([repr(float(c)), repr(n)])

    @classmethod
    def from_csv(cls, path) -> QuadratureHistogram:
        header, rows = read_commented_csv(path)
        try:
            theta = float(header["theta"])
            total = int(header["total"])
            x_min, x_max = float(header["x_min"]), float(header["x_max"])
        except KeyError as exc:
            raise ValueError(f"{path}: missing header field {exc}") from None
        data = np.array(rows, dtype=float)
        edges = np.linspace(x_min, x_max, len(data) + 1)
        if not np.allclose(0.5 * (edges[1:] + edges[:-1]), data[:, 0], atol=1e-9):
            raise ValueError(f"{path}: bin centers are not uniform over [x_min, x_max]")
        counts = data[:, 1]
        if np.all(counts == np.round(counts)):
            counts = counts.astype(np.int64)
        return cls(theta, edges, counts, total)


def _inverse_cdf(pdf: PdfTable):
    dx = np.diff(pdf.xs)
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (pdf.ps[1:] + pdf.ps[:-1]) * dx)])
    mass = cdf[-1]
    if not mass > 0:
        raise ValueError("density integrates to zero; nothing to sample")
    cdf /= mass
    keep = np.concatenate([[True], np.diff(cdf) > 0])
    return cdf[keep], pdf.xs[keep]


def model_cdf(pdf: PdfTable):
    """Normalized trapezoid CDF of ``pdf`` as a callable."""
    cdf, xs = _inverse_cdf(pdf)
    return lambda x: np.interp(x, xs, cdf, left=0.0, right=1.0)


def draw_samples(pdf: PdfTable, n: int, seed) -> np.ndarray:
    """``n`` i.i.d. draws by inverting the tabulated CDF.

    ``seed`` is anything :func:`numpy.random.default_rng` accepts, including a
    ``Generator``.
    """
    if n < 1:
        raise ValueError(f"need at least one sample, got n={n}")
    cdf, xs = _inverse_cdf(pdf)
    u = np.random.default_rng(seed).random(n)
    return np.interp(u, cdf, xs)


def histogram(samples, bins: int = 40, range=(-5.0, 5.0), theta: float = 0.0) -> QuadratureHistogram:
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise ValueError("cannot histogram an empty sample set")
    if bins < 2:
        raise ValueError(f"bins must be >= 2, got {bins}")
    counts, edges = np.histogram(samples, bins=bins, range=range)
    return QuadratureHistogram(theta, edges, counts, samples.size)


def ks_distance(samples, pdf: PdfTable) -> float:
    """Kolmogorov-Smirnov distance between ``samples`` and the tabulated model."""
    return float(stats.kstest(np.asarray(samples), model_cdf(pdf)).statistic)


@dataclass(frozen=True)
class SimulationResult:
    params: ModelParams
    run: RunConfig
    histograms: list
    theory: list
    p_click: float
    components: list = field(default_factory=list, repr=False)


def simulate_experiment(params: ModelParams, run: RunConfig, xs=None) -> SimulationResult:
    """Sample ``run.pulses_per_phase`` homodyne outcomes per phase from the
    modal-purity mixture of conditioned and unconditioned densities."""
    cond, uncond, p_click = homodyne_states(params)
    hists, theory, components = [], [], []
    for index, theta in enumerate(run.phases):
        p_cond = quadrature_pdf(cond, theta, xs)
        p_uncond = quadrature_pdf(uncond, theta, xs)
        pdf = mixed_pdf(p_cond, p_uncond, params.xi)
        samples = draw_samples(pdf, run.pulses_per_phase, [run.seed, index])
        hists.append(histogram(samples, run.bins, run.range, theta))
        theory.append(pdf)
        components.append((p_cond, p_uncond))
    return SimulationResult(params, run, hists, theory, p_click, components)
