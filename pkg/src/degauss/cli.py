"""Command-line driver.

    degauss variances   [--config FILE] [--s S ...] [--out DIR]
    degauss simulate    [--config FILE] [...] [OUT_DIR] [--svg]
    degauss reconstruct DATASET_DIR [--source histograms|theory] [--kc KC]
    degauss scan-xi     [--config FILE] [...] [--xi-min A] [--xi-max B]
    degauss correct     [--config FILE] [...]

Every configuration key can be overridden with a flag (``--eta-apd 0.5``).
OUT_DIR defaults to $DEGAUSS_OUT, else ./degauss-out.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .config import ConfigError, ExperimentConfig
from .fock import squeezed_vacuum
from .homodyne import GridRangeError, PdfTable, quadrature_pdf, quadrature_variance, variance_db
from .model import measured_state
from .optics import DegenerateConditioningError, DensityMatrix, loss_channel
from .plot import write_svg
from .sampler import QuadratureHistogram, simulate_experiment
from .tomography import (
    NoSignChangeError,
    UnphysicalStateError,
    correct_efficiency,
    negativity_threshold,
    radon_reconstruct,
    symmetrize,
    wigner_origin_parity,
)

OUT_ENV = "DEGAUSS_OUT"
# values read off the unconditioned histograms in the experiment
MEASURED_SQUEEZED_DB = -1.75
MEASURED_AMPLIFIED_DB = 3.1

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_NUMERICAL = 0, 1, 2, 3

_OVERRIDES = {
    "s": float, "R": float, "eta_T": float, "eta_H": float, "eta_D": float,
    "eta": float, "xi": float, "eta_apd": float, "n_max": int, "n_phases": int,
    "pulses_per_phase": int, "bins": int, "x_min": float, "x_max": float,
    "seed": int, "filter_cutoff": float,
}


def build_config(args) -> ExperimentConfig:
    config = cfgmod.load(args.config) if args.config else ExperimentConfig()
    changes = {}
    for key in _OVERRIDES:
        value = getattr(args, key, None)
        if value is not None:
            changes["eta_override" if key == "eta" else key] = value
    return config.replace(**changes) if changes else config


def _default_out() -> Path:
    return Path(os.environ.get(OUT_ENV, "degauss-out"))


def cmd_variances(config: ExperimentConfig, out_dir: Path | None = None) -> dict:
    rho = loss_channel(DensityMatrix.from_state(squeezed_vacuum(config.s, config.n_max)),
                       config.eta_tot)
    vacuum = DensityMatrix.fock(0, config.n_max)
    report = {
        "eta": config.eta,
        "eta_factors": config.eta_factors,
        "eta_tot": config.eta_tot,
        "squeezed_variance": quadrature_variance(rho, np.pi / 2),
        "amplified_variance": quadrature_variance(rho, 0.0),
        "vacuum_variance": quadrature_variance(vacuum, 0.0),
    }
    # round first so that -1e-17 dB does not print as -0.00
    report["squeezed_db"] = round(variance_db(report["squeezed_variance"]), 12) + 0.0
    report["amplified_db"] = round(variance_db(report["amplified_variance"]), 12) + 0.0
    print(f"eta = eta_T * eta_H^2 * eta_D = {config.eta_factors:.4f}")
    print(f"eta (used)  = {config.eta:.4f}")
    print(f"eta_tot = eta * (1 - R) = {config.eta_tot:.2f}")
    print(f"vacuum     variance {report['vacuum_variance']:.4f}   0.00 dB")
    print(f"squeezed   variance {report['squeezed_variance']:.4f} {report['squeezed_db']:+6.2f} dB"
          f"   (measured {MEASURED_SQUEEZED_DB:+.2f} dB)")
    print(f"amplified  variance {report['amplified_variance']:.4f} {report['amplified_db']:+6.2f} dB"
          f"   (measured {MEASURED_AMPLIFIED_DB:+.2f} dB)")
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
        curves = {
            "squeezed": quadrature_pdf(rho, np.pi / 2),
            "amplified": quadrature_pdf(rho, 0.0),
            "vacuum": quadrature_pdf(vacuum, 0.0),
        }
        for name, pdf in curves.items():
            PdfTable(pdf.xs, pdf.ps, pdf.theta, {"s": config.s, "eta_tot": config.eta_tot}
                     ).to_csv(out_dir / f"unconditioned_{name}.csv")
        write_svg(out_dir / "unconditioned.svg",
                  [(p.xs, p.ps, "line", n) for n, p in curves.items()],
                  "unconditioned quadrature densities", "x", "P(x)")
    return report


def cmd_simulate(config: ExperimentConfig, out_dir: Path, svg: bool = False):
    result = simulate_experiment(config.model(), config.run())
    out_dir.mkdir(parents=True, exist_ok=True)
    meta = {"s": config.s, "R": config.R, "eta": config.eta, "xi": config.xi}
    for i, (hist, pdf) in enumerate(zip(result.histograms, result.theory)):
        hist.to_csv(out_dir / f"hist_{i}.csv")
        PdfTable(pdf.xs, pdf.ps, pdf.theta, meta).to_csv(out_dir / f"theory_{i}.csv")
        if svg:
            write_svg(out_dir / f"phase_{i}.svg",
                      [(hist.centers, hist.density(), "dots", "samples"),
                       (pdf.xs, pdf.ps, "line", "model")],
                      f"theta = {hist.theta:.4f}", "x", "P(x)")
    manifest = cfgmod.dumps(config)
    manifest += f"# p_click = {result.p_click!r}\n"
    manifest += "# phases = " + ", ".join(repr(t) for t in config.run().phases) + "\n"
    (out_dir / "manifest.cfg").write_text(manifest)
    print(f"wrote {len(result.histograms)} phases x {config.pulses_per_phase} pulses to {out_dir}")
    print(f"model click probability per pulse: {result.p_click:.5f}")
    return result


class DatasetError(OSError):
    pass


def _load_projections(dataset: Path, source: str):
    prefix = "hist" if source == "histograms" else "theory"
    files = sorted(dataset.glob(f"{prefix}_*.csv"),
                   key=lambda p: int(p.stem.split("_")[-1]))
    if not files:
        raise FileNotFoundError(f"no {prefix}_*.csv files in {dataset}")
    loader = QuadratureHistogram.from_csv if source == "histograms" else PdfTable.from_csv
    try:
        return [loader(f) for f in files]
    except (ValueError, IndexError) as exc:
        raise DatasetError(f"corrupt dataset file: {exc}") from None


def cmd_reconstruct(dataset: Path, out_dir: Path | None = None, source: str = "histograms",
                    filter_cutoff: float = 6.0, grid=(-4.0, 4.0, 81)) -> dict:
    projections = [symmetrize(p) for p in _load_projections(dataset, source)]
    xs = np.linspace(*grid[:2], int(grid[2]))
    wigner = radon_reconstruct(projections, xs, filter_cutoff=filter_cutoff)
    out_dir = dataset if out_dir is None else out_dir
    out_dir.mkdir(parents=True, exist_ok=True)
    wigner.to_csv(out_dir / "wigner.csv")
    wigner.to_gnuplot(out_dir / "wigner.dat")
    summary = {"W00": wigner.origin, "W_max": wigner.max, "integral": wigner.integral,
               "phases": len(projections), "filter_cutoff": filter_cutoff, "source": source}
    text = "".join(f"{k} = {v!r}\n" for k, v in summary.items())
    (out_dir / "summary.txt").write_text(text)
    print(f"W(0,0) = {wigner.origin:.4f}   max W = {wigner.max:.4f}   "
          f"integral = {wigner.integral:.4f}   ({len(projections)} phases, k_c = {filter_cutoff})")
    return summary


def cmd_scan_xi(config: ExperimentConfig, xi_lo: float = 0.5, xi_hi: float = 1.0) -> float:
    xi_star = negativity_threshold(config.model(), xi_lo, xi_hi)
    print(f"measured-model W(0,0) changes sign at xi* = {xi_star:.4f} "
          f"(eta = {config.eta:.4f}, s = {config.s}, R = {config.R})")
    return xi_star


def cmd_correct(config: ExperimentConfig) -> dict:
    measured = measured_state(config.model())
    corrected = correct_efficiency(measured, config.eta)
    report = {"W00_measured": wigner_origin_parity(measured),
              "W00_corrected": wigner_origin_parity(corrected)}
    print(f"measured-model W(0,0)      = {report['W00_measured']:+.4f}")
    print(f"efficiency-corrected W(0,0) = {report['W00_corrected']:+.4f}   (eta = {config.eta:.4f})")
    return report


def make_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value configuration file")
    for key, kind in _OVERRIDES.items():
        flag = "--" + key.replace("_", "-")
        common.add_argument(flag, dest=key, type=kind, default=None,
                            help=f"override config key '{key}'")

    parser = argparse.ArgumentParser(prog="degauss", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("variances", parents=[common], help="unconditioned variances in dB")
    p.add_argument("--out", type=Path, help="also write density CSVs here")

    p = sub.add_parser("simulate", parents=[common], help="Monte-Carlo homodyne dataset")
    p.add_argument("out_dir", nargs="?", type=Path)
    p.add_argument("--svg", action="store_true", help="quick-look SVG per phase")

    p = sub.add_parser("reconstruct", parents=[common], help="Wigner function from a dataset")
    p.add_argument("dataset", type=Path)
    p.add_argument("--out", type=Path)
    p.add_argument("--source", choices=("histograms", "theory"), default="histograms",
                   help="reconstruct from sampled histograms or the exact model densities")
    p.add_argument("--kc", type=float, help="ramp-filter cutoff (default: config filter_cutoff)")
    p.add_argument("--grid-min", type=float, default=-4.0)
    p.add_argument("--grid-max", type=float, default=4.0)
    p.add_argument("--grid-points", type=int, default=81)

    p = sub.add_parser("scan-xi", parents=[common], help="modal purity for W(0,0) < 0")
    p.add_argument("--xi-min", type=float, default=0.5)
    p.add_argument("--xi-max", type=float, default=1.0)

    sub.add_parser("correct", parents=[common], help="efficiency-corrected W(0,0)")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        config = build_config(args)
        if args.command == "variances":
            cmd_variances(config, args.out)
        elif args.command == "simulate":
            cmd_simulate(config, args.out_dir or _default_out(), args.svg)
        elif args.command == "reconstruct":
            kc = config.filter_cutoff if args.kc is None else args.kc
            if kc <= 0 or args.grid_points < 2 or args.grid_min >= args.grid_max:
                raise ConfigError("need kc > 0, grid-points >= 2 and grid-min < grid-max")
            cmd_reconstruct(args.dataset, args.out, args.source, kc,
                            (args.grid_min, args.grid_max, args.grid_points))
        elif args.command == "scan-xi":
            if not 0 <= args.xi_min < args.xi_max <= 1:
                raise ConfigError(f"xi range [{args.xi_min}, {args.xi_max}] must lie in [0, 1]")
            cmd_scan_xi(config, args.xi_min, args.xi_max)
        elif args.command == "correct":
            if config.eta <= 0.5:
                raise ConfigError(
                    f"cannot correct for eta = {config.eta:.4f}: inverting losses of "
                    "eta <= 0.5 amplifies noise without bound"
                )
            cmd_correct(config)
    except NoSignChangeError as exc:
        print(f"no sign change: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (UnphysicalStateError, DegenerateConditioningError, GridRangeError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
