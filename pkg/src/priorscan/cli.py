"""Command-line front end.

Subcommands: ``grid`` traces an epsilon-contour, ``sensitivity`` runs the
reweighting engine over a contour for a tabulated posterior, ``calibrate``
maps between Hellinger distances and benchmark mean shifts, and ``rw1``
runs the conjugate random-walk model end to end from a monthly-count CSV.

Exit codes: 0 success, 2 input or ingestion problem, 3 contour not
reachable, 4 numerical failure. Reports are JSON, plot tables CSV; all
files are written atomically and contain no timestamps, so identical
invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import tempfile
import warnings
from dataclasses import dataclass
from pathlib import Path

from .calibration import calibrate, inverse_calibrate
from .contour import PolarGrid, compute_grid
from .errors import (
    ContourUnreachableError,
    DomainError,
    IngestionError,
    NumericalError,
    PartialGridError,
    PriorScanError,
    ReweightingError,
)
from .families import Family, ParamPoint, PriorSpec
from .grids import Scale, normalize_grid, read_density_csv
from .reweight import PosteriorInput
from .rw1 import exact_sensitivity, ingest_timeseries, tabulate_posterior
from .sensitivity import (
    SensitivityResult,
    circular_sensitivity,
    export_plot_data,
    result_to_json_dict,
    summarize,
)

OUTDIR_ENV = "PRIORSCAN_OUTDIR"
DEFAULT_EPSILON = 0.00354
DEFAULT_ANGLES = 400

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONTOUR = 3
EXIT_NUMERICAL = 4


@dataclass
class RunConfig:
    """Resolved settings of one invocation (config file merged with flags)."""

    command: str
    epsilon: float = DEFAULT_EPSILON
    n_angles: int = DEFAULT_ANGLES
    family: Family | None = None
    gamma0: ParamPoint | None = None
    log_scale: bool = False
    allow_partial: bool = False
    posterior: Path | None = None
    data: Path | None = None
    window: str | None = None
    kappa: float | None = None
    prior: ParamPoint = ParamPoint(1.0, 0.005)
    engine: str = "exact"
    h: float | None = None
    mu: float | None = None
    outdir: Path = Path(".")
    out_prefix: str = "run"


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_json(path: Path, obj) -> None:
    _atomic_write(path, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _write_csv(path: Path, fieldnames: list[str], rows: list[dict]) -> None:
    import io

    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=fieldnames)
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    _atomic_write(path, buf.getvalue())


def _parse_point(text: str) -> ParamPoint:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'a,b', got {text!r}")
    try:
        return ParamPoint(float(parts[0]), float(parts[1]))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _load_config_file(path: str) -> dict:
    """Parse ``key = value`` lines; keys mirror long flag names."""
    values = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise IngestionError(f"cannot read config file {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise IngestionError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = value
    return values

_CONFIG_COERCIONS = {
    "epsilon": float,
    "n_angles": int,
    "kappa": float,
    "h": float,
    "mu": float,
    "gamma0": _parse_point,
    "prior": _parse_point,
    "log_scale": lambda v: v.lower() in ("1", "true", "yes"),
    "allow_partial": lambda v: v.lower() in ("1", "true", "yes"),
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="priorscan",
        description="Local sensitivity of Bayesian posteriors to prior hyperparameters",
    )
    parser.add_argument("--config", help="key=value config file; flags override its entries")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--epsilon", type=float, default=None, help="contour radius (default 0.00354)")
        p.add_argument("--n-angles", type=int, default=None, help="polar directions (default 400)")
        p.add_argument("--allow-partial", action="store_true", default=None,
                       help="keep going when some directions have no contour point")
        p.add_argument("--outdir", default=None,
                       help=f"output directory (default ${OUTDIR_ENV} or '.')")
        p.add_argument("--out-prefix", default=None, help="basename prefix for emitted files")

    # none of the per-command settings are required at parse time, so a
    # config file can supply any of them; completeness is checked after
    # the merge
    p_grid = sub.add_parser("grid", help="trace an epsilon-contour around a base prior")
    p_grid.add_argument("--family", choices=[f.value for f in Family], default=None)
    p_grid.add_argument("--gamma0", type=_parse_point, default=None, metavar="G1,G2")
    add_common(p_grid)

    p_sens = sub.add_parser("sensitivity", help="reweighting sensitivity for a tabulated posterior")
    p_sens.add_argument("--family", choices=[f.value for f in Family], default=None)
    p_sens.add_argument("--gamma0", type=_parse_point, default=None, metavar="G1,G2")
    p_sens.add_argument("--posterior", default=None, help="CSV x,density of the base posterior")
    p_sens.add_argument("--log-scale", action="store_true", default=None,
                        help="posterior support holds log(parameter)")
    add_common(p_sens)

    p_cal = sub.add_parser("calibrate", help="map a Hellinger distance to a benchmark mean shift")
    p_cal.add_argument("--h", type=float, default=None, help="distance to calibrate")
    p_cal.add_argument("--mu", type=float, default=None, help="mean shift to invert")

    p_rw1 = sub.add_parser("rw1", help="conjugate random-walk sensitivity from monthly counts")
    p_rw1.add_argument("--data", default=None, help="CSV of monthly counts")
    p_rw1.add_argument("--window", choices=["full", "last96"], default=None)
    p_rw1.add_argument("--kappa", type=float, default=None, help="noise precision override")
    p_rw1.add_argument("--prior", type=_parse_point, default=None, metavar="A,B",
                       help="gamma prior on the smoothing precision (default 1,0.005)")
    p_rw1.add_argument("--engine", choices=["exact", "reweight"], default=None,
                       help="posterior distances: closed-form constants or grid reweighting")
    add_common(p_rw1)
    return parser


def _resolve_config(argv: list[str]) -> RunConfig:
    parser = _build_parser()
    args = parser.parse_args(argv)
    file_values = _load_config_file(args.config) if args.config else {}

    def pick(name: str, default):
        flag = getattr(args, name, None)
        if flag is not None:
            return flag
        if name in file_values:
            coerce = _CONFIG_COERCIONS.get(name, str)
            try:
                return coerce(file_values[name])
            except (ValueError, argparse.ArgumentTypeError) as exc:
                raise IngestionError(f"config key {name!r}: {exc}") from exc
        return default

    outdir = Path(pick("outdir", os.environ.get(OUTDIR_ENV, ".")))
    family = pick("family", None)
    gamma0 = pick("gamma0", None)
    if isinstance(gamma0, str):
        gamma0 = _parse_point(gamma0)
    config = RunConfig(
        command=args.command,
        epsilon=float(pick("epsilon", DEFAULT_EPSILON)),
        n_angles=int(pick("n_angles", DEFAULT_ANGLES)),
        family=Family(family) if family else None,
        gamma0=gamma0,
        log_scale=bool(pick("log_scale", False)),
        allow_partial=bool(pick("allow_partial", False)),
        posterior=Path(p) if (p := pick("posterior", None)) else None,
        data=Path(p) if (p := pick("data", None)) else None,
        window=pick("window", None),
        kappa=pick("kappa", None),
        prior=pick("prior", None) or ParamPoint(1.0, 0.005),
        engine=pick("engine", None) or "exact",
        h=pick("h", None),
        mu=pick("mu", None),
        outdir=outdir,
        out_prefix=pick("out_prefix", args.command),
    )
    if isinstance(config.prior, str):
        config = RunConfig(**{**config.__dict__, "prior": _parse_point(config.prior)})
    return config


def _emit_sensitivity(config: RunConfig, result: SensitivityResult) -> None:
    prefix = config.outdir / config.out_prefix
    _write_json(Path(f"{prefix}.json"), result_to_json_dict(result))
    polar, rolled = export_plot_data(result)
    _write_csv(Path(f"{prefix}_polar.csv"), ["series", "phi", "ratio", "x", "y"], polar)
    _write_csv(
        Path(f"{prefix}_rolled.csv"), ["phi", "ratio", "is_worst", "ref_half", "ref_one"], rolled
    )
    print(summarize(result))
    if result.super_sensitive:
        print("warning: super-sensitivity detected (worst case > 1)", file=sys.stderr)
    if result.failed_angles:
        print(
            f"warning: {len(result.failed_angles)} contour direction(s) failed and were skipped",
            file=sys.stderr,
        )


def _emit_grid(config: RunConfig, grid: PolarGrid) -> None:
    prefix = config.outdir / config.out_prefix
    rows = [
        {
            "phi": gp.phi,
            "gamma1": gp.point.gamma1,
            "gamma2": gp.point.gamma2,
            "hellinger_residual": gp.residual,
        }
        for gp in grid.points
    ]
    _write_csv(Path(f"{prefix}_contour.csv"), ["phi", "gamma1", "gamma2", "hellinger_residual"], rows)
    _write_json(
        Path(f"{prefix}_moduli.json"),
        {
            "epsilon": grid.epsilon,
            "n_angles": grid.n_angles,
            "base": {
                "family": grid.base.family.value,
                "gamma1": grid.base.point.gamma1,
                "gamma2": grid.base.point.gamma2,
            },
            "cardinal_moduli": grid.cardinal.as_dict(),
            "failed_angles": list(grid.failed_angles),
        },
    )
    if grid.failed_angles:
        print(
            f"warning: {len(grid.failed_angles)} contour direction(s) failed and were skipped",
            file=sys.stderr,
        )


def _require(config: RunConfig, *names: str) -> None:
    missing = [name for name in names if getattr(config, name) is None]
    if missing:
        flags = ", ".join("--" + name.replace("_", "-") for name in missing)
        raise IngestionError(f"{config.command} needs {flags} (flag or config file)")


def run(config: RunConfig) -> int:
    """Execute one resolved configuration; returns the process exit code."""
    if config.command == "calibrate":
        if (config.h is None) == (config.mu is None):
            raise IngestionError("calibrate needs exactly one of --h or --mu")
        if config.h is not None:
            print(f"mu = {calibrate(config.h)!r}")
        else:
            print(f"h = {inverse_calibrate(config.mu)!r}")
        return EXIT_OK

    if config.command == "grid":
        _require(config, "family", "gamma0")
        base = PriorSpec(config.family, config.gamma0)
        grid = compute_grid(
            base, config.epsilon, n_angles=config.n_angles, allow_partial=config.allow_partial
        )
        _emit_grid(config, grid)
        return EXIT_OK

    if config.command == "sensitivity":
        _require(config, "family", "gamma0", "posterior")
        base = PriorSpec(config.family, config.gamma0)
        scale = Scale.LOG_PARAMETER if config.log_scale else Scale.NATURAL
        posterior = normalize_grid(read_density_csv(config.posterior, scale))
        inp = PosteriorInput(posterior=posterior, base_prior=base, parametrization=scale)
        grid = compute_grid(
            base, config.epsilon, n_angles=config.n_angles, allow_partial=config.allow_partial
        )
        _emit_sensitivity(config, circular_sensitivity(inp, grid))
        return EXIT_OK

    if config.command == "rw1":
        _require(config, "data")
        model = ingest_timeseries(
            config.data, window=config.window, kappa=config.kappa, prior=config.prior
        )
        print(
            f"ingested n = {model.n} months, kappa = {model.kappa:.6g}, "
            f"prior = ({model.prior.gamma1:g}, {model.prior.gamma2:g})",
            file=sys.stderr,
        )
        if config.engine == "exact":
            result = exact_sensitivity(
                model, config.epsilon, n_angles=config.n_angles, allow_partial=config.allow_partial
            )
        else:
            inp = tabulate_posterior(model)
            grid = compute_grid(
                PriorSpec(Family.GAMMA, model.prior),
                config.epsilon,
                n_angles=config.n_angles,
                allow_partial=config.allow_partial,
            )
            result = circular_sensitivity(inp, grid)
        _emit_sensitivity(config, result)
        return EXIT_OK

    raise IngestionError(f"unknown command {config.command!r}")  # pragma: no cover


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            warnings.showwarning = lambda msg, cat, *a, **k: print(
                f"warning: {msg}", file=sys.stderr
            )
            config = _resolve_config(argv)
            return run(config)
    except (IngestionError, DomainError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (ContourUnreachableError, PartialGridError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONTOUR
    except (NumericalError, ReweightingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PriorScanError as exc:  # pragma: no cover - catch-all for new subtypes
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
