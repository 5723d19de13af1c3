"""Command-line front end.

Exit status: 0 on success, 1 for invalid parameters or usage, 2 for I/O failures.
Values come from built-in defaults, then an optional ``key=value`` config file,
then command-line flags (highest priority).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import harness
from .errors import ParameterError
from .lattice import check_alpha
from .reference import GAUSSIAN_DOMAIN, SINE_DOMAIN, AnalyticProfile

SUBCOMMANDS = ("lbm", "haway", "exact", "converge", "dispersion", "demo")

DEFAULTS = {
    "n": 64,
    "mu": 0.01,
    "alpha": 1.0,
    "lambda": 1.0,
    "se": 1.5,
    "tfinal": 5.0,
    "ic": "sine",
    "domain": None,
    "out": "-",
    "levels": "8,16,32,64",
    "points": 201,
    "startup": "half_step",
    "plot_script": None,
}

CONVERTERS = {
    "n": int,
    "mu": float,
    "alpha": float,
    "lambda": float,
    "se": float,
    "tfinal": float,
    "points": int,
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


@dataclass
class CliConfig:
    subcommand: str
    values: dict = field(default_factory=dict)
    config_path: Optional[str] = None

    def get(self, key):
        raw = self.values.get(key, DEFAULTS.get(key))
        conv = CONVERTERS.get(key)
        if conv is None or raw is None or not isinstance(raw, str):
            return raw
        try:
            return conv(raw)
        except ValueError:
            raise ParameterError(f"invalid value for {key}: {raw!r}") from None


def read_config(path: str) -> dict:
    """Parse ``key=value`` lines; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key=value, got {line!r}")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in DEFAULTS:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            values[key] = value
    return values


def _add_common(sp: argparse.ArgumentParser, keys: Sequence[str]) -> None:
    helps = {
        "n": "number of mesh cells",
        "mu": "diffusivity held fixed under refinement",
        "alpha": "equilibrium energy coefficient, must lie in (-4,2)",
        "lambda": "lattice velocity dx/dt",
        "se": "energy relaxation rate in (0,2)",
        "tfinal": "final time, an integer multiple of dt",
        "ic": "initial condition: sine or gaussian",
        "domain": "XMIN,XMAX (write --domain=-16,16); defaults to the preset domain of --ic",
        "levels": "comma-separated cell counts for the refinement study",
        "points": "number of wave vectors in [0, pi]",
        "startup": "acoustic solver startup: half_step or rest",
    }
    for key in keys:
        kw = {"dest": key, "default": None, "help": helps[key]}
        if key == "ic":
            kw["choices"] = ("sine", "gaussian")
        if key == "startup":
            kw["choices"] = ("half_step", "rest")
        sp.add_argument(f"--{key}", **kw)
    sp.add_argument("--out", dest="out", default=None,
                    help="CSV destination path, '-' for standard output (default)")
    sp.add_argument("--config", dest="config", default=None,
                    help="key=value configuration file; flags override its values")
    sp.add_argument("--plot-script", dest="plot_script", default=None,
                    help="also write a gnuplot command file referencing the CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="d1q3lab",
                     description="D1Q3 lattice Boltzmann diffusion under acoustic scaling.")
    sub = parser.add_subparsers(dest="subcommand", parser_class=_Parser, required=True)
    run_keys = ("n", "mu", "alpha", "lambda", "se", "tfinal", "ic", "domain")
    sub_specs = {
        "lbm": ("lattice Boltzmann profile with the heat-equation solution", run_keys),
        "haway": ("damped acoustic profile from the staggered solver", run_keys + ("startup",)),
        "exact": ("heat-equation profile on the mesh nodes", ("n", "mu", "tfinal", "ic", "domain")),
        "converge": ("refinement study against the heat equation and the acoustic model",
                     ("mu", "alpha", "lambda", "se", "tfinal", "ic", "domain", "levels", "startup")),
        "dispersion": ("amplification-matrix eigenvalues over wave vectors",
                       ("n", "mu", "alpha", "lambda", "se", "domain", "points")),
        "demo": ("Gaussian on [-16,16] with 2048 cells to T=6 (alpha=-1)", ("mu",)),
    }
    for name, (text, keys) in sub_specs.items():
        _add_common(sub.add_parser(name, help=text, description=text), keys)
    return parser


def parse_config(argv: Sequence[str]) -> CliConfig:
    ns = build_parser().parse_args(list(argv))
    values = read_config(ns.config) if ns.config else {}
    flags = {k: v for k, v in vars(ns).items() if k not in ("subcommand", "config") and v is not None}
    values.update(flags)
    return CliConfig(ns.subcommand, values, ns.config)


def _domain(cfg: CliConfig) -> tuple[float, float]:
    raw = cfg.get("domain")
    if raw is None:
        return SINE_DOMAIN if cfg.get("ic") == "sine" else GAUSSIAN_DOMAIN
    try:
        lo, hi = (float(s) for s in str(raw).split(","))
    except ValueError:
        raise ParameterError(f"domain must be XMIN,XMAX, got {raw!r}") from None
    if not hi > lo:
        raise ParameterError(f"domain must have XMIN < XMAX, got {raw!r}")
    return lo, hi


def _levels(cfg: CliConfig) -> tuple[int, ...]:
    raw = cfg.get("levels")
    try:
        levels = tuple(int(s) for s in str(raw).split(",") if s.strip())
    except ValueError:
        raise ParameterError(f"levels must be comma-separated integers, got {raw!r}") from None
    if not levels or min(levels) < 1:
        raise ParameterError(f"levels must be positive integers, got {raw!r}")
    return levels


def _profile(cfg: CliConfig) -> AnalyticProfile:
    lo, hi = _domain(cfg)
    return AnalyticProfile(cfg.get("ic"), cfg.get("mu"), lo, hi)


def _validate_common(cfg: CliConfig) -> None:
    check_alpha(cfg.get("alpha"))
    se = cfg.get("se")
    if not 0 < se < 2:
        raise ParameterError(f"se outside (0,2): se={se!r}")
    if not cfg.get("lambda") > 0:
        raise ParameterError(f"lambda must be positive, got {cfg.get('lambda')!r}")
    if not cfg.get("mu") > 0:
        raise ParameterError(f"mu must be positive, got {cfg.get('mu')!r}")


def dispatch(cfg: CliConfig):
    cmd = cfg.subcommand
    if cmd == "demo":
        report = harness.propagation_demo(cfg.get("mu"))
        peaks = ", ".join(f"{x:.6g}" for x in report.argmax_x)
        print(f"mu={report.mu:g} s_j={report.s_j:.6f} argmax x=[{peaks}] "
              f"rho(0,T)={report.center_value:.6g} max rho={report.max_value:.6g}",
              file=sys.stderr)
        return report.profile
    _validate_common(cfg)
    if cmd == "lbm":
        prof, _ = harness.lbm_profile(_profile(cfg), cfg.get("n"), cfg.get("alpha"),
                                      cfg.get("tfinal"), cfg.get("lambda"), cfg.get("se"))
        return prof
    if cmd == "haway":
        return harness.haway_profile(_profile(cfg), cfg.get("n"), cfg.get("alpha"),
                                     cfg.get("tfinal"), cfg.get("lambda"), cfg.get("startup"))
    if cmd == "exact":
        return harness.exact_profile(_profile(cfg), cfg.get("n"), cfg.get("tfinal"))
    if cmd == "converge":
        lo, hi = _domain(cfg)
        spec = harness.ExperimentSpec(cfg.get("ic"), lo, hi, mu=cfg.get("mu"),
                                      alpha=cfg.get("alpha"), t_final=cfg.get("tfinal"),
                                      levels=_levels(cfg), lam=cfg.get("lambda"),
                                      s_e=cfg.get("se"), haway_startup=cfg.get("startup"))
        table = harness.run_experiment(spec)
        bad = [r for r in table.rows if not r.ok]
        if bad:
            raise ParameterError("; ".join(f"n={r.n}: {r.reason}" for r in bad))
        return table
    if cmd == "dispersion":
        lo, hi = _domain(cfg)
        n = cfg.get("n")
        if n < 1:
            raise ParameterError(f"n must be positive, got {n!r}")
        return harness.dispersion_sweep(cfg.get("mu"), cfg.get("alpha"), (hi - lo) / n,
                                        points=cfg.get("points"), lam=cfg.get("lambda"),
                                        s_e=cfg.get("se"))
    raise UsageError(f"unknown subcommand {cmd!r}")


def main(argv: Optional[Sequence[str]] = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except ParameterError as exc:
        print(f"d1q3lab: invalid parameters: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"d1q3lab: cannot read config: {exc}", file=sys.stderr)
        return 2
    try:
        result = dispatch(cfg)
    except (ParameterError, UsageError) as exc:
        print(f"d1q3lab: invalid parameters: {exc}", file=sys.stderr)
        return 1
    out = cfg.get("out")
    try:
        harness.emit_csv(result, out)
        script = cfg.get("plot_script")
        if script:
            harness.emit_plot_script(harness.plot_kind(result), out, script)
    except OSError as exc:
        print(f"d1q3lab: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
