"""Refinement studies, the propagation demonstration, and CSV output.

Every refinement level re-derives s_j from the fixed diffusivity, so s_j
shrinks like dx; that is what drives the lattice solution away from the heat
equation and toward the damped acoustic system.
"""

from __future__ import annotations

import csv
import io
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import dispersion as disp
from .errors import ParameterError
from .haway import AcousticParams, haway_run, momentum_at_nodes
from .lattice import (
    Grid1D,
    SchemeParams,
    init_at_equilibrium,
    lbm_run,
    post_collision_momentum,
    step_count,
)
from .reference import AnalyticProfile, ErrorReport, convergence_order, error_norms

DIFFUSION_EXACT = "diffusion-exact"
HAWAY = "haway"
REFERENCES = (DIFFUSION_EXACT, HAWAY)

TABLE_COLUMNS = ("n", "dx", "s_j", "l2_diff", "linf_diff", "l2_haway", "linf_haway",
                 "order_l2_haway", "order_linf_haway")
PROFILE_COLUMNS = ("x", "rho_lbm", "rho_ref")
SWEEP_COLUMNS = ("xi", "re_ev1", "im_ev1", "re_ev2", "im_ev2", "re_ev3", "im_ev3",
                 "classification")

# Wave-vector presets: the two printed s_j values are reproduced exactly by
# alpha = -1, lam = 1 on [-16, 16] with 2048 cells (dx = 1/64).
PROPAGATION_N = 2048
PROPAGATION_T = 6.0
PROPAGATION_ALPHA = -1.0
PROPAGATION_DOMAIN = (-16.0, 16.0)


@dataclass(frozen=True)
class ExperimentSpec:
    initial_condition: str
    x_min: float
    x_max: float
    mu: float
    alpha: float
    t_final: float
    levels: tuple[int, ...]
    lam: float = 1.0
    s_e: float = 1.5
    references: tuple[str, ...] = REFERENCES
    compare_momentum: bool = False
    haway_startup: str = "half_step"

    def __post_init__(self):
        if self.initial_condition not in ("sine", "gaussian"):
            raise ParameterError(f"unknown initial condition {self.initial_condition!r}")
        if not self.levels:
            raise ParameterError("at least one refinement level is required")
        levels = tuple(sorted(int(n) for n in self.levels))
        if len(set(levels)) != len(levels):
            raise ParameterError(f"duplicate refinement levels in {self.levels!r}")
        object.__setattr__(self, "levels", levels)
        unknown = set(self.references) - set(REFERENCES)
        if unknown:
            raise ParameterError(f"unknown references {sorted(unknown)}")

    @property
    def profile(self) -> AnalyticProfile:
        return AnalyticProfile(self.initial_condition, self.mu, self.x_min, self.x_max)

    def grid(self, n: int) -> Grid1D:
        return Grid1D(self.x_min, self.x_max, n)


def sine_preset(levels: Sequence[int] = (8, 16, 32, 64), **kw) -> ExperimentSpec:
    """Sine wave on [-1, 1]; lam = 1, alpha = 1, mu = 0.01, T = 5."""
    kw.setdefault("t_final", 5.0)
    return ExperimentSpec("sine", -1.0, 1.0, mu=0.01, alpha=1.0, levels=tuple(levels), **kw)


def sine_fine_preset(**kw) -> ExperimentSpec:
    return sine_preset(levels=(512, 1024, 2048, 4096), **kw)


def gaussian_preset(levels: Sequence[int] = tuple(2 ** k for k in range(6, 15)),
                    **kw) -> ExperimentSpec:
    """Gaussian on [-16, 16]; mu = 0.01, T = 5, alpha = 1 as in the sine study."""
    kw.setdefault("t_final", 5.0)
    return ExperimentSpec("gaussian", -16.0, 16.0, mu=0.01, alpha=1.0, levels=tuple(levels), **kw)


@dataclass
class LevelResult:
    n: int
    dx: float
    s_j: float
    diffusion: Optional[ErrorReport] = None
    haway: Optional[ErrorReport] = None
    momentum: Optional[ErrorReport] = None
    reason: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.reason is None


def _metric(row: LevelResult, ref: str, norm: str) -> float:
    report = getattr(row, ref)
    return math.nan if report is None else getattr(report, norm)


@dataclass
class ConvergenceTable:
    spec: Optional[ExperimentSpec]
    rows: list[LevelResult] = field(default_factory=list)

    def column(self, ref: str, norm: str) -> list[float]:
        return [_metric(r, ref, norm) for r in self.rows]

    def orders(self, ref: str, norm: str) -> list[Optional[float]]:
        """Per-pair orders; entry i compares rows i-1 and i (None for row 0 or unusable data)."""
        out: list[Optional[float]] = [None] * len(self.rows)
        for i in range(1, len(self.rows)):
            a, b = self.rows[i - 1], self.rows[i]
            ea, eb = _metric(a, ref, norm), _metric(b, ref, norm)
            if a.ok and b.ok and ea > 0 and eb > 0:
                out[i] = convergence_order([(a.dx, ea), (b.dx, eb)])[0]
        return out

    def records(self) -> list[list]:
        o2 = self.orders(HAWAY, "l2")
        oi = self.orders(HAWAY, "linf")
        recs = []
        for r, a, b in zip(self.rows, o2, oi):
            recs.append([r.n, r.dx, r.s_j,
                         _metric(r, "diffusion", "l2"), _metric(r, "diffusion", "linf"),
                         _metric(r, HAWAY, "l2"), _metric(r, HAWAY, "linf"), a, b])
        return recs


@dataclass
class Profile:
    x: np.ndarray
    rho_lbm: Optional[np.ndarray]
    rho_ref: Optional[np.ndarray]


@dataclass
class PropagationReport:
    mu: float
    s_j: float
    dx: float
    profile: Profile
    argmax_x: list[float]
    center_value: float
    max_value: float


def _run_level(spec: ExperimentSpec, n: int) -> LevelResult:
    grid = spec.grid(n)
    dx = grid.dx
    try:
        p = SchemeParams.from_diffusivity(spec.mu, spec.alpha, dx, lam=spec.lam, s_e=spec.s_e)
        steps = step_count(spec.t_final, p.dt)
    except ParameterError as exc:
        return LevelResult(n, dx, math.nan, reason=str(exc))
    ic = spec.profile
    f = lbm_run(init_at_equilibrium(ic.initial, grid, p), p, steps)
    rho = f.rho
    row = LevelResult(n, dx, p.s_j)
    if DIFFUSION_EXACT in spec.references:
        row.diffusion = error_norms(rho, ic(grid.nodes(), spec.t_final), dx)
    if HAWAY in spec.references:
        ap = AcousticParams.from_diffusion(spec.mu, spec.alpha, spec.lam, dx)
        state = haway_run(ic.initial, ap, grid, spec.t_final, startup=spec.haway_startup)
        row.haway = error_norms(rho, state.rho, dx)
        if spec.compare_momentum and state.j_prev is not None:
            row.momentum = error_norms(post_collision_momentum(f, p), momentum_at_nodes(state), dx)
    return row


def run_experiment(spec: ExperimentSpec, workers: int = 1) -> ConvergenceTable:
    """Run every refinement level and collect errors; rows are ordered by n."""
    if workers > 1 and len(spec.levels) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_level, [spec] * len(spec.levels), spec.levels))
    else:
        rows = [_run_level(spec, n) for n in spec.levels]
    return ConvergenceTable(spec, rows)


def lbm_profile(ic: AnalyticProfile, n: int, alpha: float, t_final: float,
                lam: float = 1.0, s_e: float = 1.5) -> tuple[Profile, SchemeParams]:
    """LBM density at ``t_final`` next to the heat-equation solution."""
    grid = Grid1D(ic.x_min, ic.x_max, n)
    p = SchemeParams.from_diffusivity(ic.mu, alpha, grid.dx, lam=lam, s_e=s_e)
    steps = step_count(t_final, p.dt)
    f = lbm_run(init_at_equilibrium(ic.initial, grid, p), p, steps)
    x = grid.nodes()
    return Profile(x, f.rho, ic(x, t_final)), p


def haway_profile(ic: AnalyticProfile, n: int, alpha: float, t_final: float,
                  lam: float = 1.0, startup: str = "half_step") -> Profile:
    grid = Grid1D(ic.x_min, ic.x_max, n)
    ap = AcousticParams.from_diffusion(ic.mu, alpha, lam, grid.dx)
    state = haway_run(ic.initial, ap, grid, t_final, startup=startup)
    return Profile(grid.nodes(), None, state.rho)


def exact_profile(ic: AnalyticProfile, n: int, t_final: float) -> Profile:
    if t_final < 0:
        raise ParameterError(f"final time must be non-negative, got {t_final!r}")
    x = Grid1D(ic.x_min, ic.x_max, n).nodes()
    return Profile(x, None, ic(x, t_final))


def propagation_demo(mu: float, n: int = PROPAGATION_N, t_final: float = PROPAGATION_T,
                     alpha: float = PROPAGATION_ALPHA) -> PropagationReport:
    if not mu > 0:
        raise ParameterError(f"mu must be positive, got {mu!r}")
    ic = AnalyticProfile("gaussian", mu, *PROPAGATION_DOMAIN)
    prof, p = lbm_profile(ic, n, alpha, t_final)
    rho = prof.rho_lbm
    peak = float(rho.max())
    # both members of a symmetric pair, allowing for rounding between mirror nodes
    where = np.flatnonzero(rho >= peak - 1e-12 * abs(peak))
    center = int(np.argmin(np.abs(prof.x)))
    return PropagationReport(mu=mu, s_j=p.s_j, dx=p.dx, profile=prof,
                             argmax_x=[float(prof.x[i]) for i in where],
                             center_value=float(rho[center]), max_value=peak)


def dispersion_sweep(mu: float, alpha: float, dx: float, points: int = 201,
                     lam: float = 1.0, s_e: float = 1.5) -> list[disp.DispersionResult]:
    if points < 2:
        raise ParameterError(f"need at least two wave vectors, got {points!r}")
    p = SchemeParams.from_diffusivity(mu, alpha, dx, lam=lam, s_e=s_e)
    return disp.sweep(p, np.linspace(0.0, math.pi, points))


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    if isinstance(v, str):
        return v
    x = float(v)
    if math.isnan(x):
        return "nan"
    return format(x, ".17g")


Emittable = Union[ConvergenceTable, Profile, Sequence[disp.DispersionResult]]


def csv_rows(obj: Emittable) -> tuple[tuple[str, ...], list[list]]:
    if isinstance(obj, ConvergenceTable):
        return TABLE_COLUMNS, obj.records()
    if isinstance(obj, Profile):
        n = len(obj.x)
        lbm = obj.rho_lbm if obj.rho_lbm is not None else [None] * n
        ref = obj.rho_ref if obj.rho_ref is not None else [None] * n
        return PROFILE_COLUMNS, [[a, b, c] for a, b, c in zip(obj.x, lbm, ref)]
    rows = []
    for r in obj:
        rec = [r.xi]
        for ev in r.eigenvalues:
            rec += [ev.real, ev.imag]
        rows.append(rec + [r.classification])
    return SWEEP_COLUMNS, rows


def format_csv(obj: Emittable) -> str:
    header, rows = csv_rows(obj)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow(header)
    for rec in rows:
        w.writerow([_fmt(v) for v in rec])
    return buf.getvalue()


def emit_csv(obj: Emittable, path: Union[str, Path]) -> None:
    """Write ``obj`` as CSV to ``path``; ``"-"`` means standard output."""
    text = format_csv(obj)
    if str(path) == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write CSV to {path}: {exc.strerror}") from exc


def read_csv(path: Union[str, Path]) -> tuple[list[str], list[list[str]]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


_GNUPLOT = {
    "table": ("set logscale xy\nset key left top\nset xlabel 'dx'\nset ylabel 'error'\n"
              "plot '{csv}' using 2:4 with linespoints title 'L2 vs heat', \\\n"
              "     '{csv}' using 2:5 with linespoints title 'Linf vs heat', \\\n"
              "     '{csv}' using 2:6 with linespoints title 'L2 vs acoustic', \\\n"
              "     '{csv}' using 2:7 with linespoints title 'Linf vs acoustic'\n"),
    "profile": ("set xlabel 'x'\nset ylabel 'rho'\n"
                "plot '{csv}' using 1:2 with lines title 'lattice Boltzmann', \\\n"
                "     '{csv}' using 1:3 with lines title 'reference'\n"),
    "sweep": ("set xlabel 'xi'\nset ylabel 'amplification'\n"
              "plot '{csv}' using 1:(sqrt($2**2+$3**2)) with lines title '|ev1|', \\\n"
              "     '{csv}' using 1:(sqrt($4**2+$5**2)) with lines title '|ev2|', \\\n"
              "     '{csv}' using 1:(sqrt($6**2+$7**2)) with lines title '|ev3|'\n"),
}


def plot_kind(obj: Emittable) -> str:
    if isinstance(obj, ConvergenceTable):
        return "table"
    if isinstance(obj, Profile):
        return "profile"
    return "sweep"


def emit_plot_script(kind: str, csv_path: Union[str, Path], script_path: Union[str, Path]) -> None:
    """Write a gnuplot command file that plots ``csv_path``; nothing is rendered here."""
    if kind not in _GNUPLOT:
        raise ValueError(f"unknown plot kind {kind!r}")
    body = "set datafile separator ','\nset key autotitle columnhead\n" + _GNUPLOT[kind]
    text = "# gnuplot script\n" + body.format(csv=csv_path)
    try:
        Path(script_path).write_text(text)
    except OSError as exc:
        raise OSError(exc.errno, f"cannot write plot script to {script_path}: {exc.strerror}") from exc
