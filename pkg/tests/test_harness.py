import math

import numpy as np
import pytest

from d1q3lab import harness
from d1q3lab.dispersion import DIFFUSIVE, PROPAGATIVE
from d1q3lab.errors import ParameterError
from d1q3lab.harness import (
    PROFILE_COLUMNS,
    SWEEP_COLUMNS,
    TABLE_COLUMNS,
    ConvergenceTable,
    ExperimentSpec,
    emit_csv,
    emit_plot_script,
    format_csv,
    read_csv,
    run_experiment,
)
from d1q3lab.lattice import step_count
from d1q3lab.reference import AnalyticProfile


def test_presets():
    s = harness.sine_preset()
    assert (s.x_min, s.x_max, s.mu, s.alpha, s.lam, s.s_e, s.t_final) == (-1, 1, 0.01, 1, 1, 1.5, 5)
    assert s.levels == (8, 16, 32, 64)
    assert harness.sine_fine_preset().levels == (512, 1024, 2048, 4096)
    g = harness.gaussian_preset()
    assert (g.x_min, g.x_max, g.mu, g.t_final) == (-16, 16, 0.01, 5)
    assert g.levels == tuple(2 ** k for k in range(6, 15))


def test_spec_validation():
    with pytest.raises(ParameterError):
        ExperimentSpec("square", 0, 1, mu=0.1, alpha=0, t_final=1, levels=(8,))
    with pytest.raises(ParameterError):
        ExperimentSpec("sine", 0, 1, mu=0.1, alpha=0, t_final=1, levels=())
    with pytest.raises(ParameterError):
        ExperimentSpec("sine", 0, 1, mu=0.1, alpha=0, t_final=1, levels=(8, 8))
    with pytest.raises(ParameterError):
        ExperimentSpec("sine", 0, 1, mu=0.1, alpha=0, t_final=1, levels=(8,), references=("fem",))
    assert harness.sine_preset(levels=(32, 8)).levels == (8, 32)


def test_coarse_sine_table():
    table = run_experiment(harness.sine_preset())
    assert [r.n for r in table.rows] == [8, 16, 32, 64]
    for r in table.rows:
        assert r.ok
        assert r.dx * r.n == pytest.approx(2.0, rel=1e-15)
    linf = table.column("diffusion", "linf")
    assert all(a > b for a, b in zip(linf, linf[1:]))
    orders = table.orders("haway", "l2")
    assert orders[0] is None and all(o is not None for o in orders[1:])
    recs = table.records()
    assert len(recs) == 4 and all(len(r) == len(TABLE_COLUMNS) for r in recs)


def test_zero_final_time_and_s_j_scaling():
    # zero steps: the lattice density is the sampled initial condition itself
    spec = harness.sine_fine_preset(t_final=0.0, references=("diffusion-exact",))
    table = run_experiment(spec)
    for r in table.rows:
        assert r.diffusion.linf <= 1e-15
        assert r.haway is None
    s_j = [r.s_j for r in table.rows]
    for a, b in zip(s_j, s_j[1:]):
        assert 0.45 <= b / a <= 0.55
    assert math.isnan(table.column("haway", "l2")[0])


def test_misaligned_level_is_aborted_with_reason():
    spec = ExperimentSpec("sine", -1.0, 1.0, mu=0.05, alpha=1.0, t_final=0.3, levels=(8, 20))
    table = run_experiment(spec)
    bad, good = table.rows
    assert not bad.ok and "multiple" in bad.reason
    assert math.isnan(bad.s_j)
    assert good.ok and good.haway is not None
    assert table.orders("haway", "l2") == [None, None]


def test_momentum_comparison_optional():
    spec = harness.sine_preset(levels=(16, 32), compare_momentum=True)
    rows = run_experiment(spec).rows
    assert all(r.momentum is not None and r.momentum.linf < 0.1 for r in rows)
    assert run_experiment(harness.sine_preset(levels=(16,))).rows[0].momentum is None


def test_parallel_levels_match_serial():
    spec = harness.sine_preset()
    assert format_csv(run_experiment(spec, workers=2)) == format_csv(run_experiment(spec))


def test_csv_empty_table_is_header_only(tmp_path):
    path = tmp_path / "empty.csv"
    emit_csv(ConvergenceTable(None, []), path)
    assert path.read_bytes() == (",".join(TABLE_COLUMNS) + "\r\n").encode()


def test_csv_round_trip_is_bit_exact(tmp_path):
    table = run_experiment(harness.sine_preset())
    path = tmp_path / "t.csv"
    emit_csv(table, path)
    header, rows = read_csv(path)
    assert tuple(header) == TABLE_COLUMNS
    assert len(rows) == len(table.rows)
    for rec, raw in zip(table.records(), rows):
        assert int(raw[0]) == rec[0]
        for want, got in zip(rec[1:], raw[1:]):
            if want is None:
                assert got == ""
            else:
                assert float(got) == want  # exact equality, not approx


def test_csv_is_deterministic():
    spec = harness.sine_preset(levels=(8, 16))
    a = format_csv(run_experiment(spec)).encode()
    b = format_csv(run_experiment(spec)).encode()
    assert a == b


def test_profile_and_sweep_csv(tmp_path):
    ic = AnalyticProfile.default("sine", 0.01)
    prof, _ = harness.lbm_profile(ic, 16, 1.0, 1.0)
    header, rows = harness.csv_rows(prof)
    assert header == PROFILE_COLUMNS and len(rows) == 16
    only_ref = harness.exact_profile(ic, 8, 0.0)
    text = format_csv(only_ref).splitlines()
    assert text[0] == "x,rho_lbm,rho_ref"
    assert all(line.split(",")[1] == "" for line in text[1:])

    res = harness.dispersion_sweep(1.5, -1.0, 1 / 64, points=5)
    path = tmp_path / "s.csv"
    emit_csv(res, path)
    header, rows = read_csv(path)
    assert tuple(header) == SWEEP_COLUMNS and len(rows) == 5
    assert float(rows[0][0]) == 0.0 and float(rows[-1][0]) == math.pi
    assert {r[-1] for r in rows} <= {DIFFUSIVE, PROPAGATIVE, "other"}
    with pytest.raises(ParameterError):
        harness.dispersion_sweep(1.5, -1.0, 1 / 64, points=1)


def test_write_failure_names_path(tmp_path):
    target = tmp_path / "missing" / "out.csv"
    with pytest.raises(OSError, match="missing"):
        emit_csv(ConvergenceTable(None, []), target)


def test_plot_script(tmp_path):
    script = tmp_path / "plot.gp"
    emit_plot_script("table", "conv.csv", script)
    text = script.read_text()
    assert "'conv.csv'" in text and "plot" in text and "separator ','" in text
    assert harness.plot_kind(ConvergenceTable(None, [])) == "table"
    with pytest.raises(ValueError):
        emit_plot_script("surface", "a.csv", script)


def test_propagation_demo_step_count_and_parity():
    rep = harness.propagation_demo(0.15)
    assert rep.dx == 1 / 64
    assert step_count(harness.PROPAGATION_T, rep.dx) == 384
    rho = rep.profile.rho_lbm
    # node x_k = -16 + k dx mirrors to x_{n-k}; node 0 sits on the periodic seam
    mirrored = np.concatenate(([rho[0]], rho[:0:-1]))
    assert np.max(np.abs(rho - mirrored)) <= 1e-10
    assert all(abs(x) < 5 * rep.dx for x in rep.argmax_x)
    with pytest.raises(ParameterError):
        harness.propagation_demo(0.0)
