"""Scenario execution: simulation, verification and convergence runs.

Each runner consumes a validated ScenarioConfig and produces a RunReport
plus flat-file artifacts (CSV trajectories, plain-text reports, key-value
dumps).  CSV numbers carry 17 significant digits so a rerun is
byte-identical; human-readable reports use 6.
"""
from __future__ import annotations

import csv
import pathlib
import time
import warnings

import numpy as np

from . import algebra, convergence, dynamics, packets
from .config import ConfigError, ScenarioConfig
from .convergence import ORDER_WINDOW
from .dynamics import ClassicalState, ConstantGammaWarning, FieldConfig
from .report import RunReport

CSV_FMT = "%.17g"
LOW_VELOCITY_GAMMA_LIMIT = 1e-4


def _fields_from(cfg: ScenarioConfig) -> FieldConfig:
    return FieldConfig(E=np.array(cfg.E), B=np.array(cfg.B),
                       charge=cfg.charge, mass=cfg.mass)


def _state_from(cfg: ScenarioConfig) -> ClassicalState:
    return ClassicalState(t=0.0, x=np.array(cfg.x0), v=np.array(cfg.v0),
                          s=np.array(cfg.s0))


def _fmt(x: float) -> str:
    return CSV_FMT % x


def trajectory_columns(traj: dynamics.Trajectory, kinds) -> list[tuple]:
    """(header, values) pairs in the canonical column order."""
    cols = [("t", traj.t)]
    for label, arr in (("", traj.x), ("v", traj.v), ("s", traj.s)):
        for i, ax in enumerate("xyz"):
            cols.append((f"{label}{ax}", arr[:, i]))
    cols.append(("S0", traj.S0))
    for i, ax in enumerate("xyz"):
        cols.append((f"S{ax}", traj.S[:, i]))
    for i, ax in enumerate("xyz"):
        cols.append((f"dX{ax}", traj.delta_x[:, i]))
    for kind in kinds:
        for i, ax in enumerate("xyz"):
            cols.append((f"X{kind}_{ax}", traj.centers[kind][:, i]))
    for i, ax in enumerate("xyz"):
        cols.append((f"Vp_{ax}", traj.v_anomalous[:, i]))
    cols.append(("energy", traj.energy))
    return cols


def write_trajectory_csv(path, traj: dynamics.Trajectory, kinds):
    cols = trajectory_columns(traj, kinds)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([name for name, _ in cols])
        data = np.column_stack([vals for _, vals in cols])
        for row in data:
            writer.writerow([_fmt(v) for v in row])


def write_plot_files(outdir, name, traj: dynamics.Trajectory, kinds):
    """Two-column gnuplot-style (t, value) files, one per observable."""
    outdir = pathlib.Path(outdir)
    paths = []
    for col, vals in trajectory_columns(traj, kinds)[1:]:
        path = outdir / f"{name}_plot_{col}.dat"
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"# t  {col}\n")
            for t, v in zip(traj.t, vals):
                fh.write(f"{_fmt(t)} {_fmt(v)}\n")
        paths.append(path)
    return paths


def _fd_tolerance(series: np.ndarray, h: float, extra: float = 0.0) -> float:
    """Self-calibrated bound on the central-difference truncation error.

    The leading error is h^2/6 f'''; the third derivative is estimated from
    third differences of the series itself, with a factor-2 margin.
    """
    if len(series) < 4:
        return max(extra, 1e-12)
    d3 = np.diff(series, n=3, axis=0)
    est = float(np.max(np.abs(d3))) / (3.0 * h)
    return max(est + extra, 1e-12)


def run_simulate(cfg: ScenarioConfig, outdir, plot: bool = False):
    """Integrate a scenario, write its CSV trajectory, grade the run.

    Report rows: the frozen-energy monitor (warn-graded), finite-difference
    mass-center velocities against v + fP * V (self-calibrated tolerance),
    energy conservation for pure-B scenarios, and -- for low-velocity
    electric-only scenarios -- the d/e/c anomalous-velocity table.
    """
    outdir = pathlib.Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    fields = _fields_from(cfg)
    state0 = _state_from(cfg)

    t0 = time.perf_counter()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstantGammaWarning)
        traj = dynamics.integrate(state0, fields, cfg.dt, cfg.steps,
                                  sample_every=cfg.sample_every,
                                  kinds=cfg.pryce_kinds)
    elapsed = time.perf_counter() - t0

    csv_path = outdir / f"{cfg.name}_trajectory.csv"
    write_trajectory_csv(csv_path, traj, cfg.pryce_kinds)
    artifacts = [csv_path]
    if plot:
        artifacts += write_plot_files(outdir, cfg.name, traj, cfg.pryce_kinds)

    report = RunReport()
    report.add("constant_gamma_max_ev", traj.max_ev,
               dynamics.CONSTANT_GAMMA_WARN * cfg.mass**2,
               wall_time=elapsed, warn_only=True)

    if not any(cfg.E) and any(cfg.B):
        drift = float((traj.energy.max() - traj.energy.min())
                      / traj.energy[0])
        report.add("energy_drift_relative", drift, 1e-10)

    if len(traj.t) >= 4:
        h = traj.dt
        interior = traj.interior_slice()
        smax = float(np.max(np.linalg.norm(traj.s, axis=1)))
        vmax = float(np.max(np.linalg.norm(traj.v, axis=1)))
        # compact form uses the frozen-energy Lorentz force; the worst-case
        # slack |s x (v.E) v| e / (2 m^2) is attained for s perpendicular
        # to v, and the drifting fP(gamma) contributes at the same scale
        shortcut = 2.0 * traj.max_ev * smax * vmax / (2.0 * cfg.mass**2)
        for kind in cfg.pryce_kinds:
            fd = traj.finite_difference(traj.centers[kind])
            fp = traj.pryce_fp(kind)[interior]
            predicted = (traj.v[interior]
                         + fp[:, None] * traj.v_anomalous[interior])
            residual = float(np.max(np.linalg.norm(fd - predicted, axis=1)))
            tol = _fd_tolerance(traj.centers[kind], h, extra=shortcut)
            report.add(f"fd_mass_center_{kind}", residual, tol)

        gamma_excursion = float(np.max(traj.gamma) - 1.0)
        if (not any(cfg.B) and any(cfg.E)
                and gamma_excursion < LOW_VELOCITY_GAMMA_LIMIT
                and np.any(traj.s[0])):
            _low_velocity_rows(report, traj, fields, cfg)

    text_path = outdir / f"{cfg.name}_report.txt"
    text_path.write_text(report.format_table(f"simulate: {cfg.name}") + "\n",
                         encoding="utf-8")
    artifacts.append(text_path)
    return report, artifacts


def _low_velocity_rows(report, traj, fields, cfg):
    """The electric-only low-velocity mass-center velocity table.

    d-type: fd(X_d - x) matches e/(2m^2) s x E; e-type: half the d-type
    offset velocity; c-type: exactly zero.
    """
    interior = traj.interior_slice()
    coeff = fields.charge / (2.0 * cfg.mass**2)
    reference = coeff * np.cross(traj.s[interior],
                                 np.broadcast_to(fields.E, (3,)))
    ref_norm = np.linalg.norm(reference, axis=1)
    if not np.all(ref_norm > 0):
        return
    fd = {k: traj.finite_difference(traj.center_offset(k))
          for k in cfg.pryce_kinds}
    if "d" in fd:
        rel = np.linalg.norm(fd["d"] - reference, axis=1) / ref_norm
        report.add("low_velocity_table_d", float(np.max(rel)), 1e-6)
    if "d" in fd and "e" in fd:
        rel = (np.linalg.norm(fd["e"] - 0.5 * fd["d"], axis=1)
               / (0.5 * np.linalg.norm(fd["d"], axis=1)))
        report.add("low_velocity_table_e", float(np.max(rel)), 1e-3)
    if "c" in fd:
        report.add("low_velocity_table_c", float(np.max(np.abs(fd["c"]))),
                   1e-15)


def run_verify(cfg: ScenarioConfig, outdir):
    """Expectation-relation or matrix-identity verification.

    verify-fg builds the configured packet, grades every relation residual
    against its calibrated quadratic tolerance, and appends the mass-center
    checks for the requested types; rows for packets outside the sharp
    regime are downgraded to warn.  verify-algebra runs the identity suite.
    """
    outdir = pathlib.Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    if cfg.mode == "verify-algebra":
        report = algebra.identity_report(
            n_momenta=cfg.algebra_momenta, pmax_over_m=cfg.algebra_pmax,
            m=cfg.mass, seed=cfg.seed)
        kv_lines = report.to_kv_lines(prefix="algebra.")
        title = f"verify-algebra: {cfg.name}"
    elif cfg.mode == "verify-fg":
        t0 = time.perf_counter()
        try:
            pkt = packets.make_gaussian_packet(
                cfg.packet.p0, cfg.packet.widths, cfg.packet.spin, m=cfg.mass,
                grid_points=cfg.packet.grid_points,
                grid_radius=cfg.packet.grid_radius)
        except ValueError as exc:
            raise ConfigError(f"packet: {exc}") from None
        fg = packets.verify_fg_relations(pkt)
        not_sharp = not pkt.is_sharp
        report = RunReport()
        elapsed = time.perf_counter() - t0
        for rel in fg:
            report.add(rel.name, rel.residual,
                       packets.fg_tolerance(rel.name, pkt),
                       wall_time=elapsed, warn=not_sharp)
        offsets = {}
        for kind in cfg.pryce_kinds:
            res = packets.verify_main_result(pkt, kind)
            offsets[kind] = packets.mass_center_offset(pkt, kind)
            for rel in res:
                report.add(rel.name, rel.residual,
                           packets.fg_tolerance(rel.name, pkt),
                           warn=not_sharp)
        if "d" in offsets and "e" in offsets:
            g = pkt.gamma_bar
            ratio = (np.linalg.norm(offsets["d"])
                     / np.linalg.norm(offsets["e"]))
            report.add("offset_ratio_d_e",
                       abs(ratio - (1.0 + g)) / (1.0 + g),
                       packets.fg_tolerance("offset_ratio_d_e", pkt),
                       warn=not_sharp)
        kv_lines = [f"packet.gamma_bar = {pkt.gamma_bar:.17g}",
                    f"packet.sharp = {pkt.is_sharp}"]
        kv_lines += fg.to_kv_lines(prefix="fg.")
        kv_lines += report.to_kv_lines(prefix="check.")
        title = f"verify-fg: {cfg.name}"
    else:
        raise ValueError(f"run_verify cannot handle mode {cfg.mode!r}")

    text_path = outdir / f"{cfg.name}_report.txt"
    text_path.write_text(report.format_table(title) + "\n", encoding="utf-8")
    kv_path = outdir / f"{cfg.name}_report.kv"
    kv_path.write_text("\n".join(kv_lines) + "\n", encoding="utf-8")
    return report, [text_path, kv_path]


def run_converge(cfg: ScenarioConfig, outdir):
    """Refinement ladder for the configured target; grades the fitted order."""
    outdir = pathlib.Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    t0 = time.perf_counter()
    ladder = convergence.run_ladder(cfg)
    elapsed = time.perf_counter() - t0

    center, halfwidth = ORDER_WINDOW[ladder.target]
    report = RunReport()
    report.add(f"{ladder.target}_order",
               abs(ladder.fitted_order - center), halfwidth,
               wall_time=elapsed)

    csv_path = outdir / f"{cfg.name}_convergence.csv"
    with open(csv_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["resolution", "error", "observed_order"])
        orders = [""] + [_fmt(o) for o in ladder.pairwise_orders]
        for h, e, o in zip(ladder.resolutions, ladder.errors, orders):
            writer.writerow([_fmt(h), _fmt(e), o])

    lines = [f"converge: {cfg.name} (target {ladder.target})",
             f"{'resolution':>14}  {'error':>13}  {'order':>8}"]
    orders = [float("nan")] + list(ladder.pairwise_orders)
    for h, e, o in zip(ladder.resolutions, ladder.errors, orders):
        lines.append(f"{h:>14.6g}  {e:>13.6g}  {o:>8.3f}")
    lines.append(f"fitted order: {ladder.fitted_order:.3f} "
                 f"(window {center} +- {halfwidth})")
    lines.append("")
    lines.append(report.format_table())
    text_path = outdir / f"{cfg.name}_convergence.txt"
    text_path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return report, [csv_path, text_path]
