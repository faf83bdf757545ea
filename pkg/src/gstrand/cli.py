"""Command-line driver.

Subcommands: ``algebra-check``, ``simulate``, ``chiral``, ``stability`` and
``zcr-verify``.  Exit codes: 0 ok, 1 usage or config error, 2 algebra
validation failure, 3 blow-up, 4 zero-curvature failure.
"""

from __future__ import annotations

import argparse
import hashlib
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .algebra import CATALOG, AlgebraError, build_algebra, validate_algebra
from .config import (DEFAULT_ZCR_CONFIG, ConfigError, RunConfig, config_hash, initial_state,
                     load_config, parse_config)
from .diagnostics import DiagnosticsRecord, advection_error, conserved_so3, energy
from .dynamics import BlowUpError, ModelSpec, StrandState, Trajectory, iterate, make_model, so3_model, stable_dt
from .stability import (STABILITY_HEADER, band_edges_so3, k_scan, stability_map, stability_rows_text,
                        transition_points)
from .zcr import ZcrNotApplicable, check_static_conditions, curvature_residual, input_scale, residual_from_window

EXIT_OK, EXIT_USAGE, EXIT_VALIDATION, EXIT_BLOWUP, EXIT_ZCR = 0, 1, 2, 3, 4
STATIC_TOL = 1e-12
MIN_ORDER_FACTOR = 3.5


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this CLI reserves 2 for validation."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _g(x: float) -> str:
    return f"{x:.17g}"


def _write_lines(path: Path, lines) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# model and schedule


def build_model(cfg: RunConfig) -> ModelSpec:
    if cfg.system == "chiral":
        return make_model(cfg.algebra, "chiral", cfg.r)
    if cfg.algebra == "so3" and cfg.axis is not None:
        return so3_model(cfg.a_coeffs[0], cfg.c_coeffs[0], cfg.r, cfg.axis)
    return make_model(cfg.algebra, cfg.system, cfg.r, cfg.a_coeffs, cfg.c_coeffs)


def schedule(cfg: RunConfig, state: StrandState, model: ModelSpec) -> tuple[int, float]:
    """Step count (a multiple of the cadence) and step size that land on ``T_end``."""
    if cfg.dt is not None:
        ratio = cfg.T_end / cfg.dt
        n = round(ratio)
        if n < 1 or abs(ratio - n) > 1e-9 * max(ratio, 1.0):
            raise ConfigError(f"dt does not divide T_end ({ratio} steps)", "time", "dt")
        if n % cfg.cadence:
            raise ConfigError(f"cadence {cfg.cadence} does not divide the {n} steps", "output", "cadence")
        return n, cfg.T_end / n
    dt = stable_dt(state, model, cfg.cfl)
    n = max(1, math.ceil(cfg.T_end / dt - 1e-9))
    n = cfg.cadence * math.ceil(n / cfg.cadence)
    return n, cfg.T_end / n


# ---------------------------------------------------------------------------
# simulate


def _diagnostics(initial: StrandState, state: StrandState, model: ModelSpec) -> DiagnosticsRecord:
    rec = DiagnosticsRecord(state.t)
    if model.system == "compact" and model.algebra_id in ("so3", "so4"):
        rec.C1, rec.C2, rec.C3 = conserved_so3(state, model)
    if model.system != "chiral":
        rec.energy_h = energy(state, model)
        rec.mu_par_advect_err = advection_error(initial, state, model)
    return rec


def _snapshot_lines(state: StrandState, header: list[str]) -> list[str]:
    lines = header + [f"# t = {_g(state.t)}"]
    for j in range(state.N):
        vals = [_g(v) for v in state.mu[j]] + [_g(v) for v in state.gamma[j]]
        lines.append(", ".join([str(j)] + vals))
    return lines


def simulate(cfg: RunConfig, out_dir: Path, base_dir: Path | None = None,
             log=print) -> int:
    """Run a configuration and write ``diagnostics.csv`` plus snapshots; returns an exit code."""
    model = build_model(cfg)
    state = initial_state(cfg, base_dir)
    n_steps, dt = schedule(cfg, state, model)
    out_dir.mkdir(parents=True, exist_ok=True)
    snap_dir = out_dir / "snapshots"
    snap_dir.mkdir(exist_ok=True)
    header = [f"# config_hash = {config_hash(cfg)}"]
    lambdas = cfg.lambda_samples
    hamiltonian = model.system != "chiral"

    records: list[StrandState] = []
    blowup: BlowUpError | None = None
    try:
        for i, s in enumerate(iterate(state, model, dt, n_steps, cfg.parallel)):
            if i % cfg.cadence == 0:
                records.append(s)
                idx = len(records) - 1
                _write_lines(snap_dir / f"snap_{idx:06d}.txt", _snapshot_lines(s, header))
    except BlowUpError as exc:
        blowup = exc

    rows = []
    rec_dt = cfg.cadence * dt
    for idx, s in enumerate(records):
        rec = _diagnostics(records[0], s, model)
        if hamiltonian and len(records) >= 3:
            if idx == 0:
                window, where = records[0:3], "first"
            elif idx == len(records) - 1:
                window, where = records[-3:], "last"
            else:
                window, where = records[idx - 1:idx + 2], "center"
            rec.zcr_residuals = residual_from_window(window, rec_dt, model, lambdas, where)
        else:
            rec.zcr_residuals = [float("nan")] * len(lambdas)
        rows.append(rec.row())

    cols = ["t", "C1", "C2", "C3", "h", "mu_par_err"] + [f"zcr_res_{_g(lam)}" for lam in lambdas]
    _write_lines(out_dir / "diagnostics.csv",
                 header + [",".join(cols)] + [",".join(_g(v) for v in row) for row in rows])
    if blowup is not None:
        log(f"blow-up: {blowup}; {len(records)} records written to {out_dir}")
        return EXIT_BLOWUP
    log(f"{n_steps} steps of dt = {_g(dt)}; {len(records)} records written to {out_dir}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# zcr-verify


def zcr_verify(cfg: RunConfig, b_scale: float | None = None, base_dir: Path | None = None,
               log=print) -> int:
    """Static rows at every record and two-resolution convergence of the dynamic residual."""
    model = build_model(cfg)
    if model.system == "chiral":
        raise ZcrNotApplicable("quadratic ZCR not applicable to the chiral model")
    if cfg.initial_type == "file":
        raise ConfigError("zcr-verify needs an analytic initial condition to refine", "initial", "type")
    b = None if b_scale is None else b_scale * model.b

    coarse0 = initial_state(cfg, base_dir)
    n, dt = schedule(cfg, coarse0, model)
    if n // cfg.cadence + 1 < 3:
        raise ConfigError("need at least 3 records for time differences", "output", "cadence")
    fine_cfg = replace(cfg, N=2 * cfg.N)
    fine0 = initial_state(fine_cfg, base_dir)

    def trajectory(state, step, steps, every):
        mus, gammas, times = [], [], []
        for i, s in enumerate(iterate(state, model, step, steps, cfg.parallel)):
            if i % every == 0:
                mus.append(s.mu)
                gammas.append(s.gamma)
                times.append(s.t)
        return Trajectory(state.algebra_id, state.ds, np.array(times), np.array(mus), np.array(gammas))

    try:
        coarse = trajectory(coarse0, dt, n, cfg.cadence)
        fine = trajectory(fine0, dt / 2.0, 2 * n, cfg.cadence)
    except BlowUpError as exc:
        log(f"blow-up: {exc}")
        return EXIT_BLOWUP

    worst = {2: 0.0, 3: 0.0, 4: 0.0}
    for traj in (coarse, fine):
        for k in range(len(traj)):
            scale = input_scale(traj.mu[k], traj.gamma[k], model)
            for p, v in check_static_conditions(traj.mu[k], traj.gamma[k], model, b).items():
                worst[p] = max(worst[p], v / scale)
    log("static rows (max relative residual):")
    failed = []
    for p, v in worst.items():
        ok = v <= STATIC_TOL
        log(f"  lambda^{p}: {v:.3e} {'ok' if ok else 'FAIL'}")
        if not ok:
            failed.append(p)
    if failed:
        log("static zero-curvature rows failed: " + ", ".join(f"lambda^{p}" for p in failed))
        return EXIT_ZCR

    rc = curvature_residual(coarse, model, cfg.lambda_samples).max(axis=1)
    rf = curvature_residual(fine, model, cfg.lambda_samples).max(axis=1)
    log(f"dynamic residual, N = {cfg.N} -> {2 * cfg.N}, dt = {_g(dt)} -> {_g(dt / 2)}:")
    log("  lambda, coarse, fine, factor")
    ok = True
    for lam, c_res, f_res in zip(cfg.lambda_samples, rc, rf):
        factor = c_res / f_res if f_res > 0 else math.inf
        ok &= factor >= MIN_ORDER_FACTOR
        log(f"  {_g(lam)}, {c_res:.6e}, {f_res:.6e}, {factor:.3f}")
    if not ok:
        log(f"dynamic residual decayed by less than {MIN_ORDER_FACTOR}")
        return EXIT_ZCR
    return EXIT_OK


# ---------------------------------------------------------------------------
# stability


def stability(algebra: str, m: float, n: float, a: float, r: float, k_min: float, k_max: float,
              k_steps: int) -> list[str]:
    ks = k_scan(k_min, k_max, k_steps)
    rows = stability_map(algebra, m, n, a, r, ks)
    flags = f"algebra={algebra} m={_g(m)} n={_g(n)} a={_g(a)} r={_g(r)} k=[{_g(k_min)},{_g(k_max)}]x{k_steps}"
    lines = [f"# config_hash = {hashlib.sha256(flags.encode()).hexdigest()[:16]}", f"# {flags}"]
    if algebra == "so3":
        low, high = band_edges_so3(m, n, a)
        if low is not None:
            lines.append(f"# stable band: {_g(low)} <= k^2 <= {_g(high)}")
        else:
            lines.append("# no stable band (m^2 - 2an < 0)")
    else:
        lines.append("# every k != 0 unstable")
    for k0, k1 in transition_points(rows):
        lines.append(f"# band edge between k = {_g(k0)} and k = {_g(k1)}")
    lines.append(",".join(STABILITY_HEADER))
    lines += [",".join(cells) for cells in stability_rows_text(rows)]
    return lines


# ---------------------------------------------------------------------------


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gstrand", description="G-Strand simulations and checks")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("algebra-check", help="structural validation of a catalog algebra")
    p.add_argument("tag", choices=CATALOG)

    for name, helptext in (("simulate", "run a configuration"),
                           ("chiral", "run a configuration with system = chiral")):
        p = sub.add_parser(name, help=helptext)
        p.add_argument("config")
        p.add_argument("--out", help="output directory (overrides [output] directory)")

    p = sub.add_parser("stability", help="dispersion roots over a k scan")
    p.add_argument("--algebra", choices=("so3", "sl2r"), default="so3")
    p.add_argument("--m", type=float, default=0.0)
    p.add_argument("--n", type=float, default=0.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--r", type=float, default=0.0)
    p.add_argument("--k-min", type=float, default=0.0)
    p.add_argument("--k-max", type=float, default=4.0)
    p.add_argument("--k-steps", type=int, default=41)
    p.add_argument("--out", help="CSV path (default: stdout)")

    p = sub.add_parser("zcr-verify", help="zero-curvature residuals at two resolutions")
    p.add_argument("config", nargs="?", help="config file (default: built-in so3 run)")
    p.add_argument("--debug-b-scale", type=float, default=None,
                   help="multiply b = r a by this factor in the static check (fault injection)")
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        if args.command == "algebra-check":
            tbl = build_algebra(args.tag)
            report = validate_algebra(tbl)
            print(f"{tbl.id}: dim {tbl.dim}, form {tbl.form or 'n/a'}")
            print(report)
            return EXIT_OK if report.passed else EXIT_VALIDATION

        if args.command in ("simulate", "chiral"):
            cfg = load_config(args.config)
            if args.command == "chiral":
                cfg = replace(cfg, system="chiral")
            out = Path(args.out) if args.out else Path(cfg.directory)
            return simulate(cfg, out, base_dir=Path(args.config).parent)

        if args.command == "stability":
            lines = stability(args.algebra, args.m, args.n, args.a, args.r,
                              args.k_min, args.k_max, args.k_steps)
            if args.out:
                _write_lines(Path(args.out), lines)
            else:
                sys.stdout.write("\n".join(lines) + "\n")
            return EXIT_OK

        if args.command == "zcr-verify":
            if args.config:
                cfg, base = load_config(args.config), Path(args.config).parent
            else:
                cfg, base = parse_config(DEFAULT_ZCR_CONFIG), None
            return zcr_verify(cfg, args.debug_b_scale, base)
    except ZcrNotApplicable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, AlgebraError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
