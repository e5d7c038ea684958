"""Command line drivers: ``fracnls {ground-state,evolve,instability,sweep,validate}``.

Exit codes: 0 success (a detected blow-up counts as success), 2 config
error, 3 numerical divergence or non-convergence, 4 failed precondition,
5 failed validation.
"""
import argparse
import csv
import logging
import os
import sys
import warnings
from concurrent.futures import ProcessPoolExecutor

from . import evolution as ev
from . import functionals as fn
from . import ground_state as gs
from . import io
from . import spectral
from . import validation
from . import virial
from .config import dump_config, load_config
from .errors import (
    ConfigError,
    ConfigParseError,
    DivergedFieldError,
    DomainError,
    NonConvergenceError,
    PreconditionError,
)

log = logging.getLogger("fracnls")

EXIT_OK, EXIT_CONFIG, EXIT_DIVERGED, EXIT_PRECONDITION, EXIT_VALIDATION = 0, 2, 3, 4, 5


def _load(args):
    overrides = list(args.set or [])
    if getattr(args, "lambda0", None) is not None:
        overrides.append(f"lambda0={args.lambda0}")
    cfg = load_config(args.config, overrides)
    if not cfg.deterministic:
        spectral.set_fft_workers(int(os.environ.get("FRACNLS_THREADS", os.cpu_count() or 1)))
    else:
        spectral.set_fft_workers(1)
    return cfg


def _outdir(cfg, sub=None):
    path = cfg.output_dir if sub is None else os.path.join(cfg.output_dir, sub)
    return io.ensure_dir(path)


def solve_ground_state(cfg):
    return gs.solve(cfg.params, cfg.grid)


def persist_ground_state(cfg, res, out):
    io.write_snapshot(os.path.join(out, "ground_state"), cfg.grid, cfg.params, 0.0, res.field.astype(complex))
    io.write_json(os.path.join(out, "ground_state_report.json"), io.clean_json(res.sidecar()))


def cmd_ground_state(cfg):
    res = solve_ground_state(cfg)
    out = _outdir(cfg)
    persist_ground_state(cfg, res, out)
    print(f"ground state: {res.iterations} iterations, residual {res.final_residual:.3e}, "
          f"pohozaev r1={res.pohozaev.r1:.3e} r2={res.pohozaev.r2:.3e}, S_omega={res.S_omega_value:.12g}")
    return EXIT_OK


def _weight(cfg):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", category=UserWarning)
        return virial.build_weight(cfg.grid, cfg.R)


def run_evolution(cfg, u0, out, tag=""):
    """Evolve ``u0`` and persist diagnostics, snapshots and the outcome JSON under ``out``."""
    grid, params = cfg.grid, cfg.params
    snap_dir = os.path.join(out, "snapshots")
    if cfg.snapshot_stride:
        io.ensure_dir(snap_dir)

    counter = [0]

    def snapshot(t, u):
        io.write_snapshot(os.path.join(snap_dir, f"snap_{counter[0]:05d}"), grid, params, t, u)
        counter[0] += 1

    with io.DiagnosticsCSV(os.path.join(out, "diagnostics.csv")) as sink:
        res = ev.evolve(
            grid, u0, params, cfg.evolve, sink=sink, weight=_weight(cfg),
            snapshot=snapshot if cfg.snapshot_stride else None, snapshot_stride=cfg.snapshot_stride,
        )
    io.write_snapshot(os.path.join(out, "final_state"), grid, params, res.t_end, res.state)
    io.write_json(os.path.join(out, "outcome.json"), io.clean_json(res.summary()))
    print(f"{tag}status={res.status} t_end={res.t_end:.6g} steps={res.steps} "
          f"hs growth={res.final.hs_seminorm_sq / res.initial.hs_seminorm_sq:.4g} {res.certification}".rstrip())
    return res


def _status_code(res):
    return EXIT_DIVERGED if res.status == ev.DIVERGED else EXIT_OK


def cmd_evolve(cfg, initial=None, discrete=False):
    if initial:
        header, u0 = io.read_snapshot(initial)
        if (header["d"], header["N"]) != (cfg.d, cfg.N) or abs(header["L"] - cfg.L) > 1e-12 * cfg.L:
            raise ConfigError(f"snapshot {initial} does not match the configured grid")
    else:
        res = solve_ground_state(cfg)
        if discrete:
            u0 = fn.scale_field(cfg.grid, gs.strang_standing_wave(res, cfg.dt0), cfg.lambda0)
        else:
            u0 = gs.scaled_initial_data(res, cfg.lambda0)
    res = run_evolution(cfg, u0, _outdir(cfg))
    return _status_code(res)


def prepare_unstable_data(cfg, allow_outside=False):
    p = cfg.params
    bad = p.theorem_violations()
    if bad and not allow_outside:
        raise PreconditionError("parameters outside the theorem regime: " + "; ".join(bad))
    res = solve_ground_state(cfg)
    u0 = gs.scaled_initial_data(res, cfg.lambda0)
    rep = fn.evaluate(cfg.grid, u0, p)
    if not fn.in_unstable_set(rep, res.S_omega_value):
        raise PreconditionError(
            f"initial data phi^lambda0 with lambda0={cfg.lambda0} is not in the unstable set: "
            f"I={rep.I:.6g}, S_omega={rep.S_omega:.12g}, S_omega(phi)={res.S_omega_value:.12g}"
        )
    return res, u0


def cmd_instability(cfg, allow_outside=False):
    res, u0 = prepare_unstable_data(cfg, allow_outside)
    out = _outdir(cfg)
    persist_ground_state(cfg, res, out)
    run = run_evolution(cfg, u0, out)
    return _status_code(run)


def _sweep_entry(args):
    cfg, lam, run, res = args
    grid, p = cfg.grid, cfg.params
    u0 = gs.scaled_initial_data(res, lam)
    rep = fn.evaluate(grid, u0, p)
    row = {
        "lambda": lam,
        "S_omega": rep.S_omega,
        "I": rep.I,
        "K_omega": rep.K_omega,
        "in_unstable_set": fn.in_unstable_set(rep, res.S_omega_value),
        "S_ground": res.S_omega_value,
    }
    if run:
        out = _outdir(cfg, f"lambda_{lam:.6g}")
        r = run_evolution(cfg, u0, out, tag=f"lambda={lam:g}: ")
        row["status"] = r.status
        row["t_end"] = r.t_end
    return row


def sweep(cfg, lambdas, run=False, jobs=1):
    res = solve_ground_state(cfg)
    tasks = [(cfg, float(lam), run, res) for lam in lambdas]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_entry, tasks))
    else:
        rows = [_sweep_entry(t) for t in tasks]
    return rows


def cmd_sweep(cfg, lambdas, run=False, jobs=1):
    rows = sweep(cfg, lambdas, run, jobs)
    out = _outdir(cfg)
    keys = list(rows[0]) if rows else ["lambda"]
    with open(os.path.join(out, "sweep.csv"), "w", newline="\n", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(keys)
        for r in rows:
            w.writerow(["%.17g" % v if isinstance(v, float) else v for v in (r[k] for k in keys)])
    for r in rows:
        print(" ".join(f"{k}={v:.6g}" if isinstance(v, float) else f"{k}={v}" for k, v in r.items()))
    return EXIT_OK


def cmd_validate(cfg, checks=None):
    names = None if checks is None else [c for c in checks.split(",") if c.strip()]
    report = validation.run(cfg, names)
    out = _outdir(cfg)
    io.write_json(os.path.join(out, "validation_report.json"), report.to_dict())
    for c in report.checks:
        print(f"{c.status.upper():4s} {c.name}: measured={c.measured:.3e} tol={c.tolerance:.1e} {c.note}".rstrip())
    print("validation " + ("passed" if report.passed else "FAILED") + f" ({len(report.checks)} checks)")
    return EXIT_OK if report.passed else EXIT_VALIDATION


def build_parser():
    ap = argparse.ArgumentParser(prog="fracnls", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", required=True, help="key = value config file")
        p.add_argument("--lambda0", type=float, default=None, help="override the scaling lambda0")
        p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override any config key")
        return p

    common(sub.add_parser("ground-state", help="solve for the ground state and save it"))
    p = common(sub.add_parser("evolve", help="evolve phi^lambda0 (or a snapshot) without preconditions"))
    p.add_argument("--initial", help="snapshot stem to start from")
    p.add_argument("--discrete-standing-wave", action="store_true",
                   help="start from the fixed point of the Strang map with step dt0 instead of phi")
    p = common(sub.add_parser("instability", help="blow-up experiment from phi^lambda0 in the unstable set"))
    p.add_argument("--allow-outside-regime", action="store_true")
    p = common(sub.add_parser("sweep", help="functionals of phi^lambda over a list of lambdas"))
    p.add_argument("--lambdas", default="0.5,0.9,1.0,1.1,2.0")
    p.add_argument("--run", action="store_true", help="also evolve each entry")
    p.add_argument("--jobs", type=int, default=1)
    p = common(sub.add_parser("validate", help="run the invariant suite"))
    p.add_argument("--checks", default=None, help=f"comma list out of: {', '.join(validation.REGISTRY)}")
    p = common(sub.add_parser("show-config", help="print the fully defaulted config"))
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = _load(args)
        if args.command == "ground-state":
            return cmd_ground_state(cfg)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.initial, args.discrete_standing_wave)
        if args.command == "instability":
            return cmd_instability(cfg, args.allow_outside_regime)
        if args.command == "sweep":
            try:
                lams = [float(x) for x in args.lambdas.split(",") if x.strip()]
            except ValueError:
                raise ConfigParseError(f"--lambdas must be a comma list of numbers, got {args.lambdas!r}") from None
            return cmd_sweep(cfg, lams, args.run, args.jobs)
        if args.command == "validate":
            return cmd_validate(cfg, args.checks)
        if args.command == "show-config":
            sys.stdout.write(dump_config(cfg))
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (NonConvergenceError, DivergedFieldError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except PreconditionError as exc:
        print(f"precondition failed: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except DomainError as exc:
        print(f"config error [out_of_range]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
