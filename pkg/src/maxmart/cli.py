"""Command-line front end.

``maxmart <command> [--config PATH] [--seed N] [--out DIR] [--jobs K] [--only A,B]``

Exit status: 0 when every selected verdict passes, 1 on a failed test, 2 on a
usage or configuration error, 3 when a test is inconclusive.  Each numeric
artifact ``X`` is accompanied by ``X.meta.json`` holding the configuration,
seed, git-style hashes of the inputs and a timestamp; timestamps appear
nowhere else, so repeated runs give byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
import time
from pathlib import Path as FsPath

import numpy as np

from . import config as cfgmod
from . import stattests
from .characterize import GridFunction, GridSpec, detect_ay_form, recover_batch
from .core import f_on_driver, write_series_csv
from .errors import DomainError, InsufficientDataError, ResourceLimitError
from .paths import simulate_bm
from .sampling import map_paths

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INCONCLUSIVE = 0, 1, 2, 3


def git_hash(data: bytes) -> str:
    """Blob hash as computed by ``git hash-object``."""
    return hashlib.sha1(b"blob %d\0" % len(data) + data).hexdigest()


def _config_bytes(cfg: cfgmod.RunConfig) -> bytes:
    return json.dumps(cfg.to_dict(), sort_keys=True).encode()


def write_sidecar(artifact: FsPath, cfg: cfgmod.RunConfig, inputs: dict[str, bytes]) -> None:
    meta = {
        "artifact": artifact.name,
        "config": cfg.to_dict(),
        "seed": cfg.seed,
        "inputs": {name: git_hash(data) for name, data in inputs.items()},
        "content": git_hash(artifact.read_bytes()),
        "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    FsPath(str(artifact) + ".meta.json").write_text(json.dumps(meta, indent=2) + "\n")


def _inputs(cfg: cfgmod.RunConfig) -> dict[str, bytes]:
    inputs = {"config": _config_bytes(cfg)}
    if cfg.grid_file:
        inputs["grid_file"] = FsPath(cfg.grid_file).read_bytes()
    return inputs


def _jobs(cfg: cfgmod.RunConfig) -> int:
    return cfg.jobs if cfg.jobs > 0 else 0  # map_paths turns 0 into the CPU count


def _verdict_status(reports) -> int:
    verdicts = [r.verdict for r in reports]
    if "fail" in verdicts:
        return EXIT_FAIL
    if "inconclusive" in verdicts:
        return EXIT_INCONCLUSIVE
    return EXIT_PASS


def _write_reports(out: FsPath, cfg, reports, stem: str = "reports") -> None:
    rp = out / f"{stem}.json"
    rp.write_text(json.dumps([r.to_dict() for r in reports], indent=2) + "\n")
    write_sidecar(rp, cfg, _inputs(cfg))
    sp = out / "summary.csv"
    with open(sp, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=stattests.SUMMARY_COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in stattests.summary_rows(reports):
            w.writerow({k: (f"{v:.6g}" if isinstance(v, float) else v) for k, v in row.items()})
    write_sidecar(sp, cfg, _inputs(cfg))


# -- commands --------------------------------------------------------------------------------------

def cmd_simulate(cfg, out: FsPath) -> int:
    for i in range(cfg.paths):
        p = simulate_bm((cfg.seed, i), cfg.horizon, cfg.dt, epsilon=cfg.epsilon)
        fp = out / f"path_{i:05d}.csv"
        p.to_csv(fp)
        write_sidecar(fp, cfg, _inputs(cfg))
    return EXIT_PASS


def cmd_evaluate(cfg, out: FsPath) -> int:
    spec = cfg.martingale_spec()
    for i in range(cfg.paths):
        p = simulate_bm((cfg.seed, i), cfg.horizon, cfg.dt, epsilon=cfg.epsilon)
        fp = out / f"series_{i:05d}.csv"
        write_series_csv(spec, p, fp)
        write_sidecar(fp, cfg, _inputs(cfg))
    return EXIT_PASS


def cmd_recover(cfg, out: FsPath) -> int:
    spec = cfg.martingale_spec()
    centers = np.asarray(cfg.bin_centers, dtype=float)
    lefts = centers - cfg.bin_width / 2
    acc = recover_batch(spec, cfg.paths, cfg.seed, lefts, cfg.bin_width, cfg.horizon, cfg.dt, _jobs(cfg))
    with np.errstate(invalid="ignore", divide="ignore"):
        est = np.where(acc.count > 0, acc.cross / np.where(acc.quad > 0, acc.quad, 1.0), np.nan)
    truth = f_on_driver(spec.f, centers)
    table = np.column_stack([centers, lefts, lefts + cfg.bin_width, est, truth, acc.count])
    fp = out / "f_hat.csv"
    np.savetxt(fp, table, delimiter=",", header="center,left,right,f_hat,f_true,steps", comments="",
               fmt="%.17g")
    write_sidecar(fp, cfg, _inputs(cfg))
    if np.any(acc.count == 0):
        j = int(np.flatnonzero(acc.count == 0)[0])
        raise InsufficientDataError(f"empty bin centered at {centers[j]}", occupancy=0)
    return EXIT_PASS


def cmd_detect(cfg, out: FsPath) -> int:
    if cfg.grid_file:
        grid = GridFunction.from_csv(cfg.grid_file)
    else:
        xs, ys = GridSpec(**cfg.grid).grids()
        grid = GridFunction.from_spec(cfg.martingale_spec(), xs, ys)
        gp = out / "grid.csv"
        grid.to_csv(gp)
        write_sidecar(gp, cfg, _inputs(cfg))
    report = detect_ay_form(grid, cfg.tolerance)
    fp = out / "detection.json"
    fp.write_text(report.to_json() + "\n")
    write_sidecar(fp, cfg, _inputs(cfg))
    return EXIT_PASS


def cmd_verify(cfg, out: FsPath) -> int:
    reports = stattests.run_suite(cfg.seed, only=list(cfg.test_selection), n=cfg.n_paths, jobs=_jobs(cfg))
    _write_reports(out, cfg, reports)
    for r in reports:
        print(f"{r.verdict:>12s}  {r.name:36s} stat={r.statistic:+.4g} thr={r.threshold:.4g} "
              f"({r.wall_time:.1f}s)")
    return _verdict_status(reports)


def cmd_stop_law(cfg, out: FsPath) -> int:
    lo, hi = cfg.exit_interval
    x, y = -lo, hi
    jobs = _jobs(cfg)
    samples = stattests.exit_law_samples(x, y, cfg.paths, cfg.seed, dt=cfg.stop_law_dt, jobs=jobs)
    fp = out / "exit_law_samples.csv"
    with open(fp, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["side", "max_value"])
        for s in samples:
            w.writerow([s.side, repr(s.max_value)])
    write_sidecar(fp, cfg, _inputs(cfg))
    report = stattests.exit_max_law_test(x, y, cfg.paths, cfg.seed, dt=cfg.stop_law_dt, jobs=jobs)
    _write_reports(out, cfg, [report], stem="report")
    print(f"{report.verdict}: upper-exit frequency {report.estimate:.4f} vs {report.reference:.4f}, "
          f"KS {report.details.get('ks_statistic', math.nan):.4f}")
    return _verdict_status([report])


COMMANDS = {
    "simulate": cmd_simulate,
    "evaluate": cmd_evaluate,
    "recover": cmd_recover,
    "detect": cmd_detect,
    "verify": cmd_verify,
    "stop-law": cmd_stop_law,
}


def run(cfg: cfgmod.RunConfig) -> int:
    out = FsPath(cfg.output_dir) / cfg.command
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise DomainError(f"output_dir not writable: {exc}") from None
    return COMMANDS[cfg.command](cfg, out)


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="maxmart", description="Azema-Yor max-martingale toolkit")
    ap.add_argument("command", choices=cfgmod.COMMANDS)
    ap.add_argument("--config", help="JSON configuration file")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", help=f"output directory (overrides ${cfgmod.OUT_ENV})")
    ap.add_argument("--jobs", type=int, help="worker processes; 0 means all CPUs")
    ap.add_argument("--only", help="comma-separated test names for verify")
    ap.add_argument("-n", "--n-paths", type=int, dest="n_paths")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    only = [s for s in args.only.split(",") if s] if args.only else None
    try:
        cfg = cfgmod.load(args.config, command=args.command, seed=args.seed, output_dir=args.out,
                          jobs=args.jobs, n_paths=args.n_paths, test_selection=only)
        return run(cfg)
    except (DomainError, ResourceLimitError, OSError, json.JSONDecodeError) as exc:
        print(f"maxmart: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InsufficientDataError as exc:
        print(f"maxmart: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE


if __name__ == "__main__":
    sys.exit(main())
