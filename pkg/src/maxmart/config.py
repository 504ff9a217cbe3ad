"""Run configuration and the table of defaults.

A configuration is one JSON document.  Every key is optional; missing keys
fall back to :data:`DEFAULTS`, which is the single place defaults live.

======================  ==================  ==========================================
key                     default             meaning
======================  ==================  ==========================================
command                 verify              simulate | evaluate | recover | detect |
                                            verify | stop-law
spec                    max, exp_decay(1)   martingale descriptor (variant, f, c)
n_paths                 command dependent   10 for simulate/evaluate, 20000 for
                                            recover, 10000 for stop-law; for verify
                                            ``null`` keeps each test's own size
                                            (1e5 for z-tests, 1e4 for KS tests)
dt                      1e-4                time step
horizon                 1.0                 simulated time
seed                    0                   root seed
output_dir              out                 artifacts directory
test_selection          []                  verify: test names, empty means all
jobs                    0                   worker processes, 0 means all CPUs
epsilon                 sqrt(dt)/2          local-time bandwidth
bin_width               0.05                recover: bin width
bin_centers             0.25 .. 1.5         recover: bin centers
grid                    y_max 2, 40 rows,   detect: grid built from ``spec`` when
                        x_min -2, 20 cols   ``grid_file`` is not given
grid_file               null                detect: CSV grid to analyse
tolerance               1e-8                detect: residual tolerance
exit_interval           [-1, 2]             stop-law: ``[-x, y]``
stop_law_dt             1e-5                stop-law: time step
======================  ==================  ==========================================

Thresholds for the statistical tests (4 standard errors, KS critical value
1.63) are fixed in :mod:`maxmart.stattests`.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields

from .core import MaxMartingaleSpec
from .errors import DomainError

COMMANDS = ("simulate", "evaluate", "recover", "detect", "verify", "stop-law")

N_PATHS = {"simulate": 10, "evaluate": 10, "recover": 20_000, "detect": 1, "verify": None, "stop-law": 10_000}

DEFAULTS = {
    "command": "verify",
    "spec": {"variant": "max", "f": {"kind": "exp_decay", "params": {"rate": 1.0}}, "c": 0.0},
    "n_paths": None,
    "dt": 1e-4,
    "horizon": 1.0,
    "seed": 0,
    "output_dir": "out",
    "test_selection": [],
    "jobs": 0,
    "epsilon": None,
    "bin_width": 0.05,
    "bin_centers": [0.25, 0.5, 0.75, 1.0, 1.25, 1.5],
    "grid": {"y_max": 2.0, "n_y": 40, "x_min": -2.0, "n_x_negative": 20},
    "grid_file": None,
    "tolerance": 1e-8,
    "exit_interval": [-1.0, 2.0],
    "stop_law_dt": 1e-5,
}

OUT_ENV = "MAXMART_OUT"


@dataclass(frozen=True)
class RunConfig:
    command: str = DEFAULTS["command"]
    spec: dict = field(default_factory=lambda: dict(DEFAULTS["spec"]))
    n_paths: int | None = None
    dt: float = DEFAULTS["dt"]
    horizon: float = DEFAULTS["horizon"]
    seed: int = DEFAULTS["seed"]
    output_dir: str = DEFAULTS["output_dir"]
    test_selection: tuple = ()
    jobs: int = DEFAULTS["jobs"]
    epsilon: float | None = None
    bin_width: float = DEFAULTS["bin_width"]
    bin_centers: tuple = tuple(DEFAULTS["bin_centers"])
    grid: dict = field(default_factory=lambda: dict(DEFAULTS["grid"]))
    grid_file: str | None = None
    tolerance: float = DEFAULTS["tolerance"]
    exit_interval: tuple = tuple(DEFAULTS["exit_interval"])
    stop_law_dt: float = DEFAULTS["stop_law_dt"]

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"command must be one of {COMMANDS}")
        if not (self.dt > 0 and self.horizon > 0):
            raise DomainError("dt and horizon must be positive")
        if self.dt > self.horizon:
            raise DomainError("dt must not exceed horizon")
        if self.n_paths is not None and self.n_paths < 1:
            raise DomainError("n_paths must be at least 1")
        if self.seed < 0:
            raise DomainError("seed must be non-negative")
        if not self.bin_width > 0:
            raise DomainError("bin_width must be positive")
        lo, hi = self.exit_interval
        if not lo < 0 < hi:
            raise DomainError("exit_interval must straddle 0")
        self.martingale_spec()  # validates the descriptor

    def martingale_spec(self) -> MaxMartingaleSpec:
        try:
            return MaxMartingaleSpec.from_dict(self.spec)
        except (KeyError, TypeError) as exc:
            raise DomainError(f"bad spec descriptor: {exc}") from None

    @property
    def paths(self) -> int | None:
        """Sample size with the command default applied."""
        return self.n_paths if self.n_paths is not None else N_PATHS[self.command]

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("test_selection", "bin_centers", "exit_interval"):
            d[k] = list(d[k])
        return d

    def with_overrides(self, **kw) -> "RunConfig":
        d = self.to_dict()
        d.update({k: v for k, v in kw.items() if v is not None})
        return from_dict(d)


def from_dict(d: dict) -> RunConfig:
    known = {f.name for f in fields(RunConfig)}
    unknown = set(d) - known
    if unknown:
        raise DomainError(f"unknown config keys: {sorted(unknown)}")
    d = dict(d)
    for k in ("test_selection", "bin_centers", "exit_interval"):
        if k in d and d[k] is not None:
            d[k] = tuple(d[k])
    return RunConfig(**d)


def load(path=None, **overrides) -> RunConfig:
    """Read a JSON config (or start from defaults).

    The output directory resolves as: ``overrides`` (command-line flags), then
    the ``MAXMART_OUT`` environment variable, then the file.
    """
    d = {}
    if path is not None:
        with open(path) as fh:
            d = json.load(fh)
        if not isinstance(d, dict):
            raise DomainError("config must be a JSON object")
    if os.environ.get(OUT_ENV):
        d["output_dir"] = os.environ[OUT_ENV]
    d.update({k: v for k, v in overrides.items() if v is not None})
    return from_dict(d)
