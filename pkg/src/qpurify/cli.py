"""Command-line front end: ``simulate``, ``analyze`` and ``sweep``.

Units: epsilon = 1, so Omega is given as Omega/epsilon and tau as eps*tau.
The sweep axis ``x`` is 2*eps*tau/pi.

Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
"""

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Optional, Tuple

import numpy as np

from qpurify import __version__
from qpurify.core import DensityMatrix, analyze, trajectory
from qpurify.errors import DefectiveMap, NumericalFailure
from qpurify.io import (
    ANALYZE_COLUMNS,
    FORMATS,
    SWEEP_COLUMNS,
    TRAJECTORY_COLUMNS,
    trajectory_rows,
    write_rows,
)
from qpurify.matrix import eig2_biorthogonal
from qpurify.model import ModelParams, eta_threshold, v_operator

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

COMMANDS = ("simulate", "analyze", "sweep")


class ConfigError(ValueError):
    pass


@dataclass
class GridSpec:
    p_range: Tuple[float, float] = (0.1, 0.9)
    x_range: Tuple[float, float] = (0.1, 0.9)
    n_p: int = 32
    n_x: int = 32


@dataclass
class RunConfig:
    command: str
    omega_over_eps: float = 10.0
    eps_tau: float = 1.0
    theta: float = 0.0
    p_up: float = 0.5
    coherence: complex = 0j
    steps: int = 50
    grid: GridSpec = field(default_factory=GridSpec)
    eta_cap: float = 1e3
    workers: int = 4
    out: Optional[str] = "-"
    format: str = "csv"

    def validate(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}")
        if self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if not 0.0 <= self.p_up <= 1.0:
            raise ConfigError("p_up must lie in [0, 1]")
        if abs(self.coherence) ** 2 > self.p_up * (1.0 - self.p_up) + 1e-12:
            raise ConfigError("|coherence|^2 > p_up (1 - p_up): initial state is not positive")
        lo, hi = self.grid.p_range
        if not 0.0 < lo <= hi < 1.0:
            raise ConfigError("p_range must be ordered inside (0, 1)")
        lo, hi = self.grid.x_range
        if not lo <= hi:
            raise ConfigError("x_range must be ordered")
        if self.grid.n_p < 1 or self.grid.n_x < 1:
            raise ConfigError("grid sizes must be >= 1")
        if not self.eta_cap > 0:
            raise ConfigError("eta_cap must be positive")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.command != "sweep":
            try:
                self.model()
            except ValueError as exc:
                raise ConfigError(str(exc)) from exc
        return self

    def model(self):
        return ModelParams.dimensionless(self.omega_over_eps, self.eps_tau, self.theta)

    def rho0(self):
        try:
            return DensityMatrix.from_populations(self.p_up, self.coherence)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self):
        d = asdict(self)
        d["coherence"] = [self.coherence.real, self.coherence.imag]
        d["grid"] = {k: list(v) if isinstance(v, tuple) else v for k, v in d["grid"].items()}
        # execution details, not part of the result
        del d["workers"], d["out"]
        return d


def _config_from_json(path):
    """Flatten a RunConfig-shaped json document into keyword overrides."""
    with open(path) as fh:
        doc = json.load(fh)
    out = {}
    if "command" in doc:
        out["command"] = doc["command"]
    model = doc.get("model", {})
    for key in ("omega_over_eps", "eps_tau", "theta"):
        if key in model:
            out[key] = float(model[key])
    rho0 = doc.get("rho0_spec", doc.get("rho0", {}))
    if "p_up" in rho0:
        out["p_up"] = float(rho0["p_up"])
    if "coherence" in rho0:
        re, im = rho0["coherence"]
        out["coherence"] = complex(re, im)
    for key in ("steps", "eta_cap"):
        if key in doc:
            out[key] = doc[key]
    if "grid" in doc:
        g = doc["grid"]
        out["grid"] = GridSpec(
            p_range=tuple(g.get("p_range", GridSpec.p_range)),
            x_range=tuple(g.get("x_range", GridSpec.x_range)),
            n_p=int(g.get("n_p", GridSpec.n_p)),
            n_x=int(g.get("n_x", GridSpec.n_x)),
        )
    output = doc.get("output", {})
    if "path" in output:
        out["out"] = output["path"]
    if "format" in output:
        out["format"] = output["format"]
    return out


def _add_output_flags(p):
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", help="output path, '-' for stdout")
    p.add_argument("--config", help="json file mirroring RunConfig; flags override it")


def _add_model_flags(p):
    p.add_argument("--omega-over-eps", type=float, dest="omega_over_eps")
    p.add_argument("--eps-tau", type=float, dest="eps_tau")
    p.add_argument("--theta", type=float)
    p.add_argument("--p-up", type=float, dest="p_up")
    p.add_argument("--coh-re", type=float, dest="coh_re")
    p.add_argument("--coh-im", type=float, dest="coh_im")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qpurify",
        description="Qubit purification by repeated measurement of a coupled partner qubit.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="purity trajectory")
    _add_model_flags(sim)
    sim.add_argument("--steps", type=int)
    _add_output_flags(sim)

    ana = sub.add_parser("analyze", help="oscillation predicates and monotonicity thresholds")
    _add_model_flags(ana)
    _add_output_flags(ana)

    sw = sub.add_parser("sweep", help="eta map over (p_up, 2 eps tau / pi), up-state record")
    sw.add_argument("--p-lo", type=float, dest="p_lo")
    sw.add_argument("--p-hi", type=float, dest="p_hi")
    sw.add_argument("--x-lo", type=float, dest="x_lo")
    sw.add_argument("--x-hi", type=float, dest="x_hi")
    sw.add_argument("--np", type=int, dest="n_p")
    sw.add_argument("--nx", type=int, dest="n_x")
    sw.add_argument("--eta-cap", type=float, dest="eta_cap")
    sw.add_argument("--workers", type=int)
    _add_output_flags(sw)
    return parser


def config_from_args(args):
    values = {}
    if getattr(args, "config", None):
        try:
            values.update(_config_from_json(args.config))
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
    values["command"] = args.command
    ns = vars(args)
    for key in ("omega_over_eps", "eps_tau", "theta", "p_up", "steps", "eta_cap", "workers", "out", "format"):
        if ns.get(key) is not None:
            values[key] = ns[key]
    if ns.get("coh_re") is not None or ns.get("coh_im") is not None:
        base = values.get("coherence", 0j)
        re = ns["coh_re"] if ns.get("coh_re") is not None else base.real
        im = ns["coh_im"] if ns.get("coh_im") is not None else base.imag
        values["coherence"] = complex(re, im)
    if args.command == "sweep":
        grid = values.get("grid", GridSpec())
        p_lo = ns["p_lo"] if ns.get("p_lo") is not None else grid.p_range[0]
        p_hi = ns["p_hi"] if ns.get("p_hi") is not None else grid.p_range[1]
        x_lo = ns["x_lo"] if ns.get("x_lo") is not None else grid.x_range[0]
        x_hi = ns["x_hi"] if ns.get("x_hi") is not None else grid.x_range[1]
        n_p = ns["n_p"] if ns.get("n_p") is not None else grid.n_p
        n_x = ns["n_x"] if ns.get("n_x") is not None else grid.n_x
        values["grid"] = GridSpec((p_lo, p_hi), (x_lo, x_hi), n_p, n_x)
    return RunConfig(**values).validate()


def _meta(cfg):
    return {"artifact": "qpurify", "version": __version__, "config": cfg.to_dict()}


def cmd_simulate(cfg):
    V = v_operator(cfg.model())
    try:
        eig2_biorthogonal(V)
    except DefectiveMap:
        pass  # still extracts, just not at a geometric rate
    traj = trajectory(cfg.rho0(), V, cfg.steps)
    write_rows(cfg.out, trajectory_rows(traj), TRAJECTORY_COLUMNS, cfg.format, _meta(cfg))
    return traj


def analyze_record(cfg):
    spec, d, rep = analyze(cfg.rho0(), v_operator(cfg.model()))
    return {
        "g": spec.g,
        "a": d.a,
        "b": d.b,
        "c_tilde": d.c_tilde,
        "det_rho0": d.det_rho0,
        "local_min_at_1": rep.local_min_at_1,
        "local_max_at_1_possible": rep.local_max_at_1_possible,
        "k_monotonic_sufficient": rep.k_monotonic_sufficient,
        "k_monotonic_simplified": rep.k_monotonic_simplified,
        "simplified_is_exact": rep.simplified_is_exact,
    }


def cmd_analyze(cfg):
    record = analyze_record(cfg)
    write_rows(cfg.out, [record], ANALYZE_COLUMNS, cfg.format, _meta(cfg))
    return record


def sweep_cells(cfg):
    """Rows of the eta map, p_up-major then x, independent of worker count."""
    g = cfg.grid
    ps = np.linspace(g.p_range[0], g.p_range[1], g.n_p)
    xs = np.linspace(g.x_range[0], g.x_range[1], g.n_x)

    def row(p):
        cells = []
        for x in xs:
            raw = eta_threshold(float(p), float(x) * math.pi / 2.0)
            cells.append(
                {
                    "p_up": float(p),
                    "two_eps_tau_over_pi": float(x),
                    "eta": min(raw, cfg.eta_cap),
                    "eta_raw": raw,
                    "monotonic": raw < 1.0,
                }
            )
        return cells

    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        return [cell for cells in pool.map(row, ps) for cell in cells]


def cmd_sweep(cfg):
    try:
        cells = sweep_cells(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    write_rows(cfg.out, cells, SWEEP_COLUMNS, cfg.format, _meta(cfg))
    return cells


HANDLERS = {"simulate": cmd_simulate, "analyze": cmd_analyze, "sweep": cmd_sweep}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
        HANDLERS[cfg.command](cfg)
    except NumericalFailure as exc:
        print(f"qpurify: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"qpurify: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
