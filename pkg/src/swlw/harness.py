"""Run configuration, experiment drivers and CSV emission.

Configs are YAML documents; see ``parse_config`` for the schema.  All
numeric CSV fields are written with 17 significant digits and a '.'
decimal separator, so identical configs produce bitwise-identical files.
"""

import time
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .dynamics import (ModelParams, State, integrate_semidiscrete,
                       stability_budget)
from .grid import ComplexGridFn, Grid, RealGridFn
from .oracle import TravelingWave
from .solver import NonConvergenceError, SingularSystemError, SolverConfig, run
from .truncation import TruncationFamily

__all__ = ["RunConfig", "ConfigError", "parse_config", "load_config",
           "cmd_run", "cmd_converge", "cmd_conserve", "cmd_truncate",
           "DIAGNOSTICS_HEADER", "CONVERGENCE_HEADER"]

DIAGNOSTICS_HEADER = "t,mass,q_invariant,energy,v_sup,inner_iters_u,inner_iters_v"
CONVERGENCE_HEADER = "J,h,tau,T,err_u,err_v,max_inner_iters,wall_time_s,status"
ERRORS_HEADER = "t,err_u,err_v"
TRUNCATE_HEADER = "M,v_sup_max,truncation_active,max_state_diff"


class ConfigError(ValueError):
    """Malformed configuration; the message names the offending key path."""


@dataclass
class RunConfig:
    """Validated run configuration (see ``parse_config`` for the schema)."""
    L: float
    x_left: float
    J: int
    tau: float
    T: float
    params: ModelParams
    tol: float = 1e-6
    max_iter: int = 50
    wave: Optional[TravelingWave] = None
    initial_file: Optional[str] = None
    diagnostics_path: str = "diagnostics.csv"
    errors_path: str = "errors.csv"
    sample_every: int = 1

    def grid(self):
        return Grid(self.J, self.L)

    def solver_config(self):
        return SolverConfig(tau=self.tau, T=self.T, tol=self.tol,
                            max_iter=self.max_iter)

    def initial_state(self, grid=None):
        g = grid if grid is not None else self.grid()
        if self.wave is not None:
            return self.wave.initial_state(g, self.x_left)
        data = np.load(self.initial_file)
        return State(0.0, ComplexGridFn(g, data["u"]), RealGridFn(g, data["v"]))


def _require(mapping, key, path):
    if key not in mapping:
        raise ConfigError(f"missing required key '{path}{key}'")
    return mapping[key]


def _check_known(mapping, known, path):
    for key in mapping:
        if key not in known:
            raise ConfigError(f"unknown key '{path}{key}'")


def _positive(value, path, kind=float):
    try:
        value = kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"'{path}' must be a number, got {value!r}") from None
    if value <= 0:
        raise ConfigError(f"'{path}' must be positive, got {value}")
    return value


def parse_config(doc):
    """Build a RunConfig from a YAML string or an already-parsed mapping.

    Schema (defaults in parentheses)::

        domain: [a, b]          # or  L: <length>  for (0, L)
        J: <int >= 6>
        tau: <float>
        T: <float>
        params: {alpha, beta, gamma, lambda (1.0)}
        truncation: off         # (off)  or  {M: <level>}
        solver: {tol (1e-6), max_iter (50)}
        initial:
          traveling_wave: {alpha, omega (0.0), x0 (0.0)}
          # or  file: <.npz with arrays u, v>
        outputs: {diagnostics (diagnostics.csv), errors (errors.csv),
                  sample_every (1)}
    """
    if isinstance(doc, str):
        try:
            doc = yaml.safe_load(doc)
        except yaml.YAMLError as exc:
            raise ConfigError(f"not valid YAML: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a mapping")
    _check_known(doc, {"domain", "L", "J", "tau", "T", "params", "truncation",
                       "solver", "initial", "outputs"}, "")

    if "domain" in doc and "L" in doc:
        raise ConfigError("give either 'domain' or 'L', not both")
    if "domain" in doc:
        dom = doc["domain"]
        if not (isinstance(dom, (list, tuple)) and len(dom) == 2):
            raise ConfigError("'domain' must be a two-element list [a, b]")
        a, b = float(dom[0]), float(dom[1])
        if b <= a:
            raise ConfigError(f"'domain' must satisfy a < b, got [{a}, {b}]")
        L, x_left = b - a, a
    else:
        L, x_left = _positive(_require(doc, "L", ""), "L"), 0.0

    J = _require(doc, "J", "")
    if not isinstance(J, int) or J < 6:
        raise ConfigError(f"'J' must be an integer >= 6, got {J!r}")
    tau = _positive(_require(doc, "tau", ""), "tau")
    T = _positive(_require(doc, "T", ""), "T")

    p = _require(doc, "params", "")
    _check_known(p, {"alpha", "beta", "gamma", "lambda"}, "params.")
    trunc_doc = doc.get("truncation", "off")
    if trunc_doc == "off" or trunc_doc is None or trunc_doc is False:
        trunc = TruncationFamily.off()
    elif isinstance(trunc_doc, dict) and set(trunc_doc) == {"M"}:
        try:
            trunc = TruncationFamily.active(float(trunc_doc["M"]))
        except ValueError as exc:
            raise ConfigError(f"truncation.M: {exc}") from exc
    else:
        raise ConfigError("'truncation' must be 'off' or a mapping {M: level}")
    try:
        params = ModelParams(alpha=float(_require(p, "alpha", "params.")),
                             beta=float(_require(p, "beta", "params.")),
                             gamma=float(_require(p, "gamma", "params.")),
                             lam=float(p.get("lambda", 1.0)),
                             trunc=trunc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"params: {exc}") from exc

    s = doc.get("solver", {})
    _check_known(s, {"tol", "max_iter"}, "solver.")
    tol = _positive(s.get("tol", 1e-6), "solver.tol")
    max_iter = int(s.get("max_iter", 50))
    if max_iter < 1:
        raise ConfigError(f"'solver.max_iter' must be >= 1, got {max_iter}")

    init = _require(doc, "initial", "")
    _check_known(init, {"traveling_wave", "file"}, "initial.")
    wave = initial_file = None
    if "traveling_wave" in init:
        tw = init["traveling_wave"]
        _check_known(tw, {"alpha", "omega", "x0"}, "initial.traveling_wave.")
        try:
            wave = TravelingWave(alpha=float(_require(tw, "alpha",
                                                      "initial.traveling_wave.")),
                                 omega=float(tw.get("omega", 0.0)),
                                 x0=float(tw.get("x0", 0.0)))
        except ValueError as exc:
            raise ConfigError(f"initial.traveling_wave: {exc}") from exc
    elif "file" in init:
        initial_file = str(init["file"])
    else:
        raise ConfigError("'initial' needs 'traveling_wave' or 'file'")

    out = doc.get("outputs", {})
    _check_known(out, {"diagnostics", "errors", "sample_every"}, "outputs.")
    sample_every = int(out.get("sample_every", 1))
    if sample_every < 1:
        raise ConfigError(f"'outputs.sample_every' must be >= 1, got {sample_every}")

    return RunConfig(L=L, x_left=x_left, J=J, tau=tau, T=T, params=params,
                     tol=tol, max_iter=max_iter, wave=wave,
                     initial_file=initial_file,
                     diagnostics_path=str(out.get("diagnostics",
                                                  "diagnostics.csv")),
                     errors_path=str(out.get("errors", "errors.csv")),
                     sample_every=sample_every)


def load_config(path):
    return parse_config(Path(path).read_text())


def _fmt(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return format(float(value), ".17g")


def _write_csv(path, header, rows, trailer=None):
    lines = [header]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    if trailer is not None:
        lines.append(trailer)
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text("\n".join(lines) + "\n")


def _diag_rows(diags):
    return list(zip(diags.times, diags.mass, diags.q_invariant, diags.energy,
                    diags.v_sup, diags.inner_iters_u, diags.inner_iters_v))


def cmd_run(config, output_dir="."):
    """Single fully discrete run; writes diagnostics and (when an exact
    wave is configured) per-sample error CSVs.

    Returns the list of files written.  On a solver failure the partial
    diagnostics CSV is flushed with a trailing status row and the error is
    re-raised.
    """
    from .dynamics import RunDiagnostics
    from .solver import step

    out = Path(output_dir)
    grid = config.grid()
    initial = config.initial_state(grid)
    diag_path = out / config.diagnostics_path
    cfg = config.solver_config()

    diags = RunDiagnostics()
    diags.record(initial, config.params)
    err_rows = []

    def sample_error(state):
        if config.wave is not None:
            e = config.wave.relative_l2_error(state, config.x_left)
            err_rows.append((state.t, e["err_u"], e["err_v"]))

    sample_error(initial)
    state = initial
    n_steps = int(np.ceil(cfg.T / cfg.tau - 1e-12))
    try:
        for n in range(1, n_steps + 1):
            state, iu, iv = step(state, config.params, cfg)
            state = State(initial.t + n * cfg.tau, state.u, state.v)
            if n % config.sample_every == 0 or n == n_steps:
                diags.record(state, config.params, iters_u=iu, iters_v=iv)
                sample_error(state)
    except (NonConvergenceError, SingularSystemError) as exc:
        _write_csv(diag_path, DIAGNOSTICS_HEADER, _diag_rows(diags),
                   trailer=f"# status: failed at step {n}: {exc}")
        raise
    _write_csv(diag_path, DIAGNOSTICS_HEADER, _diag_rows(diags))
    written = [diag_path]
    if config.wave is not None:
        err_path = out / config.errors_path
        _write_csv(err_path, ERRORS_HEADER, err_rows)
        written.append(err_path)
    return written


def cmd_converge(config, mesh_list, output_dir=".", csv_name="convergence.csv"):
    """Run the configured problem once per mesh size; emit the report.

    A failing mesh is marked in its status column and the sweep continues.
    Requires an exact wave in the config (errors are measured against it)
    and at least two mesh sizes.
    """
    if len(mesh_list) < 2:
        raise ValueError("need at least two mesh sizes")
    if config.wave is None:
        raise ValueError("convergence study needs a traveling_wave initial")
    rows = []
    for J in sorted(mesh_list):
        grid = Grid(J, config.L)
        t0 = time.perf_counter()
        try:
            initial = config.wave.initial_state(grid, config.x_left)
            final, diags = run(initial, config.params, config.solver_config(),
                               sample_every=10**9)
            err = config.wave.relative_l2_error(final, config.x_left)
            wall = time.perf_counter() - t0
            rows.append((J, grid.h, config.tau, config.T, err["err_u"],
                         err["err_v"],
                         max(max(diags.inner_iters_u), max(diags.inner_iters_v)),
                         wall, "ok"))
        except (NonConvergenceError, SingularSystemError) as exc:
            wall = time.perf_counter() - t0
            rows.append((J, grid.h, config.tau, config.T, np.nan, np.nan, 0,
                         wall, f"failed: {type(exc).__name__}"))
    rows.sort(key=lambda r: -r[1])  # h descending
    path = Path(output_dir) / csv_name
    _write_csv(path, CONVERGENCE_HEADER, rows)
    return path, rows


def cmd_conserve(config, output_dir="."):
    """Semi-discrete RK4 and the fully discrete solver on the same data.

    Emits ``conserve_semidiscrete.csv`` and ``conserve_fullydiscrete.csv``
    (diagnostics schema).  Raises ValueError when tau exceeds the RK4
    stability budget of the grid.
    """
    grid = config.grid()
    budget = stability_budget(grid)
    if config.tau > budget:
        raise ValueError(
            f"tau={config.tau} exceeds the RK4 stability budget {budget:.3g}; "
            f"use a smaller tau or a coarser grid for conservation studies")
    initial = config.initial_state(grid)
    _, semi = integrate_semidiscrete(initial, config.params, config.tau,
                                     config.T, sample_every=config.sample_every)
    _, full = run(initial, config.params, config.solver_config(),
                  sample_every=config.sample_every)
    out = Path(output_dir)
    paths = (out / "conserve_semidiscrete.csv", out / "conserve_fullydiscrete.csv")
    _write_csv(paths[0], DIAGNOSTICS_HEADER, _diag_rows(semi))
    _write_csv(paths[1], DIAGNOSTICS_HEADER, _diag_rows(full))
    return paths


def cmd_truncate(config, levels, output_dir=".", csv_name="truncate.csv"):
    """Compare truncated runs against the untruncated one.

    Runs the untruncated system once, then once per level M, and reports
    whether the long-wave sup norm stayed below M together with the max
    state difference against the untruncated run.
    """
    if not levels:
        raise ValueError("need at least one truncation level")
    grid = config.grid()
    initial = config.initial_state(grid)
    base_params = ModelParams(alpha=config.params.alpha,
                              beta=config.params.beta,
                              gamma=config.params.gamma,
                              lam=config.params.lam,
                              trunc=TruncationFamily.off())
    base_final, base_diags = run(initial, base_params, config.solver_config(),
                                 sample_every=config.sample_every)
    rows = []
    for M in levels:
        params = ModelParams(alpha=config.params.alpha,
                             beta=config.params.beta,
                             gamma=config.params.gamma,
                             lam=config.params.lam,
                             trunc=TruncationFamily.active(M))
        final, diags = run(initial, params, config.solver_config(),
                           sample_every=config.sample_every)
        v_sup_max = max(diags.v_sup)
        diff = max(np.max(np.abs(final.u.values - base_final.u.values)),
                   np.max(np.abs(final.v.values - base_final.v.values)))
        rows.append((M, v_sup_max, int(v_sup_max >= M), diff))
    path = Path(output_dir) / csv_name
    _write_csv(path, TRUNCATE_HEADER, rows)
    return path, rows
