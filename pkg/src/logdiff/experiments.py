"""Headline experiments over the log-diffusion solver.

Four runners, each emitting one deterministic CSV artifact:

  exact-solution suite   manufactured-solution errors and convergence orders
  uniqueness             interior differences between exhaustion ramps versus
                         the interior-area envelope, per truncation radius R
  q-sweep                Q quadrature against its analytic bound over a grid
                         of cutoff parameters
  boundary-layer         width of the near-boundary disturbance versus time

Runners return result objects holding the rows they wrote so callers can
assert on values without re-reading files.  Sweep points are dispatched to a
process pool when jobs > 1; workers exchange plain arrays only (boundary
schedules hold closures, which do not pickle), and the parent assembles the
CSV after all workers finish.
"""

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import ExperimentConfig
from .cutoff import CutoffSpec, _q_integral_beta, compute_Q
from .estimates import interior_area_verify
from .geometry import (
    BigBang,
    ConformalState,
    Cusp,
    FlatDisc,
    LogPolarGrid,
    model_factor,
    model_state,
)
from .snapshots import write_rows_csv
from .solver import (
    BoundarySchedule,
    RunError,
    SolverConfig,
    StepFailure,
    Trajectory,
    evolve,
)

__all__ = [
    "ExactSuiteResult",
    "run_exact_solution_suite",
    "QSweepResult",
    "run_q_sweep",
    "UniquenessResult",
    "run_uniqueness_experiment",
    "matched_truncation_gauge",
    "BoundaryLayerResult",
    "run_boundary_layer_experiment",
]


def _map_tasks(fn, payloads, jobs):
    if jobs <= 1 or len(payloads) <= 1:
        return [fn(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=min(jobs, len(payloads))) as ex:
        return list(ex.map(fn, payloads))


# ---------------------------------------------------------- exact solutions

_SPATIAL_BASE = (0.1, 6.0, 151, 1.02)  # refined by midpoint insertion per level
_SPATIAL_DT = 2e-3
_SPATIAL_SPAN = (0.1, 0.35)
_TEMPORAL_GRID = (0.5, 3.0, 201)
_TEMPORAL_DTS = (0.05, 0.025, 0.0125, 0.00625)
_TEMPORAL_SPAN = (0.5, 1.0)
_STATIC_NS = (101, 201, 401)

_MODELS = {"bigbang": BigBang, "cusp": Cusp, "flatdisc": FlatDisc}


def _exact_task(task):
    """One refinement level of one study.  Returns a row dict; solver
    failures land in the status column and the suite continues."""
    kind, name, level = task[0], task[1], task[2]
    model = _MODELS[name]()
    try:
        if kind == "static":
            n = _STATIC_NS[level]
            grid = LogPolarGrid.graded(0.1, 6.0, n, 1.02)
            st0 = model_state(model, grid, 0.0)
            sched = BoundarySchedule.static(float(st0.values[0]), float(st0.values[-1]))
            traj = evolve(st0, sched, SolverConfig(dt=1e-3), 0.1)
            err = float(np.max(np.abs(traj.states[-1].values - st0.values)))
            return {"kind": kind, "model": name, "level": level, "n": n,
                    "dt": 1e-3, "h": float(np.min(np.diff(grid.nodes))),
                    "error": err, "status": "ok"}
        if kind == "spatial":
            s_lo, s_hi, n0, ratio = _SPATIAL_BASE
            grid = LogPolarGrid.graded(s_lo, s_hi, n0, ratio)
            for _ in range(level):
                grid = grid.refine()
            t0, T = _SPATIAL_SPAN
            sched = BoundarySchedule.from_model(model, s_lo, s_hi)
            traj = evolve(model_state(model, grid, t0), sched, SolverConfig(dt=_SPATIAL_DT), T)
            exact = model_factor(model, grid.nodes, T)
            err = float(np.max(np.abs(traj.states[-1].values - exact)) / np.max(exact))
            return {"kind": kind, "model": name, "level": level, "n": grid.n,
                    "dt": _SPATIAL_DT, "h": float(np.min(np.diff(grid.nodes))),
                    "error": err, "status": "ok"}
        # temporal: fixed grid, one run per dt; errors are successive
        # terminal differences computed by the parent after the merge
        s_lo, s_hi, n = _TEMPORAL_GRID
        dtv = _TEMPORAL_DTS[level]
        grid = LogPolarGrid.uniform(s_lo, s_hi, n)
        t0, T = _TEMPORAL_SPAN
        sched = BoundarySchedule.from_model(model, s_lo, s_hi)
        traj = evolve(model_state(model, grid, t0), sched, SolverConfig(dt=dtv), T)
        return {"kind": kind, "model": name, "level": level, "n": n,
                "dt": dtv, "h": dtv, "error": "",
                "terminal": traj.states[-1].values, "status": "ok"}
    except (RunError, StepFailure, ValueError) as exc:
        return {"kind": kind, "model": name, "level": level, "n": "", "dt": "",
                "h": "", "error": "", "status": f"failed: {exc}"}


@dataclass(frozen=True)
class ExactSuiteResult:
    rows: tuple
    orders: dict  # (model, kind) -> fitted slope of log error vs log h
    flat_max_error: float
    elapsed: float

    @property
    def passed(self) -> bool:
        if any(r["status"] != "ok" for r in self.rows if r["level"] != "fit"):
            return False
        if self.flat_max_error > 1e-10:
            return False
        for (model, kind), slope in self.orders.items():
            lo, hi = (1.7, 2.3) if kind == "spatial" else (0.8, 1.2)
            if not (lo <= slope <= hi):
                return False
        return True


def run_exact_solution_suite(config=None, out_dir=None, jobs: int = 1) -> ExactSuiteResult:
    """Convergence study against the closed-form flows.

    Spatial orders come from errors versus the exact factor over three nested
    grids (midpoint refinement keeps the grading shape fixed); temporal
    orders from successive terminal differences over dt halvings, which
    sidesteps both models being linear in t (backward Euler integrates the
    continuum part exactly there, so errors versus the exact factor would
    measure only the spatial term again).
    """
    started = time.time()
    tasks = []
    for level in range(len(_STATIC_NS)):
        tasks.append(("static", "flatdisc", level))
    for name in ("bigbang", "cusp"):
        for level in range(3):
            tasks.append(("spatial", name, level))
    for name in ("bigbang", "cusp"):
        for level in range(len(_TEMPORAL_DTS)):
            tasks.append(("temporal", name, level))
    raw = _map_tasks(_exact_task, tasks, jobs)

    rows, orders = [], {}
    flat_max = 0.0
    for key in ("static", "spatial", "temporal"):
        group_names = ["flatdisc"] if key == "static" else ["bigbang", "cusp"]
        for name in group_names:
            levels = [r for r in raw if r["kind"] == key and r["model"] == name]
            levels.sort(key=lambda r: r["level"])
            ok = [r for r in levels if r["status"] == "ok"]
            if key == "temporal":
                # diff of level j against level j+1, attached to the coarser dt
                for j in range(len(ok) - 1):
                    d = float(np.max(np.abs(ok[j + 1]["terminal"] - ok[j]["terminal"])))
                    ok[j]["error"] = d
                for r in levels:
                    r.pop("terminal", None)
            errs = [r["error"] for r in ok if r["error"] != ""]
            hs = [r["h"] for r in ok if r["error"] != ""]
            for j, r in enumerate(levels):
                prev = levels[j - 1] if j else None
                if (key != "static" and prev is not None
                        and r.get("error", "") != "" and prev.get("error", "") != ""):
                    r["order"] = math.log2(prev["error"] / r["error"])
                else:
                    r["order"] = ""
                rows.append(r)
            if key == "static":
                flat_max = max([flat_max] + errs)
            elif len(errs) >= 2:
                slope = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
                orders[(name, key)] = slope
                rows.append({"kind": key, "model": name, "level": "fit", "n": "",
                             "dt": "", "h": "", "error": "", "order": slope,
                             "status": "ok"})
    result = ExactSuiteResult(rows=tuple(rows), orders=orders,
                              flat_max_error=flat_max, elapsed=time.time() - started)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        payload = (config.config_hash if config is not None
                   else f"exact-suite|{_SPATIAL_BASE}|{_TEMPORAL_DTS}|{_STATIC_NS}")
        write_rows_csv(os.path.join(out_dir, "exact_suite.csv"),
                       ["kind", "model", "level", "n", "dt", "h", "error", "order", "status"],
                       rows, payload)
    return result


# ------------------------------------------------------------------ Q sweep

_Q_R0S = (0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9)
_Q_GAMMAS = (0.05, 0.15, 0.25, 0.35, 0.45)


def _q_task(point):
    r0, R, gamma = point
    row = {"r0": r0, "R": R, "gamma": gamma, "a": "", "S": "", "s0": "",
           "Q": "", "Q1": "", "Q2": "", "bound": "", "ratio": "",
           "quad_error": "", "split": "", "split_gap": "", "split_budget": "",
           "status": "ok"}
    try:
        spec = CutoffSpec(r0, R, gamma)
        rep = compute_Q(spec)
        row.update(a=spec.a, S=spec.S, s0=spec.s0, Q=rep.Q, Q1=rep.Q1, Q2=rep.Q2,
                   bound=rep.analytic_bound, ratio=rep.Q / rep.analytic_bound,
                   quad_error=rep.quadrature_error, split=int(rep.split_applied))
        if rep.split_applied:
            # independent single-range quadrature as a cross-check on the split
            whole, err_whole = _q_integral_beta(gamma, 1.0, 1.0 / spec.a)
            pref = (2.0 / spec.s0) / (-math.log(spec.a))
            row["split_gap"] = abs(pref * whole - (rep.Q1 + rep.Q2))
            row["split_budget"] = pref * err_whole + rep.quadrature_error + 1e-13
    except Exception as exc:  # quadrature failures recorded per row
        row["status"] = f"failed: {exc}"
    return row


@dataclass(frozen=True)
class QSweepResult:
    rows: tuple
    all_bounded: bool       # Q <= analytic bound in every ok row
    monotone_in_R: bool     # Q nonincreasing as R increases, per (r0, gamma)
    split_consistent: bool  # |Q_whole - (Q1+Q2)| within quadrature budget

    @property
    def passed(self) -> bool:
        ok = all(r["status"] == "ok" for r in self.rows)
        return ok and self.all_bounded and self.monotone_in_R and self.split_consistent


def run_q_sweep(config=None, out_dir=None, jobs: int = 1,
                r0_values=None, gamma_values=None, n_R: int = 6) -> QSweepResult:
    """Q against its analytic bound over a (r0, R, gamma) grid.

    The default mesh has 8 x 5 x 6 = 240 points.  R values are generated per
    r0 by halving S from just under its ceiling s0/3, so each (r0, gamma)
    group sweeps R toward 1 and deep-truncation rows exercise the split
    regime e^2 a < 1.
    """
    if r0_values is None:
        r0_values = (config.r0,) if config is not None else _Q_R0S
    if gamma_values is None:
        gamma_values = config.gamma_list if config is not None else _Q_GAMMAS
    points = []
    for r0 in r0_values:
        s0 = -math.log(r0)
        if config is not None and config.R_list and r0_values == (config.r0,):
            Rs = sorted(config.R_list)
        else:
            Rs = [math.exp(-0.98 * (s0 / 3.0) * 0.5 ** j) for j in range(n_R)]
        for gamma in gamma_values:
            for R in Rs:
                points.append((float(r0), float(R), float(gamma)))
    rows = _map_tasks(_q_task, points, jobs)

    ok_rows = [r for r in rows if r["status"] == "ok"]
    all_bounded = all(r["ratio"] <= 1.0 for r in ok_rows)
    monotone = True
    for r0 in r0_values:
        for gamma in gamma_values:
            qs = [r["Q"] for r in ok_rows
                  if r["r0"] == r0 and r["gamma"] == gamma]
            # rows were generated with R increasing inside each group
            if any(b > a * (1.0 + 1e-12) for a, b in zip(qs, qs[1:])):
                monotone = False
    split_ok = all(r["split_gap"] <= r["split_budget"]
                   for r in ok_rows if r["split"] == 1)
    result = QSweepResult(rows=tuple(rows), all_bounded=all_bounded,
                          monotone_in_R=monotone, split_consistent=split_ok)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        payload = (config.config_hash if config is not None
                   else f"q-sweep|{tuple(r0_values)}|{tuple(gamma_values)}|{n_R}")
        write_rows_csv(os.path.join(out_dir, "q_sweep.csv"),
                       ["r0", "R", "gamma", "a", "S", "s0", "Q", "Q1", "Q2",
                        "bound", "ratio", "quad_error", "split", "split_gap",
                        "split_budget", "status"],
                       rows, payload)
    return result


# -------------------------------------------------------------- uniqueness

def _uniq_task(payload):
    s_lo, s_hi, n, ratio, k, T, dt, samples = payload
    try:
        grid = LogPolarGrid.graded(s_lo, s_hi, int(n), ratio)
        st0 = model_state(FlatDisc(), grid, 0.0)
        sched = BoundarySchedule.ramp(float(st0.values[0]), k, float(st0.values[-1]))
        traj = evolve(st0, sched, SolverConfig(dt=dt), T, sample_times=samples)
        return {"ok": True, "k": k, "nodes": grid.nodes, "grading": ratio,
                "times": tuple(float(t) for t in traj.times),
                "values": np.stack([st.values for st in traj.states])}
    except (RunError, StepFailure, ValueError) as exc:
        return {"ok": False, "k": k, "error": str(exc)}


def _rebuild(run) -> Trajectory:
    """Trajectory from a worker's plain-array record (schedules hold closures
    and do not cross the process boundary, so the ramp is reattached here)."""
    grid = LogPolarGrid(run["nodes"], grading=run["grading"])
    states = tuple(ConformalState(grid, run["values"][i], run["times"][i])
                   for i in range(len(run["times"])))
    u0, u1 = float(run["values"][0][0]), float(run["values"][0][-1])
    sched = BoundarySchedule.ramp(u0, run["k"], u1)
    return Trajectory(states=states, schedule=sched, config=SolverConfig())


@dataclass(frozen=True)
class UniquenessResult:
    rows: tuple
    gauge: dict | None
    area_monotone_in_R: bool
    sup_monotone_in_R: bool
    all_certified: bool
    failures: tuple

    @property
    def passed(self) -> bool:
        ok = (self.all_certified and self.area_monotone_in_R
              and self.sup_monotone_in_R and not self.failures)
        if self.gauge is not None:
            ok = ok and self.gauge["passed"]
        return ok


def _nonincreasing(vals, rel=1e-9, floor=1e-12) -> bool:
    return all(b <= a * (1.0 + rel) + floor for a, b in zip(vals, vals[1:]))


def run_uniqueness_experiment(config: ExperimentConfig, out_dir=None,
                              jobs: int = 1, gauge: bool = True) -> UniquenessResult:
    """Interior differences between exhaustion ramps, per truncation R.

    Each R gets its own run window (the default grid floor is S/4), all
    ramps share the flat initial data and the pinned outer value, and every
    consecutive ramp pair is certified with the interior-area estimate.  The
    envelope column is the certificate right side raised to 1+gamma, i.e.
    the bound expressed in plain area units.
    """
    if len(config.ramps) < 2:
        raise ValueError("uniqueness experiment needs at least 2 ramps")
    if len(config.R_list) < 3:
        raise ValueError("uniqueness experiment needs at least 3 R values")
    Rs = sorted(config.R_list)
    samples = config.sample_times or tuple(
        (j + 1) * config.T / 5.0 for j in range(5))

    payloads = []
    for R in Rs:
        s_lo, s_hi = config.grid_bounds(R)
        for k in config.ramps:
            payloads.append((s_lo, s_hi, config.n, config.ratio,
                             float(k), config.T, config.dt, samples))
    raw = _map_tasks(_uniq_task, payloads, jobs)
    keys = [(R, j) for R in Rs for j in range(len(config.ramps))]
    runs = {}
    failures = []
    for key, rec in zip(keys, raw):
        if rec["ok"]:
            runs[key] = _rebuild(rec)
        else:
            failures.append(f"R={key[0]:g} k={rec['k']:g}: {rec['error']}")

    s0 = -math.log(config.r0)
    rows = []
    all_certified = True
    finals = {}  # (pair index, gamma) -> list of (R, area_diff, sup_diff)
    for R in Rs:
        S = -math.log(R)
        s_lo, _ = config.grid_bounds(R)
        for pair_idx in range(len(config.ramps) - 1):
            lo = runs.get((R, pair_idx))
            hi = runs.get((R, pair_idx + 1))
            if lo is None or hi is None:
                continue
            mask = lo.grid.nodes >= s0
            for gamma in config.gamma_list:
                try:
                    cert = interior_area_verify(lo, hi, config.r0, gamma, R=R)
                except ValueError as exc:
                    failures.append(f"R={R:g} pair={pair_idx} gamma={gamma:g}: {exc}")
                    all_certified = False
                    continue
                by_time = {r.time: r for r in cert.rows}
                for t in samples:
                    crow = by_time[float(t)]
                    sup_diff = float(np.max(np.abs(
                        hi.values_at(t)[mask] - lo.values_at(t)[mask])))
                    area_diff = crow.lhs ** (1.0 + gamma)
                    envelope = crow.rhs ** (1.0 + gamma)
                    passed = crow.margin >= 0.0
                    all_certified = all_certified and passed
                    rows.append({
                        "R": R, "S": S, "s_min": s_lo, "r0": config.r0,
                        "gamma": gamma, "k_lo": config.ramps[pair_idx],
                        "k_hi": config.ramps[pair_idx + 1], "t": float(t),
                        "sup_diff": sup_diff, "area_diff": area_diff,
                        "envelope": envelope, "margin": crow.margin,
                        "cert_pass": int(passed), "status": "ok",
                    })
                    if abs(t - samples[-1]) < 1e-12:
                        finals.setdefault((pair_idx, gamma), []).append(
                            (R, area_diff, sup_diff))

    area_monotone = all(
        _nonincreasing([a for _, a, _ in sorted(v)]) for v in finals.values())
    sup_monotone = all(
        _nonincreasing([d for _, _, d in sorted(v)]) for v in finals.values())

    gauge_row = matched_truncation_gauge() if gauge else None
    result = UniquenessResult(rows=tuple(rows), gauge=gauge_row,
                              area_monotone_in_R=area_monotone,
                              sup_monotone_in_R=sup_monotone,
                              all_certified=all_certified,
                              failures=tuple(failures))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_rows_csv(os.path.join(out_dir, "uniqueness.csv"),
                       ["R", "S", "s_min", "r0", "gamma", "k_lo", "k_hi", "t",
                        "sup_diff", "area_diff", "envelope", "margin",
                        "cert_pass", "status"],
                       rows, config.config_hash)
        if gauge_row is not None:
            write_rows_csv(os.path.join(out_dir, "uniqueness_gauge.csv"),
                           list(gauge_row.keys()),
                           [dict(gauge_row, passed=int(gauge_row["passed"]))],
                           config.config_hash)
    return result


def matched_truncation_gauge(k_lo: float = 1e3, k_hi: float = 1e4,
                             r0: float = 0.75, A: float = 1.0,
                             T: float = 0.1, n: int = 241, ratio: float = 1.02,
                             dt: float = 1e-3) -> dict:
    """Is the ramp choice visible above discretization error?

    Each ramp runs at its own matched truncation depth, the s where the ramp
    equals A times the big-bang boundary rate: k = A 2H(s) means
    s = asinh(sqrt(2A/k)).  With A = 1 the inner data is exactly the big-bang
    value once kt clears the flat floor, so both flows approximate the same
    complete flow and their interior gap is the exhaustion tail, not a fixed
    truncation effect.  (On a shared window the gap is O(0.5), two orders
    above discretization error: the two ramps then converge to different
    truncated flows and no resolution makes them agree.)

    The yardstick is the self-refinement error of the larger ramp: the same
    run on the midpoint-refined grid at half the step, restricted back to
    the coarse nodes.  The gauge passes when the terminal sup-difference on
    D_{r0} is below 10x that error.
    """
    depth_lo = math.asinh(math.sqrt(2.0 * A / k_lo))
    depth_hi = math.asinh(math.sqrt(2.0 * A / k_hi))
    base = LogPolarGrid.graded(depth_hi, 8.0, n, ratio).nodes
    # the shallower depth becomes an exact node so the two windows share nodes
    master = LogPolarGrid(np.sort(np.unique(np.concatenate([base, [depth_lo]]))))
    sub = master.restrict(depth_lo)
    st_hi = model_state(FlatDisc(), master, 0.0)
    st_lo = model_state(FlatDisc(), sub, 0.0)
    u_out = float(st_hi.values[-1])
    hi = evolve(st_hi, BoundarySchedule.ramp(float(st_hi.values[0]), k_hi, u_out),
                SolverConfig(dt=dt), T)
    lo = evolve(st_lo, BoundarySchedule.ramp(float(st_lo.values[0]), k_lo, u_out),
                SolverConfig(dt=dt), T)
    fine = master.refine()
    st_f = model_state(FlatDisc(), fine, 0.0)
    hif = evolve(st_f, BoundarySchedule.ramp(float(st_f.values[0]), k_hi, u_out),
                 SolverConfig(dt=0.5 * dt), T)
    s0 = -math.log(r0)
    on_sub = master.index_of(sub)
    m_sub = sub.nodes >= s0
    pair_diff = float(np.max(np.abs(
        hi.states[-1].values[on_sub] - lo.states[-1].values)[m_sub]))
    on_master = fine.index_of(master)
    m_master = master.nodes >= s0
    refine_err = float(np.max(np.abs(
        hif.states[-1].values[on_master] - hi.states[-1].values)[m_master]))
    return {"r0": r0, "A": A, "k_lo": k_lo, "k_hi": k_hi,
            "depth_lo": depth_lo, "depth_hi": depth_hi, "t": T,
            "pair_diff": pair_diff, "refine_err": refine_err,
            "threshold": 10.0 * refine_err,
            "passed": bool(pair_diff <= 10.0 * refine_err)}


# ----------------------------------------------------------- boundary layer

@dataclass(frozen=True)
class BoundaryLayerResult:
    rows: tuple
    exponent: float
    width_monotone: bool
    grid_floor: float

    @property
    def in_range(self) -> bool:
        # exploratory gate, reported but never build-failing
        return 0.35 <= self.exponent <= 0.65


def run_boundary_layer_experiment(config=None, out_dir=None, k: float | None = None,
                                  n_samples: int = 9) -> BoundaryLayerResult:
    """Width of the pumped-up region versus time for a large ramp.

    Width is measured as w(t) = s*(t) - s_min with s*(t) the largest node at
    which U exceeds the flat profile e^{-2s} by a factor of 2; the factor-2
    convention is a measurement choice, not a theorem.  The fitted exponent
    of w ~ c t^p over t in [1e-3, 1e-1] is the headline number.
    """
    if k is None:
        k = 3e5
        if config is not None and config.ramps and config.ramps[-1] >= 1e4:
            k = float(config.ramps[-1])
    s_min = 0.005 if config is None or config.s_min is None else config.s_min
    grid = LogPolarGrid.graded(s_min, 4.0, 301, 1.02)
    st0 = model_state(FlatDisc(), grid, 0.0)
    sched = BoundarySchedule.ramp(float(st0.values[0]), k, float(st0.values[-1]))
    samples = np.logspace(-3.0, -1.0, n_samples)
    traj = evolve(st0, sched, SolverConfig(dt=1e-4, dt_cap=2e-3), 0.1,
                  sample_times=samples)
    flat = np.exp(-2.0 * grid.nodes)
    rows = []
    widths, ts = [], []
    for st in traj.states[1:]:
        ratio = st.values / flat
        idx = np.nonzero(ratio >= 2.0)[0]
        s_star = float(grid.nodes[idx[-1]]) if idx.size else float(grid.s_min)
        w = s_star - float(grid.s_min)
        rows.append({"t": float(st.time), "s_star": s_star, "width": w})
        if w > 0.0:
            widths.append(w)
            ts.append(float(st.time))
    if len(widths) >= 2:
        exponent = float(np.polyfit(np.log(ts), np.log(widths), 1)[0])
    else:
        exponent = float("nan")
    monotone = all(b["width"] >= a["width"] for a, b in zip(rows, rows[1:]))
    result = BoundaryLayerResult(rows=tuple(rows), exponent=exponent,
                                 width_monotone=monotone,
                                 grid_floor=float(grid.nodes[1] - grid.nodes[0]))
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        payload = (config.config_hash if config is not None
                   else f"boundary-layer|k={k:g}|s_min={s_min:g}|{n_samples}")
        write_rows_csv(os.path.join(out_dir, "boundary_layer.csv"),
                       ["t", "s_star", "width"], rows, payload)
    return result
