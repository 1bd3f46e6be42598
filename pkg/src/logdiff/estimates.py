"""Certified inequality checks on pairs of conformal-factor trajectories.

Everything here consumes immutable trajectories and returns report objects
whose rows carry both sides of each inequality plus the margin rhs - lhs.
Sample times are processed independently, so reports merge trivially.

The tracked constants are assembled once per gamma:

    C      = 9/(32 log^2 2)                   inverse-square bound 1/U <= C s^2/t
    C*d    = gamma^{-1} (2 pi C^gamma)^{1/(1+gamma)}
    C*     = (1+gamma) C*d                    integrated form of the flux ODI
    C_Q    = a-uniform constant of the Q bound (see cutoff module)
    C_L    = C* C_Q^{1/(1+gamma)}             area-difference lemma constant
"""

import csv
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .cutoff import CutoffSpec, INV_SQUARE_CONSTANT, compute_Q, q_bound_constant
from .geometry import (
    _trapezoid_between,
    annulus_area,
    disc_area,
    gauss_curvature,
    hyperbolic_factor,
)
from .solver import Trajectory, check_order_preservation

__all__ = [
    "AreaCertificate",
    "BarrierReport",
    "CurvatureReport",
    "DjdtReport",
    "EstimateReport",
    "InequalityRow",
    "InverseBoundReport",
    "OdiReport",
    "c_star_diff",
    "c_star_int",
    "compute_J",
    "constants_table",
    "curvature_monotonicity_check",
    "djdt_identity_check",
    "full_report",
    "holder_check",
    "interior_area_verify",
    "lemma_constant",
    "lower_barrier_check",
    "main_odi_check",
    "pointwise_u_inverse_bound",
    "volume_excess_verify",
    "write_constants_csv",
]


# ----------------------------------------------------------------- constants


def c_star_diff(gamma: float) -> float:
    """gamma^{-1} (2 pi C^gamma)^{1/(1+gamma)}, C the inverse-square constant."""
    if not 0.0 < gamma < 1.0:
        raise ValueError("gamma must lie in (0, 1)")
    return (2.0 * math.pi * INV_SQUARE_CONSTANT**gamma) ** (1.0 / (1.0 + gamma)) / gamma


def c_star_int(gamma: float) -> float:
    """Constant of the integrated flux inequality, (1+gamma) times the ODI one."""
    return (1.0 + gamma) * c_star_diff(gamma)


def lemma_constant(gamma: float) -> float:
    """C_L = C* C_Q^{1/(1+gamma)}: area-difference bound with Q replaced by its
    analytic envelope C_Q/(s0 (log s0 - log S)^gamma)."""
    return c_star_int(gamma) * q_bound_constant(gamma) ** (1.0 / (1.0 + gamma))


def constants_table(gammas) -> list:
    """One dict per gamma with every tracked constant, for CSV export."""
    rows = []
    for g in gammas:
        rows.append(
            {
                "gamma": float(g),
                "inv_square_C": INV_SQUARE_CONSTANT,
                "C_Q": q_bound_constant(float(g)),
                "c_star_diff": c_star_diff(float(g)),
                "c_star_int": c_star_int(float(g)),
                "C_L": lemma_constant(float(g)),
            }
        )
    return rows


def _hash_comment(payload: str) -> str:
    return "# config-hash=" + hashlib.sha1(payload.encode()).hexdigest()[:12]


def write_constants_csv(path, gammas) -> None:
    rows = constants_table(gammas)
    fields = list(rows[0].keys())
    with open(path, "w", newline="") as fh:
        fh.write(_hash_comment("constants:" + ",".join(f"{g:.12g}" for g in gammas)) + "\n")
        writer = csv.DictWriter(fh, fieldnames=fields)
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) for k, v in row.items()})


# -------------------------------------------------------------- report types


@dataclass(frozen=True)
class InequalityRow:
    """One certified inequality at one sample time; pass means lhs <= rhs."""

    time: float
    inequality: str
    lhs: float
    rhs: float
    constants: str = ""

    @property
    def margin(self) -> float:
        return self.rhs - self.lhs


@dataclass(frozen=True)
class EstimateReport:
    rows: tuple
    meta: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.margin >= 0.0 for r in self.rows)

    def rows_for(self, inequality: str) -> tuple:
        return tuple(r for r in self.rows if r.inequality == inequality)

    @property
    def worst(self):
        return min(self.rows, key=lambda r: r.margin) if self.rows else None

    def write_csv(self, path) -> None:
        """One row per (sample time, inequality id); leading config-hash comment."""
        meta_str = ",".join(f"{k}={self.meta[k]}" for k in sorted(self.meta))
        with open(path, "w", newline="") as fh:
            fh.write(_hash_comment("estimates:" + meta_str) + "\n")
            writer = csv.writer(fh)
            writer.writerow(["time", "inequality", "lhs", "rhs", "margin", "constants"])
            for r in self.rows:
                writer.writerow(
                    [repr(r.time), r.inequality, repr(r.lhs), repr(r.rhs), repr(r.margin), r.constants]
                )


# ------------------------------------------------------------ pair plumbing


def _pair_arrays(traj_g: Trajectory, traj_G: Trajectory, t: float):
    if not np.array_equal(traj_g.grid.nodes, traj_G.grid.nodes):
        raise ValueError("trajectories live on incompatible grids")
    # state_at refuses interpolation, so an unsampled t fails loudly here
    return traj_g.grid.nodes, traj_g.state_at(t).values, traj_G.state_at(t).values


def _endpoint_slope(s: np.ndarray, w: np.ndarray, last: bool) -> float:
    # one-sided 3-point first derivative, nonuniform spacing
    if last:
        x0, x1, x2 = s[-3], s[-2], s[-1]
        w0, w1, w2 = w[-3], w[-2], w[-1]
        h1, h2 = x1 - x0, x2 - x1
        return float(
            w2 * (2.0 * h2 + h1) / (h2 * (h1 + h2)) - w1 * (h1 + h2) / (h1 * h2) + w0 * h2 / (h1 * (h1 + h2))
        )
    x0, x1, x2 = s[0], s[1], s[2]
    w0, w1, w2 = w[0], w[1], w[2]
    h1, h2 = x1 - x0, x2 - x1
    return float(
        -w0 * (2.0 * h1 + h2) / (h1 * (h1 + h2)) + w1 * (h1 + h2) / (h1 * h2) - w2 * h1 / (h2 * (h1 + h2))
    )


# ------------------------------------------------------------------- J(t)


def compute_J(traj_g, traj_G, cutoff: CutoffSpec, t: float, variant: str = "ordered") -> float:
    """J(t) = 2 pi int_S^{s_max} (V - U) phi ds, signed or positive-part.

    The ordered variant keeps the sign of V - U; positive_part clips at zero
    so the value is defined for crossing pairs too.
    """
    s, U, V = _pair_arrays(traj_g, traj_G, t)
    diff = V - U
    if variant == "positive_part":
        diff = np.maximum(diff, 0.0)
    elif variant != "ordered":
        raise ValueError("variant must be 'ordered' or 'positive_part'")
    s_lo = max(float(cutoff.S), float(s[0]))
    return 2.0 * math.pi * _trapezoid_between(s, diff * cutoff.value(s), s_lo, float(s[-1]))


@dataclass(frozen=True)
class DjdtReport:
    """Finite-difference dJ/dt against the integrated-by-parts identity.

    identity_rhs = phi2_integral + boundary_term; the boundary bracket
    [phi d_s(log V - log U) - phi' (log V - log U)] is always computed and
    reported, never assumed zero: truncation replaces the decay hypothesis
    that kills it on the untruncated domain.
    """

    time: float
    fd_djdt: float
    phi2_integral: float
    boundary_term: float

    @property
    def identity_rhs(self) -> float:
        return self.phi2_integral + self.boundary_term

    @property
    def discrepancy(self) -> float:
        return abs(self.fd_djdt - self.identity_rhs)


def djdt_identity_check(traj_g, traj_G, cutoff: CutoffSpec, t: float) -> DjdtReport:
    times = traj_g.times
    tb = traj_G.times
    if times.size != tb.size or not np.allclose(times, tb, rtol=1e-12, atol=1e-14):
        raise ValueError("trajectories have mismatched sample times")
    if times.size < 2:
        raise ValueError("need at least two sample times to difference J")
    traj_g.state_at(t)  # validates t is sampled
    i = int(np.argmin(np.abs(times - t)))

    def J(idx):
        return compute_J(traj_g, traj_G, cutoff, float(times[idx]))

    if 0 < i < times.size - 1:
        fd = (J(i + 1) - J(i - 1)) / (times[i + 1] - times[i - 1])
    elif i == 0:
        fd = (J(1) - J(0)) / (times[1] - times[0])
    else:
        fd = (J(i) - J(i - 1)) / (times[i] - times[i - 1])

    s, U, V = _pair_arrays(traj_g, traj_G, t)
    dw = np.log(V) - np.log(U)
    s_lo = max(float(cutoff.S), float(s[0]))
    s_hi = float(s[-1])

    # phi'' jumps across the cut-off knots (C^1 gluing only) and point
    # evaluation at a knot picks one branch; composite midpoint per piece
    # never touches the branch points, unlike trapezoid, whose h/2 endpoint
    # weight turns the f''(2-) jump into an O(h) error
    pieces = [s_lo] + [float(k) for k in cutoff.knots_s() if s_lo < k < s_hi] + [s_hi]
    phi2 = 0.0
    for lo, hi in zip(pieces, pieces[1:]):
        x = np.linspace(lo, hi, 513)
        mids = 0.5 * (x[:-1] + x[1:])
        phi2 += float(np.sum(np.interp(mids, s, dw) * cutoff.second_deriv(mids) * np.diff(x)))
    phi2 *= 2.0 * math.pi

    def bracket(last):
        idx = -1 if last else 0
        sp = float(cutoff.value(s[idx]))
        spd = float(cutoff.deriv(s[idx]))
        return sp * _endpoint_slope(s, dw, last) - spd * float(dw[idx])

    boundary = 2.0 * math.pi * (bracket(True) - bracket(False))
    return DjdtReport(time=float(t), fd_djdt=fd, phi2_integral=phi2, boundary_term=boundary)


# ------------------------------------------------------------ barrier bounds


@dataclass(frozen=True)
class BarrierReport:
    times: tuple
    margins: tuple

    @property
    def min_margin(self) -> float:
        return min(self.margins)


def lower_barrier_check(
    traj: Trajectory, s_from: float | None = None, s_to: float | None = None
) -> BarrierReport:
    """Per-time margin min over nodes of U - 2 t H(s), H = 1/sinh^2.

    s_from/s_to restrict the node range: finite-ramp exhaustion flows lose the
    barrier near the inner boundary when the ramp does not dominate 2 t H,
    while the certificate chain only consumes it on the cut-off support.
    """
    s = traj.grid.nodes
    mask = np.ones(s.size, dtype=bool)
    if s_from is not None:
        mask &= s >= s_from
    if s_to is not None:
        mask &= s <= s_to
    if not np.any(mask):
        raise ValueError("node restriction leaves no grid nodes")
    H = hyperbolic_factor(s[mask])
    times, margins = [], []
    for st in traj.states:
        times.append(st.time)
        margins.append(float(np.min(st.values[mask] - 2.0 * st.time * H)))
    return BarrierReport(times=tuple(times), margins=tuple(margins))


@dataclass(frozen=True)
class InverseBoundReport:
    time: float
    s0: float
    precondition_ok: bool
    barrier_min: float
    margin: float | None


def pointwise_u_inverse_bound(
    traj: Trajectory, t: float, s0: float = math.log(2.0), barrier_tol: float = 1e-9
) -> InverseBoundReport:
    """Margin of 1/U <= C s^2/t on nodes in (0, s0), C = 9/(32 log^2 2).

    Requires the lower barrier to hold (up to barrier_tol, scaled) on the
    whole trajectory; otherwise the bound is not asserted and margin is None.
    """
    if s0 > math.log(2.0) + 1e-12:
        raise ValueError("s0 must not exceed log 2")
    if t <= 0.0:
        raise ValueError("bound is vacuous at t <= 0")
    # the bound is claimed on (0, s0), so that is where the barrier must hold
    barrier = lower_barrier_check(traj, s_to=s0)
    scale = max(1.0, float(np.max(traj.states[0].values)))
    bm = barrier.min_margin
    if bm < -barrier_tol * scale:
        return InverseBoundReport(float(t), s0, False, bm, None)
    st = traj.state_at(t)
    s = traj.grid.nodes
    mask = (s > 0.0) & (s < s0)
    if not np.any(mask):
        raise ValueError("no grid nodes below s0")
    rhs = INV_SQUARE_CONSTANT * s[mask] ** 2 / t
    margin = float(np.min(rhs - 1.0 / st.values[mask]))
    return InverseBoundReport(float(t), s0, True, bm, margin)


# ------------------------------------------------------------------ main ODI


@dataclass(frozen=True)
class OdiReport:
    rows: tuple
    gamma: float
    Q: float
    c_star: float
    J_values: tuple

    @property
    def passed(self) -> bool:
        return all(r.margin >= 0.0 for r in self.rows)


def main_odi_check(traj_g, traj_G, cutoff: CutoffSpec) -> OdiReport:
    """Integrated flux inequality between consecutive sample times:

        J^p(t2) - J^p(t1) <= C* (t2^p - t1^p) Q^p,   p = 1/(1+gamma).

    Refuses unordered pairs; those belong to volume_excess_verify.
    """
    order = check_order_preservation(traj_g, traj_G)
    if not order.ordered:
        raise ValueError("pair is not ordered; use volume_excess_verify")
    gamma = cutoff.gamma
    p = 1.0 / (1.0 + gamma)
    Q = compute_Q(cutoff).Q
    cs = c_star_int(gamma)
    times = traj_g.times
    Js = tuple(compute_J(traj_g, traj_G, cutoff, float(t)) for t in times)
    tag = f"gamma={gamma:g} C*={cs:.8g} Q={Q:.8g}"
    rows = []
    for k in range(times.size - 1):
        t1, t2 = float(times[k]), float(times[k + 1])
        # tiny negative J from quadrature noise on near-identical pairs
        lhs = max(Js[k + 1], 0.0) ** p - max(Js[k], 0.0) ** p
        rhs = cs * (t2**p - t1**p) * Q**p
        rows.append(InequalityRow(time=t2, inequality="main-odi", lhs=lhs, rhs=rhs, constants=tag))
    return OdiReport(rows=tuple(rows), gamma=gamma, Q=Q, c_star=cs, J_values=Js)


def holder_check(traj_g, traj_G, cutoff: CutoffSpec, t: float) -> InequalityRow:
    """Discrete Hoelder step: with f = ((V-U) phi)^{gamma/(1+gamma)} and
    g = |phi''| (phi U)^{-gamma/(1+gamma)}, the weighted sum of f g is at most
    the product of the conjugate-power factor sums.  Pure finite-sum Hoelder,
    so it must hold for any ordered data; checking it guards the quadrature
    arithmetic used by the ODI."""
    s, U, V = _pair_arrays(traj_g, traj_G, t)
    gamma = cutoff.gamma
    q = gamma / (1.0 + gamma)
    phi = cutoff.value(s)
    phi2 = np.abs(cutoff.second_deriv(s))
    diff = np.maximum(V - U, 0.0)
    w = np.zeros_like(s)  # trapezoid weights
    w[1:] += 0.5 * np.diff(s)
    w[:-1] += 0.5 * np.diff(s)
    f = (diff * phi) ** q
    # phi'' and phi share support boundaries; build g only where both live
    live = (phi2 > 0.0) & (phi > 0.0)
    g = np.zeros_like(s)
    g[live] = phi2[live] * (phi[live] * U[live]) ** (-q)
    g2 = np.zeros_like(s)
    g2[live] = phi2[live] ** (1.0 + gamma) * (phi[live] * U[live]) ** (-gamma)
    lhs = float(np.sum(w * f * g))
    fac1 = float(np.sum(w * diff * phi)) ** q
    fac2 = float(np.sum(w * g2)) ** (1.0 / (1.0 + gamma))
    return InequalityRow(time=float(t), inequality="holder", lhs=lhs, rhs=fac1 * fac2, constants=f"gamma={gamma:g}")


# ------------------------------------------------------- area certificates


def _default_R(grid) -> float:
    # inverts the default truncation rule s_min = S/4
    return math.exp(-4.0 * grid.s_min)


def _positive_part_area(s, U, V, s_lo: float) -> float:
    # 2 pi int (V-U)_+ over {s >= s_lo} with the same tail convention as disc_area
    d = np.maximum(V - U, 0.0)
    lo = max(float(s_lo), float(s[0]))
    if lo > float(s[-1]):
        raise ValueError("region lies outside the grid")
    return 2.0 * math.pi * _trapezoid_between(s, d, lo, float(s[-1])) + math.pi * float(d[-1])


@dataclass(frozen=True)
class AreaCertificate:
    rows: tuple
    r0: float
    R: float
    gamma: float
    constant: float
    initial_term: float

    @property
    def passed(self) -> bool:
        return all(r.margin >= 0.0 for r in self.rows)


def _area_certificate(traj_g, traj_G, r0, gamma, R, positive_part: bool, label: str) -> AreaCertificate:
    if not np.array_equal(traj_g.grid.nodes, traj_G.grid.nodes):
        raise ValueError("trajectories live on incompatible grids")
    ta, tb = traj_g.times, traj_G.times
    if ta.size != tb.size or not np.allclose(ta, tb, rtol=1e-12, atol=1e-14):
        raise ValueError("trajectories have mismatched sample times")
    if R is None:
        R = _default_R(traj_g.grid)
    spec = CutoffSpec(r0, R, gamma)  # validates every parameter range
    p = 1.0 / (1.0 + gamma)
    cl = lemma_constant(gamma)
    denom = spec.s0 * (math.log(spec.s0) - math.log(spec.S)) ** gamma
    s = traj_g.grid.nodes
    g0, G0 = traj_g.states[0], traj_G.states[0]
    if positive_part:
        init = _positive_part_area(s, g0.values, G0.values, spec.S)
    else:
        init = max(disc_area(G0, R) - disc_area(g0, R), 0.0)
    init_term = init**p
    tag = f"gamma={gamma:g} C_L={cl:.8g} R={R:.8g}"
    rows = []
    for st_g, st_G in zip(traj_g.states, traj_G.states):
        t = st_g.time
        if positive_part:
            vol = _positive_part_area(s, st_g.values, st_G.values, spec.s0)
        else:
            vol = max(disc_area(st_G, r0) - disc_area(st_g, r0), 0.0)
        lhs = vol**p
        rhs = init_term + cl * (t / denom) ** p
        rows.append(InequalityRow(time=float(t), inequality=label, lhs=lhs, rhs=rhs, constants=tag))
    return AreaCertificate(
        rows=tuple(rows), r0=float(r0), R=float(R), gamma=float(gamma), constant=cl, initial_term=init_term
    )


def interior_area_verify(traj_g, traj_G, r0: float, gamma: float, R: float | None = None) -> AreaCertificate:
    """Area-difference certificate over the disc D_{r0}:

        [Vol_G D_{r0} - Vol_g D_{r0}]^p <= [Vol_G(0) D_R - Vol_g(0) D_R]^p
                                           + C_L [t/(s0 (log s0 - log S)^gamma)]^p

    with p = 1/(1+gamma).  Requires an ordered pair; R defaults to the value
    implied by the grid's truncation depth via s_min = S/4.
    """
    order = check_order_preservation(traj_g, traj_G)
    if not order.ordered:
        raise ValueError("pair is not ordered; use volume_excess_verify")
    return _area_certificate(traj_g, traj_G, r0, gamma, R, positive_part=False, label="interior-area")


def volume_excess_verify(traj_g, traj_G, r0: float, gamma: float, R: float | None = None) -> AreaCertificate:
    """Positive-part variant of interior_area_verify: the volume excess
    2 pi int (V-U)_+ over D_{r0} obeys the same bound without any ordering
    hypothesis.  For ordered pairs it reduces to interior_area_verify."""
    return _area_certificate(traj_g, traj_G, r0, gamma, R, positive_part=True, label="volume-excess")


# ------------------------------------------------- damped-factor monotonicity


@dataclass(frozen=True)
class CurvatureReport:
    min_curvature: float
    precondition_ok: bool
    monotone: bool | None
    max_increase: float | None
    tolerance: float


def curvature_monotonicity_check(
    traj: Trajectory, curvature_tol: float = 1e-6, monotone_tol: float | None = None
) -> CurvatureReport:
    """If K >= -1 at every sampled state, verify e^{-2t} U is nonincreasing in
    t at every node.  A curvature dip below -1 - curvature_tol gates the check
    off (reported, not asserted)."""
    kmin = min(float(np.min(gauss_curvature(st))) for st in traj.states)
    if kmin < -1.0 - curvature_tol:
        return CurvatureReport(kmin, False, None, None, curvature_tol)
    if monotone_tol is None:
        scale = max(1.0, float(np.max(traj.states[0].values)))
        monotone_tol = 10.0 * traj.config.newton_tol * scale
    worst = -math.inf
    prev = None
    for st in traj.states:
        damped = math.exp(-2.0 * st.time) * st.values
        if prev is not None:
            worst = max(worst, float(np.max(damped - prev)))
        prev = damped
    return CurvatureReport(kmin, True, worst <= monotone_tol, worst, monotone_tol)


# ------------------------------------------------------------- full report


def full_report(traj_g, traj_G, cutoff: CutoffSpec) -> EstimateReport:
    """Run every certificate that applies to the pair and pack the rows.

    Ordered pairs get the J invariants, the ODI, and the interior-area
    certificate; crossing pairs fall back to the positive-part variants.
    Curvature monotonicity is included only when its precondition holds.
    """
    order = check_order_preservation(traj_g, traj_G)
    gamma = cutoff.gamma
    rows = []
    times = [float(t) for t in traj_g.times]

    if order.ordered:
        s0_disc = -math.log(cutoff.r0)
        s_hi = traj_g.grid.s_max
        for t in times:
            J = compute_J(traj_g, traj_G, cutoff, t)
            rows.append(InequalityRow(t, "J-nonnegative", 0.0, J))
            # truncated disc areas: tails cancel identically from both sides
            diff = annulus_area(traj_G.state_at(t), s0_disc, s_hi) - annulus_area(
                traj_g.state_at(t), s0_disc, s_hi
            )
            rows.append(InequalityRow(t, "area-diff-below-J", diff, J))
        odi = main_odi_check(traj_g, traj_G, cutoff)
        rows.extend(odi.rows)
        rows.extend(interior_area_verify(traj_g, traj_G, cutoff.r0, gamma, cutoff.R).rows)
    rows.extend(volume_excess_verify(traj_g, traj_G, cutoff.r0, gamma, cutoff.R).rows)

    # the chain only consumes the barrier on the cut-off support [S, s_max]
    barrier = lower_barrier_check(traj_g, s_from=cutoff.S)
    for t, m in zip(barrier.times, barrier.margins):
        rows.append(InequalityRow(float(t), "lower-barrier", -m, 0.0, constants=f"s>={cutoff.S:g}"))

    s = traj_g.grid.nodes
    if np.any((s > 0.0) & (s < math.log(2.0))):
        for t in times:
            if t > 0.0:
                rep = pointwise_u_inverse_bound(traj_g, t)
                if rep.precondition_ok:
                    rows.append(InequalityRow(t, "u-inverse-bound", -rep.margin, 0.0))

    Jt = {t: compute_J(traj_g, traj_G, cutoff, t) for t in times}
    for k in range(1, len(times) - 1):
        t = times[k]
        rep = djdt_identity_check(traj_g, traj_G, cutoff, t)
        scale = abs(rep.fd_djdt) + abs(rep.phi2_integral) + abs(rep.boundary_term)
        # forward/backward slope disagreement measures the time-differencing
        # error that centered FD leaves in; quadrature gets the 5% of scale
        fwd = (Jt[times[k + 1]] - Jt[t]) / (times[k + 1] - t)
        bwd = (Jt[t] - Jt[times[k - 1]]) / (t - times[k - 1])
        budget = 0.05 * scale + 0.5 * abs(fwd - bwd) + 1e-8
        rows.append(InequalityRow(t, "djdt-identity", rep.discrepancy, budget))

    for name, traj in (("g", traj_g), ("G", traj_G)):
        rep = curvature_monotonicity_check(traj)
        if rep.precondition_ok:
            rows.append(
                InequalityRow(times[-1], f"damped-monotone-{name}", rep.max_increase, rep.tolerance)
            )

    Q = compute_Q(cutoff)
    meta = {
        "r0": cutoff.r0,
        "R": cutoff.R,
        "gamma": gamma,
        "Q": Q.Q,
        "Q_bound": Q.analytic_bound,
        "C_L": lemma_constant(gamma),
        "ordered": order.ordered,
    }
    return EstimateReport(rows=tuple(rows), meta=meta)
