"""Numerical maximization over the constraint surface.

`maximize_d` runs a multi-start projected gradient ascent for the
exponential functional under ||grad u||_N^a + ||u||_N^b = 1.  Every
profile it ever evaluates is feasible (projected onto the constraint by
amplitude rescaling), so the reported best value is a certified lower
bound for the supremum; the supremum itself is never claimed.

The restart families mirror the competing compactness modes:

* localized bumps (Gaussian / exponential), the generic interior starts;
* the vanishing family: deeply spread, constraint-normalized dilations,
  which realize the universal lower bound alpha^{N-1}/(N-1)! in the
  spread limit;
* truncated-logarithm concentrators, the critical-growth bubbles;
* the two-parameter family built on a numerically computed
  Gagliardo-Nirenberg maximizer, which is what certifies attainment
  near a = N'.

Each ascent step preconditions the nodal gradient by the radial masses
(so the direction is a function-space gradient, monotone for monotone
iterates), projects back onto the monotone cone and the constraint, and
is accepted only if the objective improves.  A dilation line search
along t -> beta_star(t) u_t finishes each restart, since a plain nodal
ascent is slow to translate profiles across scales.

`maximize_gn` runs the analogous ascent for the scale-invariant
Gagliardo-Nirenberg ratio and returns a maximizer normalized to
||grad V||_N = 1 = ||V||_N.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import gammaln

from .errors import (
    DegenerateProfileError,
    GridOverflowError,
    InvalidParameterError,
    SeriesOverflowError,
)
from .functional import (
    DEFAULT_SERIES,
    MTParams,
    SeriesControl,
    _phi_tail,
    mt_integral,
)
from .radial import (
    RadialGrid,
    RadialProfile,
    build_grid,
    decreasing_rearrangement,
    grad_norm_pow,
    grad_norm_pow_gradient,
    lp_norm_pow,
)
from .scaling import dilate, gn_two_parameter_family, solve_amplitude

__all__ = [
    "MaximizeOptions",
    "MaximizerReport",
    "GNOptions",
    "GNReport",
    "functional_gradient",
    "project_to_constraint",
    "maximize_d",
    "maximize_gn",
    "gn_ratio",
    "diagnose_mode",
]


def universal_lower_bound_value(alpha: float, N: int) -> float:
    """alpha^{N-1} / (N-1)!, the vanishing-family limit of the objective."""
    return float(alpha ** (N - 1) / np.exp(gammaln(N)))


@dataclass(frozen=True)
class MaximizeOptions:
    """Grid, restart and stopping policy for maximize_d."""

    r_max: float = 40.0
    n_nodes: int = 512
    scheme: str = "composite-gauss"
    cell_order: int = 3
    grading: float = 1.05
    restarts: int = 12
    seed: int = 1
    max_iters: int = 300
    stall_iters: int = 25
    stall_rtol: float = 1e-9
    grad_tol: float = 1e-8
    margin_tol: float = 1e-6
    vanish_eps: float = 0.05
    conc_eps: float = 0.05
    concentration_guard: float = 0.999
    threads: int = 1
    series: SeriesControl = DEFAULT_SERIES
    allow_infinite_regime: bool = False
    dilation_scan: bool = True


@dataclass(frozen=True)
class MaximizerReport:
    """Outcome of one maximize_d run.  best_value is a certified lower bound."""

    params: MTParams
    best_value: float
    best_profile: RadialProfile
    norm_split: tuple[float, float]
    lower_bound: float
    margin: float
    exceeds_lower_bound: bool
    mode_diagnostic: str
    iterations: int
    restarts: int
    seed: int
    restart_values: tuple[float, ...]
    grid_meta: dict

    def to_json_dict(self) -> dict:
        return {
            "params": self.params.as_dict(),
            "best_value": self.best_value,
            "lower_bound": self.lower_bound,
            "margin": self.margin,
            "exceeds_lower_bound": self.exceeds_lower_bound,
            "norm_split": {"grad_norm": self.norm_split[0], "norm": self.norm_split[1]},
            "mode": self.mode_diagnostic,
            "iterations": self.iterations,
            "restarts": self.restarts,
            "seed": self.seed,
            "restart_values": [v if np.isfinite(v) else None for v in self.restart_values],
            "grid": self.grid_meta,
        }


def functional_gradient(u: RadialProfile, p: MTParams, ctl: SeriesControl = DEFAULT_SERIES) -> np.ndarray:
    """Nodal gradient of the discretized objective.

    Component i is d/du_i of omega sum_k m_k Phi_N(alpha u_k^{N'}), i.e.
    omega m_i alpha N' u_i^{N'-1} sum_{j >= N-2} (alpha u_i^{N'})^j / j!.
    """
    if u.grid.N != p.N:
        raise InvalidParameterError("profile grid dimension does not match params")
    t = p.alpha * u.values ** p.n_prime
    if np.any(t > 700.0):
        raise SeriesOverflowError("gradient argument exceeds the floating range of e^t")
    tail = _phi_tail(t, p.N - 2, ctl)
    return u.grid.omega * u.grid.mass * p.alpha * p.n_prime * u.values ** (p.n_prime - 1.0) * tail


def project_to_constraint(u: RadialProfile, p: MTParams) -> RadialProfile:
    """Clip, rearrange into the monotone cone, rescale onto the constraint."""
    values = np.maximum(u.values, 0.0)
    if not np.any(values):
        raise DegenerateProfileError("cannot project the zero profile onto the constraint")
    prof = decreasing_rearrangement(RadialProfile(u.grid, values))
    g_term = grad_norm_pow(prof) ** (p.a / p.N)
    l_term = lp_norm_pow(prof, p.N) ** (p.b / p.N)
    beta = solve_amplitude(g_term, l_term, p.a, p.b)
    return prof.scaled(beta)


def _grad_share(u: RadialProfile, p: MTParams) -> float:
    return grad_norm_pow(u) ** (p.a / p.N)


def _mode_label(u: RadialProfile, p: MTParams, eps_v: float, eps_c: float) -> str:
    norm_share = lp_norm_pow(u, p.N) ** (p.b / p.N)
    grad_share = _grad_share(u, p)
    if norm_share > 1.0 - eps_v:
        return "near-vanishing"
    if grad_share > 1.0 - eps_c:
        return "near-concentration"
    return "interior"


def diagnose_mode(report: "MaximizerReport", eps_v: float = 0.05, eps_c: float = 0.05) -> str:
    """Classify the best profile: near-vanishing, near-concentration or interior."""
    return _mode_label(report.best_profile, report.params, eps_v, eps_c)


def _dilation_line_search(u: RadialProfile, p: MTParams, value: float, ctl: SeriesControl):
    """Best beta_star(t) u_t over a geometric t scan with local refinement."""
    best_value, best_profile = value, u
    ts = np.geomspace(1e-4, 1e4, 33)
    scan_vals = []
    for t in ts:
        try:
            prof = project_to_constraint(dilate(u, float(t)), p)
            val = mt_integral(prof, p, ctl)
        except (SeriesOverflowError, DegenerateProfileError, InvalidParameterError, GridOverflowError):
            scan_vals.append(-np.inf)
            continue
        scan_vals.append(val)
        if val > best_value:
            best_value, best_profile = val, prof
    # golden-section refinement around the best scan point
    k = int(np.argmax(scan_vals)) if scan_vals else -1
    if k >= 0 and np.isfinite(scan_vals[k]):
        lo = ts[max(k - 1, 0)]
        hi = ts[min(k + 1, len(ts) - 1)]
        phi_g = (np.sqrt(5.0) - 1.0) / 2.0
        a_, b_ = np.log(lo), np.log(hi)
        x1 = b_ - phi_g * (b_ - a_)
        x2 = a_ + phi_g * (b_ - a_)

        def val_at(x):
            try:
                prof = project_to_constraint(dilate(u, float(np.exp(x))), p)
                return mt_integral(prof, p, ctl), prof
            except (SeriesOverflowError, DegenerateProfileError, InvalidParameterError, GridOverflowError):
                return -np.inf, None

        f1, p1 = val_at(x1)
        f2, p2 = val_at(x2)
        for _ in range(40):
            if f1 >= f2:
                b_, x2, f2, p2 = x2, x1, f1, p1
                x1 = b_ - phi_g * (b_ - a_)
                f1, p1 = val_at(x1)
            else:
                a_, x1, f1, p1 = x1, x2, f2, p2
                x2 = a_ + phi_g * (b_ - a_)
                f2, p2 = val_at(x2)
            if b_ - a_ < 1e-10:
                break
        for fv, pv in ((f1, p1), (f2, p2)):
            if pv is not None and fv > best_value:
                best_value, best_profile = fv, pv
    return best_value, best_profile


def _ascend(start: RadialProfile, p: MTParams, opts: MaximizeOptions):
    """Projected gradient ascent from one start; returns (value, profile, iters)."""
    ctl = opts.series
    u = project_to_constraint(start, p)
    value = mt_integral(u, p, ctl)
    history = [value]
    eta = 0.25
    iters = 0
    for _ in range(opts.max_iters):
        iters += 1
        g = functional_gradient(u, p, ctl)
        direction = g / (u.grid.omega * u.grid.mass)
        dmax = float(np.max(np.abs(direction)))
        if dmax < opts.grad_tol:
            break
        umax = float(np.max(u.values))
        step_scale = umax / dmax if dmax > 0 else 0.0
        improved = False
        for _bt in range(25):
            trial = RadialProfile(u.grid, u.values + eta * step_scale * direction)
            try:
                prof = project_to_constraint(trial, p)
                val = mt_integral(prof, p, ctl)
            except (SeriesOverflowError, DegenerateProfileError):
                eta *= 0.4
                continue
            if val > value:
                u, value = prof, val
                eta = min(eta * 1.4, 4.0)
                improved = True
                break
            eta *= 0.4
        if not improved:
            break
        if p.is_critical and _grad_share(u, p) > opts.concentration_guard:
            break
        history.append(value)
        if len(history) > opts.stall_iters:
            if value - history[-opts.stall_iters - 1] < opts.stall_rtol * max(1.0, value):
                break
    if opts.dilation_scan:
        value, u = _dilation_line_search(u, p, value, ctl)
    return value, u, iters


def _gaussian(grid: RadialGrid, width: float) -> RadialProfile:
    return RadialProfile(grid, np.exp(-((grid.nodes / width) ** 2)))


def _exponential(grid: RadialGrid, width: float) -> RadialProfile:
    return RadialProfile(grid, np.exp(-grid.nodes / width))


def _moser_bubble(grid: RadialGrid, eps: float, outer: float) -> RadialProfile:
    r = grid.nodes
    vals = np.where(r <= eps, np.log(outer / eps), np.log(outer / np.maximum(r, 1e-300)))
    return RadialProfile(grid, np.maximum(vals, 0.0))


def _vanishing(grid: RadialGrid, p: MTParams, depth: float) -> RadialProfile:
    """Spread profile whose gradient constraint share is ~depth, any (a, N).

    The dilation parameter enters the constraint as t^{a/N}, so the depth
    is converted through the exponent N/a and clipped so the rescaled
    grid stays inside the configured radial bounds.
    """
    base = project_to_constraint(_gaussian(grid, grid.r_max / 8.0), p)
    t = depth ** (p.N / p.a)
    from .radial import MAX_RADIUS

    t_min = (grid.r_max / (0.5 * MAX_RADIUS)) ** p.N
    return dilate(base, max(t, t_min))


def _candidate_starts(p: MTParams, opts: MaximizeOptions, grid: RadialGrid, gn_profile, rng):
    scale = min(grid.r_max / 8.0, 2.0)
    builders = [
        lambda: _vanishing(grid, p, 1e-8),
        lambda: _gaussian(grid, scale),
        lambda: (gn_two_parameter_family(gn_profile, 0.9, p) if gn_profile is not None else _gaussian(grid, 2.0 * scale)),
        lambda: _moser_bubble(grid, 1e-4 * grid.r_max, grid.r_max / 4.0),
        lambda: _exponential(grid, scale),
        lambda: (gn_two_parameter_family(gn_profile, 0.99, p) if gn_profile is not None else _exponential(grid, 0.5 * scale)),
        lambda: _vanishing(grid, p, 1e-13),
        lambda: _gaussian(grid, 0.4 * scale),
        lambda: (gn_two_parameter_family(gn_profile, 0.5, p) if gn_profile is not None else _gaussian(grid, 3.0 * scale)),
        lambda: _moser_bubble(grid, 1e-2 * grid.r_max, grid.r_max / 4.0),
        lambda: _gaussian(grid, 2.5 * scale),
        lambda: _vanishing(grid, p, 1e-4),
    ]
    starts = []
    for build in builders[: opts.restarts]:
        starts.append(build())
    while len(starts) < opts.restarts:
        widths = 10.0 ** rng.uniform(-1.0, 1.0, size=3) * scale
        weights = rng.uniform(0.2, 1.0, size=3)
        vals = np.zeros_like(grid.nodes)
        for wdt, amp in zip(widths, weights):
            vals += amp * np.exp(-((grid.nodes / wdt) ** 2))
        starts.append(RadialProfile(grid, vals))
    return starts


_GN_CACHE: dict = {}


def maximize_d(
    p: MTParams,
    opts: MaximizeOptions | None = None,
    extra_candidates: Sequence[RadialProfile] = (),
) -> MaximizerReport:
    """Multi-start maximization; reports a certified lower bound for the supremum."""
    opts = opts or MaximizeOptions()
    if p.is_critical and p.b >= p.N and not opts.allow_infinite_regime:
        raise InvalidParameterError(
            "alpha = alpha_N with b >= N is the infinite-supremum regime; "
            "pass allow_infinite_regime=True to evaluate anyway"
        )
    grid = build_grid(p.N, opts.r_max, opts.n_nodes, opts.scheme, opts.cell_order, opts.grading)
    rng = np.random.default_rng(np.random.SeedSequence(opts.seed))
    gn_profile = _cached_gn_profile(p.N, opts).maximizer_profile if opts.restarts >= 3 else None
    starts = _candidate_starts(p, opts, grid, gn_profile, rng)
    starts = list(starts) + [c for c in extra_candidates]

    def run(start):
        try:
            projected = project_to_constraint(start, p)
        except DegenerateProfileError:
            return (np.nan, None, 0)
        if p.is_critical and _grad_share(projected, p) > opts.concentration_guard:
            return (np.nan, None, 0)
        return _ascend(projected, p, opts)

    if opts.threads > 1:
        with ThreadPoolExecutor(max_workers=opts.threads) as pool:
            results = list(pool.map(run, starts))
    else:
        results = [run(s) for s in starts]

    best_idx = -1
    best_value = -np.inf
    for i, (val, prof, _) in enumerate(results):
        if prof is not None and val > best_value:
            best_value, best_idx = val, i
    if best_idx < 0:
        raise DegenerateProfileError("all restarts were rejected; no feasible profile evaluated")
    best_profile = results[best_idx][1]
    total_iters = int(sum(r[2] for r in results))
    lower = universal_lower_bound_value(p.alpha, p.N)
    margin = best_value - lower
    grad_norm = grad_norm_pow(best_profile) ** (1.0 / p.N)
    norm = lp_norm_pow(best_profile, p.N) ** (1.0 / p.N)
    report = MaximizerReport(
        params=p,
        best_value=best_value,
        best_profile=best_profile,
        norm_split=(grad_norm, norm),
        lower_bound=lower,
        margin=margin,
        exceeds_lower_bound=margin > opts.margin_tol,
        mode_diagnostic=_mode_label(best_profile, p, opts.vanish_eps, opts.conc_eps),
        iterations=total_iters,
        restarts=len(starts),
        seed=opts.seed,
        restart_values=tuple(float(r[0]) for r in results),
        grid_meta={
            "r_max": opts.r_max,
            "n_nodes": opts.n_nodes,
            "scheme": opts.scheme,
            "cell_order": opts.cell_order,
        },
    )
    return report


# ---------------------------------------------------------------------------
# Gagliardo-Nirenberg best constant
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GNOptions:
    r_max: float = 30.0
    n_nodes: int = 1536
    cell_order: int = 3
    max_iters: int = 800
    seed: int = 1
    residual_tol: float = 1e-4


@dataclass(frozen=True)
class GNReport:
    """bgn_estimate is the ratio at a feasible profile: a true lower bound."""

    N: int
    bgn_estimate: float
    maximizer_profile: RadialProfile
    residual: float
    low_accuracy: bool
    iterations: int

    def to_json_dict(self) -> dict:
        return {
            "N": self.N,
            "bgn_estimate": self.bgn_estimate,
            "residual": self.residual,
            "low_accuracy": self.low_accuracy,
            "iterations": self.iterations,
        }


def gn_ratio(u: RadialProfile) -> float:
    """||u||_{NN'}^{NN'} / (||u||_N^N ||grad u||_N^{NN'-N}); scale and dilation invariant."""
    N = u.grid.N
    nn = N * N / (N - 1.0)
    grad = grad_norm_pow(u)
    if grad <= 0:
        raise DegenerateProfileError("gradient norm vanishes; GN ratio undefined")
    return lp_norm_pow(u, nn) / (lp_norm_pow(u, N) * grad ** (1.0 / (N - 1.0)))


def _gn_log_gradient(u: RadialProfile) -> np.ndarray:
    """Mass-preconditioned nodal gradient of log gn_ratio."""
    N = u.grid.N
    nn = N * N / (N - 1.0)
    vals = u.values
    I_nn = lp_norm_pow(u, nn)
    I_n = lp_norm_pow(u, N)
    I_g = grad_norm_pow(u)
    om_mass = u.grid.omega * u.grid.mass
    term_nn = nn * vals ** (nn - 1.0) * om_mass / I_nn
    term_n = N * vals ** (N - 1.0) * om_mass / I_n
    term_g = grad_norm_pow_gradient(u) / ((N - 1.0) * I_g)
    return (term_nn - term_n - term_g) / om_mass


def _gn_residual(u: RadialProfile) -> float:
    """Mass-weighted RMS of u * grad log(ratio): scale-free stationarity measure."""
    d = _gn_log_gradient(u)
    m = u.grid.mass
    return float(np.sqrt(np.dot(m, (d * u.values) ** 2) / np.sum(m)))


def _normalize_gn(u: RadialProfile) -> RadialProfile:
    """Rescale to ||grad V||_N = 1 = ||V||_N by amplitude and dilation."""
    G = grad_norm_pow(u) ** (1.0 / u.grid.N)
    L = lp_norm_pow(u, u.grid.N) ** (1.0 / u.grid.N)
    lam = L / G
    return RadialProfile(u.grid.rescaled(1.0 / lam), u.values / G)


def maximize_gn(N: int, opts: GNOptions | None = None) -> GNReport:
    """Maximize the GN ratio over radial profiles; returns a normalized maximizer."""
    if N < 2 or N != int(N):
        raise InvalidParameterError(f"dimension N must be an integer >= 2, got {N}")
    opts = opts or GNOptions()
    grid = build_grid(N, opts.r_max, opts.n_nodes, "composite-gauss", opts.cell_order)
    r = grid.nodes
    starts = [
        np.exp(-r),
        np.exp(-(r ** 2)),
        1.0 / np.cosh(r),
        (1.0 + r ** 2) ** -2.0,
        np.maximum(0.0, 1.0 - r / (opts.r_max / 3.0)) ** 3,
    ]
    best_val, best_prof, iters = -np.inf, None, 0
    for vals in starts:
        u = decreasing_rearrangement(RadialProfile(grid, np.maximum(vals, 0.0)))
        u = u.scaled(1.0 / float(np.max(u.values)))
        val = gn_ratio(u)
        eta = 0.1
        for _ in range(opts.max_iters):
            iters += 1
            direction = _gn_log_gradient(u)
            dmax = float(np.max(np.abs(direction * u.values)))
            if dmax < 1e-12:
                break
            umax = float(np.max(u.values))
            step_scale = umax / float(np.max(np.abs(direction)))
            improved = False
            for _bt in range(20):
                trial = np.maximum(u.values + eta * step_scale * direction, 0.0)
                if not np.any(trial):
                    eta *= 0.4
                    continue
                prof = decreasing_rearrangement(RadialProfile(grid, trial))
                prof = prof.scaled(1.0 / float(np.max(prof.values)))
                try:
                    v2 = gn_ratio(prof)
                except DegenerateProfileError:
                    eta *= 0.4
                    continue
                if v2 > val:
                    u, val = prof, v2
                    eta = min(eta * 1.3, 1.0)
                    improved = True
                    break
                eta *= 0.4
            if not improved:
                break
        if val > best_val:
            best_val, best_prof = val, u
    profile = _normalize_gn(best_prof)
    residual = _gn_residual(profile)
    return GNReport(
        N=N,
        bgn_estimate=float(best_val),
        maximizer_profile=profile,
        residual=residual,
        low_accuracy=residual > opts.residual_tol,
        iterations=iters,
    )


def _cached_gn_profile(N: int, opts: MaximizeOptions) -> GNReport:
    key = (N, opts.cell_order)
    report = _GN_CACHE.get(key)
    if report is None:
        report = maximize_gn(N, GNOptions(cell_order=opts.cell_order))
        _GN_CACHE[key] = report
    return report
