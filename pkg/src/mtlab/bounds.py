"""Closed-form bounds, attainment criteria and threshold bracketing.

Certification is one-sided throughout: a feasible profile whose value
exceeds the universal lower bound alpha^{N-1}/(N-1)! certifies that the
supremum exceeds it (and hence is attained, in the subcritical range);
no numerical computation here ever claims non-attainment.  Verdicts
encode that asymmetry explicitly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln

from .errors import BracketNotFoundError, InvalidParameterError
from .functional import MTParams
from .maximize import MaximizeOptions, MaximizerReport, maximize_d, maximize_gn
from .radial import critical_exponent

__all__ = [
    "VERDICT_CERTIFIED",
    "VERDICT_NONE",
    "VERDICT_NONEXISTENCE_REGIME",
    "BoundReport",
    "universal_lower_bound",
    "attainment_test",
    "g_function",
    "g_function_test",
    "c_tilde_series",
    "alpha0_nonexistence",
    "bgn_condition",
    "BracketOptions",
    "BracketReport",
    "bracket_alpha_star",
]

VERDICT_CERTIFIED = "attained-certified-numerically"
VERDICT_NONE = "no-verdict"
VERDICT_NONEXISTENCE_REGIME = "nonexistence-regime"


@dataclass(frozen=True)
class BoundReport:
    """A bound value plus the identity that produced it, for audit."""

    kind: str
    values: dict
    verdict: str
    provenance: str

    def to_json_dict(self) -> dict:
        return {
            "kind": self.kind,
            "values": self.values,
            "verdict": self.verdict,
            "provenance": self.provenance,
        }


def universal_lower_bound(alpha: float, N: int) -> float:
    """alpha^{N-1}/(N-1)!, valid for every (a, b): the vanishing-family value."""
    if N < 2 or N != int(N):
        raise InvalidParameterError(f"dimension N must be an integer >= 2, got {N}")
    if not (0 < alpha <= critical_exponent(N) * (1 + 1e-12)):
        raise InvalidParameterError(f"alpha must lie in (0, alpha_N], got {alpha}")
    return float(alpha ** (N - 1) / math.exp(gammaln(N)))


def attainment_test(best_value: float, alpha: float, N: int, margin: float = 1e-6) -> BoundReport:
    """Certified verdict iff a feasible value strictly exceeds the lower bound.

    Values at or below the bound yield no verdict: equality with the
    bound is exactly what non-attained parameters produce, and numerics
    cannot distinguish it from a barely-attained supremum.
    """
    lower = universal_lower_bound(alpha, N)
    exceeded = best_value > lower + margin
    return BoundReport(
        kind="universal-lower",
        values={"best_value": best_value, "lower_bound": lower, "margin": best_value - lower},
        verdict=VERDICT_CERTIFIED if exceeded else VERDICT_NONE,
        provenance="universal-lower:vanishing-family-limit",
    )


def g_function(t, alpha: float, a: float, b: float, N: int, bgn: float):
    """g(t) = t^{N/b} (1 + (alpha/N) * bgn * (1-t)^{N'/a}) on [0, 1].

    Built from the two-parameter family on a GN maximizer: the truncated
    objective there equals (alpha^{N-1}/(N-1)!) * g(t), so max g > 1
    certifies exceedance of the universal lower bound.
    """
    t = np.asarray(t, dtype=float)
    n_prime = N / (N - 1.0)
    return t ** (N / b) * (1.0 + (alpha / N) * bgn * (1.0 - t) ** (n_prime / a))


def g_function_test(
    alpha: float,
    a: float,
    b: float,
    N: int,
    bgn: float,
    margin: float = 1e-8,
    samples: int = 10_000,
) -> BoundReport:
    """Scan g over [0, 1]; max g > 1 certifies attainment (sufficient test).

    `bgn` must be a certified lower bound for the GN best constant: g is
    increasing in bgn, so undershooting it only weakens the test, never
    breaks its validity.  Also reports the endpoint derivative
    g'(1) = N/b - alpha * bgn / N at a = N' (negative iff
    b > N^2/(alpha * bgn), the condition that forces max g > 1).
    """
    if bgn <= 0:
        raise InvalidParameterError(f"bgn must be positive, got {bgn}")
    ts = np.linspace(0.0, 1.0, samples)
    gs = g_function(ts, alpha, a, b, N, bgn)
    k = int(np.argmax(gs))
    lo = ts[max(k - 1, 0)]
    hi = ts[min(k + 1, samples - 1)]
    inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - inv_phi * (hi - lo)
    x2 = lo + inv_phi * (hi - lo)
    f1 = float(g_function(x1, alpha, a, b, N, bgn))
    f2 = float(g_function(x2, alpha, a, b, N, bgn))
    for _ in range(80):
        if f1 >= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - inv_phi * (hi - lo)
            f1 = float(g_function(x1, alpha, a, b, N, bgn))
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + inv_phi * (hi - lo)
            f2 = float(g_function(x2, alpha, a, b, N, bgn))
        if hi - lo < 1e-14:
            break
    if f1 >= f2:
        t_best, g_best = x1, f1
    else:
        t_best, g_best = x2, f2
    if float(gs[k]) > g_best:
        t_best, g_best = float(ts[k]), float(gs[k])
    gprime_at_1 = N / b - alpha * bgn / N
    verdict = VERDICT_CERTIFIED if g_best > 1.0 + margin else VERDICT_NONE
    return BoundReport(
        kind="g-test",
        values={
            "max_g": g_best,
            "argmax_t": t_best,
            "gprime_at_1_for_a_conjugate": gprime_at_1,
            "alpha": alpha,
            "a": a,
            "b": b,
            "bgn": bgn,
        },
        verdict=verdict,
        provenance="g-test:gn-two-parameter-family",
    )


def c_tilde_series(N: int, gn_c: float, terms: int | None = None) -> float:
    """C^N sum_{j>=0} (j+N)^{j+N}/(j+N-1)! (2e)^{-j}.

    The term ratio tends to 1/2 (the bare power series has radius 1/e and
    is evaluated at 1/(2e)), so the sum converges geometrically; with
    `terms=None` it truncates once a term drops below 1e-16 of the sum.
    """
    if N < 2 or N != int(N):
        raise InvalidParameterError(f"dimension N must be an integer >= 2, got {N}")
    if gn_c <= 0:
        raise InvalidParameterError(f"interpolation constant must be positive, got {gn_c}")
    log_2e = math.log(2.0) + 1.0
    total = 0.0
    j = 0
    while True:
        k = j + N
        term = math.exp(k * math.log(k) - gammaln(k) - j * log_2e)
        total += term
        j += 1
        if terms is not None:
            if j >= terms:
                break
        elif term < 1e-16 * total and j > 4:
            break
        if j > 100_000:
            break
    return gn_c ** N * total


def alpha0_nonexistence(a: float, b: float, N: int, gn_c: float) -> BoundReport:
    """Explicit alpha_0 below which the supremum is certainly not attained.

    alpha_0 = min{ min{a/b, 1} / (C~ (N-2)!), 1/(2 e C), alpha_N }, valid
    for a <= N'; gn_c is a constant C for the interpolation inequality
    ||v||_{N'j}^{N'j} <= C^j j^j ||v||_N^N ||grad v||_N^{N'j - N}.
    """
    n_prime = N / (N - 1.0)
    if not (0 < a <= n_prime):
        raise InvalidParameterError(f"a must lie in (0, N'] = (0, {n_prime:.6g}], got {a}")
    if b <= 0:
        raise InvalidParameterError(f"b must be positive, got {b}")
    if gn_c <= 0:
        raise InvalidParameterError(f"interpolation constant must be positive, got {gn_c}")
    c_tilde = c_tilde_series(N, gn_c)
    first = min(a / b, 1.0) / (c_tilde * math.exp(gammaln(N - 1)))
    second = 1.0 / (2.0 * math.e * gn_c)
    alpha0 = min(first, second, critical_exponent(N))
    return BoundReport(
        kind="alpha0",
        values={
            "alpha0": alpha0,
            "c_tilde": c_tilde,
            "series_bound": first,
            "radius_bound": second,
            "alpha_critical": critical_exponent(N),
        },
        verdict=VERDICT_NONEXISTENCE_REGIME,
        provenance="alpha0:series-contradiction-bound",
    )


def bgn_condition(alpha: float, b: float, N: int, bgn: float) -> bool:
    """True iff b > N^2 / (alpha * bgn), strictly.

    With a near N' this is the hypothesis under which the g-test
    certifies attainment.
    """
    if bgn <= 0:
        raise InvalidParameterError(f"bgn must be positive, got {bgn}")
    return b > N * N / (alpha * bgn)


@dataclass(frozen=True)
class BracketOptions:
    """alpha grid and refinement policy for bracket_alpha_star."""

    alpha_min: float | None = None
    alpha_max: float | None = None
    count: int = 12
    bisect_iters: int = 0
    margin: float = 1e-6
    use_g_test: bool = True
    maximize_opts: MaximizeOptions = field(default_factory=MaximizeOptions)


@dataclass(frozen=True)
class BracketReport:
    """One-sided bracket for the attainment threshold.

    alpha_star <= alpha_high is numerically certified (a feasible profile
    exceeds the lower bound there); alpha_low is only the largest grid
    point that failed to certify, a heuristic floor.  No verdict is ever
    claimed at the bracket edges themselves.
    """

    a: float
    b: float
    N: int
    alpha_low: float
    alpha_high: float
    grid: tuple[float, ...]
    certified: tuple[bool, ...]
    bgn_estimate: float | None

    def to_json_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "N": self.N,
            "alpha_low": self.alpha_low,
            "alpha_high": self.alpha_high,
            "grid": list(self.grid),
            "certified": list(self.certified),
            "bgn_estimate": self.bgn_estimate,
            "semantics": "alpha_star <= alpha_high certified; alpha_low heuristic only",
        }


def _certify_cell(p: MTParams, opts: BracketOptions, bgn: float | None, extra) -> tuple[bool, MaximizerReport | None]:
    if opts.use_g_test and bgn is not None:
        g_report = g_function_test(p.alpha, p.a, p.b, p.N, bgn)
        if g_report.verdict == VERDICT_CERTIFIED:
            return True, None
    report = maximize_d(p, opts.maximize_opts, extra_candidates=extra)
    return report.margin > opts.margin, report


def bracket_alpha_star(
    a: float,
    b: float,
    N: int,
    opts: BracketOptions | None = None,
) -> BracketReport:
    """Bracket the attainment threshold on an alpha grid, one-sided.

    Scans alpha ascending, warm-chaining the best profile between cells
    (evaluating a lower cell's maximizer at a higher alpha never lowers
    the normalized value, so certification is monotone along the scan).
    Optional bisection tightens [alpha_low, alpha_high].
    """
    opts = opts or BracketOptions()
    a_N = critical_exponent(N)
    alpha_lo = opts.alpha_min if opts.alpha_min is not None else a_N / 50.0
    alpha_hi = opts.alpha_max if opts.alpha_max is not None else a_N * (1.0 - 1.0 / 50.0)
    if not (0 < alpha_lo < alpha_hi <= a_N):
        raise InvalidParameterError("alpha bracket range must satisfy 0 < min < max <= alpha_N")
    alphas = np.linspace(alpha_lo, alpha_hi, opts.count)
    bgn = maximize_gn(N).bgn_estimate if opts.use_g_test else None

    certified: list[bool] = []
    chained: list = []
    alpha_high = None
    alpha_low = 0.0
    for alpha in alphas:
        p = MTParams(N=N, alpha=float(alpha), a=a, b=b)
        ok, report = _certify_cell(p, opts, bgn, tuple(chained))
        certified.append(ok)
        if report is not None:
            chained = [report.best_profile]
        if ok and alpha_high is None:
            alpha_high = float(alpha)
        if not ok and alpha_high is None:
            alpha_low = float(alpha)
    if alpha_high is None:
        raise BracketNotFoundError(
            f"no alpha in [{alpha_lo:.6g}, {alpha_hi:.6g}] certified attainment for "
            f"(a={a}, b={b}, N={N})",
            grid=tuple(float(x) for x in alphas),
        )
    for _ in range(opts.bisect_iters):
        if alpha_high - alpha_low < 1e-12:
            break
        mid = 0.5 * (alpha_low + alpha_high)
        p = MTParams(N=N, alpha=mid, a=a, b=b)
        ok, _ = _certify_cell(p, opts, bgn, tuple(chained))
        if ok:
            alpha_high = mid
        else:
            alpha_low = mid
    return BracketReport(
        a=a,
        b=b,
        N=N,
        alpha_low=alpha_low,
        alpha_high=alpha_high,
        grid=tuple(float(x) for x in alphas),
        certified=tuple(certified),
        bgn_estimate=bgn,
    )
