"""Exact verification of the closed-form test-profile computations.

The strict inequality N^2 / (alpha_N * B_GN) < N reduces, after the
radial change of variables, to exhibiting a single radial profile whose
ratio

    Q(u) = [int r^{N-1} |u|^N dr] [int r^{N-1} |u'|^N dr]^{1/(N-1)}
           / int r^{N-1} |u|^{NN'} dr

is strictly below 1.  For N = 2 the cubic bump max{0, (1-r)^3} gives
Q = 39/40 by pure beta-function arithmetic; for N >= 3 the profile
e^{-r} gives Q = C_N with

    C_N        = Gamma(N)^{1/(N-1)} (N-1)^{-N} N^{(N^2-2N)/(N-1)},
    C_N^{N-1}  = (N-1)! N^{N^2-2N} (N-1)^{-(N^2-N)}     (a rational),

and C_N < 1 follows from the log decomposition
log C_N^{N-1} = d_N + e_N with

    d_N = sum_{k=1}^{N-1} log k - N (log N - 1),
    e_N = -N + N(N-1) log(1 + 1/(N-1)),

via three claims: e_N < -1/2 for N >= 3; d_N strictly decreasing; and
d_3 < 1/2, which is equivalent to e^5 < 729/4 (the cruder rational bound
(2.8)^5 = 172.10368 < 182.25 suffices).

Everything with integer gamma arguments is computed in exact rational
arithmetic (`fractions.Fraction`); the log comparisons run at 50
significant digits via mpmath.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath
import numpy as np

from .errors import DegenerateProfileError, InvalidParameterError
from .radial import RadialProfile, grad_norm_pow, lp_norm_pow

__all__ = [
    "ExactRational",
    "gamma_exact",
    "beta_exact",
    "gn_ratio_radial",
    "n2_cubic_exact",
    "c_n_pow_exact",
    "c_n_value",
    "e_upper_rational",
    "exp5_claims",
    "ClaimRow",
    "ClaimLedger",
    "claim_ledger",
    "claim_auxiliary_f",
]

#: Exact rational values (reduced form, positive denominator).
ExactRational = Fraction

DPS = 50


def gamma_exact(n: int) -> ExactRational:
    """Gamma(n) = (n-1)! for integer n >= 1, exactly."""
    if n < 1 or n != int(n):
        raise InvalidParameterError(f"gamma_exact needs an integer >= 1, got {n}")
    return Fraction(math.factorial(n - 1))


def beta_exact(x: int, y: int) -> ExactRational:
    """B(x, y) = Gamma(x) Gamma(y) / Gamma(x + y) for integers, exactly."""
    return gamma_exact(x) * gamma_exact(y) / gamma_exact(x + y)


def gn_ratio_radial(u: RadialProfile, N: int) -> float:
    """The raw-integral ratio Q(u); inf over u of Q < 1 iff N^2/(alpha_N B_GN) < N."""
    if u.grid.N != N:
        raise InvalidParameterError("profile grid dimension does not match N")
    omega = u.grid.omega
    nn = N * N / (N - 1.0)
    i_n = lp_norm_pow(u, N) / omega
    i_g = grad_norm_pow(u) / omega
    i_nn = lp_norm_pow(u, nn) / omega
    if i_nn <= 0 or i_g <= 0:
        raise DegenerateProfileError("ratio undefined for (near-)zero profile")
    return i_n * i_g ** (1.0 / (N - 1.0)) / i_nn


def n2_cubic_exact() -> ExactRational:
    """Q at N = 2, u = max{0, (1-r)^3}: exactly 39/40.

    int_0^1 r (1-r)^6 dr = B(2,7);  int_0^1 r |u'|^2 dr = 9 B(2,5);
    int_0^1 r (1-r)^12 dr = B(2,13); ratio = B(2,7) * 9 B(2,5) / B(2,13).
    """
    numerator = beta_exact(2, 7) * 9 * beta_exact(2, 5)
    return numerator / beta_exact(2, 13)


def c_n_pow_exact(N: int) -> ExactRational:
    """C_N^{N-1} = (N-1)! N^{N^2-2N} (N-1)^{-(N^2-N)}, exactly, for N >= 3."""
    if N < 3 or N != int(N):
        raise InvalidParameterError(f"c_n_pow_exact needs an integer N >= 3, got {N}")
    return Fraction(math.factorial(N - 1)) * Fraction(N) ** (N * N - 2 * N) / Fraction(N - 1) ** (N * N - N)


def c_n_value(N: int) -> tuple[float, ExactRational]:
    """(C_N as a float, C_N^{N-1} as an exact rational)."""
    exact_pow = c_n_pow_exact(N)
    with mpmath.workdps(DPS):
        log_pow = mpmath.log(mpmath.mpf(exact_pow.numerator)) - mpmath.log(mpmath.mpf(exact_pow.denominator))
        value = mpmath.e ** (log_pow / (N - 1))
    return float(value), exact_pow


def e_upper_rational(terms: int = 20) -> ExactRational:
    """A rational upper bound for e: partial sum plus the geometric tail bound.

    sum_{k > K} 1/k! < 1/(K! K), so the bound is exact-arithmetic valid.
    """
    partial = sum(Fraction(1, math.factorial(k)) for k in range(terms + 1))
    return partial + Fraction(1, math.factorial(terms) * terms)


def exp5_claims() -> dict:
    """The d_3 < 1/2 chain: e^5 < 729/4, with the cruder (2.8)^5 route.

    Returns the exact comparisons: (14/5)^5 = 537824/3125 < 729/4 in
    rationals, a rational e-upper-bound fifth power below 729/4, and the
    50-digit float comparison for the report.
    """
    bound = Fraction(729, 4)
    crude = Fraction(14, 5) ** 5
    e_up = e_upper_rational()
    with mpmath.workdps(DPS):
        e5 = mpmath.e ** 5
        e5_float = float(e5)
    return {
        "e5": e5_float,
        "bound": float(bound),
        "crude_pow": crude,
        "crude_value": float(crude),
        "e_upper_fifth_lt_bound": e_up ** 5 < bound,
        "crude_lt_bound": crude < bound,
        "e5_lt_bound": e5_float < float(bound),
        "e_lt_crude_base": float(e_upper_rational()) < 2.8,
    }


@dataclass(frozen=True)
class ClaimRow:
    """Per-dimension record of the log decomposition and claim outcomes."""

    N: int
    d_N: float
    e_N: float
    log_cn_pow: float
    claim1: bool  # e_N < -1/2
    claim2: bool  # d_{N+1} < d_N
    claim3_chain: bool  # log C_N^{N-1} < 0


@dataclass(frozen=True)
class ClaimLedger:
    rows: tuple[ClaimRow, ...]
    exp5: dict
    decomposition_max_error: float

    @property
    def all_claims_hold(self) -> bool:
        return (
            all(r.claim1 and r.claim2 and r.claim3_chain for r in self.rows)
            and self.exp5["e_upper_fifth_lt_bound"]
            and self.exp5["crude_lt_bound"]
            and self.decomposition_max_error < 1e-12
        )

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("N,d_N,e_N,log_CN_pow,claim1,claim2,claim3_chain\n")
        for r in self.rows:
            buf.write(
                f"{r.N},{r.d_N:.17g},{r.e_N:.17g},{r.log_cn_pow:.17g},"
                f"{str(r.claim1).lower()},{str(r.claim2).lower()},{str(r.claim3_chain).lower()}\n"
            )
        return buf.getvalue()


def _d_terms(n_max: int):
    """d_N for N in [3, n_max + 1] at 50 digits, via a running log-factorial."""
    ds = {}
    with mpmath.workdps(DPS):
        log_fact = mpmath.mpf(0)  # log (N-1)! accumulated
        for k in range(1, n_max + 1):
            log_fact += mpmath.log(k)
            N = k + 1
            if 3 <= N <= n_max + 1:
                ds[N] = log_fact - N * (mpmath.log(N) - 1)
    return ds


def claim_ledger(n_max: int = 1000) -> ClaimLedger:
    """Verify the three claims for every 3 <= N <= n_max.

    Exactness policy: rational quantities (C_N^{N-1}, (2.8)^5, 729/4,
    the e upper bound) are exact; the log comparisons are 50-digit,
    with the decomposition identity log C_N^{N-1} = d_N + e_N checked
    against exact-rational logs to 1e-12 on small N.
    """
    if n_max < 3:
        raise InvalidParameterError(f"n_max must be >= 3, got {n_max}")
    ds = _d_terms(n_max)
    rows = []
    max_err = 0.0
    with mpmath.workdps(DPS):
        half = mpmath.mpf(1) / 2
        for N in range(3, n_max + 1):
            d_N = ds[N]
            e_N = -N + N * (N - 1) * mpmath.log(1 + mpmath.mpf(1) / (N - 1))
            log_cn = d_N + e_N
            claim1 = e_N < -half
            claim2 = ds[N + 1] < d_N
            claim3 = log_cn < 0
            if N <= 40:
                exact_pow = c_n_pow_exact(N)
                direct = mpmath.log(mpmath.mpf(exact_pow.numerator)) - mpmath.log(
                    mpmath.mpf(exact_pow.denominator)
                )
                max_err = max(max_err, abs(float(direct - log_cn)))
            rows.append(
                ClaimRow(
                    N=N,
                    d_N=float(d_N),
                    e_N=float(e_N),
                    log_cn_pow=float(log_cn),
                    claim1=bool(claim1),
                    claim2=bool(claim2),
                    claim3_chain=bool(claim3),
                )
            )
    return ClaimLedger(rows=tuple(rows), exp5=exp5_claims(), decomposition_max_error=max_err)


def claim_auxiliary_f(x):
    """f(x) = (x+1) log(1 + 1/x) - 1, the monotonicity workhorse for claim 2.

    Positive and strictly decreasing on [1, inf); f(N) = d_N - d_{N+1}.
    """
    x = np.asarray(x, dtype=float)
    return (x + 1.0) * np.log1p(1.0 / x) - 1.0
