"""Exponential-series integrands and the scalar functionals built on them.

The objective throughout the package is

    F(u) = int_{R^N} Phi_N(alpha |u|^{N'}) dx,
    Phi_N(t) = e^t - sum_{j=0}^{N-2} t^j / j! = sum_{j >= N-1} t^j / j!,

maximized over the constraint surface ||grad u||_N^a + ||u||_N^b = 1,
with N' = N/(N-1) the Hoelder conjugate.  Expanding the series termwise
turns F into a weighted sum of p-norms,

    F(u) = sum_{j >= N-1} (alpha^j / j!) ||u||_{N'j}^{N'j},

which is the identity the analysis manipulates; both evaluation routes
are implemented and cross-checked.  Psi_N drops one more term:
Psi_N(s) = Phi_N(s) - s^{N-1}/(N-1)!, i.e. Psi_N = Phi_{N+1} as a tail.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DegenerateProfileError, InvalidParameterError, SeriesOverflowError
from .radial import RadialProfile, critical_exponent, grad_norm_pow, lp_norm_pow

__all__ = [
    "MTParams",
    "SeriesControl",
    "phi",
    "psi",
    "mt_integral",
    "mt_integral_series",
    "constraint_value",
    "j_truncated",
    "adachi_tanaka_ratio",
]

#: Largest series argument before e^t leaves the double range.
EXP_ARG_LIMIT = 700.0


@dataclass(frozen=True)
class SeriesControl:
    """Truncation policy for the exponential series."""

    rel_tol: float = 1e-14
    max_terms: int = 512

    def __post_init__(self):
        if self.rel_tol <= 0:
            raise InvalidParameterError("rel_tol must be positive")
        if self.max_terms < 2:
            raise InvalidParameterError("max_terms must be at least 2")


DEFAULT_SERIES = SeriesControl()


@dataclass(frozen=True)
class MTParams:
    """Problem tuple (N, alpha, a, b).

    Invariants: N integer >= 2, 0 < alpha <= alpha_N, a > 0, b > 0.
    `finite_supremum` records whether (alpha, b) lies in the regime where
    the supremum is finite: alpha < alpha_N always, alpha = alpha_N only
    for b <= N.  Evaluations are legal either way; finiteness is a
    property of the supremum, not of single profiles.
    """

    N: int
    alpha: float
    a: float
    b: float

    def __post_init__(self):
        if self.N < 2 or self.N != int(self.N):
            raise InvalidParameterError(f"dimension N must be an integer >= 2, got {self.N}")
        if self.a <= 0 or self.b <= 0:
            raise InvalidParameterError(f"constraint powers must be positive, got a={self.a}, b={self.b}")
        a_N = critical_exponent(self.N)
        if not (0 < self.alpha <= a_N * (1 + 1e-12)):
            raise InvalidParameterError(
                f"alpha must lie in (0, alpha_N]; got alpha={self.alpha}, alpha_N={a_N:.12g}"
            )

    @property
    def n_prime(self) -> float:
        return self.N / (self.N - 1)

    @property
    def alpha_critical(self) -> float:
        return critical_exponent(self.N)

    @property
    def is_critical(self) -> bool:
        return self.alpha >= self.alpha_critical * (1 - 1e-12)

    @property
    def finite_supremum(self) -> bool:
        return (not self.is_critical) or self.b <= self.N

    def as_dict(self) -> dict:
        return {"N": self.N, "alpha": self.alpha, "a": self.a, "b": self.b}


def _phi_tail(t, k: int, ctl: SeriesControl = DEFAULT_SERIES):
    """sum_{j >= k} t^j / j! for t >= 0, vectorized.

    Small arguments use the tail series directly (every term positive, no
    cancellation); once the head is negligible against e^t the closed
    form e^t - head takes over.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise InvalidParameterError("series argument must be non-negative")
    if np.any(t > EXP_ARG_LIMIT):
        raise SeriesOverflowError(f"series argument exceeds {EXP_ARG_LIMIT:g}; e^t overflows")
    if k == 0:
        return np.exp(t)
    out = np.zeros_like(t)
    direct = t >= max(k, 1.0)
    if np.any(direct):
        td = t[direct]
        head = np.zeros_like(td)
        term = np.ones_like(td)
        for j in range(k):
            head += term
            term *= td / (j + 1)
        out[direct] = np.exp(td) - head
    series = ~direct
    if np.any(series):
        ts = t[series]
        term = np.exp(k * np.log(np.where(ts > 0, ts, 1.0)) - gammaln(k + 1))
        term = np.where(ts > 0, term, 0.0)
        acc = term.copy()
        j = k
        while j < k + ctl.max_terms:
            j += 1
            term = term * ts / j
            acc += term
            if np.all(term <= ctl.rel_tol * np.maximum(acc, 1e-300)):
                break
        out[series] = acc
    return out


def phi(t, N: int, ctl: SeriesControl = DEFAULT_SERIES):
    """Phi_N(t) = sum_{j >= N-1} t^j / j!, for t >= 0."""
    if N < 2 or N != int(N):
        raise InvalidParameterError(f"dimension N must be an integer >= 2, got {N}")
    result = _phi_tail(t, N - 1, ctl)
    return float(result[0]) if np.ndim(t) == 0 else result


def psi(s, N: int, ctl: SeriesControl = DEFAULT_SERIES):
    """Psi_N(s) = Phi_N(s) - s^{N-1}/(N-1)! = sum_{j >= N} s^j / j!."""
    if N < 2 or N != int(N):
        raise InvalidParameterError(f"dimension N must be an integer >= 2, got {N}")
    result = _phi_tail(s, N, ctl)
    return float(result[0]) if np.ndim(s) == 0 else result


def _series_arguments(u: RadialProfile, p: MTParams) -> np.ndarray:
    t = p.alpha * u.values ** p.n_prime
    if np.any(t > EXP_ARG_LIMIT):
        raise SeriesOverflowError(
            f"alpha * max(u)^(N') = {float(np.max(t)):.3g} exceeds {EXP_ARG_LIMIT:g}"
        )
    return t


def mt_integral(u: RadialProfile, p: MTParams, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """int Phi_N(alpha |u|^{N'}) dx by pointwise quadrature of the integrand."""
    if u.grid.N != p.N:
        raise InvalidParameterError("profile grid dimension does not match params")
    t = _series_arguments(u, p)
    return u.grid.omega * float(np.dot(u.grid.mass, _phi_tail(t, p.N - 1, ctl)))


def mt_integral_series(u: RadialProfile, p: MTParams, ctl: SeriesControl = DEFAULT_SERIES) -> float:
    """Same integral by the series of norms sum_j (alpha^j/j!) ||u||_{N'j}^{N'j}.

    Truncates when the running term drops below rel_tol of the partial
    sum *and* the index is past the series hump j ~ alpha max(u)^{N'};
    stopping before the hump would truncate a still-growing series.
    """
    if u.grid.N != p.N:
        raise InvalidParameterError("profile grid dimension does not match params")
    t = _series_arguments(u, p)
    if not np.any(t > 0):
        return 0.0
    mass = u.grid.mass
    hump = float(np.max(t))
    log_t = np.log(np.where(t > 0, t, 1.0))
    positive = t > 0
    total = 0.0
    j = p.N - 1
    for _ in range(ctl.max_terms):
        log_term = j * log_t - gammaln(j + 1)
        term = float(np.dot(mass[positive], np.exp(log_term[positive])))
        total += term
        if term <= ctl.rel_tol * max(total, 1e-300) and j > hump:
            break
        j += 1
    return u.grid.omega * total


def constraint_value(u: RadialProfile, p: MTParams) -> float:
    """||grad u||_N^a + ||u||_N^b; zero iff u is identically zero."""
    if u.grid.N != p.N:
        raise InvalidParameterError("profile grid dimension does not match params")
    grad = grad_norm_pow(u) ** (p.a / p.N)
    norm = lp_norm_pow(u, p.N) ** (p.b / p.N)
    return grad + norm


def j_truncated(u: RadialProfile, p: MTParams) -> float:
    """First two series terms: (alpha^{N-1}/(N-1)!)||u||_N^N + (alpha^N/N!)||u||_{NN'}^{NN'}.

    Always a lower bound for mt_integral (the dropped terms are positive).
    """
    if u.grid.N != p.N:
        raise InvalidParameterError("profile grid dimension does not match params")
    N = p.N
    c1 = p.alpha ** (N - 1) / float(np.exp(gammaln(N)))
    c2 = p.alpha ** N / float(np.exp(gammaln(N + 1)))
    return c1 * lp_norm_pow(u, N) + c2 * lp_norm_pow(u, N * p.n_prime)


def adachi_tanaka_ratio(
    u: RadialProfile, alpha: float, N: int, ctl: SeriesControl = DEFAULT_SERIES
) -> float:
    """Scale-invariant ratio F(u / ||grad u||_N) / ||u / ||grad u||_N||_N^N.

    Invariant under both u -> c u and u -> u(lambda .): the gradient
    normalization removes the amplitude and the ratio's exponents cancel
    the dilation factor.
    """
    gn = grad_norm_pow(u)
    if gn <= 0.0:
        raise DegenerateProfileError("gradient norm vanishes; ratio undefined")
    v = u.scaled(gn ** (-1.0 / N))
    params = MTParams(N=N, alpha=alpha, a=1.0, b=1.0)
    return mt_integral(v, params, ctl) / lp_norm_pow(v, N)
