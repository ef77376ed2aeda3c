"""Derivatives of the Lehmer mean in cancellation-aware form.

Everything here is built from log-moments

    m_k(p) = sum_i w_i x_i^p (log x_i)^k / sum_i w_i x_i^p

computed with max-shifted exponents and exact (Shewchuk) summation. The two
derivatives are

    L'(p)  = L(p) * (m_1(p) - m_1(p-1))
    L''(p) = L(p) * (m_2(p) - m_2(p-1) - 2 m_1(p-1) (m_1(p) - m_1(p-1)))

The first-derivative difference is evaluated through an equivalent pairwise
form whose terms are all non-negative, so the result can never round to a
negative number. The second-derivative bracket is the one place where digits
cancel; when more than ten decimal digits are lost the computation escalates
to 50-digit arithmetic automatically (precision "auto", the default).

For two and three values the module also provides the closed forms of L''
and, for n=3, the constant K, the bracketed factor tilde_l whose single root
is the inflection point, its derivative, and the three inequality slacks
that certify tilde_l is decreasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import exp, fsum, log
from typing import NamedTuple

import mpmath as mp

from .core import MeanSpec, _lehmer_value
from .errors import UsageError


__all__ = [
    "LogMoment",
    "N3Constant",
    "N3Slacks",
    "log_moment",
    "first_derivative",
    "second_derivative",
    "second_derivative_n2",
    "k_constant",
    "second_derivative_n3",
    "tilde_l",
    "tilde_l_prime",
    "n3_inequalities",
    "fd_second_derivative",
]

# escalate when the bracket loses this many decimal digits to cancellation
_CANCELLATION_LIMIT = 1e-10
_EXTENDED_DPS = 50


# ---------------------------------------------------------------------------
# log-moments


@dataclass(frozen=True)
class LogMoment:
    """Weighted average of (log x_i)^k under softmax weights w_i x_i^p."""

    p: float
    k: int
    value: float

    @classmethod
    def compute(cls, spec: MeanSpec, p: float, k: int) -> "LogMoment":
        if not isinstance(k, int) or isinstance(k, bool) or not 0 <= k <= 2:
            raise UsageError(f"moment order must be an integer in 0..2, got {k!r}")
        return cls(p=float(p), k=k, value=_moment(spec, float(p), k))

    def __float__(self) -> float:
        return self.value


def _moment(spec: MeanSpec, p: float, k: int) -> float:
    if k == 0:
        return 1.0
    l = spec.log_values
    lw = spec.log_weights
    a = [lwi + p * li for lwi, li in zip(lw, l)]
    m = max(a)
    u = [exp(ai - m) for ai in a]
    s = fsum(u)
    return fsum(ui * li**k for ui, li in zip(u, l)) / s


def log_moment(spec: MeanSpec, p: float, k: int) -> float:
    """m_k(p) as a float; k must be 0, 1, or 2. m_0 is exactly 1."""
    return LogMoment.compute(spec, p, k).value


# ---------------------------------------------------------------------------
# first derivative


def first_derivative(spec: MeanSpec, p: float) -> float:
    """L'(p) >= 0 always; exactly 0 for constant specs.

    The moment difference m_1(p) - m_1(p-1) is summed in the pairwise form

        sum_{i<j} w_i w_j (x_i x_j)^(p-1) (x_i - x_j)(log x_i - log x_j)
            / (sum_i w_i x_i^p)(sum_j w_j x_j^(p-1))

    whose every term is non-negative, which makes the sign guarantee hold in
    floating point and not just in exact arithmetic.
    """
    p = float(p)
    if spec.is_constant:
        return 0.0
    x = spec.values
    l = spec.log_values
    lw = spec.log_weights
    n = spec.n
    mu, su = _shifted(lw, l, p)
    mv, sv = _shifted(lw, l, p - 1.0)
    ts = []
    for i in range(n):
        for j in range(i + 1, n):
            prod = (x[i] - x[j]) * (l[i] - l[j])
            if prod <= 0.0:
                continue  # equal values, or logs collide at working precision
            ts.append(lw[i] + lw[j] + (p - 1.0) * (l[i] + l[j]) + log(prod))
    if not ts:
        return 0.0
    t_max = max(ts)
    delta = exp(t_max - mu - mv) * fsum(exp(t - t_max) for t in ts) / (su * sv)
    return _lehmer_value(spec, p) * delta


def _shifted(lw, l, p: float) -> tuple[float, float]:
    a = [lwi + p * li for lwi, li in zip(lw, l)]
    m = max(a)
    return m, fsum(exp(ai - m) for ai in a)


# ---------------------------------------------------------------------------
# second derivative


def second_derivative(spec: MeanSpec, p: float, precision: str = "auto") -> float:
    """L''(p) via the log-moment bracket; exactly 0 for constant specs.

    precision:
        "standard"  double precision only
        "extended"  always recompute the bracket at 50 significant digits
        "auto"      escalate only when the double bracket has lost more than
                    ten decimal digits to cancellation (default)
    """
    p = float(p)
    if precision not in ("standard", "extended", "auto"):
        raise UsageError(f"unknown precision mode {precision!r}")
    if spec.is_constant:
        return 0.0
    if precision == "extended":
        return _second_derivative_mp(spec, p)
    m1p = _moment(spec, p, 1)
    m1q = _moment(spec, p - 1.0, 1)
    m2p = _moment(spec, p, 2)
    m2q = _moment(spec, p - 1.0, 2)
    terms = (m2p, -m2q, -2.0 * m1q * m1p, 2.0 * m1q * m1q)
    bracket = fsum(terms)
    if precision == "auto":
        scale = max(abs(t) for t in terms)
        if scale > 0.0 and abs(bracket) < _CANCELLATION_LIMIT * scale:
            return _second_derivative_mp(spec, p)
    return _lehmer_value(spec, p) * bracket


def _mp_terms(spec: MeanSpec, p):
    """Weights w_i x_i^p as mpf values at the current working precision."""
    return [mp.mpf(w) * mp.power(mp.mpf(v), p) for v, w in zip(spec.values, spec.weights)]


def _mp_lehmer(spec: MeanSpec, p) -> mp.mpf:
    num = mp.fsum(_mp_terms(spec, p))
    den = mp.fsum(_mp_terms(spec, p - 1))
    return num / den


def _mp_moment(spec: MeanSpec, p, k: int) -> mp.mpf:
    u = _mp_terms(spec, p)
    logs = [mp.log(mp.mpf(v)) for v in spec.values]
    return mp.fsum(ui * li**k for ui, li in zip(u, logs)) / mp.fsum(u)


def _mp_bracket(spec: MeanSpec, p) -> mp.mpf:
    m1p = _mp_moment(spec, p, 1)
    m1q = _mp_moment(spec, p - 1, 1)
    m2p = _mp_moment(spec, p, 2)
    m2q = _mp_moment(spec, p - 1, 2)
    return m2p - m2q - 2 * m1q * (m1p - m1q)


def _second_derivative_mp(spec: MeanSpec, p: float, dps: int = _EXTENDED_DPS) -> float:
    with mp.workdps(dps):
        pm = mp.mpf(p)
        m1p = _mp_moment(spec, pm, 1)
        m1q = _mp_moment(spec, pm - 1, 1)
        m2p = _mp_moment(spec, pm, 2)
        m2q = _mp_moment(spec, pm - 1, 2)
        bracket = m2p - m2q - 2 * m1q * (m1p - m1q)
        # residual cancellation below the working precision is noise, and
        # reporting it as a signed value would contradict the closed forms
        scale = max(abs(m2p), abs(m2q), abs(2 * m1q * m1p), abs(2 * m1q * m1q))
        if abs(bracket) < mp.mpf(10) ** (8 - dps) * scale:
            return 0.0
        return float(_mp_lehmer(spec, pm) * bracket)


# ---------------------------------------------------------------------------
# closed forms for two values


def _require_n2(spec: MeanSpec) -> None:
    if spec.n != 2:
        raise UsageError(f"this operation needs exactly 2 values, got {spec.n}")
    if not spec.has_unit_weights:
        raise UsageError("this operation is defined for unit weights only")


def second_derivative_n2(spec: MeanSpec, p: float) -> float:
    """Closed-form L'' for an unweighted pair.

    With a = x1/x2 the closed form is

        L''(p) = x1 (a - 1) (log a)^2 a^p (a - a^p) / (a^p + a)^3

    evaluated in the log domain. Exactly 0 at p = 1 (and for equal values);
    positive for p < 1 and negative for p > 1.
    """
    _require_n2(spec)
    p = float(p)
    x1, x2 = spec.values
    if x1 == x2:
        return 0.0
    s = log(x1) - log(x2)  # log a
    t = p * s
    d = abs(s - t)
    if d == 0.0:
        return 0.0
    m = max(s, t)
    # |a^p (a - a^p)| = exp(t + m) * (1 - exp(-d)), sign follows s - t
    log_num = t + m + math.log1p(-exp(-d))
    log_den = 3.0 * (m + log(exp(t - m) + exp(s - m)))
    magnitude = exp(log_num - log_den)
    a_minus_1 = math.expm1(s)
    return x1 * a_minus_1 * s * s * math.copysign(magnitude, s - t)


# ---------------------------------------------------------------------------
# closed forms for three values


def _require_n3(spec: MeanSpec) -> None:
    if spec.n != 3:
        raise UsageError(f"this operation needs exactly 3 values, got {spec.n}")
    if not spec.has_unit_weights:
        raise UsageError("this operation is defined for unit weights only")


@dataclass(frozen=True)
class N3Constant:
    """The p-independent term of the three-value second derivative.

    Zero exactly when all three values are equal; its sign tells on which
    side of p = 1 the unique inflection point lies (negative means below).
    """

    k: float

    def __float__(self) -> float:
        return self.k


class N3Slacks(NamedTuple):
    slack_a: float
    slack_b: float
    slack_c: float


def k_constant(spec: MeanSpec) -> N3Constant:
    """K for an unweighted triple; symmetric under value permutations."""
    _require_n3(spec)
    x1, x2, x3 = spec.values
    return N3Constant(k=_k_value(x1, x2, x3))


def _k_value(x1: float, x2: float, x3: float) -> float:
    return fsum(
        (
            (x1 - x2) * log(x1 / x2) * log(x1 * x2 / (x3 * x3)),
            (x1 - x3) * log(x1 / x3) * log(x1 * x3 / (x2 * x2)),
            (x2 - x3) * log(x2 / x3) * log(x2 * x3 / (x1 * x1)),
        )
    )


def tilde_l(spec: MeanSpec, p: float) -> float:
    """Bracketed factor of the three-value L''; strictly decreasing in p.

    Its unique root is the inflection point; at p = 1 the exponential
    differences vanish exactly and the value reduces to K.
    """
    _require_n3(spec)
    p = float(p)
    x1, x2, x3 = spec.values
    q = p - 1.0
    return fsum(
        (
            (pow(x2 / x3, q) - pow(x1 / x3, q)) * (x1 - x2) * log(x1 / x2) ** 2,
            (pow(x3 / x2, q) - pow(x1 / x2, q)) * (x1 - x3) * log(x1 / x3) ** 2,
            (pow(x3 / x1, q) - pow(x2 / x1, q)) * (x2 - x3) * log(x2 / x3) ** 2,
            _k_value(x1, x2, x3),
        )
    )


def second_derivative_n3(spec: MeanSpec, p: float) -> float:
    """Closed-form L'' for an unweighted triple: positive prefactor times tilde_l."""
    _require_n3(spec)
    p = float(p)
    x1, x2, x3 = spec.values
    q = p - 1.0
    l1, l2, l3 = log(x1), log(x2), log(x3)
    log_pre = q * (l1 + l2 + l3)
    m = max(q * l1, q * l2, q * l3)
    log_den = 3.0 * (m + log(exp(q * l1 - m) + exp(q * l2 - m) + exp(q * l3 - m)))
    return exp(log_pre - log_den) * tilde_l(spec, p)


def tilde_l_prime(spec: MeanSpec, p: float) -> float:
    """Derivative of tilde_l; non-positive for every p, strictly negative
    when the three values are pairwise distinct."""
    _require_n3(spec)
    p = float(p)
    x1, x2, x3 = spec.values
    q = p - 1.0
    g1 = (
        log(x2 / x1)
        * log(x2 / x3)
        * (pow(x2 / x3, q) * (x1 - x2) * log(x2 / x1) + pow(x2 / x1, q) * (x2 - x3) * log(x3 / x2))
    )
    g2 = (
        log(x2 / x1)
        * log(x3 / x1)
        * (pow(x1 / x3, q) * (x1 - x2) * log(x2 / x1) + pow(x1 / x2, q) * (x1 - x3) * log(x3 / x1))
    )
    g3 = (
        log(x3 / x1)
        * log(x3 / x2)
        * (pow(x3 / x2, q) * (x1 - x3) * log(x3 / x1) + pow(x3 / x1, q) * (x2 - x3) * log(x3 / x2))
    )
    return fsum((g1, g2, g3))


def n3_inequalities(spec: MeanSpec, p: float) -> N3Slacks:
    """Slacks (right side minus left side) of the three pair inequalities
    behind the monotonicity of tilde_l; each is non-negative for every p.

    Every product (x_i - x_j) log(x_j / x_i) is non-positive by sign
    matching, so each left side is <= 0, each right side is >= 0, and the
    slack is a sum of non-negative quantities with no cancellation.
    """
    _require_n3(spec)
    p = float(p)
    x1, x2, x3 = spec.values
    q = p - 1.0
    lhs_a = pow(x2 / x3, q) * (x1 - x2) * log(x2 / x1) + pow(x2 / x1, q) * (x2 - x3) * log(x3 / x2)
    rhs_a = (x1 - x3) * log(x1 / x3)
    lhs_b = pow(x1 / x3, q) * (x1 - x2) * log(x2 / x1) + pow(x1 / x2, q) * (x1 - x3) * log(x3 / x1)
    rhs_b = (x2 - x3) * log(x2 / x3)
    lhs_c = pow(x3 / x2, q) * (x1 - x3) * log(x3 / x1) + pow(x3 / x1, q) * (x2 - x3) * log(x3 / x2)
    rhs_c = (x1 - x2) * log(x1 / x2)
    return N3Slacks(rhs_a - lhs_a, rhs_b - lhs_b, rhs_c - lhs_c)


# ---------------------------------------------------------------------------
# finite-difference oracle


def fd_second_derivative(spec: MeanSpec, p: float, h: float = 1e-4, dps: int | None = None) -> float:
    """Central second difference (L(p+h) - 2 L(p) + L(p-h)) / h^2.

    Independent of the analytic path above. With dps set, the three mean
    evaluations run at that many significant digits, which removes the
    round-off term (~eps * L / h^2) that dominates small curvatures in
    double precision.
    """
    p = float(p)
    h = float(h)
    if h <= 0.0:
        raise UsageError(f"step must be positive, got {h!r}")
    if dps is None:
        f_plus = _lehmer_value(spec, p + h)
        f_mid = _lehmer_value(spec, p)
        f_minus = _lehmer_value(spec, p - h)
        return (f_plus - 2.0 * f_mid + f_minus) / (h * h)
    with mp.workdps(dps):
        pm = mp.mpf(p)
        hm = mp.mpf(h)
        f_plus = _mp_lehmer(spec, pm + hm)
        f_mid = _mp_lehmer(spec, pm)
        f_minus = _mp_lehmer(spec, pm - hm)
        return float((f_plus - 2 * f_mid + f_minus) / (hm * hm))
