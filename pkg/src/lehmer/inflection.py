"""Location of every inflection point of the Lehmer mean.

Strategy: expand a symmetric scan range by doubling until the curvature has
its asymptotic signs (positive at the left end, negative at the right end)
and the mean itself sits within 1e-6 of its horizontal asymptotes at both
ends. Then scan a uniform grid, bracket every sign change, adaptively
densify suspicious root-free cells (curvature dipping far below its
neighborhood without crossing), and refine all brackets by batched
bisection.

The scanner never evaluates L'' directly. It uses an equivalent pairwise
form that carries sign and log magnitude separately, so endpoint sign tests
stay meaningful at exponents where the raw second derivative underflows:

    sign(L''(p)) = sign( sum_{i<j} exp(t_ij) (d_i + d_j) )
    t_ij = log(w_i w_j (x_i - x_j)(log x_i - log x_j)) + (p-1)(log x_i + log x_j)
    d_i  = sum_k v_k (log x_i - log x_k) / sum_k v_k,   v_k = w_k x_k^(p-1)

Each t_ij term is shifted by the running maximum before exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import mpmath as mp
import numpy as np

from .calculus import _EXTENDED_DPS, _mp_bracket, k_constant, second_derivative
from .core import MeanSpec, _lehmer_value, asymptotes
from .errors import DegenerateError, NoInflectionError, RangeExhaustedError, UsageError


__all__ = [
    "ScanConfig",
    "InflectionRoot",
    "InflectionReport",
    "CountBound",
    "count_bound",
    "find_inflections",
    "weighted_n2_inflection",
    "classify_n3_side",
]

ASYMPTOTE_TOLERANCE = 1e-6

_DENSIFY_DEPTH = 12
_DENSIFY_DIP = math.log(1e-3)  # midpoint dip vs neighborhood, log scale
_ESCALATION_FACTOR = 1e-3      # refined residual vs local curvature scale
_CHUNK_ELEMENTS = 1 << 21      # elements per vectorized kernel chunk
_PARTIAL_BUDGET = 400_000      # grid points for the post-exhaustion pass
_MAX_BISECT_ITER = 128


@dataclass(frozen=True)
class ScanConfig:
    """Scan policy. Defaults locate every known multi-root instance.

    precision_mode: "standard" refines with double-precision sign tests,
    "extended" re-refines every bracket with 50-digit sign tests, "auto"
    escalates only brackets whose refined residual stays above 1e-3 of the
    local curvature scale.
    """

    initial_half_width: float = 64.0
    expansion_factor: float = 2.0
    max_half_width: float = 1e6
    grid_points_per_unit: float = 8.0
    refine_tolerance: float = 1e-9
    precision_mode: str = "auto"

    def __post_init__(self):
        if not self.initial_half_width > 0.0:
            raise UsageError("initial_half_width must be positive")
        if not self.expansion_factor > 1.0:
            raise UsageError("expansion_factor must exceed 1")
        if self.max_half_width < self.initial_half_width:
            raise UsageError("max_half_width must be at least initial_half_width")
        if not self.grid_points_per_unit > 0.0:
            raise UsageError("grid_points_per_unit must be positive")
        if not self.refine_tolerance > 0.0:
            raise UsageError("refine_tolerance must be positive")
        if self.precision_mode not in ("standard", "extended", "auto"):
            raise UsageError(f"unknown precision mode {self.precision_mode!r}")


@dataclass(frozen=True)
class InflectionRoot:
    p_star: float
    bracket: tuple[float, float]
    residual: float
    direction: str  # "convex-to-concave" or "concave-to-convex"


@dataclass(frozen=True)
class InflectionReport:
    roots: tuple[InflectionRoot, ...]
    parity_ok: bool
    bound_j: int
    scan_range: tuple[float, float]
    precision_used: str
    warnings: tuple[str, ...] = ()


class CountBound(NamedTuple):
    j: int
    n_terms: int


def count_bound(n: int) -> CountBound:
    """Cap on the number of inflection points for n values.

    n_terms = n(n+4)(n-1)/6 counts the terms of the exponential polynomial
    whose zeros are the inflection points, so at most n_terms - 1 real zeros
    exist; since the count must be odd, an even cap drops by one more.
    """
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise UsageError(f"need an integer n >= 2, got {n!r}")
    n_terms = n * (n + 4) * (n - 1) // 6
    j = n_terms - 1
    if j % 2 == 0:
        j -= 1
    return CountBound(j=j, n_terms=n_terms)


# ---------------------------------------------------------------------------
# sign kernel


class _Kernel:
    """Vectorized sign and log|L''| evaluation over arrays of exponents."""

    def __init__(self, spec: MeanSpec):
        x = np.asarray(spec.values, dtype=float)
        l = np.asarray(spec.log_values, dtype=float)
        lw = np.asarray(spec.log_weights, dtype=float)
        self.l = l
        self.lw = lw
        self.ldiff_t = (l[:, None] - l[None, :]).T  # [k, i] = l_i - l_k
        ii, jj = np.triu_indices(len(x), k=1)
        prod = (x[ii] - x[jj]) * (l[ii] - l[jj])
        keep = prod > 0.0  # drops equal values and log collisions
        self.ii = ii[keep]
        self.jj = jj[keep]
        self.g = lw[self.ii] + lw[self.jj] + np.log(prod[keep])
        self.sl = l[self.ii] + l[self.jj]
        self.n_pairs = int(self.g.shape[0])

    def __call__(self, ps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        ps = np.atleast_1d(np.asarray(ps, dtype=float))
        m = ps.shape[0]
        n = self.l.shape[0]
        per_point = max(n * n, self.n_pairs, 1)
        chunk = max(1, _CHUNK_ELEMENTS // per_point)
        signs = np.empty(m, dtype=np.int8)
        logmag = np.empty(m, dtype=float)
        for start in range(0, m, chunk):
            stop = min(start + chunk, m)
            s, lm = self._eval(ps[start:stop])
            signs[start:stop] = s
            logmag[start:stop] = lm
        return signs, logmag

    def _eval(self, ps: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        q = ps[:, None] - 1.0
        b = self.lw[None, :] + q * self.l[None, :]
        shift = b.max(axis=1)
        v = np.exp(b - shift[:, None])
        sv = v.sum(axis=1)
        d = (v @ self.ldiff_t) / sv[:, None]
        t = q * self.sl[None, :] + self.g[None, :]
        t_max = t.max(axis=1)
        qsum = (np.exp(t - t_max[:, None]) * (d[:, self.ii] + d[:, self.jj])).sum(axis=1)
        with np.errstate(divide="ignore"):
            logmag = t_max + np.log(np.abs(qsum)) - 2.0 * (shift + np.log(sv))
        return np.sign(qsum).astype(np.int8), logmag


def _mp_sign(spec: MeanSpec, p: float, dps: int = _EXTENDED_DPS) -> int:
    """Sign of L''(p) at dps digits; L > 0, so the bracket's sign suffices."""
    with mp.workdps(dps):
        return int(mp.sign(_mp_bracket(spec, mp.mpf(p))))


# ---------------------------------------------------------------------------
# scan machinery


class _Bracket:
    __slots__ = ("lo", "hi", "sign_lo", "local_log_scale", "exact_p")

    def __init__(self, lo: float, hi: float, sign_lo: int, local_log_scale: float, exact_p: float | None = None):
        self.lo = lo
        self.hi = hi
        self.sign_lo = sign_lo
        self.local_log_scale = local_log_scale
        self.exact_p = exact_p  # set when the grid hit the root exactly


def _build_grid(half: float, per_unit: float) -> np.ndarray:
    m = int(math.floor(half * per_unit + 1e-9))
    ps = np.arange(-m, m + 1, dtype=float) / per_unit
    if ps[0] > -half:
        ps = np.concatenate(([-half], ps, [half]))
    return ps


def _window_max(a: np.ndarray, radius: int) -> np.ndarray:
    out = a.copy()
    for shift in range(1, radius + 1):
        out[shift:] = np.maximum(out[shift:], a[:-shift])
        out[:-shift] = np.maximum(out[:-shift], a[shift:])
    return out


def _zero_runs(zero_mask: np.ndarray) -> list[tuple[int, int]]:
    idx = np.nonzero(zero_mask)[0]
    if idx.size == 0:
        return []
    runs = []
    start = prev = int(idx[0])
    for k in idx[1:]:
        k = int(k)
        if k == prev + 1:
            prev = k
        else:
            runs.append((start, prev))
            start = prev = k
    runs.append((start, prev))
    return runs


def _collect_brackets(
    kernel: _Kernel, ps: np.ndarray, signs: np.ndarray, logmag: np.ndarray, warnings: list[str]
) -> list[_Bracket]:
    brackets: list[_Bracket] = []
    scale_pt = _window_max(logmag, 2)

    # grid points where the kernel is exactly zero: either a root that fell
    # on the grid (opposite flanking signs) or a tangential touch
    for a, b in _zero_runs(signs == 0):
        if a == 0 or b == len(ps) - 1:
            warnings.append(f"zero curvature at scan boundary near p={ps[a]:.6g}; skipped")
            continue
        s_left = int(signs[a - 1])
        s_right = int(signs[b + 1])
        local = max(float(logmag[a - 1]), float(logmag[b + 1]))
        if s_left != s_right:
            mid = float(ps[(a + b) // 2])
            brackets.append(_Bracket(float(ps[a - 1]), float(ps[b + 1]), s_left, local, exact_p=mid))
        else:
            warnings.append(
                f"tangential zero of the second derivative near p={ps[(a + b) // 2]:.6g}; "
                "not counted as an inflection"
            )

    # ordinary sign changes between adjacent grid points
    change = np.nonzero(signs[:-1] * signs[1:] < 0)[0]
    for i in change:
        i = int(i)
        local = float(max(scale_pt[i], scale_pt[i + 1]))
        brackets.append(_Bracket(float(ps[i]), float(ps[i + 1]), int(signs[i]), local))

    # adaptive densification of equal-sign cells whose midpoint curvature
    # dips far below the neighborhood scale: paired roots can hide there
    cells = np.nonzero((signs[:-1] == signs[1:]) & (signs[:-1] != 0))[0]
    if cells.size:
        los = ps[cells].astype(float)
        his = ps[cells + 1].astype(float)
        sgn = signs[cells].astype(np.int8)
        lml = logmag[cells].astype(float)
        lmh = logmag[cells + 1].astype(float)
        thr = _DENSIFY_DIP + np.maximum(scale_pt[cells], scale_pt[cells + 1])
        local_scale = np.maximum(scale_pt[cells], scale_pt[cells + 1])
        for _depth in range(_DENSIFY_DEPTH):
            if los.size == 0:
                break
            mids = 0.5 * (los + his)
            sm, lmm = kernel(mids)
            opp = (sm != 0) & (sm != sgn)
            for idx in np.nonzero(opp)[0]:
                idx = int(idx)
                brackets.append(_Bracket(float(los[idx]), float(mids[idx]), int(sgn[idx]), float(local_scale[idx])))
                brackets.append(_Bracket(float(mids[idx]), float(his[idx]), int(sm[idx]), float(local_scale[idx])))
            tangent = sm == 0
            for idx in np.nonzero(tangent)[0]:
                warnings.append(
                    f"tangential zero of the second derivative near p={mids[int(idx)]:.6g}; "
                    "not counted as an inflection"
                )
            keep = ~(opp | tangent)
            left_keep = keep & (np.minimum(lml, lmm) < thr)
            right_keep = keep & (np.minimum(lmm, lmh) < thr)
            los = np.concatenate((los[left_keep], mids[right_keep]))
            his = np.concatenate((mids[left_keep], his[right_keep]))
            sgn = np.concatenate((sgn[left_keep], sgn[right_keep]))
            new_lml = np.concatenate((lml[left_keep], lmm[right_keep]))
            new_lmh = np.concatenate((lmm[left_keep], lmh[right_keep]))
            thr = np.concatenate((thr[left_keep], thr[right_keep]))
            local_scale = np.concatenate((local_scale[left_keep], local_scale[right_keep]))
            lml, lmh = new_lml, new_lmh

    brackets.sort(key=lambda br: br.lo)
    return brackets


def _bisect_all(kernel: _Kernel, brackets: list[_Bracket], tolerance: float) -> np.ndarray:
    """Refine every bracket by batched bisection; returns the midpoints.

    The brackets themselves keep their original endpoints: escalation needs
    endpoints whose double-precision signs are trustworthy, and those are
    the grid-scale ones, not the refined pair straddling the root.
    """
    if not brackets:
        return np.empty(0)
    lo = np.array([br.lo for br in brackets])
    hi = np.array([br.hi for br in brackets])
    s_lo = np.array([br.sign_lo for br in brackets], dtype=np.int8)
    for k, br in enumerate(brackets):
        if br.exact_p is not None:
            lo[k] = hi[k] = br.exact_p
    for _ in range(_MAX_BISECT_ITER):
        active = np.nonzero(hi - lo > tolerance)[0]
        if active.size == 0:
            break
        mids = 0.5 * (lo[active] + hi[active])
        # guard against midpoint degeneracy at the resolution of the floats
        stuck = (mids <= lo[active]) | (mids >= hi[active])
        if stuck.any():
            hi[active[stuck]] = lo[active[stuck]] = mids[stuck]
            active = active[~stuck]
            mids = mids[~stuck]
            if active.size == 0:
                continue
        sm, _ = kernel(mids)
        hit = sm == 0
        lo_side = sm == s_lo[active]
        hi_side = ~hit & ~lo_side
        lo[active[hit]] = hi[active[hit]] = mids[hit]
        lo[active[lo_side]] = mids[lo_side]
        hi[active[hi_side]] = mids[hi_side]
    return 0.5 * (lo + hi)


def _bisect_mp(spec: MeanSpec, lo: float, hi: float, tolerance: float) -> float | None:
    """50-digit re-bisection; None when the endpoint signs do not differ."""
    s_lo = _mp_sign(spec, lo)
    s_hi = _mp_sign(spec, hi)
    if s_lo == 0:
        return lo
    if s_hi == 0:
        return hi
    if s_lo == s_hi:
        return None
    while hi - lo > tolerance:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        s_mid = _mp_sign(spec, mid)
        if s_mid == 0:
            return mid
        if s_mid == s_lo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _direction(sign_lo: int) -> str:
    return "convex-to-concave" if sign_lo > 0 else "concave-to-convex"


def _scan_and_refine(spec: MeanSpec, kernel: _Kernel, half: float, config: ScanConfig, capped: bool) -> InflectionReport:
    warnings: list[str] = []
    per_unit = config.grid_points_per_unit
    if capped:
        warnings.append(
            f"scan range exhausted at half-width {half:g}; results cover a budget-limited pass only"
        )
        per_unit = min(per_unit, _PARTIAL_BUDGET / (2.0 * half))
    ps = _build_grid(half, per_unit)
    signs, logmag = kernel(ps)
    brackets = _collect_brackets(kernel, ps, signs, logmag, warnings)

    mids = _bisect_all(kernel, brackets, config.refine_tolerance)
    precision_flag = config.precision_mode == "extended"
    sd_mode = config.precision_mode

    refined: list[tuple[float, _Bracket, float]] = []
    for k, br in enumerate(brackets):
        p_star = float(mids[k]) if br.exact_p is None else br.exact_p
        if config.precision_mode == "extended":
            better = _bisect_mp(spec, br.lo, br.hi, config.refine_tolerance)
            if better is not None:
                p_star = better
        residual = abs(second_derivative(spec, p_star, precision=sd_mode))
        if config.precision_mode == "auto" and residual > _ESCALATION_FACTOR * math.exp(br.local_log_scale):
            better = _bisect_mp(spec, br.lo, br.hi, config.refine_tolerance)
            if better is not None:
                p_star = better
                residual = abs(second_derivative(spec, p_star, precision="extended"))
                precision_flag = True
            else:
                warnings.append(
                    f"residual {residual:.3g} near p={p_star:.6g} stayed above the local scale "
                    "and the 50-digit endpoint signs do not bracket a crossing"
                )
        refined.append((p_star, br, residual))

    refined.sort(key=lambda item: item[0])

    # merge near-coincident roots instead of silently double-counting
    roots: list[InflectionRoot] = []
    merge_gap = 2.0 * config.refine_tolerance
    group: list[tuple[float, _Bracket, float]] = []

    def flush_group():
        if not group:
            return
        if len(group) == 1:
            p_star, br, residual = group[0]
            roots.append(
                InflectionRoot(
                    p_star=p_star, bracket=(br.lo, br.hi), residual=residual, direction=_direction(br.sign_lo)
                )
            )
        else:
            p_star = math.fsum(item[0] for item in group) / len(group)
            residual = abs(second_derivative(spec, p_star, precision=sd_mode))
            warnings.append(
                f"merged {len(group)} near-coincident roots near p={p_star:.6g}; parity may be unreliable"
            )
            roots.append(
                InflectionRoot(
                    p_star=p_star,
                    bracket=(group[0][1].lo, group[-1][1].hi),
                    residual=residual,
                    direction=_direction(group[0][1].sign_lo),
                )
            )

    for item in refined:
        if group and item[0] - group[-1][0] < merge_gap:
            group.append(item)
        else:
            flush_group()
            group = [item]
    flush_group()

    for k, root in enumerate(roots):
        expected = "convex-to-concave" if k % 2 == 0 else "concave-to-convex"
        if root.direction != expected:
            warnings.append(f"direction sequence is not alternating near p={root.p_star:.6g}")
            break

    return InflectionReport(
        roots=tuple(roots),
        parity_ok=len(roots) % 2 == 1,
        bound_j=count_bound(spec.n).j,
        scan_range=(-half, half),
        precision_used="extended" if precision_flag else "standard",
        warnings=tuple(warnings),
    )


def find_inflections(spec: MeanSpec, config: ScanConfig | None = None) -> InflectionReport:
    """Locate all inflection points of L.

    Raises NoInflectionError for constant specs and RangeExhaustedError
    (carrying a partial report) when the asymptotic regime is not reached
    within max_half_width.
    """
    if config is None:
        config = ScanConfig()
    if spec.is_constant:
        raise NoInflectionError("the mean is constant; there is no inflection point")
    kernel = _Kernel(spec)
    if kernel.n_pairs == 0:
        raise NoInflectionError("values are equal at working precision; the mean is constant")
    lo_asym, hi_asym = asymptotes(spec)

    half = min(config.initial_half_width, config.max_half_width)
    while True:
        s, _ = kernel(np.array([-half, half]))
        signs_ok = s[0] > 0 and s[1] < 0
        prox_ok = (
            abs(_lehmer_value(spec, -half) - lo_asym) <= ASYMPTOTE_TOLERANCE
            and abs(_lehmer_value(spec, half) - hi_asym) <= ASYMPTOTE_TOLERANCE
        )
        if signs_ok and prox_ok:
            break
        if half >= config.max_half_width:
            partial = _scan_and_refine(spec, kernel, half, config, capped=True)
            raise RangeExhaustedError(
                f"no asymptotic curvature regime within half-width {config.max_half_width:g}",
                report=partial,
            )
        half = min(half * config.expansion_factor, config.max_half_width)

    return _scan_and_refine(spec, kernel, half, config, capped=False)


def weighted_n2_inflection(spec: MeanSpec) -> float:
    """Closed-form inflection exponent for a weighted pair.

    p* = 1 - log(w1/w2) / log(x1/x2); the mean at p* equals the plain
    arithmetic mean (x1 + x2) / 2. Unit weights give exactly 1.
    """
    if spec.n != 2:
        raise UsageError(f"this operation needs exactly 2 values, got {spec.n}")
    x1, x2 = spec.values
    if x1 == x2:
        raise DegenerateError("equal values: the mean has no unique inflection exponent")
    l1, l2 = spec.log_values
    lw1, lw2 = spec.log_weights
    return 1.0 - (lw1 - lw2) / (l1 - l2)


def classify_n3_side(spec: MeanSpec) -> str:
    """Which side of p = 1 the unique three-value inflection point lies on.

    Returns "below_one" when the constant K is negative, "above_one" when
    positive, "degenerate" when the values are all equal.
    """
    if spec.is_constant:
        return "degenerate"
    k = k_constant(spec).k
    if k < 0.0:
        return "below_one"
    if k > 0.0:
        return "above_one"
    return "degenerate"
