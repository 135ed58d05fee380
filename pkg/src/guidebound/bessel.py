"""First-kind Bessel functions J_m and their positive zeros j_{m,k}.

Self-contained evaluation (no special-function library):
  * ascending power series for x <= 12,
  * Miller backward recurrence with the even-order normalization for
    12 < x < 40, where the series cancels catastrophically in float64,
  * Hankel asymptotic expansion for x >= 40.
Zeros are bracketed by a scan near the McMahon estimates, bisected, and
polished by Newton steps.
"""

from __future__ import annotations

import math
from functools import lru_cache

MAX_ORDER = 5
MAX_ZERO_INDEX = 20

_SERIES_CUT = 12.0
_ASYMPTOTIC_CUT = 40.0


def bessel_j(m: int, x: float) -> float:
    """J_m(x) for integer order 0 <= m <= MAX_ORDER and x >= 0."""
    if not 0 <= m <= MAX_ORDER:
        raise ValueError(f"order m={m} outside implemented range [0, {MAX_ORDER}]")
    if x < 0:
        raise ValueError("negative argument")
    if x == 0.0:
        return 1.0 if m == 0 else 0.0
    if x <= _SERIES_CUT:
        return _j_series(m, x)
    if x < _ASYMPTOTIC_CUT:
        return _j_miller(m, x)
    return _j_asymptotic(m, x)


def bessel_j_deriv(m: int, x: float) -> float:
    """d/dx J_m(x) via the standard recurrence."""
    if m == 0:
        return -bessel_j(1, x)
    return bessel_j(m - 1, x) - (m / x) * bessel_j(m, x)


def _j_series(m: int, x: float) -> float:
    half = 0.5 * x
    term = half**m / math.factorial(m)
    acc = term
    k = 0
    while True:
        k += 1
        term *= -(half * half) / (k * (m + k))
        acc += term
        if abs(term) <= 1e-18 * max(abs(acc), 1e-300):
            return acc
        if k > 300:  # unreachable for x <= 12
            raise RuntimeError("series did not terminate")


def _j_miller(m: int, x: float) -> float:
    # Backward recurrence from a start order well past the turning point;
    # normalized with J_0 + 2*sum J_{2k} = 1.
    nstart = int(x + 20 + 12 * math.sqrt(x))
    if nstart % 2:
        nstart += 1
    jp = 0.0
    jc = 1e-300
    norm = 0.0
    wanted = 0.0
    for n in range(nstart, 0, -1):
        jm = (2.0 * n / x) * jc - jp
        jp, jc = jc, jm
        # jc now approximates J_{n-1} up to a common factor
        if abs(jc) > 1e250:
            jp *= 1e-250
            jc *= 1e-250
            norm *= 1e-250
            wanted *= 1e-250
        if n - 1 == m:
            wanted = jc
        if n - 1 > 0 and (n - 1) % 2 == 0:
            norm += 2.0 * jc
    norm += jc  # J_0 term
    return wanted / norm


def _j_asymptotic(m: int, x: float) -> float:
    # Hankel expansion: J_m = sqrt(2/(pi x)) [P cos(chi) - Q sin(chi)],
    # chi = x - (m/2 + 1/4) pi.  Terms decay fast for x >= 40, m <= 5.
    mu = 4.0 * m * m
    p, q = 1.0, (mu - 1.0) / (8.0 * x)
    term_p, term_q = 1.0, q
    for k in range(1, 14):
        term_p *= (
            -(mu - (4 * k - 3) ** 2) * (mu - (4 * k - 1) ** 2)
            / ((2 * k - 1) * (2 * k) * (8.0 * x) ** 2)
        )
        p += term_p
        term_q *= (
            -(mu - (4 * k - 1) ** 2) * (mu - (4 * k + 1) ** 2)
            / ((2 * k) * (2 * k + 1) * (8.0 * x) ** 2)
        )
        q += term_q
    chi = x - (0.5 * m + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


@lru_cache(maxsize=None)
def bessel_zero(m: int, k: int) -> float:
    """k-th positive zero of J_m, for m <= 5, k <= 20.

    Accuracy target: 1e-12 relative, with |J_m(zero)| below 1e-12.
    """
    if not 0 <= m <= MAX_ORDER:
        raise ValueError(f"order m={m} outside implemented range [0, {MAX_ORDER}]")
    if not 1 <= k <= MAX_ZERO_INDEX:
        raise ValueError(f"zero index k={k} outside implemented range [1, {MAX_ZERO_INDEX}]")
    lo, hi = _bracket(m, k)
    f_lo = bessel_j(m, lo)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        f_mid = bessel_j(m, mid)
        if f_mid == 0.0:
            lo = hi = mid
            break
        if f_lo * f_mid < 0.0:
            hi = mid
        else:
            lo, f_lo = mid, f_mid
        if hi - lo < 1e-13 * hi:
            break
    root = 0.5 * (lo + hi)
    for _ in range(4):  # Newton polish
        f = bessel_j(m, root)
        df = bessel_j_deriv(m, root)
        step = f / df
        root -= step
        if abs(step) < 1e-15 * root:
            break
    return root


def _bracket(m: int, k: int):
    # Scan outward from below the first zero; zeros of J_m are separated by
    # more than pi/2 in this range, so a 0.25 step cannot skip one.
    step = 0.25
    x = max(0.5, m * 0.5)  # J_m > 0 on (0, j_{m,1})
    crossings = 0
    f_prev = bessel_j(m, x)
    while x < 120.0:
        x_next = x + step
        f_next = bessel_j(m, x_next)
        if f_prev == 0.0:
            crossings += 1
            if crossings == k:
                return x - 1e-9, x + 1e-9
        elif f_prev * f_next < 0.0:
            crossings += 1
            if crossings == k:
                return x, x_next
        x, f_prev = x_next, f_next
    raise RuntimeError(f"failed to bracket zero j_{{{m},{k}}}")
