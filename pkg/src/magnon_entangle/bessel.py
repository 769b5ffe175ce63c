"""Bessel function of the first kind, order zero.

Power series for |x| <= 8; beyond that the Hankel asymptotic form with the
Cephes rational approximations for the amplitude and phase corrections.
"""

from __future__ import annotations

import math

_SERIES_MAX = 8.0

# Cephes j0.c, |x| > 5 branch.
_PP = (7.96936729297347051624e-4, 8.28352392107440799803e-2, 1.23953371646414299388e0,
       5.44725003058768775090e0, 8.74716500199817011941e0, 5.30324038235394892183e0,
       9.99999999999999997821e-1)
_PQ = (9.24408810558863637013e-4, 8.56288474354474431428e-2, 1.25352743901058953537e0,
       5.47097740330417105182e0, 8.76190883237069594232e0, 5.30605288235394617618e0,
       1.00000000000000000218e0)
_QP = (-1.13663838898469149931e-2, -1.28252718670509318512e0, -1.95539544257735972385e1,
       -9.32060152123768231369e1, -1.77681167980488050595e2, -1.47077505154951170175e2,
       -5.14105326766599330220e1, -6.05014350600728481186e0)
_QQ = (1.0, 6.43178256118178023184e1, 8.56430025976980587198e2, 3.88240183605401609683e3,
       7.24046774195652478189e3, 5.93072701187316984827e3, 2.06209331660327847417e3,
       2.42005740240291393179e2)


def _polevl(x, coef):
    acc = 0.0
    for c in coef:
        acc = acc * x + c
    return acc


def _series(x):
    q = -0.25 * x * x
    term = 1.0
    total = 1.0
    k = 0
    while True:
        k += 1
        term *= q / (k * k)
        total += term
        if abs(term) < 1e-17 * max(1.0, abs(total)) and k > 2:
            return total


def j0(x: float) -> float:
    """J0(x) for finite real x (even function)."""
    x = abs(float(x))
    if not math.isfinite(x):
        raise ValueError("j0 requires a finite argument")
    if x <= _SERIES_MAX:
        return _series(x)
    w = 5.0 / x
    z = w * w
    p = _polevl(z, _PP) / _polevl(z, _PQ)
    q = _polevl(z, _QP) / _polevl(z, _QQ)
    xn = x - math.pi / 4
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(xn) - w * q * math.sin(xn))
