"""Exponential integral and Gauss-Legendre nodes."""

import functools

import numpy as np

EULER_GAMMA = 0.57721566490153286061
_SPLIT = 5.0
_SERIES_TERMS = 80
_CF_ITERS = 200


def _series_tail(x):
    # sum_{k>=1} x^k / (k k!)
    total = np.zeros_like(x)
    term = np.ones_like(x)
    for k in range(1, _SERIES_TERMS + 1):
        term = term * x / k
        total = total + term / k
    return total


def _scaled_e1_cf(y):
    # e^y E1(y) for y > ~1 by modified Lentz on the continued fraction
    tiny = 1e-300
    b = y + 1.0
    c = np.full_like(y, 1.0 / tiny)
    d = 1.0 / b
    h = d.copy()
    for i in range(1, _CF_ITERS + 1):
        an = -float(i * i)
        b = b + 2.0
        d = 1.0 / (an * d + b)
        c = b + an / c
        delta = c * d
        h = h * delta
        if np.all(np.abs(delta - 1.0) < 1e-16):
            break
    return h


def scaled_e1(y):
    """``exp(y) * E1(y)`` for ``y > 0``, stable for large ``y``."""
    y = np.asarray(y, dtype=float)
    if np.any(y <= 0):
        raise ValueError("scaled_e1 needs y > 0")
    out = np.empty_like(y)
    small = y <= _SPLIT
    if np.any(small):
        ys = y[small]
        out[small] = np.exp(ys) * -(EULER_GAMMA + np.log(ys) + _series_tail(-ys))
    if np.any(~small):
        out[~small] = _scaled_e1_cf(y[~small])
    return out


def exp_integral_ei(x):
    """Exponential integral ``Ei(x) = int_{-inf}^x e^t / t dt`` for ``x < 0``.

    Uses the power series ``C + ln(-x) + sum x^k / (k k!)`` for ``|x| <= 5``
    and a continued fraction beyond.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x >= 0) or np.any(np.isnan(x)):
        raise ValueError("Ei is only implemented for x < 0")
    out = np.empty_like(x)
    small = x >= -_SPLIT
    if np.any(small):
        xs = x[small]
        out[small] = EULER_GAMMA + np.log(-xs) + _series_tail(xs)
    if np.any(~small):
        y = -x[~small]
        out[~small] = -np.exp(-y) * _scaled_e1_cf(y)
    return out[()] if out.ndim == 0 else out


@functools.lru_cache(maxsize=16)
def gauss_legendre(n: int, a: float, b: float):
    """Nodes and weights of the ``n``-point rule on ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = (b - a) / 2
    nodes = half * x + (a + b) / 2
    weights = half * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights
