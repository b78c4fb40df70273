"""Independent reference computations used by the tests.

Nothing here imports the library's numerical kernels.
"""
from __future__ import annotations

import math

import numpy as np
from scipy import integrate
from scipy.special import airy, gamma

AI0_CLOSED_FORM = 3 ** (-2 / 3) / gamma(2 / 3)

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _panel_rule(a, b, panels):
    """Composite Gauss-Legendre nodes/weights on [a, b] (a, b may be arrays)."""
    a = np.atleast_1d(np.asarray(a, dtype=float))[:, None, None]
    b = np.atleast_1d(np.asarray(b, dtype=float))[:, None, None]
    edges = np.linspace(0.0, 1.0, panels + 1)
    lo = edges[:-1][None, :, None]
    h = (edges[1] - edges[0])
    tau = lo + 0.5 * h * (_GL_NODES[None, None, :] + 1)
    t = a + (b - a) * tau
    w = 0.5 * h * (b - a) * _GL_WEIGHTS[None, None, :]
    n = t.shape[0]
    return t.reshape(n, -1), np.broadcast_to(w, t.shape).reshape(n, -1)


def airy_quadrature(x, chunk: int = 500) -> np.ndarray:
    """Ai(x) from its oscillatory integral representation.

    Ai(x) = (1/pi) Re int_0^inf exp(j (t^3/3 + x t)) dt.  The real-axis part
    runs to T = sqrt(max(0, -x)) + 2, past the stationary point, and the tail
    is rotated onto the ray t = T + u exp(j pi/6) where every term of the
    exponent decays.  Both pieces use composite Gauss-Legendre rules.
    """
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(xs)
    rot = np.exp(1j * math.pi / 6)
    for start in range(0, xs.size, chunk):
        xc = xs[start:start + chunk]
        T = np.sqrt(np.maximum(0.0, -xc)) + 2.0
        t, w = _panel_rule(np.zeros_like(T), T, panels=160)
        head = np.sum(w * np.exp(1j * (t**3 / 3 + xc[:, None] * t)), axis=1)
        u, wu = _panel_rule(np.zeros_like(T), np.full_like(T, 8.0), panels=80)
        z = T[:, None] + u * rot
        tail = rot * np.sum(wu * np.exp(1j * (z**3 / 3 + xc[:, None] * z)), axis=1)
        out[start:start + chunk] = (head + tail).real / math.pi
    return out if np.ndim(x) else float(out[0])


def airy_adaptive(x: float) -> float:
    """Same representation integrated with scipy's adaptive quadrature (slow, spot checks)."""
    T = math.sqrt(max(0.0, -x)) + 2.0
    head, _ = integrate.quad(lambda t: math.cos(t**3 / 3 + x * t), 0.0, T, limit=400, epsabs=1e-13, epsrel=1e-13)
    rot = np.exp(1j * math.pi / 6)

    def tail(u, part):
        z = T + u * rot
        v = rot * np.exp(1j * (z**3 / 3 + x * z))
        return v.real if part == 0 else v.imag

    tr, _ = integrate.quad(tail, 0.0, np.inf, args=(0,), limit=400, epsabs=1e-14)
    return (head + tr) / math.pi


def airy_first_zero() -> float:
    """Bisection for the first zero of Ai using the quadrature oracle."""
    lo, hi = -2.5, -2.2
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if airy_quadrature(lo) * airy_quadrature(mid) <= 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def decay_correlation(y, s0, a_m, a_n) -> float:
    """Normalized correlation of two Airy envelopes sharing (theta, r, s0)."""
    ai2 = airy(y / s0)[0] ** 2
    num = np.sum(ai2 * np.exp((a_m + a_n) * y / s0))
    den = math.sqrt(np.sum(ai2 * np.exp(2 * a_m * y / s0))) * math.sqrt(np.sum(ai2 * np.exp(2 * a_n * y / s0)))
    return float(num / den)


def segment_hits_rect(p0, p1, rect, samples: int | None = None) -> bool:
    """Does the closed segment p0-p1 meet the closed rectangle?

    Exact test: endpoint inside, or the segment crosses one of the four edges
    (orientation predicates, including collinear touching).
    """
    xl, xr, yd, yu = rect

    def inside(p):
        return xl <= p[0] <= xr and yd <= p[1] <= yu

    if inside(p0) or inside(p1):
        return True

    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if v == 0 else (1 if v > 0 else -1)

    def on_seg(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    def cross(a, b, c, d):
        o1, o2, o3, o4 = orient(a, b, c), orient(a, b, d), orient(c, d, a), orient(c, d, b)
        if o1 != o2 and o3 != o4:
            return True
        return (
            (o1 == 0 and on_seg(a, b, c))
            or (o2 == 0 and on_seg(a, b, d))
            or (o3 == 0 and on_seg(c, d, a))
            or (o4 == 0 and on_seg(c, d, b))
        )

    corners = [(xl, yd), (xr, yd), (xr, yu), (xl, yu)]
    return any(cross(p0, p1, corners[i], corners[(i + 1) % 4]) for i in range(4))


def brute_blockage_ratio(y_elements, user, rects) -> float:
    hits = [any(segment_hits_rect((0.0, y), user, r) for r in rects) for y in y_elements]
    return sum(hits) / len(hits)
