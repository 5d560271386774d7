"""The trigonometric Jacobi measure on (0, pi): density, interval masses via
the incomplete Beta function, ball volumes and their closed-form surrogate,
and the cone weight used by the area integrals."""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .quadrature import gauss_jacobi, graded_panels, panel_rule


@dataclass(frozen=True)
class Ball:
    """Interval ball (center - radius, center + radius) clipped to (0, pi)."""

    center: float
    radius: float

    def __post_init__(self):
        if not (0 < self.center < math.pi):
            raise ValueError("ball center must lie in (0, pi)")
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")

    @property
    def interval(self):
        return max(self.center - self.radius, 0.0), min(self.center + self.radius, math.pi)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on a strictly increasing interior grid."""

    nodes: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "values", values)
        if nodes.ndim != 1 or nodes.shape != values.shape:
            raise ValueError("nodes and values must be 1-d arrays of equal length")
        if nodes.size and not np.all(np.diff(nodes) > 0):
            raise ValueError("nodes must be strictly increasing")
        if nodes.size and (nodes[0] <= 0 or nodes[-1] >= math.pi):
            raise ValueError("nodes must be interior to (0, pi)")


def density(theta, p):
    """(sin(theta/2))^(2*alpha+1) (cos(theta/2))^(2*beta+1), theta in (0, pi)."""
    th = np.asarray(theta, dtype=float)
    if np.any(th <= 0) or np.any(th >= math.pi):
        raise ValueError("density is defined on the open interval (0, pi)")
    val = (np.sin(th / 2) ** (2 * p.alpha + 1)
           * np.cos(th / 2) ** (2 * p.beta + 1))
    return float(val) if np.isscalar(theta) else val


def measure_total(p) -> float:
    """mu(0, pi) = B(alpha+1, beta+1)."""
    return math.exp(gammaln(p.alpha + 1) + gammaln(p.beta + 1)
                    - gammaln(p.alpha + p.beta + 2))


class _ContinuedFractionStall(Exception):
    pass


def _betacf(a: float, b: float, x: float, itmax: int = 200) -> float:
    # modified Lentz evaluation of the incomplete Beta continued fraction
    tiny = 1e-300
    eps = 1e-15
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, itmax + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            return h
    raise _ContinuedFractionStall(f"betacf stalled for a={a}, b={b}, x={x}")


def _betainc_quadrature(a: float, b: float, x: float, n: int = 96) -> float:
    # fallback: int_0^x u^(a-1) (1-u)^(b-1) du / B(a,b), absorbing the left
    # endpoint singularity into a (0, a-1) Gauss-Jacobi rule on [-1, 1]
    nodes, weights = gauss_jacobi(n, 0.0, a - 1.0)
    u = x * (nodes + 1.0) / 2.0
    integral = (x / 2.0) ** a * np.sum(weights * (1.0 - u) ** (b - 1.0))
    return integral * math.exp(gammaln(a + b) - gammaln(a) - gammaln(b))


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) by continued fraction with the symmetry flip at the mean,
    falling back to quadrature if the fraction stalls."""
    if a <= 0 or b <= 0:
        raise ValueError("Beta parameters must be positive")
    if x <= 0:
        return 0.0
    if x >= 1:
        return 1.0
    log_front = (gammaln(a + b) - gammaln(a) - gammaln(b)
                 + a * math.log(x) + b * math.log1p(-x))
    try:
        if x < (a + 1) / (a + b + 2):
            return math.exp(log_front) * _betacf(a, b, x) / a
        return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b
    except _ContinuedFractionStall:
        if x < 0.5:
            return _betainc_quadrature(a, b, x)
        return 1.0 - _betainc_quadrature(b, a, 1.0 - x)


def measure_interval(lo: float, hi: float, p) -> float:
    """mu([lo, hi]) via the incomplete Beta function under x = sin^2(theta/2)."""
    if not (0 <= lo <= hi <= math.pi):
        raise ValueError(f"need 0 <= lo <= hi <= pi, got ({lo}, {hi})")
    if lo == hi:
        return 0.0
    a, b = p.alpha + 1.0, p.beta + 1.0
    x_lo = math.sin(lo / 2) ** 2
    x_hi = math.sin(hi / 2) ** 2
    frac = (regularized_incomplete_beta(a, b, x_hi)
            - regularized_incomplete_beta(a, b, x_lo))
    return measure_total(p) * frac


def _dyadic_x_breakpoints(x_lo: float, x_hi: float) -> np.ndarray:
    # panels doubling away from the endpoint singularities of the Jacobi
    # weight at x = -1 and x = +1
    pts = {x_lo, x_hi}
    d = 1.0 + x_lo
    while -1.0 + 2 * d < x_hi:
        d *= 2
        pts.add(-1.0 + d)
    d = 1.0 - x_hi
    while 1.0 - 2 * d > x_lo:
        d *= 2
        pts.add(1.0 - d)
    return np.array(sorted(pts))


def _interior_x_mass(x_lo: float, x_hi: float, p, order: int = 14) -> float:
    # integral of (1-x)^a (1+x)^b over an interval away from the endpoints
    x, w = panel_rule(_dyadic_x_breakpoints(x_lo, x_hi), order=order)
    return float(np.sum(w * (1.0 - x) ** p.alpha * (1.0 + x) ** p.beta))


def measure_interval_quad(lo: float, hi: float, p, n: int = 64) -> float:
    """Quadrature evaluation of mu([lo, hi]), independent of the incomplete
    Beta path.  Endpoint singularities of the density at 0 / pi are absorbed
    exactly into clipped Gauss-Jacobi rules in x = cos(theta); the interior
    remainder uses panels doubling away from the endpoints."""
    if not (0 <= lo <= hi <= math.pi):
        raise ValueError(f"need 0 <= lo <= hi <= pi, got ({lo}, {hi})")
    if lo == hi:
        return 0.0
    al, be = p.alpha, p.beta
    scale = 2.0 ** (-al - be - 1.0)
    if lo == 0.0 and hi == math.pi:
        nodes, weights = gauss_jacobi(n, al, be)
        return scale * float(np.sum(weights))
    if lo == 0.0:
        # exact singular rule on [0, mid], interior panels beyond
        mid = min(hi, math.pi / 2)
        nodes, weights = gauss_jacobi(n, al, 0.0)
        half = (1.0 - math.cos(mid)) / 2.0
        x = 1.0 - half * (1.0 - nodes)
        total = half ** (al + 1.0) * float(np.sum(weights * (1.0 + x) ** be))
        if hi > mid:
            total += _interior_x_mass(math.cos(hi), math.cos(mid), p)
        return scale * total
    if hi == math.pi:
        mid = max(lo, math.pi / 2)
        nodes, weights = gauss_jacobi(n, 0.0, be)
        half = (math.cos(mid) + 1.0) / 2.0
        x = -1.0 + half * (1.0 + nodes)
        total = half ** (be + 1.0) * float(np.sum(weights * (1.0 - x) ** al))
        if lo < mid:
            total += _interior_x_mass(math.cos(mid), math.cos(lo), p)
        return scale * total
    return scale * _interior_x_mass(math.cos(hi), math.cos(lo), p)


def ball_volume(t: float, theta: float, p) -> float:
    """mu of the ball (interval) of radius t around theta, clipped to (0, pi)."""
    if not t > 0:
        raise ValueError("ball radius must be positive")
    if not (0 < theta < math.pi):
        raise ValueError("ball center must lie in (0, pi)")
    return measure_interval(max(theta - t, 0.0), min(theta + t, math.pi), p)


def ball_volume_surrogate(r: float, theta: float, p) -> float:
    """Closed-form comparability surrogate for the ball volume:
    r (theta+r)^(2a+1) (pi-theta+r)^(2b+1) for r < pi, constant 1 for r >= pi."""
    if not r > 0:
        raise ValueError("radius must be positive")
    if r >= math.pi:
        return 1.0
    return (r * (theta + r) ** (2 * p.alpha + 1)
            * (math.pi - theta + r) ** (2 * p.beta + 1))


def omega(theta: float, eta, t: float, p):
    """Cone weight: density(theta+eta) / ball_volume(t, theta) when
    theta + eta lies in (0, pi), zero otherwise."""
    if not (0 < theta < math.pi):
        raise ValueError("theta must lie in (0, pi)")
    vol = ball_volume(t, theta, p)
    e = np.asarray(eta, dtype=float)
    psi = theta + e
    inside = (psi > 0) & (psi < math.pi)
    out = np.zeros(e.shape)
    if np.any(inside):
        out[inside] = density(psi[inside], p) / vol
    return float(out) if np.isscalar(eta) else out


def omega_integral_quad(theta: float, t: float, p, n: int = 64) -> float:
    """Quadrature of the cone weight over |eta| < t (independent check of the
    normalization identity; the exact value is 1)."""
    lo = max(theta - t, 0.0)
    hi = min(theta + t, math.pi)
    return measure_interval_quad(lo, hi, p, n=n) / ball_volume(t, theta, p)
