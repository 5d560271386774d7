"""Classical and normalized Jacobi trigonometric polynomials.

Provides the orthonormal basis functions c_n P_n^{(a,b)}(cos theta) for the
measure (sin(theta/2))^(2a+1) (cos(theta/2))^(2b+1) dtheta on (0, pi), their
eigenvalues under the associated second order operator, and the first order
derivative structure: d/dtheta acting on a closed algebra of terms
coeff * sin^p(theta) cos^q(theta) * P_n^{(a,b)}(cos theta), plus the formal
adjoint of d/dtheta.
"""

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numba import njit
from numpy.polynomial import polynomial as npoly
from scipy.special import gammaln

ENDPOINT_MARGIN = 1e-6


@dataclass(frozen=True)
class JacobiParams:
    """Type parameters (alpha, beta), both > -1."""

    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(
                f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})"
            )

    @property
    def lam0(self) -> float:
        """Smallest eigenvalue ((alpha+beta+1)/2)^2."""
        return ((self.alpha + self.beta + 1) / 2) ** 2

    @property
    def regime(self) -> str:
        """Majorant regime, decided by the signs of alpha+1/2 and beta+1/2.

        'i'   : alpha, beta >= -1/2
        'ii'  : alpha < -1/2 <= beta
        'iii' : beta < -1/2 <= alpha
        'iv'  : alpha, beta < -1/2
        """
        a_low = self.alpha < -0.5
        b_low = self.beta < -0.5
        if not a_low and not b_low:
            return "i"
        if a_low and not b_low:
            return "ii"
        if not a_low and b_low:
            return "iii"
        return "iv"


@dataclass(frozen=True)
class SpectralTruncation:
    """Series cutoff policy for spectral sums.

    fixed mode uses exactly n_max + 1 terms.  adaptive mode stops once three
    consecutive terms fall below tail_eps (relative to the running sum and 1)
    with a floor of n >= 8, and fails if that has not happened by 10 * n_max.
    tail_eps = None picks 1e-12, loosened to 1e-10 for derivative order >= 4.
    """

    mode: str = "adaptive"
    n_max: int = 4096
    tail_eps: float | None = None

    def __post_init__(self):
        if self.mode not in ("fixed", "adaptive"):
            raise ValueError(f"unknown truncation mode {self.mode!r}")
        if self.n_max < 0:
            raise ValueError("n_max must be nonnegative")
        if self.tail_eps is not None and not self.tail_eps > 0:
            raise ValueError("tail_eps must be positive")

    def resolve_eps(self, deriv_order: int = 0) -> float:
        if self.tail_eps is not None:
            return self.tail_eps
        return 1e-10 if deriv_order >= 4 else 1e-12

    @property
    def budget(self) -> int:
        return self.n_max if self.mode == "fixed" else 10 * self.n_max


def for_time(t: float, n_max_floor: int = 256) -> SpectralTruncation:
    """Adaptive truncation sized for the exp(-t n) decay at time scale t.

    The cap keeps the failure path for absurdly small t bounded: the series
    needs O(1/t) terms, so below roughly 1e-4 the budget is exhausted and the
    evaluation raises instead of grinding."""
    sized = int(np.ceil(80.0 / t))
    return SpectralTruncation("adaptive", min(max(n_max_floor, sized), 400_000))


# ---------------------------------------------------------------------------
# polynomial evaluation


@njit(cache=True)
def _recurrence_fill(a, b, x, pm2, pm1, n_start, out):
    # out[k, :] = P_{n_start+k}^{(a,b)}(x) by the ascending three-term
    # recurrence, seeded with the two preceding rows (n_start >= 2).
    ab = a + b
    m, npts = out.shape
    for k in range(m):
        n = n_start + k
        c1 = 2.0 * n * (n + ab) * (2.0 * n + ab - 2.0)
        c2 = (2.0 * n + ab - 1.0) * (2.0 * n + ab) * (2.0 * n + ab - 2.0)
        c3 = (2.0 * n + ab - 1.0) * (a * a - b * b)
        c4 = 2.0 * (n + a - 1.0) * (n + b - 1.0) * (2.0 * n + ab)
        for i in range(npts):
            out[k, i] = ((c2 * x[i] + c3) * pm1[i] - c4 * pm2[i]) / c1
        pm2 = pm1
        pm1 = out[k]


class JacobiRows:
    """Serves consecutive rows P_n^{(a,b)}(x), n = 0, 1, 2, ... for a fixed
    point set, carrying the recurrence seeds between calls so that long
    series can be consumed in chunks without re-starting the recurrence."""

    def __init__(self, a: float, b: float, x):
        self.a = float(a)
        self.b = float(b)
        self.x = np.ascontiguousarray(np.atleast_1d(np.asarray(x, dtype=float)))
        self.next_n = 0
        self._pm1 = None
        self._pm2 = None

    @classmethod
    def at_angle(cls, a: float, b: float, theta) -> "JacobiRows":
        """Rows of P_n^{(a,b)}(cos theta) for angle input."""
        return cls(a, b, np.cos(np.atleast_1d(np.asarray(theta, dtype=float))))

    def take(self, upto: int) -> np.ndarray:
        """Rows [next_n, upto) as an array of shape (upto - next_n, npts)."""
        cnt = upto - self.next_n
        if cnt <= 0:
            return np.empty((0, self.x.size))
        out = np.empty((cnt, self.x.size))
        k = 0
        while self.next_n < 2 and k < cnt:
            if self.next_n == 0:
                out[k] = 1.0
            else:
                out[k] = (self.a + 1) + (self.a + self.b + 2) * (self.x - 1) / 2
            self._pm2 = self._pm1
            self._pm1 = out[k].copy()
            if self._pm2 is None:
                self._pm2 = np.zeros_like(out[k])
            self.next_n += 1
            k += 1
        if k < cnt:
            old_pm1 = self._pm1
            _recurrence_fill(self.a, self.b, self.x, self._pm2, self._pm1,
                             self.next_n, out[k:])
            self.next_n = upto
            self._pm1 = out[-1].copy()
            self._pm2 = out[-2].copy() if cnt >= 2 else old_pm1
        return out


def eval_jacobi_many(nmax: int, a: float, b: float, x) -> np.ndarray:
    """Matrix of P_n^{(a,b)}(x) values, shape (nmax+1, len(x))."""
    return JacobiRows(a, b, x).take(nmax + 1)


def eval_jacobi(n: int, p: JacobiParams, x):
    """P_n^{(alpha,beta)}(x) on [-1, 1] by the ascending recurrence."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    xa = np.asarray(x, dtype=float)
    if np.any(np.abs(xa) > 1):
        raise ValueError("argument outside [-1, 1]")
    rows = eval_jacobi_many(n, p.alpha, p.beta, np.atleast_1d(xa))
    val = rows[n]
    return float(val[0]) if np.isscalar(x) or xa.ndim == 0 else val.reshape(xa.shape)


def eigenvalue(n: int, p: JacobiParams) -> float:
    """(n + (alpha+beta+1)/2)^2."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return (n + (p.alpha + p.beta + 1) / 2) ** 2


def sqrt_eigenvalues(nmax: int, p: JacobiParams) -> np.ndarray:
    """|n + (alpha+beta+1)/2| for n = 0..nmax (only n = 0 can need the abs)."""
    n = np.arange(nmax + 1, dtype=float)
    return np.abs(n + (p.alpha + p.beta + 1) / 2)


def normalizing_constants(nmax: int, p: JacobiParams) -> np.ndarray:
    """Positive constants c_n making c_n P_n^{(a,b)}(cos .) an orthonormal
    family in L^2 of the trigonometric measure.

    The generic squared norm is Gamma-expressed via log-Gamma; n = 0 always
    goes through the Beta formula, which also covers alpha+beta+1 = 0 where
    the generic prefactor degenerates.
    """
    a, b = p.alpha, p.beta
    ab1 = a + b + 1
    n = np.arange(1, nmax + 1, dtype=float)
    log_h = np.empty(nmax + 1)
    log_h[0] = gammaln(a + 1) + gammaln(b + 1) - gammaln(a + b + 2)
    if nmax >= 1:
        log_h[1:] = (-np.log(2 * n + ab1) + gammaln(n + a + 1) + gammaln(n + b + 1)
                     - gammaln(n + ab1) - gammaln(n + 1))
    return np.exp(-0.5 * log_h)


def normalizing_constant(n: int, p: JacobiParams) -> float:
    if n < 0:
        raise ValueError("degree must be nonnegative")
    return float(normalizing_constants(n, p)[n])


def eval_normalized(n: int, p: JacobiParams, theta):
    """The orthonormal basis function c_n P_n^{(a,b)}(cos theta)."""
    return normalizing_constant(n, p) * eval_jacobi(n, p, np.cos(theta))


# ---------------------------------------------------------------------------
# term algebra for d/dtheta


@dataclass(frozen=True)
class TrigTerm:
    """coeff * sin^sin_pow(theta) * cos^cos_pow(theta) * P_n^{(a,b)}(cos theta).

    Closed under d/dtheta: differentiation maps a term to at most three terms
    of the same shape (the Jacobi factor differentiates into the (a+1, b+1)
    family one degree down).
    """

    coeff: float
    sin_pow: int
    cos_pow: int
    n: int
    a: float
    b: float

    def __post_init__(self):
        if self.sin_pow < 0 or self.cos_pow < 0 or self.n < 0:
            raise ValueError("term powers and degree must be nonnegative")

    def eval(self, theta):
        th = np.asarray(theta, dtype=float)
        val = self.coeff * np.sin(th) ** self.sin_pow * np.cos(th) ** self.cos_pow
        rows = eval_jacobi_many(self.n, self.a, self.b, np.cos(np.atleast_1d(th)))
        out = val * rows[self.n].reshape(th.shape)
        return float(out) if np.isscalar(theta) else out


def basis_term(n: int, p: JacobiParams) -> TrigTerm:
    """The orthonormal basis function as a single term."""
    return TrigTerm(normalizing_constant(n, p), 0, 0, n, p.alpha, p.beta)


def delta_term(t: TrigTerm) -> list[TrigTerm]:
    """Exact d/dtheta of one term; at most three terms, zero terms dropped."""
    out = []
    if t.coeff == 0.0:
        return out
    if t.sin_pow > 0:
        out.append(TrigTerm(t.coeff * t.sin_pow, t.sin_pow - 1, t.cos_pow + 1,
                            t.n, t.a, t.b))
    if t.cos_pow > 0:
        out.append(TrigTerm(-t.coeff * t.cos_pow, t.sin_pow + 1, t.cos_pow - 1,
                            t.n, t.a, t.b))
    if t.n >= 1:
        out.append(TrigTerm(-t.coeff * (t.n + t.a + t.b + 1) / 2,
                            t.sin_pow + 1, t.cos_pow, t.n - 1, t.a + 1, t.b + 1))
    return out


def delta_terms(terms) -> list[TrigTerm]:
    """d/dtheta of a finite term sum."""
    out = []
    for t in terms:
        out.extend(delta_term(t))
    return out


def eval_terms(terms, theta):
    th = np.asarray(theta, dtype=float)
    total = np.zeros(th.shape)
    for t in terms:
        total = total + t.eval(th)
    return float(total) if np.isscalar(theta) else total


def delta_star_eval(terms, p: JacobiParams, theta):
    """The formal adjoint of d/dtheta applied to a term sum, pointwise:
    -f' - (alpha+1/2) cot(theta/2) f + (beta+1/2) tan(theta/2) f.

    Singular at the endpoints; arguments must stay ENDPOINT_MARGIN away.
    """
    th = np.asarray(theta, dtype=float)
    if np.any(th < ENDPOINT_MARGIN) or np.any(th > np.pi - ENDPOINT_MARGIN):
        raise ValueError("delta_star is singular within 1e-6 of 0 or pi")
    f = eval_terms(terms, th)
    fp = eval_terms(delta_terms(terms), th)
    val = (-fp - (p.alpha + 0.5) / np.tan(th / 2) * f
           + (p.beta + 0.5) * np.tan(th / 2) * f)
    return float(val) if np.isscalar(theta) else val


def delta_star(fsamples, p: JacobiParams):
    """Adjoint derivative of a sampled function, derivative by second order
    finite differences on the (possibly nonuniform) grid.

    Returns a new GridFunction on the same nodes.
    """
    from .measure_geometry import GridFunction

    nodes = np.asarray(fsamples.nodes, dtype=float)
    vals = np.asarray(fsamples.values, dtype=float)
    if nodes[0] < ENDPOINT_MARGIN or nodes[-1] > np.pi - ENDPOINT_MARGIN:
        raise ValueError("grid nodes must stay 1e-6 away from 0 and pi")
    fp = np.gradient(vals, nodes)
    out = (-fp - (p.alpha + 0.5) / np.tan(nodes / 2) * vals
           + (p.beta + 0.5) * np.tan(nodes / 2) * vals)
    return GridFunction(nodes, out)


# ---------------------------------------------------------------------------
# derivative stencils: d^N/dtheta^N of a generic-degree summand
#
# Repeated differentiation of P_n^{(a,b)}(cos theta) produces sums
#   poly(n) * sin^sp(theta) cos^cp(theta) * P_{n-j}^{(a+j, b+j)}(cos theta)
# where poly depends on (a+b) only.  Expanding once with symbolic n lets the
# spectral series be evaluated for all degrees at once.


@lru_cache(maxsize=512)
def delta_stencil(nder: int, ab: float):
    """Terms (j, sin_pow, cos_pow, poly-coeffs in n) of d^nder applied to the
    generic summand P_n^{(a,b)}(cos theta), keyed by ab = a + b."""
    terms = {(0, 0, 0): np.array([1.0])}
    for _ in range(nder):
        new: dict = {}

        def add(key, poly):
            if key in new:
                new[key] = npoly.polyadd(new[key], poly)
            else:
                new[key] = poly

        for (j, sp, cp), poly in terms.items():
            if sp > 0:
                add((j, sp - 1, cp + 1), poly * sp)
            if cp > 0:
                add((j, sp + 1, cp - 1), -poly * cp)
            # P_{n-j}^{(a+j,b+j)} differentiates with factor -(n+ab+j+1)/2
            add((j + 1, sp + 1, cp),
                npoly.polymul(poly, np.array([-(ab + j + 1) / 2, -0.5])))
        terms = new
    return tuple((j, sp, cp, poly) for (j, sp, cp), poly in sorted(terms.items()))


def stencil_values(stencil, narr, theta, rows_by_family):
    """Evaluate a stencil for degrees `narr` (consecutive, starting at n0) at
    points `theta`, given per-family row blocks.

    rows_by_family[j] must hold P_{n-j}^{(a+j,b+j)}(cos theta) for the same
    degree window, i.e. rows (n0-j .. n1-j) clipped at degree >= 0.
    """
    n0 = int(narr[0])
    npts = np.atleast_1d(theta).size
    out = np.zeros((narr.size, npts))
    sin_t = np.sin(np.atleast_1d(theta))
    cos_t = np.cos(np.atleast_1d(theta))
    for j, sp, cp, poly in stencil:
        rows = rows_by_family[j]
        # degrees n < j contribute nothing for this family
        lo = max(j - n0, 0)
        if lo >= narr.size:
            continue
        coeff = npoly.polyval(narr[lo:], poly)
        trig = sin_t ** sp * cos_t ** cp
        out[lo:] += coeff[:, None] * trig[None, :] * rows[: narr.size - lo]
    return out
