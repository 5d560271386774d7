"""The Jacobi-Poisson kernel, the semigroup action, and mixed derivative
kernels.

The kernel is the spectral series  sum_n exp(-t sqrt(lam_n)) c_n^2
P_n(cos theta) P_n(cos phi).  Mixed derivatives act term-wise: each time
derivative contributes a factor -sqrt(lam_n); theta/phi derivatives go
through the closed term algebra; the interlaced flavor multiplies by
(lam_n - lam_0)^floor(N/2) with one extra plain derivative when N is odd.
"""

import math
from dataclasses import dataclass

import numpy as np

from .jacobi_core import (JacobiParams, JacobiRows, SpectralTruncation,
                          delta_stencil, for_time, stencil_values)
from scipy.special import gammaln

DEFAULT_MIN_T = 1e-4
_CHUNK_FIRST = 128
_CHUNK_MAX = 8192


class NonConvergenceError(RuntimeError):
    """Adaptive cutoff not reached within the term budget (t too small)."""


@dataclass(frozen=True)
class DerivativeSpec:
    """Selects the mixed derivative d_phi^L d_theta^P d_t^M (delta or D)^N."""

    M: int = 0
    N: int = 0
    flavor: str = "delta"
    L: int = 0
    P: int = 0

    def __post_init__(self):
        if self.M < 0 or self.N < 0:
            raise ValueError("derivative orders must be nonnegative")
        if self.flavor not in ("delta", "D"):
            raise ValueError(f"flavor must be 'delta' or 'D', got {self.flavor!r}")
        if self.L not in (0, 1) or self.P not in (0, 1):
            raise ValueError("L and P must be 0 or 1")

    @property
    def order(self) -> int:
        return self.M + self.N + self.L + self.P

    @property
    def theta_derivs(self) -> int:
        """Plain theta-derivatives applied per summand."""
        return (self.N % 2 if self.flavor == "D" else self.N) + self.P

    @property
    def spectral_half(self) -> int:
        """Power of (lam_n - lam_0) applied per summand (interlaced flavor)."""
        return self.N // 2 if self.flavor == "D" else 0


@dataclass(frozen=True)
class KernelValue:
    value: float
    terms_used: int
    tail_bound: float


def _log_norm_sq(narr: np.ndarray, p: JacobiParams) -> np.ndarray:
    # log of the squared normalizing constants c_n^2 for a degree window
    a, b = p.alpha, p.beta
    ab1 = a + b + 1
    out = np.empty(narr.size)
    pos = narr >= 1
    n = narr[pos]
    out[pos] = -(-np.log(2 * n + ab1) + gammaln(n + a + 1) + gammaln(n + b + 1)
                 - gammaln(n + ab1) - gammaln(n + 1))
    if (~pos).any():
        out[~pos] = -(gammaln(a + 1) + gammaln(b + 1) - gammaln(a + b + 2))
    return out


def _weights(narr, t, d: DerivativeSpec, p: JacobiParams) -> np.ndarray:
    # per-degree factor: c_n^2 exp(-t sqrt(lam_n)) (-sqrt(lam_n))^M
    # [(lam_n - lam_0)^(N//2) for the interlaced flavor]
    ab1 = p.alpha + p.beta + 1
    sq = np.abs(narr + ab1 / 2)
    w = np.exp(_log_norm_sq(narr, p) - t * sq) * (-sq) ** d.M
    half = d.spectral_half
    if half:
        w = w * (narr * (narr + ab1)) ** half
    return w


def kernel_profile(d: DerivativeSpec, t: float, psi, phi: float, p: JacobiParams,
                   tr: SpectralTruncation | None = None,
                   min_t: float = DEFAULT_MIN_T):
    """Evaluate the derivative kernel at points psi (array) against a fixed
    phi, i.e. d_phi^L d_psi^P d_t^M delta_psi^N H_t(psi, phi).

    Returns (values, terms_used, tail_bound).  The series is consumed in
    chunks; the adaptive stop fires after three consecutive degrees whose
    contribution is below tail_eps * max(1, |running value|), not before
    degree 8.
    """
    if not t > 0:
        raise ValueError("t must be positive")
    if t < min_t:
        raise ValueError(f"t={t} below the small-time floor {min_t}")
    psi = np.atleast_1d(np.asarray(psi, dtype=float))
    if np.any(psi <= 0) or np.any(psi >= math.pi) or not (0 < phi < math.pi):
        raise ValueError("angles must lie inside (0, pi)")
    if tr is None:
        tr = for_time(t)
    eps = tr.resolve_eps(d.order)
    ab = p.alpha + p.beta
    st_theta = delta_stencil(d.theta_derivs, ab)
    st_phi = delta_stencil(d.L, ab)
    jmax_t = max(j for j, _, _, _ in st_theta)
    jmax_p = max(j for j, _, _, _ in st_phi)
    fams_t = {j: JacobiRows.at_angle(p.alpha + j, p.beta + j, psi)
              for j in range(jmax_t + 1)}
    fams_p = {j: JacobiRows.at_angle(p.alpha + j, p.beta + j, np.array([phi]))
              for j in range(jmax_p + 1)}

    acc = np.zeros(psi.size)
    recent = []          # trailing per-degree magnitudes
    n0 = 0
    chunk = _CHUNK_FIRST
    budget = tr.budget
    hard_stop = tr.n_max + 1 if tr.mode == "fixed" else budget + 1
    while n0 < hard_stop:
        n1 = min(n0 + chunk, hard_stop)
        chunk = min(4 * chunk, _CHUNK_MAX)
        narr = np.arange(n0, n1, dtype=float)
        w = _weights(narr, t, d, p)
        tb = stencil_values(st_theta, narr, psi,
                            {j: fams_t[j].take(n1 - j) for j in range(jmax_t + 1)})
        pb = stencil_values(st_phi, narr, np.array([phi]),
                            {j: fams_p[j].take(n1 - j) for j in range(jmax_p + 1)})
        contrib = w[:, None] * tb * pb
        if tr.mode == "fixed":
            acc += contrib.sum(axis=0)
            mags = np.max(np.abs(contrib), axis=1)
            recent = list(mags[-3:]) if mags.size >= 3 else recent + list(mags)
            n0 = n1
            continue
        scale = max(1.0, float(np.max(np.abs(acc)))) if acc.size else 1.0
        mags = np.max(np.abs(contrib), axis=1)
        below = mags < eps * scale
        stop_at = None
        if mags.size >= 3:
            # positions k where degrees k-2, k-1, k are all below threshold
            runs = below[2:] & below[1:-1] & below[:-2]
            candidates = np.flatnonzero(runs) + 2
            candidates = candidates[candidates + n0 >= 8]
            if candidates.size:
                stop_at = int(candidates[0])
        if stop_at is not None:
            acc += contrib[: stop_at + 1].sum(axis=0)
            used = n0 + stop_at + 1
            tail = float(np.max(mags[max(stop_at - 2, 0): stop_at + 1])) / scale
            return acc, used, tail
        acc += contrib.sum(axis=0)
        recent = (recent + list(mags))[-3:]
        n0 = n1
    if tr.mode == "fixed":
        scale = max(1.0, float(np.max(np.abs(acc))))
        tail = float(max(recent)) / scale if recent else 0.0
        return acc, hard_stop, tail
    raise NonConvergenceError(
        f"series not converged by n = {budget} (t={t} too small for the budget)")


def kernel_derivative(d: DerivativeSpec, t: float, theta: float, phi: float,
                      p: JacobiParams, tr: SpectralTruncation | None = None,
                      min_t: float = DEFAULT_MIN_T) -> KernelValue:
    """Mixed derivative of the Jacobi-Poisson kernel at a point."""
    vals, used, tail = kernel_profile(d, t, np.array([theta]), phi, p, tr, min_t)
    return KernelValue(float(vals[0]), used, tail)


def poisson_kernel(t: float, theta: float, phi: float, p: JacobiParams,
                   tr: SpectralTruncation | None = None,
                   min_t: float = DEFAULT_MIN_T) -> KernelValue:
    """H_t(theta, phi); symmetric in (theta, phi) term by term."""
    return kernel_derivative(DerivativeSpec(), t, theta, phi, p, tr, min_t)


def iden1_expansion(d: DerivativeSpec, t: float, theta: float, phi: float,
                    p: JacobiParams, tr: SpectralTruncation | None = None,
                    min_t: float = DEFAULT_MIN_T) -> KernelValue:
    """Evaluate the interlaced derivative by expanding
    (d_t^2 - lam_0)^floor(N/2) binomially into plain time derivatives:
    sum_k (-1)^(h-k) C(h, k) lam_0^(h-k) d_phi^L d_theta^(P+Nbar) d_t^(M+2k) H.
    """
    if d.flavor != "D":
        raise ValueError("iden1_expansion applies to the interlaced flavor only")
    h = d.N // 2
    nbar = d.N % 2
    total = 0.0
    used = 0
    tail = 0.0
    for k in range(h + 1):
        c_k = (-1.0) ** (h - k) * math.comb(h, k) * p.lam0 ** (h - k)
        part = kernel_derivative(
            DerivativeSpec(d.M + 2 * k, nbar, "delta", d.L, d.P),
            t, theta, phi, p, tr, min_t)
        total += c_k * part.value
        used = max(used, part.terms_used)
        tail = max(tail, part.tail_bound)
    return KernelValue(total, used, tail)


# ---------------------------------------------------------------------------
# semigroup action on finite expansions


def semigroup_coeffs(coeffs, t: float, p: JacobiParams) -> np.ndarray:
    """Exact coefficient damping exp(-t sqrt(lam_n)); composable, so the
    semigroup property holds with no error on coefficient representations."""
    c = np.asarray(coeffs, dtype=float)
    if t < 0:
        raise ValueError("t must be nonnegative")
    sq = np.abs(np.arange(c.size) + (p.alpha + p.beta + 1) / 2)
    return c * np.exp(-t * sq)


def semigroup_apply(coeffs, t: float, theta, p: JacobiParams):
    """H_t applied to f given in the orthonormal basis, evaluated at theta."""
    damped = semigroup_coeffs(coeffs, t, p)
    return mode_values(damped, DerivativeSpec(), 0.0, theta, p, damp=False)


def mode_values(coeffs, d: DerivativeSpec, t: float, theta, p: JacobiParams,
                damp: bool = True):
    """d_t^M (delta or D)^N of the semigroup applied to a finite expansion,
    evaluated at points theta.  Exact finite sum over the modes."""
    c = np.asarray(coeffs, dtype=float)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    amps = mode_amplitudes(c, d, th, p)       # (nmodes, npts)
    if damp:
        sq = np.abs(np.arange(c.size) + (p.alpha + p.beta + 1) / 2)
        vals = (np.exp(-t * sq)[:, None] * amps).sum(axis=0)
    else:
        vals = amps.sum(axis=0)
    return float(vals[0]) if np.isscalar(theta) else vals


def mode_amplitudes(coeffs, d: DerivativeSpec, theta, p: JacobiParams) -> np.ndarray:
    """Per-mode amplitudes a_n(theta) with
    F(t, theta) = sum_n a_n(theta) exp(-t sqrt(lam_n)); includes the
    (-sqrt(lam_n))^M and interlaced multipliers and the theta-derivatives."""
    c = np.asarray(coeffs, dtype=float)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    nmodes = c.size
    ab = p.alpha + p.beta
    ab1 = ab + 1
    narr = np.arange(nmodes, dtype=float)
    sq = np.abs(narr + ab1 / 2)
    factor = c * (-sq) ** d.M
    half = d.spectral_half
    if half:
        factor = factor * (narr * (narr + ab1)) ** half
    # normalized basis: fold one c_n into the amplitude
    factor = factor * np.exp(0.5 * _log_norm_sq(narr, p))
    st = delta_stencil(d.theta_derivs, ab)
    jmax = max(j for j, _, _, _ in st)
    fams = {j: JacobiRows.at_angle(p.alpha + j, p.beta + j, th) for j in range(jmax + 1)}
    block = stencil_values(st, narr, th,
                           {j: fams[j].take(nmodes - j) for j in range(jmax + 1)})
    return factor[:, None] * block
