"""Mixed Lusin area integrals over the cone |eta| < t, the vector-valued
kernels S_{M,N,eta,t}(theta,phi), their L^2(cone, t^(2M+2N-1) deta dt) norms,
and the companion vertical square functions."""

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln, gammaincc

from .jacobi_core import JacobiParams, JacobiRows, delta_stencil, stencil_values
from .measure_geometry import ball_volume, density, measure_total, omega
from .poisson_kernel import (DerivativeSpec, kernel_derivative, kernel_profile,
                             mode_amplitudes, mode_values, _log_norm_sq)
from .quadrature import gauss_jacobi, gauss_legendre, graded_panels, panel_rule


@dataclass(frozen=True)
class BNormSpec:
    """Weight bookkeeping for the Banach space L^2(cone, t^(2M+2N-1))."""

    M: int
    N: int

    def __post_init__(self):
        if self.M + self.N <= 0:
            raise ValueError("the area integral requires M + N > 0")

    @property
    def weight_exponent(self) -> int:
        return 2 * self.M + 2 * self.N - 1


@dataclass(frozen=True)
class ConeGrid:
    """Quadrature discretization of the cone: log-spaced t panels on
    [t_min, T_max] with a Gauss-Legendre rule per panel, and a per-level
    eta rule with the stated node budget."""

    t_min: float = 1e-3
    T_max: float = math.pi
    n_levels: int = 64
    eta_per_level: int = 32
    tail_mode: str = "analytic-bound"
    gl_order: int = 2

    def __post_init__(self):
        if not 0 < self.t_min < self.T_max:
            raise ValueError("need 0 < t_min < T_max")
        if self.tail_mode not in ("truncate", "analytic-bound"):
            raise ValueError(f"unknown tail mode {self.tail_mode!r}")
        if self.tail_mode == "analytic-bound" and self.T_max < math.pi:
            raise ValueError("analytic-bound tail requires T_max >= pi")
        if self.n_levels < 2 or self.eta_per_level < 2:
            raise ValueError("grid too small")

    @property
    def t_nodes(self):
        bp = np.geomspace(self.t_min, self.T_max, self.n_levels + 1)
        return panel_rule(bp, order=self.gl_order)

    def refined(self) -> "ConeGrid":
        """Double every grid dimension."""
        return replace(self, n_levels=2 * self.n_levels,
                       eta_per_level=2 * self.eta_per_level)


# ---------------------------------------------------------------------------
# eta rules: integrate f(psi) against the measure density over the eta-slice
# (theta - t, theta + t) intersected with (0, pi).  The slice is subdivided at
# a domain boundary crossing, and an endpoint touching 0 or pi gets the
# density singularity absorbed exactly into a transplanted Gauss-Jacobi rule.


def _left_clip_rule(hi: float, n: int, p: JacobiParams):
    # psi in (0, hi]: absorb (sin psi/2)^(2a+1) via x = cos psi
    nodes, weights = gauss_jacobi(n, p.alpha, 0.0)
    half = (1.0 - math.cos(hi)) / 2.0
    x = 1.0 - half * (1.0 - nodes)
    w = (2.0 ** (-p.alpha - p.beta - 1.0) * half ** (p.alpha + 1.0)
         * weights * (1.0 + x) ** p.beta)
    return np.arccos(x), w


def _right_clip_rule(lo: float, n: int, p: JacobiParams):
    # psi in [lo, pi): absorb (cos psi/2)^(2b+1)
    nodes, weights = gauss_jacobi(n, 0.0, p.beta)
    half = (math.cos(lo) + 1.0) / 2.0
    x = -1.0 + half * (1.0 + nodes)
    w = (2.0 ** (-p.alpha - p.beta - 1.0) * half ** (p.beta + 1.0)
         * weights * (1.0 - x) ** p.alpha)
    return np.arccos(x), w


def _dyadic_breakpoints(lo: float, hi: float):
    # panel sizes proportional to the distance from the nearest domain
    # endpoint, so steep-but-smooth density factors stay resolved
    pts = {lo, hi}
    if lo < 0.25 * math.pi:
        d = lo
        while d < hi / 2:
            d = min(2 * d, hi)
            pts.add(d)
    if math.pi - hi < 0.25 * math.pi:
        d = math.pi - hi
        while d < (math.pi - lo) / 2:
            d = min(2 * d, math.pi - lo)
            pts.add(math.pi - d)
    pts.add(0.5 * (lo + hi))
    return np.array(sorted(pts))


def _interior_rule(lo: float, hi: float, n: int, p: JacobiParams):
    bp = _dyadic_breakpoints(lo, hi)
    order = max(4, int(np.ceil(n / (bp.size - 1))))
    psi, w = panel_rule(bp, order=order)
    return psi, w * density(psi, p)


def eta_rule(theta: float, t: float, n: int, p: JacobiParams):
    """Nodes psi and weights w with  sum w_i f(psi_i) ~ integral of
    f(psi) * density(psi) over (theta - t, theta + t) clipped to (0, pi).

    A clip at 0 or pi gets the exact singular rule up to the midline; any
    remainder takes interior panels doubling away from the endpoints (the
    exact rules absorb one endpoint power only, so they stop at pi/2)."""
    lo = max(theta - t, 0.0)
    hi = min(theta + t, math.pi)
    mid = math.pi / 2
    pieces = []
    if lo == 0.0:
        cut = min(hi, mid)
        pieces.append(_left_clip_rule(cut, max(4, n // 2 if hi > cut else n), p))
        lo = cut
    if hi == math.pi and lo < math.pi:
        cut = max(lo, mid)
        pieces.append(_right_clip_rule(cut, max(4, n // 2 if lo < cut else n), p))
        hi = cut
    if hi > lo:
        pieces.append(_interior_rule(lo, hi, max(4, n // 2), p))
    psi = np.concatenate([pc[0] for pc in pieces])
    w = np.concatenate([pc[1] for pc in pieces])
    return psi, w


# ---------------------------------------------------------------------------
# kernels and norms


def s_kernel(d: DerivativeSpec, eta: float, t: float, theta: float, phi: float,
             p: JacobiParams, tr=None) -> float:
    """One coordinate of the vector-valued kernel:
    [d_t^M (delta or D)_psi^N H_t](theta + eta, phi) * sqrt(Omega), with the
    indicator of theta + eta in (0, pi) folded in (exact zero outside)."""
    if not abs(eta) < t:
        raise ValueError("(eta, t) must lie in the cone |eta| < t")
    psi = theta + eta
    if not (0 < psi < math.pi):
        return 0.0
    kv = kernel_derivative(d, t, psi, phi, p, tr)
    return kv.value * math.sqrt(omega(theta, eta, t, p))


class BNormParts(NamedTuple):
    value: float
    core_sq: float
    tail_sq: float


def _abs_derivative_profile(nder: int, p: JacobiParams, pts: np.ndarray,
                            nmax: int) -> np.ndarray:
    """|d^nder/dtheta^nder P_n^{(a,b)}(cos .)| at pts, shape (nmax+1, len(pts))."""
    narr = np.arange(nmax + 1, dtype=float)
    st = delta_stencil(nder, p.alpha + p.beta)
    jmax = max(j for j, _, _, _ in st)
    fams = {j: JacobiRows.at_angle(p.alpha + j, p.beta + j, pts) for j in range(jmax + 1)}
    return np.abs(stencil_values(
        st, narr, pts, {j: fams[j].take(nmax + 1 - j) for j in range(jmax + 1)}))


def _sup_profile_bound(d: DerivativeSpec, phi, p: JacobiParams, T: float,
                       grid_pts: int = 129):
    """Estimated degreewise amplitude bound A_n for the derivative kernel:
    |kernel term n at time T| <= A_n exp(-T sqrt(lam_n)), taking angular sups
    on a coarse interior grid (a desk-scale estimate, not a certified sup).
    phi = None takes the sup over the second argument as well.  Returns
    (A, sqrt_lams)."""
    nmax = int(90.0 / T) + 12
    narr = np.arange(nmax + 1, dtype=float)
    ab1 = p.alpha + p.beta + 1
    sq = np.abs(narr + ab1 / 2)
    psi = np.linspace(0.0, math.pi, grid_pts + 2)[1:-1]
    theta_sup = np.max(_abs_derivative_profile(d.theta_derivs, p, psi, nmax), axis=1)
    if phi is None:
        phi_mag = np.max(_abs_derivative_profile(d.L, p, psi, nmax), axis=1)
    else:
        phi_mag = _abs_derivative_profile(d.L, p, np.array([float(phi)]), nmax)[:, 0]
    amp = np.exp(_log_norm_sq(narr, p)) * sq ** d.M * theta_sup * phi_mag
    half = d.spectral_half
    if half:
        amp = amp * (narr * (narr + ab1)) ** half
    return amp, sq


def _exp_tail_integral(w_exp: float, sigma: float, T: float) -> float:
    # int_T^inf t^w exp(-2 sigma (t - T)) dt via the upper incomplete Gamma
    x = 2.0 * sigma * T
    g = gammaincc(w_exp + 1, x) * math.exp(gammaln(w_exp + 1))
    return math.exp(x) * (2.0 * sigma) ** (-(w_exp + 1)) * g


def kernel_tail_sq(d: DerivativeSpec, phi: float, p: JacobiParams, T: float,
                   w_exp: int) -> float:
    """Bound on the squared cone norm contribution from t > T: the eta slice
    integrates to at most sup_psi |kernel|^2 by the weight normalization, and
    the time decay is factored out at the slowest contributing rate."""
    amp, sq = _sup_profile_bound(d, phi, p, T)
    contributing = amp > 0
    if not contributing.any():
        return 0.0
    sigma = float(np.min(sq[contributing]))
    if sigma <= 0:
        # only possible for the constant mode, which the M+N > 0 derivative kills
        raise ValueError("nonpositive decay rate in the tail bound")
    khat = float(np.sum(amp * np.exp(-T * sq)))
    return khat ** 2 * _exp_tail_integral(w_exp, sigma, T)


def b_norm(d: DerivativeSpec, theta: float, phi: float, p: JacobiParams,
           cg: ConeGrid, tr=None, return_parts: bool = False):
    """Cone norm of the kernel at (theta, phi):
    (double integral of s_kernel^2 t^(2M+2N-1) deta dt)^(1/2) on the grid,
    plus the certified long-time remainder when tail_mode is analytic-bound."""
    if abs(theta - phi) < 1e-9:
        raise ValueError("kernel norm undefined on the diagonal (theta == phi)")
    spec = BNormSpec(d.M, d.N)
    w_exp = spec.weight_exponent
    t_nodes, t_weights = cg.t_nodes
    core = 0.0
    for t, tw in zip(t_nodes, t_weights):
        psi, w = eta_rule(theta, t, cg.eta_per_level, p)
        vals, _, _ = kernel_profile(d, t, psi, phi, p, tr)
        vol = ball_volume(t, theta, p)
        core += tw * t ** w_exp * float(np.sum(w * vals ** 2)) / vol
    tail = 0.0
    if cg.tail_mode == "analytic-bound":
        tail = kernel_tail_sq(d, phi, p, cg.T_max, w_exp)
    value = math.sqrt(core + tail)
    if return_parts:
        return BNormParts(value, core, tail)
    return value


def _graded_segment(a: float, b: float, a_is_kink: bool, b_is_kink: bool,
                    n_panels: int = 4):
    mid = 0.5 * (a + b)
    left = graded_panels(a, mid, n_panels, "left") if a_is_kink else np.array([a, mid])
    right = graded_panels(mid, b, n_panels, "right") if b_is_kink else np.array([mid, b])
    return np.unique(np.concatenate([left, right]))


def b_norm_diff_theta(d: DerivativeSpec, theta: float, theta_p: float,
                      phi: float, p: JacobiParams, cg: ConeGrid,
                      tr=None) -> float:
    """Cone norm of the kernel difference K(theta, phi) - K(theta_p, phi) on
    a shared grid.  The eta axis is subdivided at every domain-boundary
    crossing of either vertex (where the indicators kick in), with panels
    graded into the crossings."""
    spec = BNormSpec(d.M, d.N)
    w_exp = spec.weight_exponent
    t_nodes, t_weights = cg.t_nodes
    crossings = np.array([-theta, math.pi - theta, -theta_p, math.pi - theta_p])
    core = 0.0
    for t, tw in zip(t_nodes, t_weights):
        inner = [c for c in crossings if -t < c < t]
        edges = np.unique(np.concatenate([[-t, t], inner]))
        pieces = [panel_rule(_graded_segment(a, b, a in inner, b in inner),
                             order=max(4, int(np.ceil(cg.eta_per_level
                                                      / (2 * len(edges) - 2)))))
                  for a, b in zip(edges[:-1], edges[1:])]
        eta = np.concatenate([pc[0] for pc in pieces])
        w = np.concatenate([pc[1] for pc in pieces])
        vol1 = ball_volume(t, theta, p)
        vol2 = ball_volume(t, theta_p, p)
        # one series pass over the union of both shifted node sets
        psi_all = np.concatenate([theta + eta, theta_p + eta])
        inside = (psi_all > 0) & (psi_all < math.pi)
        vals = np.zeros(psi_all.shape)
        if inside.any():
            prof, _, _ = kernel_profile(d, t, psi_all[inside], phi, p, tr)
            vals[inside] = prof * np.sqrt(density(psi_all[inside], p))
        k1 = vals[: eta.size] / math.sqrt(vol1)
        k2 = vals[eta.size:] / math.sqrt(vol2)
        core += tw * t ** w_exp * float(np.sum(w * (k1 - k2) ** 2))
    tail = 0.0
    if cg.tail_mode == "analytic-bound":
        tail = 4.0 * kernel_tail_sq(d, phi, p, cg.T_max, w_exp)
    return math.sqrt(core + tail)


def b_norm_diff_phi(d: DerivativeSpec, theta: float, phi: float, phi_p: float,
                    p: JacobiParams, cg: ConeGrid, tr=None) -> float:
    """Cone norm of K(theta, phi) - K(theta, phi_p): same vertex, so the
    weight and eta rule are shared and only the kernel argument differs."""
    spec = BNormSpec(d.M, d.N)
    w_exp = spec.weight_exponent
    t_nodes, t_weights = cg.t_nodes
    core = 0.0
    for t, tw in zip(t_nodes, t_weights):
        psi, w = eta_rule(theta, t, cg.eta_per_level, p)
        v1, _, _ = kernel_profile(d, t, psi, phi, p, tr)
        v2, _, _ = kernel_profile(d, t, psi, phi_p, p, tr)
        vol = ball_volume(t, theta, p)
        core += tw * t ** w_exp * float(np.sum(w * (v1 - v2) ** 2)) / vol
    tail = 0.0
    if cg.tail_mode == "analytic-bound":
        t1 = kernel_tail_sq(d, phi, p, cg.T_max, w_exp)
        t2 = kernel_tail_sq(d, phi_p, p, cg.T_max, w_exp)
        tail = (math.sqrt(t1) + math.sqrt(t2)) ** 2
    return math.sqrt(core + tail)


def mode_tail_sq(coeffs, d: DerivativeSpec, p: JacobiParams, T: float,
                 w_exp: int) -> float:
    """Long-time remainder bound for the area integral of a finite expansion."""
    c = np.abs(np.asarray(coeffs, dtype=float))
    nmodes = c.size
    narr = np.arange(nmodes, dtype=float)
    ab1 = p.alpha + p.beta + 1
    sq = np.abs(narr + ab1 / 2)
    psi = np.linspace(0.0, math.pi, 131)[1:-1]
    st = delta_stencil(d.theta_derivs, p.alpha + p.beta)
    jmax = max(j for j, _, _, _ in st)
    fams = {j: JacobiRows.at_angle(p.alpha + j, p.beta + j, psi) for j in range(jmax + 1)}
    sup = np.max(np.abs(stencil_values(
        st, narr, psi, {j: fams[j].take(nmodes - j) for j in range(jmax + 1)})), axis=1)
    amp = c * np.exp(0.5 * _log_norm_sq(narr, p)) * sq ** d.M * sup
    half = d.spectral_half
    if half:
        amp = amp * (narr * (narr + ab1)) ** half
    contributing = amp > 0
    if not contributing.any():
        return 0.0
    sigma = float(np.min(sq[contributing]))
    fhat = float(np.sum(amp * np.exp(-T * sq)))
    return fhat ** 2 * _exp_tail_integral(w_exp, sigma, T)


def area_integral(f_coeffs, d: DerivativeSpec, theta: float, p: JacobiParams,
                  cg: ConeGrid, tr=None) -> float:
    """The mixed Lusin area integral of a finite expansion at theta, computed
    in the shifted form with the cone weight sqrt(Omega)."""
    spec = BNormSpec(d.M, d.N)    # enforces M + N > 0
    w_exp = spec.weight_exponent
    t_nodes, t_weights = cg.t_nodes
    total = 0.0
    for t, tw in zip(t_nodes, t_weights):
        psi, w = eta_rule(theta, t, cg.eta_per_level, p)
        vals = mode_values(f_coeffs, d, t, psi, p)
        vol = ball_volume(t, theta, p)
        total += tw * t ** w_exp * float(np.sum(w * vals ** 2)) / vol
    if cg.tail_mode == "analytic-bound":
        total += mode_tail_sq(f_coeffs, d, p, cg.T_max, w_exp)
    return math.sqrt(total)


def g_function(f_coeffs, d: DerivativeSpec, theta: float, p: JacobiParams,
               tr=None, T: float | None = None, n_panels: int = 160) -> float:
    """Vertical square function
    (int_0^inf t^(2M+2N-1) |d_t^M (delta or D)^N H_t f(theta)|^2 dt)^(1/2):
    panel quadrature up to T, exact exponential tail beyond."""
    spec = BNormSpec(d.M, d.N)
    w_exp = spec.weight_exponent
    c = np.asarray(f_coeffs, dtype=float)
    amps = mode_amplitudes(c, d, np.array([theta]), p)[:, 0]
    sq = np.abs(np.arange(c.size) + (p.alpha + p.beta + 1) / 2)
    live = amps != 0.0
    if not live.any():
        return 0.0
    sigma = float(np.min(sq[live]))
    if T is None:
        T = max(math.pi, 20.0 / max(sigma, 1e-2))
    bp = np.concatenate([[0.0], np.geomspace(max(1e-4 * T, 1e-6), T, n_panels)])
    t, tw = panel_rule(bp, order=4)
    f_vals = np.exp(-np.outer(t, sq)) @ amps
    head = float(np.sum(tw * t ** w_exp * f_vals ** 2))
    # tail: sum_{n,m} a_n a_m int_T^inf t^w exp(-(sq_n+sq_m) t) dt
    rates = sq[live, None] + sq[None, live]
    aa = np.outer(amps[live], amps[live])
    x = rates * T
    gamma_upper = gammaincc(w_exp + 1, x) * math.exp(gammaln(w_exp + 1))
    tail = float(np.sum(aa * gamma_upper / rates ** (w_exp + 1)))
    return math.sqrt(head + max(tail, 0.0))


# ---------------------------------------------------------------------------
# L^2(dmu) norms of the square functions, via a precomputed quadratic form
# in the expansion coefficients (the cone quadrature is linear per mode)


class AreaNormEngine:
    """Precomputes, for fixed (derivative spec, parameters, cone grid), the
    quadratic form Q with  ||S f||_{L^2(dmu)}^2 = c^T Q c  over expansions
    with a fixed number of modes, using a Gauss-Jacobi rule in theta."""

    def __init__(self, d: DerivativeSpec, p: JacobiParams, cg: ConeGrid,
                 nmodes: int, n_theta: int = 48):
        from .quadrature import mu_rule

        self.d, self.p, self.cg, self.nmodes = d, p, cg, nmodes
        self.w_exp = BNormSpec(d.M, d.N).weight_exponent
        theta_nodes, theta_w = mu_rule(p.alpha, p.beta, n_theta)
        t_nodes, t_weights = cg.t_nodes
        narr = np.arange(nmodes, dtype=float)
        ab1 = p.alpha + p.beta + 1
        sq = np.abs(narr + ab1 / 2)
        ones = np.ones(nmodes)
        Q = np.zeros((nmodes, nmodes))
        for t, tw in zip(t_nodes, t_weights):
            damp = np.exp(-t * sq)
            level = np.zeros((nmodes, nmodes))
            for th, thw in zip(theta_nodes, theta_w):
                psi, w = eta_rule(th, t, cg.eta_per_level, p)
                amp = mode_amplitudes(ones, d, psi, p)      # (nmodes, npsi)
                vol = ball_volume(t, th, p)
                level += (thw / vol) * (amp * w[None, :]) @ amp.T
            Q += tw * t ** self.w_exp * (damp[:, None] * damp[None, :]) * level
        self.Q = Q
        self.mu_total = measure_total(p)

    def norm(self, coeffs) -> float:
        c = np.asarray(coeffs, dtype=float)
        if c.size != self.nmodes:
            raise ValueError(f"engine built for {self.nmodes} modes, got {c.size}")
        core = float(c @ self.Q @ c)
        tail = 0.0
        if self.cg.tail_mode == "analytic-bound":
            tail = self.mu_total * mode_tail_sq(c, self.d, self.p,
                                                self.cg.T_max, self.w_exp)
        return math.sqrt(max(core, 0.0) + tail)


def area_l2_norm(f_coeffs, d: DerivativeSpec, p: JacobiParams, cg: ConeGrid,
                 n_theta: int = 48) -> float:
    """|| S_{M,N} f ||_{L^2(dmu)} for a single expansion."""
    c = np.asarray(f_coeffs, dtype=float)
    return AreaNormEngine(d, p, cg, c.size, n_theta).norm(c)


def g_l2_norm(f_coeffs, d: DerivativeSpec, p: JacobiParams,
              n_theta: int = 48, **g_kwargs) -> float:
    """|| g_{M,N} f ||_{L^2(dmu)} by the same theta rule."""
    from .quadrature import mu_rule

    theta_nodes, theta_w = mu_rule(p.alpha, p.beta, n_theta)
    vals = np.array([g_function(f_coeffs, d, th, p, **g_kwargs)
                     for th in theta_nodes])
    return math.sqrt(float(np.sum(theta_w * vals ** 2)))
