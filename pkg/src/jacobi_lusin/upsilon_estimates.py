"""The majorant machinery: probability measures dPi_a on [-1, 1] (point
masses in the limit case), the function q, and the four-regime majorant
Upsilon_{W,s}(t, theta, phi) dominating every derivative kernel, together
with its weighted L^2 norm in t."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jacobi_core import JacobiParams
from .quadrature import gauss_jacobi, panel_rule


@dataclass(frozen=True)
class PiMeasureRule:
    """Quadrature rule for the probability measure with density proportional
    to (1-u^2)^(a-1/2) on [-1, 1]; a = -1/2 degenerates to point masses of
    1/2 at the two endpoints."""

    a: float
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "nodes", np.asarray(self.nodes, dtype=float))
        object.__setattr__(self, "weights", np.asarray(self.weights, dtype=float))
        if abs(float(np.sum(self.weights)) - 1.0) > 1e-12:
            raise ValueError("rule weights must sum to 1 (probability measure)")
        if np.any(self.weights <= 0):
            raise ValueError("rule weights must be positive")
        if np.any(np.abs(self.nodes) > 1):
            raise ValueError("rule nodes must lie in [-1, 1]")

    def integrate(self, values: np.ndarray, axis: int = -1):
        return np.sum(values * self.weights, axis=axis)


@lru_cache(maxsize=128)
def pi_rule(a: float, npts: int = 60) -> PiMeasureRule:
    """Gauss rule for dPi_a.  Exact two-point rule at a = -1/2."""
    if a < -0.5:
        raise ValueError(f"dPi_a requires a >= -1/2, got a={a}")
    if a == -0.5:
        return PiMeasureRule(a, np.array([-1.0, 1.0]), np.array([0.5, 0.5]))
    nodes, weights = gauss_jacobi(npts, a - 0.5, a - 0.5)
    return PiMeasureRule(a, nodes, weights / float(np.sum(weights)))


def q_fn(theta, phi, u, v):
    """q = 1 - u sin(theta/2) sin(phi/2) - v cos(theta/2) cos(phi/2),
    snapped to exact zero within 1e-15 (the true value is nonnegative and
    vanishes only at u = v = 1, theta = phi)."""
    val = (1.0 - u * np.sin(theta / 2) * np.sin(phi / 2)
           - v * np.cos(theta / 2) * np.cos(phi / 2))
    val = np.where(np.abs(val) < 1e-15, 0.0, val)
    return float(val) if np.ndim(val) == 0 else val


@dataclass(frozen=True)
class UpsilonSpec:
    """Majorant indices (W, s) and type parameters; the regime is derived
    from the signs of alpha+1/2 and beta+1/2."""

    W: float
    s: float
    p: JacobiParams

    @property
    def regime(self) -> str:
        return self.p.regime

    def shifted(self, tau: float) -> "UpsilonSpec":
        """The identity Upsilon_{W,s} = Upsilon_{W-2 tau, s+tau}."""
        return UpsilonSpec(self.W - 2 * tau, self.s + tau, self.p)


def _slot_rules(side: str, p: JacobiParams, npts: int):
    """Measures occupying one integration slot: the plain dPi_a for the
    regimes where the parameter is >= -1/2, otherwise the K-indexed pair
    (dPi_{-1/2}, dPi_{a+1}) together with the K values."""
    a = p.alpha if side == "alpha" else p.beta
    if a >= -0.5:
        return [(None, pi_rule(a, npts))]
    return [(0, pi_rule(-0.5, npts)), (1, pi_rule(a + 1.0, npts))]


def _terms(spec: UpsilonSpec, npts: int):
    """Expansion of the majorant into quadrature terms.

    Yields (k_exp, r_exp, rule_u, rule_v, extra_exponent): the prefactor is
    (sin th/2 + sin ph/2)^k_exp (cos th/2 + cos ph/2)^r_exp and the exponent
    of (t^2 + q) is base + extra_exponent.
    """
    p = spec.p
    alpha_slots = _slot_rules("alpha", p, npts)
    beta_slots = _slot_rules("beta", p, npts)
    out = []
    for K, rule_u in alpha_slots:
        k_range = [0] if K is None else [0, 1, 2]
        for k in k_range:
            for R, rule_v in beta_slots:
                r_range = [0] if R is None else [0, 1, 2]
                for r in r_range:
                    kk = 0 if K is None else K * k
                    rr = 0 if R is None else R * r
                    out.append((kk, rr, rule_u, rule_v, (kk + rr) / 2.0))
    return out


def upsilon(spec: UpsilonSpec, t, theta: float, phi: float, npts: int = 60):
    """The regime-appropriate majorant at (t, theta, phi); t may be an array
    (vectorized over the time axis).

    Each quadrature term is (t^2 + q)^-(base + m/2) with m in 0..4; the power
    chain reuses one log/exp pair per (u, v) grid.
    """
    p = spec.p
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t_arr <= 0) or np.any(t_arr > math.pi):
        raise ValueError("the majorant is defined for t in (0, pi]")
    base = p.alpha + p.beta + 1.5 + spec.W / 4.0 + spec.s / 2.0
    st, sp = math.sin(theta / 2), math.sin(phi / 2)
    ct, cp = math.cos(theta / 2), math.cos(phi / 2)
    degenerate = spec.regime == "i"
    total = np.zeros(t_arr.shape) if degenerate else np.ones(t_arr.shape)

    # group terms by the (u, v) grid so the base power is computed once
    groups: dict = {}
    for kk, rr, rule_u, rule_v, extra in _terms(spec, npts):
        groups.setdefault((id(rule_u), id(rule_v)), (rule_u, rule_v, []))[2].append(
            (kk, rr, extra))
    for rule_u, rule_v, entries in groups.values():
        q = q_fn(theta, phi, rule_u.nodes[:, None], rule_v.nodes[None, :])
        ww = rule_u.weights[:, None] * rule_v.weights[None, :]
        shifted = t_arr[:, None, None] ** 2 + q[None, :, :]
        p0 = shifted ** (-base)
        rhalf = shifted ** (-0.5)
        for kk, rr, extra in entries:
            m = kk + rr
            pref = (st + sp) ** kk * (ct + cp) ** rr
            integrand = p0 if m == 0 else p0 * rhalf ** m
            total += pref * np.sum(integrand * ww[None, :, :], axis=(1, 2))
    return float(total[0]) if np.ndim(t) == 0 else total


def upsilon_bnorm(spec: UpsilonSpec, theta: float, phi: float,
                  Wnorm: float, npts: int = 60, n_panels: int = 400,
                  return_detail: bool = False):
    """L^2((0, pi), t^(Wnorm-1) dt) norm of the majorant at fixed (theta,
    phi != theta): panel quadrature on a log-graded mesh with an analytic
    near-zero remainder from endpoint monotone majorization."""
    if Wnorm < 1:
        raise ValueError("the weighted norm requires Wnorm >= 1")
    gap = abs(theta - phi)
    if gap < 1e-9:
        raise ValueError("norm diverges on the diagonal (theta == phi)")
    t_floor = max(1e-6, gap * 1e-3)
    bp = np.geomspace(t_floor, math.pi, n_panels + 1)
    t, tw = panel_rule(bp, order=2)
    vals = upsilon(spec, t, theta, phi, npts)
    head = float(np.sum(tw * t ** (Wnorm - 1.0) * vals ** 2))
    # every quadrature term is monotone in t, so the sup on (0, t_floor] is
    # bounded by the endpoint values
    edge = upsilon(spec, t_floor, theta, phi, npts)
    zero = _upsilon_at_zero(spec, theta, phi, npts)
    cap = edge + zero
    remainder = cap ** 2 * t_floor ** Wnorm / Wnorm
    value = math.sqrt(head + remainder)
    if return_detail:
        return value, {"t_floor": t_floor, "remainder_sq": remainder}
    return value


def _upsilon_at_zero(spec: UpsilonSpec, theta: float, phi: float, npts: int) -> float:
    """Limit value at t = 0+ (finite off the diagonal since q > 0 there)."""
    p = spec.p
    base = p.alpha + p.beta + 1.5 + spec.W / 4.0 + spec.s / 2.0
    st, sp = math.sin(theta / 2), math.sin(phi / 2)
    ct, cp = math.cos(theta / 2), math.cos(phi / 2)
    total = 0.0 if spec.regime == "i" else 1.0
    for kk, rr, rule_u, rule_v, extra in _terms(spec, npts):
        q = q_fn(theta, phi, rule_u.nodes[:, None], rule_v.nodes[None, :])
        ww = rule_u.weights[:, None] * rule_v.weights[None, :]
        pref = (st + sp) ** kk * (ct + cp) ** rr
        total += pref * float(np.sum(q ** (-(base + extra)) * ww))
    return total
