"""Shared quadrature rules: Gauss-Jacobi (Golub-Welsch), Gauss-Legendre, and
rules for integrating against the trigonometric Jacobi measure on (0, pi)."""

import math
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal
from scipy.special import gammaln


@lru_cache(maxsize=256)
def gauss_jacobi(n: int, a: float, b: float):
    """n-point Gauss-Jacobi rule for weight (1-x)^a (1+x)^b on [-1, 1].

    Golub-Welsch: nodes are eigenvalues of the symmetric tridiagonal matrix
    built from the three-term recurrence of the monic Jacobi polynomials,
    weights come from the first components of the eigenvectors scaled by the
    total mass 2^(a+b+1) B(a+1, b+1).

    Returns (nodes, weights) as read-only arrays.
    """
    if n < 1:
        raise ValueError(f"need at least one node, got n={n}")
    if a <= -1 or b <= -1:
        raise ValueError(f"Jacobi weight exponents must exceed -1, got ({a}, {b})")
    ab = a + b
    i = np.arange(n, dtype=float)
    denom = (2 * i + ab) * (2 * i + ab + 2)
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = np.where(denom == 0.0, 0.0, (b * b - a * a) / denom)
    # i = 0 is the only possibly degenerate entry (a, b > -1 forces ab + 2 > 0)
    diag[0] = (b - a) / (ab + 2)
    j = np.arange(1, n, dtype=float)
    s = 2 * j + ab
    with np.errstate(invalid="ignore", divide="ignore"):
        off = np.sqrt(4 * j * (j + a) * (j + b) * (j + ab) / (s * s * (s * s - 1)))
    if n > 1:
        # j = 1 in its cancelled form; the generic expression is 0/0 at ab = -1
        off[0] = math.sqrt(4 * (a + 1) * (b + 1) / ((ab + 2) ** 2 * (ab + 3)))
    nodes, vecs = eigh_tridiagonal(diag, off)
    log_mass = (ab + 1) * np.log(2.0) + gammaln(a + 1) + gammaln(b + 1) - gammaln(ab + 2)
    weights = np.exp(log_mass) * vecs[0, :] ** 2
    nodes.flags.writeable = False
    weights.flags.writeable = False
    return nodes, weights


@lru_cache(maxsize=256)
def gauss_legendre(n: int):
    """Cached n-point Gauss-Legendre rule on [-1, 1]."""
    x, w = np.polynomial.legendre.leggauss(n)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def legendre_on(a: float, b: float, n: int):
    """Gauss-Legendre rule mapped to the interval [a, b]."""
    x, w = gauss_legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def panel_rule(breakpoints, order: int = 2):
    """Composite Gauss-Legendre rule over consecutive panels.

    `breakpoints` is an increasing 1-d array; each panel gets an
    `order`-point rule.  Returns flat (nodes, weights).
    """
    bp = np.asarray(breakpoints, dtype=float)
    x, w = gauss_legendre(order)
    half = 0.5 * np.diff(bp)
    mid = 0.5 * (bp[:-1] + bp[1:])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def graded_panels(a: float, b: float, n_panels: int, toward: str, ratio: float = 0.35):
    """Geometrically graded breakpoints on [a, b], clustered toward one end.

    Used for integrands with an integrable power singularity at `toward`.
    """
    if n_panels < 1:
        raise ValueError("n_panels must be positive")
    fracs = ratio ** np.arange(n_panels, 0, -1)
    fracs = np.concatenate([[0.0], fracs / fracs[-1]])
    if toward == "left":
        return a + (b - a) * fracs
    if toward == "right":
        return b - (b - a) * fracs[::-1]
    raise ValueError(f"toward must be 'left' or 'right', got {toward!r}")


def mu_rule(alpha: float, beta: float, n: int):
    """Nodes/weights in theta for integrals against the measure
    (sin(theta/2))^(2a+1) (cos(theta/2))^(2b+1) dtheta on (0, pi).

    Exact (up to rounding) for integrands polynomial in cos(theta) of degree
    <= 2n-1.  Obtained from the Gauss-Jacobi rule via x = cos(theta) and the
    constant 2^(-a-b-1) from the change of variables.
    """
    x, w = gauss_jacobi(n, alpha, beta)
    theta = np.arccos(np.clip(x[::-1], -1.0, 1.0))
    weights = w[::-1] * 2.0 ** (-alpha - beta - 1.0)
    return theta, weights
