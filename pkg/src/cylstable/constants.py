"""Closed-form constants and measure quantities of the stable calculus.

Everything here is deterministic: the normalisation c_alpha, the uniform
sphere mass of the cylindrical Levy measure, the tail/moment constant
chain c1 -> c2 -> C(p), the contraction constant c3 with its two
admissible-horizon bounds, and the sphere integral giving the tail mass
of a radonified stable variable (with its Jensen upper bound).

The universal tail-comparison constant has no formula; it is carried as
``c_convention`` (default 1) and every shipped verdict is confined to
c-free quantities (ratios, the limit identity, homogeneity).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln, roots_legendre

from .rng import substream

_TAG_SPHERE_MC = 0x59EE

__all__ = [
    "c_alpha",
    "sphere_total_mass",
    "chain_constants",
    "c3_and_Tmax",
    "levy_tail_mass",
    "jensen_bound",
    "ConstantsReport",
    "constants_report",
]


def _check_alpha(alpha: float) -> float:
    alpha = float(alpha)
    if not 0.0 < alpha < 2.0:
        raise ValueError(f"alpha must lie in the open interval (0, 2), got {alpha}")
    return alpha


def c_alpha(alpha: float) -> float:
    """Stable normalisation constant of the polar Levy-measure form.

    Equals -alpha*cos(alpha*pi/2)*Gamma(-alpha) away from 1 and pi/2 at 1.
    Evaluated through the reflection formula,

        c_alpha = alpha*pi*sin((alpha-1)*pi/2) / (sin((alpha-1)*pi) * Gamma(1+alpha)),

    which is cancellation-free across alpha = 1.
    """
    alpha = _check_alpha(alpha)
    if alpha == 1.0:
        return math.pi / 2.0
    eps = alpha - 1.0
    return (
        alpha
        * math.pi
        * math.sin(eps * math.pi / 2.0)
        / (math.sin(eps * math.pi) * math.gamma(1.0 + alpha))
    )


def sphere_total_mass(n: int, alpha: float) -> float:
    """Total mass of the uniform spherical part in dimension ``n``.

    Gamma(1/2)Gamma((n+alpha)/2) / (Gamma(n/2)Gamma((1+alpha)/2)),
    computed in log space so large ``n`` does not overflow.
    """
    alpha = _check_alpha(alpha)
    if n < 1:
        raise ValueError(f"dimension n must be >= 1, got {n}")
    return math.exp(
        gammaln(0.5) + gammaln((n + alpha) / 2.0) - gammaln(n / 2.0) - gammaln((1.0 + alpha) / 2.0)
    )


def chain_constants(alpha: float, p: float, c_convention: float = 1.0) -> dict[str, float]:
    """The chained constants c1, c2 and C(p) of the tail/moment estimates.

    c1 = c*Gamma(1/2)/(c_alpha*Gamma((1+alpha)/2)), c2 = c1*(4-alpha)/(2-alpha)
    and C = c2^(p/alpha)*alpha/(alpha-p), under the substitution
    c = ``c_convention`` for the non-computable universal constant.
    """
    alpha = _check_alpha(alpha)
    if not 0.0 < p < alpha:
        raise ValueError(f"p must lie in (0, alpha)=(0, {alpha}), got {p}")
    if c_convention <= 0.0:
        raise ValueError("c_convention must be positive")
    c1 = c_convention * math.gamma(0.5) / (c_alpha(alpha) * math.gamma((1.0 + alpha) / 2.0))
    c2 = c1 * (4.0 - alpha) / (2.0 - alpha)
    big_c = c2 ** (p / alpha) * alpha / (alpha - p)
    return {"c1": c1, "c2": c2, "C": big_c}


def _c3_objective(p: np.ndarray, alpha: float, c2: float, c_f: float, c_g: float) -> np.ndarray:
    scale = (alpha - 1.0) / (min(c2 ** (1.0 / alpha), c2) * alpha)
    return 2.0 ** (p - 1.0) * (scale * c_f**p + c_g**p)


def c3_and_Tmax(
    alpha: float,
    c_f: float,
    c_g: float,
    c_convention: float = 1.0,
    grid_step: float = 1e-4,
) -> dict[str, float]:
    """Contraction constant c3 and the two admissible-horizon bounds.

    c3 = sup over p in (1, alpha) of 2^(p-1)*(K*c_f^p + c_g^p) with
    K = (alpha-1)/((c2^(1/alpha) ^ c2)*alpha); the sup is taken on a uniform
    p-grid of step <= ``grid_step`` refined geometrically toward both open
    endpoints.  Returns c3, the uniqueness horizon
    T_uniq = min{1, 1/(alpha*c2*(c3^alpha v c3))}, the iteration horizon
    T_picard = min{1, ((c2 v c2^(1/alpha))*c3)^(-alpha)} and their minimum
    ``T_bound`` (the binding bound).
    """
    alpha = _check_alpha(alpha)
    if alpha <= 1.0:
        raise ValueError(f"the contraction constants require alpha in (1, 2), got {alpha}")
    if c_f < 0.0 or c_g < 0.0:
        raise ValueError("c_f and c_g must be nonnegative")
    c2 = chain_constants(alpha, (1.0 + alpha) / 2.0, c_convention)["c2"]

    if c_f == 0.0 and c_g == 0.0:
        # Degenerate contraction constants: both horizons are capped at 1
        # (the underlying inequalities are strict).
        return {"c3": 0.0, "T_uniq": 1.0, "T_picard": 1.0, "T_bound": 1.0, "c2": c2}

    count = max(int(math.ceil((alpha - 1.0) / grid_step)) + 1, 2)
    inner = np.linspace(1.0, alpha, count)
    # geometric refinement toward the open endpoints
    offsets = 10.0 ** -np.arange(5, 14, dtype=float) * (alpha - 1.0)
    p_grid = np.unique(np.concatenate([inner, 1.0 + offsets, alpha - offsets]))
    p_grid = p_grid[(p_grid > 1.0) & (p_grid < alpha)]
    c3 = float(_c3_objective(p_grid, alpha, c2, c_f, c_g).max())

    t_uniq = min(1.0, 1.0 / (alpha * c2 * max(c3**alpha, c3)))
    t_picard = min(1.0, (max(c2, c2 ** (1.0 / alpha)) * c3) ** (-alpha))
    return {
        "c3": c3,
        "T_uniq": t_uniq,
        "T_picard": t_picard,
        "T_bound": min(t_uniq, t_picard),
        "c2": c2,
    }


def _sphere_average(gamma: np.ndarray, alpha: float, nodes: int) -> float:
    """Average of (sum gamma_j^2 x_j^2)^(alpha/2) over the unit sphere, n <= 3."""
    n = gamma.size
    if n == 1:
        return float(abs(gamma[0]) ** alpha)
    if n == 2:
        theta = (np.arange(nodes) + 0.5) * 2.0 * math.pi / nodes
        vals = (gamma[0] ** 2 * np.cos(theta) ** 2 + gamma[1] ** 2 * np.sin(theta) ** 2) ** (
            alpha / 2.0
        )
        return float(vals.mean())
    # n == 3: Gauss-Legendre in cos(phi), periodic trapezoid in theta
    u, w_u = roots_legendre(nodes)
    theta = (np.arange(2 * nodes) + 0.5) * math.pi / nodes
    sin_phi_sq = 1.0 - u**2
    vals = (
        gamma[0] ** 2 * sin_phi_sq[:, None] * np.cos(theta)[None, :] ** 2
        + gamma[1] ** 2 * sin_phi_sq[:, None] * np.sin(theta)[None, :] ** 2
        + gamma[2] ** 2 * (u**2)[:, None]
    ) ** (alpha / 2.0)
    return float((w_u[:, None] * vals).sum(axis=0).mean() / 2.0)


def levy_tail_mass(
    gamma,
    alpha: float,
    method: str = "quadrature",
    mc_points: int = 1_000_000,
    seed: int = 0,
    nodes: int = 512,
) -> tuple[float, float]:
    """Levy mass outside the closed unit ball for a radonified stable law.

    Returns ``(value, stderr)`` where value is
    (1/c_alpha) * integral over the sphere of (sum gamma_j^2 x_j^2)^(alpha/2)
    against the uniform measure of total mass :func:`sphere_total_mass`.
    Deterministic product quadrature for n <= 3, Monte Carlo (with reported
    standard error) otherwise or when ``method="monte_carlo"``.
    """
    alpha = _check_alpha(alpha)
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    if gamma.ndim != 1:
        raise ValueError("gamma must be a vector of singular values")
    n = gamma.size
    if not np.any(gamma):
        return 0.0, 0.0
    prefactor = sphere_total_mass(n, alpha) / c_alpha(alpha)

    if method == "quadrature":
        if n > 3:
            raise ValueError("deterministic quadrature is only available for n <= 3")
        return prefactor * _sphere_average(gamma, alpha, nodes), 0.0
    if method != "monte_carlo":
        raise ValueError(f"unknown method {method!r}")

    rng = substream(seed, _TAG_SPHERE_MC, n)
    z = rng.standard_normal((mc_points, n))
    x = z / np.linalg.norm(z, axis=1, keepdims=True)
    f = ((x**2) @ (gamma**2)) ** (alpha / 2.0)
    value = prefactor * float(f.mean())
    stderr = prefactor * float(f.std(ddof=1)) / math.sqrt(mc_points)
    return value, stderr


def jensen_bound(gamma, alpha: float) -> float:
    """Jensen upper bound lambda_n(S)/(c_alpha*n^(alpha/2)) * (sum gamma^2)^(alpha/2).

    Dominates :func:`levy_tail_mass` with equality exactly when all |gamma_j|
    coincide (the sphere integrand is then constant).
    """
    alpha = _check_alpha(alpha)
    gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
    n = gamma.size
    return (
        sphere_total_mass(n, alpha)
        / (c_alpha(alpha) * n ** (alpha / 2.0))
        * float(gamma @ gamma) ** (alpha / 2.0)
    )


@dataclass
class ConstantsReport:
    """Flat bundle of every explicit constant for one (alpha, p) choice."""

    alpha: float
    p: float
    c_convention: float
    c_alpha: float
    lambda_mass_n: int
    lambda_total_mass: float
    c1: float
    c2: float
    C: float
    c_F: float
    c_G: float
    c3: float
    T_uniq: float
    T_picard: float
    T_bound: float
    extras: dict[str, float] = field(default_factory=dict)

    def as_items(self) -> list[tuple[str, float]]:
        items = [
            ("alpha", self.alpha),
            ("p", self.p),
            ("c_convention", self.c_convention),
            ("c_alpha", self.c_alpha),
            ("lambda_mass_n", self.lambda_mass_n),
            ("lambda_total_mass", self.lambda_total_mass),
            ("c1", self.c1),
            ("c2", self.c2),
            ("C", self.C),
            ("c_F", self.c_F),
            ("c_G", self.c_G),
            ("c3", self.c3),
            ("T_uniq", self.T_uniq),
            ("T_picard", self.T_picard),
            ("T_bound", self.T_bound),
        ]
        items.extend(sorted(self.extras.items()))
        return items


def constants_report(
    alpha: float,
    p: float,
    c_f: float = 1.0,
    c_g: float = 1.0,
    n: int = 1,
    c_convention: float = 1.0,
) -> ConstantsReport:
    """Assemble the full :class:`ConstantsReport` for one parameter choice."""
    chain = chain_constants(alpha, p, c_convention)
    horizon = c3_and_Tmax(alpha, c_f, c_g, c_convention)
    return ConstantsReport(
        alpha=float(alpha),
        p=float(p),
        c_convention=float(c_convention),
        c_alpha=c_alpha(alpha),
        lambda_mass_n=int(n),
        lambda_total_mass=sphere_total_mass(n, alpha),
        c1=chain["c1"],
        c2=chain["c2"],
        C=chain["C"],
        c_F=float(c_f),
        c_G=float(c_g),
        c3=horizon["c3"],
        T_uniq=horizon["T_uniq"],
        T_picard=horizon["T_picard"],
        T_bound=horizon["T_bound"],
    )
