"""Truncated Hilbert-space machinery for the diagonal model class.

A negative diagonal generator with eigenvalues -lambda_k acts on the first
``n`` eigencoordinates; the semigroup multiplies coordinate k by
exp(-lambda_k t).  Drift and diffusion coefficients are diagonal families

    F(x)_k = f_k * s(x_k),        G(x)[k, j] = kappa_k * s(x_k) * delta_kj,

with a fixed bounded 1-Lipschitz scalar shape s (|s| <= 1).  The module
also ships numerical certifiers for the structural assumptions: a
contraction/boundedness check in the fractional norm (A2-type), Lipschitz
estimates (A3-type), and the t^delta norm-continuity bound of the
semigroup on fractional domains.  Certifiers sample finite trial sets:
they certify, they do not prove.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "BasisTruncation",
    "HSMatrix",
    "DiagonalModel",
    "SHAPES",
    "make_model",
    "heat_preset",
    "parse_model_config",
    "apply_semigroup",
    "fractional_norm",
    "norm_continuity_constant",
    "check_norm_continuity",
    "check_A2",
    "check_A3",
]


@dataclass(frozen=True)
class BasisTruncation:
    """Kept dimensions: m in the noise space U, n in the state space H."""

    m: int
    n: int

    def __post_init__(self):
        if self.m < 1 or self.n < 1:
            raise ValueError(f"truncation dimensions must be >= 1, got m={self.m}, n={self.n}")


class HSMatrix:
    """Finite-rank Hilbert-Schmidt operator U -> H as an n x m real matrix."""

    def __init__(self, entries):
        entries = np.atleast_2d(np.asarray(entries, dtype=float))
        if entries.ndim != 2:
            raise ValueError("entries must form a 2-d matrix")
        if not np.all(np.isfinite(entries)):
            raise ValueError("entries must be finite")
        self.entries = entries

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def hs_norm(self) -> float:
        return float(np.linalg.norm(self.entries))

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    @classmethod
    def diagonal(cls, values, shape: tuple[int, int] | None = None) -> "HSMatrix":
        values = np.atleast_1d(np.asarray(values, dtype=float))
        n, m = shape if shape is not None else (values.size, values.size)
        entries = np.zeros((n, m))
        k = min(n, m, values.size)
        entries[np.arange(k), np.arange(k)] = values[:k]
        return cls(entries)

    def __repr__(self):
        return f"HSMatrix(shape={self.shape}, hs_norm={self.hs_norm():.6g})"


# Shape functions: bounded by 1 and 1-Lipschitz.  "one" disables the state
# dependence (constant coefficients), "zero" disables the coefficient.
SHAPES: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "tanh": np.tanh,
    "one": lambda x: np.ones_like(np.asarray(x, dtype=float)),
    "zero": lambda x: np.zeros_like(np.asarray(x, dtype=float)),
}


def _rule_values(rule: str, n: int, kind: str) -> np.ndarray:
    """Evaluate a coefficient rule at k = 1..n.

    Grammar: ``dirichlet`` (pi^2 k^2, eigenvalues only), ``power:c:p``
    (c*k^p for eigenvalues, c*k^-p for amplitudes), ``const:c``, ``zero``.
    """
    k = np.arange(1, n + 1, dtype=float)
    parts = rule.split(":")
    name = parts[0]
    if name == "dirichlet":
        if kind != "lambda":
            raise ValueError("rule 'dirichlet' is only valid for lambda_rule")
        return math.pi**2 * k**2
    if name == "zero":
        if kind == "lambda":
            raise ValueError("eigenvalues must be strictly positive")
        return np.zeros(n)
    if name == "const":
        c = float(parts[1])
        return np.full(n, c)
    if name == "power":
        c, p = float(parts[1]), float(parts[2])
        return c * k**p if kind == "lambda" else c * k ** (-p)
    raise ValueError(f"unknown {kind} rule {rule!r}")


@dataclass(frozen=True)
class DiagonalModel:
    """Diagonal generator, fractional exponent and coefficient families.

    Carries the materialised arrays for the truncation plus the rule names
    so that t->0 divergence checks can extend the series beyond it.
    """

    lambdas: np.ndarray
    delta: float
    kappa: np.ndarray
    f: np.ndarray
    shape_name: str = "tanh"
    lambda_rule: str | None = None
    kappa_rule: str | None = None
    f_rule: str | None = None
    m: int | None = None
    name: str = "custom"

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        kap = np.asarray(self.kappa, dtype=float)
        f = np.asarray(self.f, dtype=float)
        object.__setattr__(self, "lambdas", lam)
        object.__setattr__(self, "kappa", kap)
        object.__setattr__(self, "f", f)
        if lam.ndim != 1 or lam.size < 1:
            raise ValueError("lambdas must be a nonempty vector")
        if np.any(lam <= 0.0):
            raise ValueError("eigenvalues lambda_k must be strictly positive")
        if np.any(np.diff(lam) < 0.0):
            raise ValueError("eigenvalues must be nondecreasing")
        if not 0.0 < self.delta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.delta}")
        if kap.shape != lam.shape or f.shape != lam.shape:
            raise ValueError("kappa and f must have the same length as lambdas")
        if np.any(kap < 0.0) or np.any(f < 0.0):
            raise ValueError("coefficient amplitudes must be nonnegative")
        if self.shape_name not in SHAPES:
            raise ValueError(f"unknown shape {self.shape_name!r}; options: {sorted(SHAPES)}")

    @property
    def n(self) -> int:
        return self.lambdas.size

    @property
    def noise_dim(self) -> int:
        return self.m if self.m is not None else self.n

    @property
    def shape_fn(self) -> Callable[[np.ndarray], np.ndarray]:
        return SHAPES[self.shape_name]

    def drift(self, x: np.ndarray) -> np.ndarray:
        """F(x), coordinatewise f_k * s(x_k)."""
        return self.f * self.shape_fn(x)

    def diffusion_diagonal(self, x: np.ndarray) -> np.ndarray:
        """Diagonal entries of G(x) (length n; zero-padded beyond min(n, m))."""
        return self.kappa * self.shape_fn(x)

    def diffusion_matrix(self, x: np.ndarray) -> HSMatrix:
        return HSMatrix.diagonal(self.diffusion_diagonal(x), shape=(self.n, self.noise_dim))

    def lipschitz_constants(self) -> tuple[float, float]:
        """(C_F, C_G): Lipschitz constants at t=0 for a 1-Lipschitz shape."""
        lip = 0.0 if self.shape_name == "zero" else 1.0
        if self.shape_name == "one":
            lip = 0.0
        return lip * float(self.f.max()), lip * float(self.kappa.max())

    def plain_bound_M0(self) -> float:
        """Plain-norm uniform bound: max of sqrt(sum f^2) and sqrt(sum kappa^2)."""
        if self.shape_name == "zero":
            return 0.0
        return max(float(np.linalg.norm(self.f)), float(np.linalg.norm(self.kappa)))

    def holder_constants(self) -> tuple[float, float]:
        """(c_F, c_G) = (C_F v M0, C_G v M0) entering the contraction constant."""
        c_f, c_g = self.lipschitz_constants()
        m0 = self.plain_bound_M0()
        return max(c_f, m0), max(c_g, m0)


def make_model(
    n: int,
    lambda_rule: str = "dirichlet",
    delta: float = 0.25,
    kappa_rule: str = "power:1:1.5",
    f_rule: str = "power:1:1.5",
    shape: str = "tanh",
    m: int | None = None,
    name: str = "custom",
) -> DiagonalModel:
    return DiagonalModel(
        lambdas=_rule_values(lambda_rule, n, "lambda"),
        delta=delta,
        kappa=_rule_values(kappa_rule, n, "kappa"),
        f=_rule_values(f_rule, n, "f"),
        shape_name=shape,
        lambda_rule=lambda_rule,
        kappa_rule=kappa_rule,
        f_rule=f_rule,
        m=m,
        name=name,
    )


def heat_preset(n: int = 8, m: int | None = None) -> DiagonalModel:
    """Default preset: Dirichlet heat semigroup on (0,1) with tanh coefficients.

    lambda_k = pi^2 k^2, delta = 0.25, kappa_k = f_k = k^(-1.5).  Satisfies
    the structural assumptions with margin; the sector condition holds
    structurally for any positive diagonal generator (recorded, not
    computed).
    """
    return make_model(n=n, m=m, name="heat")


_MODEL_KEYS = {"n", "m", "lambda_rule", "delta", "kappa_rule", "f_rule", "shape", "name"}


def parse_model_config(text: str) -> DiagonalModel:
    """Parse a flat key=value model configuration (documented keys only)."""
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _MODEL_KEYS:
            raise ValueError(f"line {lineno}: unknown model key {key!r}")
        values[key] = val
    if "n" not in values:
        raise ValueError("model config must set n")
    return make_model(
        n=int(values["n"]),
        lambda_rule=values.get("lambda_rule", "dirichlet"),
        delta=float(values.get("delta", "0.25")),
        kappa_rule=values.get("kappa_rule", "power:1:1.5"),
        f_rule=values.get("f_rule", "power:1:1.5"),
        shape=values.get("shape", "tanh"),
        m=int(values["m"]) if "m" in values else None,
        name=values.get("name", "custom"),
    )


def apply_semigroup(model: DiagonalModel, t: float, x: np.ndarray) -> np.ndarray:
    """S(t)x: coordinate k multiplied by exp(-lambda_k t).  Contraction for t >= 0."""
    if t < 0.0:
        raise ValueError(f"semigroup time must be >= 0, got {t}")
    x = np.asarray(x, dtype=float)
    return np.exp(-model.lambdas * t) * x


def fractional_norm(model: DiagonalModel, delta: float, x: np.ndarray) -> float:
    """Norm of the fractional domain: sqrt(sum lambda_k^(2 delta) x_k^2)."""
    if delta < 0.0:
        raise ValueError(f"delta must be >= 0, got {delta}")
    x = np.asarray(x, dtype=float)
    return float(np.sqrt(np.sum(model.lambdas ** (2.0 * delta) * x**2)))


def norm_continuity_constant(delta: float) -> float:
    """C = sup_{y>0} (1 - e^-y) y^-delta, by dense log-grid plus golden refinement."""
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    if delta == 1.0:
        return 1.0  # (1-e^-y)/y decreases from its y->0 limit 1

    def f(y):
        return -np.expm1(-y) * y ** (-delta)

    y = np.logspace(-8, 8, 20001)
    i = int(np.argmax(f(y)))
    lo, hi = y[max(i - 1, 0)], y[min(i + 1, y.size - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c, d = b - phi * (b - a), a + phi * (b - a)
    for _ in range(200):
        if f(c) < f(d):
            a = c
            c, d = d, a + phi * (b - a)
        else:
            b = d
            d, c = c, b - phi * (b - a)
        if b - a < 1e-15 * (1.0 + a):
            break
    return float(f(0.5 * (a + b)))


def check_norm_continuity(model: DiagonalModel, delta: float, t_grid) -> dict:
    """Verify ||S(t) - Id|| on the fractional domain is <= C t^delta.

    The operator norm for the diagonal model is max_k (1 - e^(-lambda_k t))
    lambda_k^(-delta); the ratio against C t^delta is 1 at most up to the
    accuracy of the numerically maximised C.  Returns the worst ratio over
    the grid and the per-t table.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid < 0.0):
        raise ValueError("t_grid must be nonnegative")
    c_bound = norm_continuity_constant(delta)
    lam = model.lambdas
    op_norms = np.empty(t_grid.size)
    ratios = np.empty(t_grid.size)
    for i, t in enumerate(t_grid):
        op = float((-np.expm1(-lam * t) * lam ** (-delta)).max()) if t > 0.0 else 0.0
        op_norms[i] = op
        ratios[i] = op / (c_bound * t**delta) if t > 0.0 else 0.0
    return {
        "C": c_bound,
        "worst_ratio": float(ratios.max()) if ratios.size else 0.0,
        "t": t_grid,
        "op_norm": op_norms,
        "ratio": ratios,
    }


def _a2_value(model: DiagonalModel, t: float, x: np.ndarray) -> float:
    lam, delta = model.lambdas, model.delta
    weights = lam ** (2.0 * delta) * np.exp(-2.0 * lam * t)
    drift = math.sqrt(float(np.sum(weights * model.drift(x) ** 2)))
    diff = math.sqrt(float(np.sum(weights * model.diffusion_diagonal(x) ** 2)))
    return max(drift, diff)


def _a2_series_sup(model: DiagonalModel, t: float) -> float:
    """Upper envelope (|s| <= 1) of the A2 series at time t, extended by rules."""
    if model.kappa_rule is None or model.lambda_rule is None or model.f_rule is None:
        lam, kap, f = model.lambdas, model.kappa, model.f
    else:
        # extend far enough that exp(-2 lambda_k t) has decayed
        n_ext = model.n
        while True:
            lam = _rule_values(model.lambda_rule, n_ext, "lambda")
            if 2.0 * lam[-1] * t > 50.0 or n_ext > 2_000_000:
                break
            n_ext *= 4
        kap = _rule_values(model.kappa_rule, n_ext, "kappa")
        f = _rule_values(model.f_rule, n_ext, "f")
    w = lam ** (2.0 * model.delta) * np.exp(-2.0 * lam * t)
    return math.sqrt(max(float(np.sum(w * kap**2)), float(np.sum(w * f**2))))


def check_A2(
    model: DiagonalModel,
    t_grid,
    trial_points,
    divergence_factor: float = 100.0,
) -> dict:
    """Estimate the fractional-domain uniform bound M0 and flag t->0 divergence.

    Reports the empirical maximum of the drift/diffusion fractional norms
    over ``t_grid x trial_points`` plus the rule-extended series envelope
    on a refining t-grid; flagged divergent when the envelope keeps growing
    past ``divergence_factor`` times its value at the largest refining t.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if np.any(t_grid <= 0.0):
        raise ValueError("A2 is a bound over t in (0, T]; t_grid must be positive")
    trial_points = [np.asarray(x, dtype=float) for x in trial_points]
    m0 = 0.0
    for t in t_grid:
        for x in trial_points:
            m0 = max(m0, _a2_value(model, t, x))

    t_refine = float(t_grid.min()) * 4.0 ** -np.arange(0, 12, dtype=float)
    envelope = np.array([_a2_series_sup(model, t) for t in t_refine])
    growing = bool(np.all(np.diff(envelope) > 0.0))
    divergent = bool(growing and envelope[-1] > divergence_factor * envelope[0])
    if np.any(~np.isfinite(envelope)):
        divergent = True
    return {
        "M0": m0,
        "series_envelope_sup": float(np.nanmax(envelope[np.isfinite(envelope)])),
        "divergent": divergent,
        "t_refine": t_refine,
        "envelope": envelope,
    }


def check_A3(model: DiagonalModel, point_pairs, t_grid=(0.0,)) -> dict:
    """Empirical Lipschitz estimates for S(t)F and S(t)G over point pairs.

    For the diagonal model with a 1-Lipschitz shape the true constants are
    bounded by max_k f_k and max_k kappa_k; the estimates approach them
    from below.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    c_f_hat = 0.0
    c_g_hat = 0.0
    for x, y in point_pairs:
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        dist = float(np.linalg.norm(x - y))
        if dist == 0.0:
            raise ValueError("point pairs must be distinct")
        df = model.drift(x) - model.drift(y)
        dg = model.diffusion_diagonal(x) - model.diffusion_diagonal(y)
        for t in t_grid:
            damp = np.exp(-model.lambdas * t)
            c_f_hat = max(c_f_hat, float(np.linalg.norm(damp * df)) / dist)
            c_g_hat = max(c_g_hat, float(np.linalg.norm(damp * dg)) / dist)
    bound_f, bound_g = model.lipschitz_constants()
    return {"C_F": c_f_hat, "C_G": c_g_hat, "bound_C_F": bound_f, "bound_C_G": bound_g}
