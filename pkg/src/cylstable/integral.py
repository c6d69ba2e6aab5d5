"""Stochastic integrals of step integrands against truncated cylindrical noise.

A step integrand holds one Hilbert-Schmidt matrix per grid cell
(t_i, t_{i+1}], measurable at the left endpoint; the integral path is the
running sum of matrix-vector products with the noise increments.  Left
endpoints everywhere: predictable integrands never peek forward, which the
construction helper enforces structurally by exposing only the state
prefix up to t_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .constants import c_alpha
from .rng import TAG_REPLICA, open_uniform, substream
from .sampling import NoisePath, _isotropic_from_uniforms

__all__ = [
    "AdaptednessError",
    "StepIntegrand",
    "radonify",
    "integrate",
    "discretize_predictable",
    "constant_integrand",
    "refinement_experiment",
]


class AdaptednessError(Exception):
    """Raised when an integrand rule tries to read state beyond its left endpoint."""


@dataclass(frozen=True)
class StepIntegrand:
    """Piecewise-constant predictable operator-valued integrand on a grid.

    ``values[i]`` is the n x m matrix acting on (t_i, t_{i+1}]; it may
    depend only on information available at or before t_i.
    """

    grid: np.ndarray
    values: np.ndarray
    adapted: bool = True

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", values)
        if grid.ndim != 1 or grid.size < 2 or not np.all(np.diff(grid) > 0.0):
            raise ValueError("grid must be strictly increasing with at least two times")
        if values.ndim != 3 or values.shape[0] != grid.size - 1:
            raise ValueError(
                f"values must have shape (steps, n, m) with steps={grid.size - 1}, "
                f"got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("integrand matrices must have finite entries")
        if not self.adapted:
            raise AdaptednessError("integrand failed the adaptedness guard")

    @property
    def steps(self) -> int:
        return self.grid.size - 1

    def scaled(self, factor: float) -> "StepIntegrand":
        return StepIntegrand(self.grid, factor * self.values)

    def stopped(self, tau: float) -> "StepIntegrand":
        """Integrand times 1_[0, tau] for a grid time tau (cells beyond zeroed)."""
        if tau not in self.grid:
            raise ValueError(f"tau={tau} is not a grid time")
        values = self.values.copy()
        values[self.grid[1:] > tau] = 0.0
        return StepIntegrand(self.grid, values)

    def alpha_scale(self, alpha: float) -> float:
        """(sum_i ||Psi_i||_HS^alpha dt_i)^(1/alpha), max-factored.

        Factoring out the largest HS norm keeps the result exactly
        homogeneous under power-of-two rescaling of the integrand.
        """
        norms = np.linalg.norm(self.values.reshape(self.steps, -1), axis=1)
        peak = norms.max()
        if peak == 0.0:
            return 0.0
        dts = np.diff(self.grid)
        return float(peak * np.sum((norms / peak) ** alpha * dts) ** (1.0 / alpha))


def radonify(psi, increment: np.ndarray) -> np.ndarray:
    """Apply a Hilbert-Schmidt matrix to a coordinate increment vector."""
    entries = psi.entries if hasattr(psi, "entries") else np.asarray(psi, dtype=float)
    increment = np.asarray(increment, dtype=float)
    if entries.shape[1] != increment.shape[-1]:
        raise ValueError(
            f"dimension mismatch: operator is {entries.shape}, increment has "
            f"{increment.shape[-1]} coordinates"
        )
    return increment @ entries.T


def integrate(integrand: StepIntegrand, noise: NoisePath) -> np.ndarray:
    """Partial-sum integral path I(t_k) = sum_{i<k} Psi_i dL_i, shape (M+1, n)."""
    if not np.array_equal(integrand.grid, noise.grid):
        raise ValueError("integrand and noise grids differ; generate noise on the finest grid")
    terms = np.einsum("inm,im->in", integrand.values, noise.increments)
    path = np.zeros((noise.steps + 1, integrand.values.shape[1]))
    np.cumsum(terms, axis=0, out=path[1:])
    return path


def discretize_predictable(
    rule: Callable[[float, np.ndarray], np.ndarray],
    states: np.ndarray,
    grid,
) -> StepIntegrand:
    """Left-endpoint discretisation of a state-dependent operator rule.

    ``rule(t_i, prefix)`` receives only the states up to and including t_i
    (a read-only prefix of shape (i+1, n)); indexing past the prefix raises
    :class:`AdaptednessError`, so anti-causal rules are rejected
    structurally.
    """
    grid = np.asarray(grid, dtype=float)
    states = np.asarray(states, dtype=float)
    if states.shape[0] != grid.size:
        raise ValueError("states must provide one vector per grid time")
    matrices = []
    for i in range(grid.size - 1):
        prefix = states[: i + 1]
        prefix.flags.writeable = False
        try:
            psi = np.asarray(rule(float(grid[i]), prefix), dtype=float)
        except IndexError as exc:
            raise AdaptednessError(
                f"rule at t_{i}={grid[i]} read state beyond its left endpoint"
            ) from exc
        matrices.append(np.atleast_2d(psi))
    return StepIntegrand(grid, np.stack(matrices))


def constant_integrand(psi, grid) -> StepIntegrand:
    entries = psi.entries if hasattr(psi, "entries") else np.atleast_2d(np.asarray(psi, float))
    grid = np.asarray(grid, dtype=float)
    return StepIntegrand(grid, np.broadcast_to(entries, (grid.size - 1, *entries.shape)).copy())


def _binomial_se(p_hat: np.ndarray, n: int) -> np.ndarray:
    return np.sqrt(np.clip(p_hat * (1.0 - p_hat), 0.0, None) / n)


def refinement_experiment(
    profile: Callable[[np.ndarray], np.ndarray],
    psi0,
    alpha: float,
    T: float,
    coarse_steps: int,
    levels: int,
    replicas: int,
    epsilon: float,
    seed: int,
) -> dict:
    """Integral convergence under dyadic left-endpoint refinement.

    The target integrand is Psi(s) = profile(s) * psi0 (deterministic,
    continuous in time).  Level k samples it at the left endpoints of a
    grid with coarse_steps * 2^k cells; all levels are integrated against
    the same noise, generated once per replica on the finest grid.  Reports
    the exceedance probabilities P(||I_k(T) - I_K(T)|| > epsilon) against
    the finest level K with binomial standard errors; the true L^alpha
    distances decay like 2^-k, so the table must be nonincreasing to within
    Monte-Carlo noise.
    """
    entries = psi0.entries if hasattr(psi0, "entries") else np.atleast_2d(np.asarray(psi0, float))
    n, m = entries.shape
    if levels < 2:
        raise ValueError("need at least two refinement levels")
    fine_steps = coarse_steps * 2 ** (levels - 1)
    fine_grid = np.linspace(0.0, T, fine_steps + 1)
    dt = T / fine_steps

    # profile at the left endpoint of the containing cell, per level
    weights = np.empty((levels, fine_steps))
    for k in range(levels):
        stride = 2 ** (levels - 1 - k)
        left_idx = (np.arange(fine_steps) // stride) * stride
        weights[k] = profile(fine_grid[left_idx])

    # I_k(T) = sum_i w_k[i] * psi0 @ dL_i; only the projected increment
    # psi0 @ dL_i enters, so integrate the m-dim noise once per replica.
    rng_root = seed
    diffs = np.empty((levels - 1, replicas))
    scale = dt ** (1.0 / alpha)
    for r in range(replicas):
        rng = substream(rng_root, TAG_REPLICA, r)
        u = open_uniform(rng, (fine_steps, 2 + m))
        increments = scale * _isotropic_from_uniforms(alpha, u)
        projected = increments @ entries.T  # (fine_steps, n)
        fine_total = weights[-1] @ projected
        for k in range(levels - 1):
            diffs[k, r] = np.linalg.norm(weights[k] @ projected - fine_total)

    # L^alpha distance of each level to the target profile itself,
    # evaluated on a 16x refined grid (halves per level for smooth profiles)
    refine = 16
    s_fine = (np.arange(fine_steps * refine) + 0.5) * dt / refine
    target_vals = profile(s_fine)
    hs = float(np.linalg.norm(entries))
    dists = np.empty(levels - 1)
    for k in range(levels - 1):
        step_vals = np.repeat(weights[k], refine)
        dists[k] = (
            np.sum(np.abs((step_vals - target_vals) * hs) ** alpha) * dt / refine
        ) ** (1.0 / alpha)

    exceed = (diffs > epsilon).mean(axis=1)
    table = {
        "level": np.arange(levels - 1),
        "cells": coarse_steps * 2 ** np.arange(levels - 1),
        "epsilon": np.full(levels - 1, epsilon),
        "exceedance": exceed,
        "stderr": _binomial_se(exceed, replicas),
        "l_alpha_distance": dists,
    }
    se = table["stderr"]
    monotone = all(
        exceed[k + 1] <= exceed[k] + 2.0 * math.hypot(se[k], se[k + 1])
        for k in range(levels - 2)
    )
    return {"table": table, "monotone": monotone, "replicas": replicas, "alpha": alpha}


def scalar_tail_level(alpha: float) -> float:
    """Tail plateau of the standard scalar stable law: 1/c_alpha."""
    return 1.0 / c_alpha(alpha)
