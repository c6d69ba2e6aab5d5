"""Exact samplers for the stable laws and truncated cylindrical noise paths.

The target laws are fixed by their characteristic functions only:

* scalar symmetric stable with cf exp(-scale^alpha |u|^alpha), via the
  trigonometric transform of a uniform and an exponential;
* totally right-skewed positive stable with Laplace transform exp(-s^beta),
  via the Zolotarev/Kanter transform;
* isotropic vectors with cf exp(-||u||^alpha), via the sub-Gaussian
  representation sqrt(2A)*Z with A positive (alpha/2)-stable (the factor
  was calibrated against the characteristic-function oracle; see tests).

The sub-Gaussian construction gives exact isotropy and, because each grid
row shares one subordinator draw across coordinates, pathwise projective
consistency: extending the number of kept coordinates never changes the
existing ones (bit-exact).

Draw streams are counter-based per row with a fixed uniform-consumption
layout (2 uniforms for the subordinator, then one per Gaussian coordinate
through the inverse normal CDF), so generation is reproducible and
schedule-independent.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtri

from .rng import (
    TAG_ISOTROPIC,
    TAG_NOISE_ROW,
    TAG_POSITIVE,
    TAG_SCALAR,
    open_uniform,
    parallel_map,
    substream,
)

__all__ = [
    "AlphaParams",
    "NoisePath",
    "sample_scalar_sas",
    "sample_positive_stable",
    "sample_isotropic",
    "generate_noise_path",
    "extend_dimension",
    "noise_path_to_csv",
    "noise_path_from_csv",
]


@dataclass(frozen=True)
class AlphaParams:
    """Stability index and scale, convention cf = exp(-scale^alpha |u|^alpha)."""

    alpha: float
    scale: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not self.scale > 0.0:
            raise ValueError(f"scale must be positive, got {self.scale}")


def _sas_transform(alpha: float, u_angle: np.ndarray, u_exp: np.ndarray) -> np.ndarray:
    """CMS transform: standard symmetric stable from two open uniforms."""
    v = np.pi * (u_angle - 0.5)
    w = -np.log1p(-u_exp)
    return (
        np.sin(alpha * v)
        / np.cos(v) ** (1.0 / alpha)
        * (np.cos(v - alpha * v) / w) ** ((1.0 - alpha) / alpha)
    )


def _positive_stable_transform(beta: float, u_angle: np.ndarray, u_exp: np.ndarray) -> np.ndarray:
    """Kanter transform: positive stable with Laplace transform exp(-s^beta).

    Evaluated in log space: the angular factor spans hundreds of orders of
    magnitude near the endpoints of (0, pi) when beta is close to 1.
    """
    theta = np.pi * u_angle
    w = -np.log1p(-u_exp)
    log_a = (
        beta / (1.0 - beta) * np.log(np.sin(beta * theta))
        + np.log(np.sin((1.0 - beta) * theta))
        - 1.0 / (1.0 - beta) * np.log(np.sin(theta))
    )
    # cap at the double range: for tiny beta the law's extreme quantiles
    # (mass ~1e-15 beyond 1e308) are not representable anyway
    exponent = (1.0 - beta) / beta * (log_a - np.log(w))
    return np.exp(np.clip(exponent, -708.0, 708.0))


def sample_scalar_sas(params: AlphaParams, seed: int, size: int = 1) -> np.ndarray:
    """Draws of the symmetric stable law with cf exp(-scale^alpha |u|^alpha)."""
    rng = substream(seed, TAG_SCALAR)
    u = open_uniform(rng, (2, size))
    return params.scale * _sas_transform(params.alpha, u[0], u[1])


def sample_positive_stable(alpha_half: float, seed: int, size: int = 1) -> np.ndarray:
    """Totally right-skewed positive stable draws, Laplace transform exp(-s^alpha_half)."""
    if not 0.0 < alpha_half < 1.0:
        raise ValueError(f"alpha_half must lie in (0, 1), got {alpha_half}")
    rng = substream(seed, TAG_POSITIVE)
    u = open_uniform(rng, (2, size))
    return _positive_stable_transform(alpha_half, u[0], u[1])


def _isotropic_from_uniforms(alpha: float, u: np.ndarray) -> np.ndarray:
    """Isotropic draws from a (..., 2+n) uniform block: 2 subordinator + n Gaussian."""
    a = _positive_stable_transform(alpha / 2.0, u[..., 0], u[..., 1])
    z = ndtri(u[..., 2:])
    return np.sqrt(2.0 * a)[..., None] * z


def sample_isotropic(alpha: float, n: int, seed: int, size: int = 1) -> np.ndarray:
    """Isotropic alpha-stable vectors with cf exp(-||u||^alpha), shape (size, n)."""
    AlphaParams(alpha)
    if n < 1:
        raise ValueError(f"dimension n must be >= 1, got {n}")
    rng = substream(seed, TAG_ISOTROPIC, n)
    u = open_uniform(rng, (size, 2 + n))
    return _isotropic_from_uniforms(alpha, u)


@dataclass(frozen=True)
class NoisePath:
    """Truncated coordinate increments of the cylindrical process on a grid.

    Row i holds the increments (L(t_{i+1}) - L(t_i))e_j for j = 1..m; each
    row is an independent isotropic vector with cf exp(-dt_i ||u||^alpha).
    """

    alpha: float
    m: int
    grid: np.ndarray
    increments: np.ndarray
    seed: int

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        inc = np.asarray(self.increments, dtype=float)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "increments", inc)
        _validate_grid(grid)
        if inc.shape != (grid.size - 1, self.m):
            raise ValueError(
                f"increments shape {inc.shape} does not match grid/m "
                f"({grid.size - 1}, {self.m})"
            )
        if not np.all(np.isfinite(inc)):
            raise ValueError("increments must be finite")

    @property
    def steps(self) -> int:
        return self.grid.size - 1

    @property
    def dts(self) -> np.ndarray:
        return np.diff(self.grid)


def _validate_grid(grid: np.ndarray) -> None:
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be a 1-d array with at least two times")
    if grid[0] != 0.0:
        raise ValueError(f"grid must start at 0, got t0={grid[0]}")
    if not np.all(np.diff(grid) > 0.0):
        raise ValueError("grid must be strictly increasing")


def _row_uniforms(seed: int, row: int, m: int) -> np.ndarray:
    rng = substream(seed, TAG_NOISE_ROW, row)
    return open_uniform(rng, 2 + m)


def generate_noise_path(alpha: float, m: int, grid, seed: int) -> NoisePath:
    """Sample a NoisePath: independent rows, row i ~ (dt_i)^(1/alpha) x isotropic.

    Row i is generated from its own counter-based stream derived from
    (seed, row index), so rows may be produced in parallel in any order.
    """
    AlphaParams(alpha)
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    grid = np.asarray(grid, dtype=float)
    _validate_grid(grid)
    steps = grid.size - 1
    uniforms = np.stack(parallel_map(lambda i: _row_uniforms(seed, i, m), range(steps)))
    rows = _isotropic_from_uniforms(alpha, uniforms)
    increments = np.diff(grid)[:, None] ** (1.0 / alpha) * rows
    return NoisePath(alpha=alpha, m=m, grid=grid, increments=increments, seed=seed)


def extend_dimension(path: NoisePath, m_new: int) -> NoisePath:
    """Append fresh basis coordinates; the first m columns stay bit-identical.

    Works because each row's stream draws the shared subordinator first and
    then one uniform per coordinate in column order: re-drawing a longer
    block reproduces the original prefix exactly.
    """
    if m_new < path.m:
        raise ValueError(f"m_new={m_new} must be >= current m={path.m}")
    if m_new == path.m:
        return path
    uniforms = np.stack(
        parallel_map(lambda i: _row_uniforms(path.seed, i, m_new), range(path.steps))
    )
    rows = _isotropic_from_uniforms(path.alpha, uniforms)
    increments = path.dts[:, None] ** (1.0 / path.alpha) * rows
    return NoisePath(
        alpha=path.alpha, m=m_new, grid=path.grid, increments=increments, seed=path.seed
    )


def noise_path_to_csv(path: NoisePath, extra_header: tuple[str, ...] = ()) -> str:
    """Serialize: metadata comment, then one `t_start,t_end,j,increment` row per cell."""
    buf = io.StringIO()
    for line in extra_header:
        buf.write(f"# {line}\n")
    buf.write(f"# alpha={path.alpha!r}, m={path.m}, seed={path.seed}\n")
    buf.write("t_start,t_end,j,increment\n")
    for i in range(path.steps):
        t0, t1 = path.grid[i], path.grid[i + 1]
        for j in range(path.m):
            buf.write(f"{t0:.17g},{t1:.17g},{j + 1},{path.increments[i, j]:.17g}\n")
    return buf.getvalue()


def noise_path_from_csv(text: str) -> NoisePath:
    """Inverse of :func:`noise_path_to_csv`."""
    alpha = m = seed = None
    rows: list[tuple[float, float, int, float]] = []
    for line in text.splitlines():
        line = line.strip()
        if not line:
            continue
        if line.startswith("#"):
            if "alpha=" in line and "m=" in line and "seed=" in line:
                parts = dict(
                    kv.strip().split("=", 1) for kv in line.lstrip("# ").split(",")
                )
                alpha = float(parts["alpha"])
                m = int(parts["m"])
                seed = int(parts["seed"])
            continue
        if line.startswith("t_start"):
            continue
        t0, t1, j, inc = line.split(",")
        rows.append((float(t0), float(t1), int(j), float(inc)))
    if alpha is None or m is None or seed is None:
        raise ValueError("missing metadata line '# alpha=..., m=..., seed=...'")
    starts = sorted({r[0] for r in rows})
    grid = np.array(starts + [max(r[1] for r in rows)])
    increments = np.zeros((grid.size - 1, m))
    index = {t: i for i, t in enumerate(starts)}
    for t0, _t1, j, inc in rows:
        increments[index[t0], j - 1] = inc
    return NoisePath(alpha=alpha, m=m, grid=grid, increments=increments, seed=seed)
