"""Grid evaluation of closed-form solutions, coordinate inversion for the
parametric solution, and finite-difference residual oracles.

The flow residuals are assembled from second-order central stencils; the
mixed derivative u_xxt composes the central t-derivative with the central
second x-derivative.  A refinement ladder (h, h/2, h/4, ...) yields an
observed convergence order; pole-adjacent points (flagged as NaN by the
field evaluators) are masked from the norms and counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .chsym import ExactSolution


class NonMonotoneError(ValueError):
    pass


class OutOfRangeError(ValueError):
    pass


@dataclass(frozen=True)
class Grid:
    x_min: float
    x_max: float
    t_min: float
    t_max: float
    hx: float
    ht: float

    def __post_init__(self):
        if self.hx <= 0 or self.ht <= 0:
            raise ValueError("grid spacings must be positive")
        if self.nx < 10 or self.nt < 10:
            raise ValueError("need at least 8 interior points per axis")

    @property
    def nx(self) -> int:
        return int(round((self.x_max - self.x_min) / self.hx)) + 1

    @property
    def nt(self) -> int:
        return int(round((self.t_max - self.t_min) / self.ht)) + 1

    def refined(self) -> "Grid":
        return Grid(self.x_min, self.x_max, self.t_min, self.t_max, self.hx / 2, self.ht / 2)

    def axes(self, halo_x: int = 0, halo_t: int = 0) -> tuple[np.ndarray, np.ndarray]:
        xs = self.x_min + self.hx * np.arange(-halo_x, self.nx + halo_x)
        ts = self.t_min + self.ht * np.arange(-halo_t, self.nt + halo_t)
        return xs, ts


def invert_coordinate(
    x_tilde_of, t: float, target: float, bracket: tuple[float, float], tol: float = 1e-12
) -> float:
    """Solve x_tilde(x, t) = target by bracketed bisection with Newton-style
    polish; x -> x_tilde must be strictly monotone over the bracket."""
    lo, hi = bracket
    samples = np.linspace(lo, hi, 64)
    values = np.asarray(x_tilde_of(samples, np.full_like(samples, t)), dtype=float)
    diffs = np.diff(values)
    if not (np.all(diffs > 0) or np.all(diffs < 0)):
        raise NonMonotoneError("coordinate map is not monotone over the bracket")
    increasing = bool(values[-1] > values[0])
    vmin, vmax = (values[0], values[-1]) if increasing else (values[-1], values[0])
    if not (vmin <= target <= vmax):
        raise OutOfRangeError(f"target {target} outside sampled range [{vmin}, {vmax}]")
    a, b = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b)
        val = float(x_tilde_of(np.asarray([mid]), np.asarray([t]))[0])
        if (val < target) == increasing:
            a = mid
        else:
            b = mid
        if abs(b - a) < tol:
            break
    return 0.5 * (a + b)


def invert_grid(x_tilde_of, targets: np.ndarray, ts: np.ndarray, pad: float = 4.0) -> np.ndarray:
    """Vectorized bisection of x_tilde(x, t) = target over a meshgrid of
    targets (axis 0) and times (axis 1)."""
    T, TT = np.meshgrid(targets, ts, indexing="ij")
    lo = T - pad
    hi = T + pad
    flo = x_tilde_of(lo, TT) - T
    fhi = x_tilde_of(hi, TT) - T
    grow = 0
    while np.any(np.sign(flo) == np.sign(fhi)):
        grow += 1
        if grow > 12:
            raise OutOfRangeError("failed to bracket the coordinate inversion")
        bad = np.sign(flo) == np.sign(fhi)
        lo = np.where(bad, lo - pad, lo)
        hi = np.where(bad, hi + pad, hi)
        flo = x_tilde_of(lo, TT) - T
        fhi = x_tilde_of(hi, TT) - T
    for _ in range(70):
        mid = 0.5 * (lo + hi)
        fm = x_tilde_of(mid, TT) - T
        take_lo = np.sign(fm) == np.sign(flo)
        lo = np.where(take_lo, mid, lo)
        flo = np.where(take_lo, fm, flo)
        hi = np.where(take_lo, hi, mid)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class ResidualReport:
    grid: Grid
    max_norms: tuple[float, float]
    l2_norms: tuple[float, float]
    masked_fraction: float
    rungs: tuple["ResidualReport", ...] = ()
    order_estimate: float | None = None

    def as_dict(self) -> dict:
        data = {
            "hx": self.grid.hx,
            "ht": self.grid.ht,
            "max_norms": list(self.max_norms),
            "l2_norms": list(self.l2_norms),
            "masked_fraction": self.masked_fraction,
        }
        if self.rungs:
            data["rungs"] = [r.as_dict() for r in self.rungs]
        if self.order_estimate is not None:
            data["order_estimate"] = self.order_estimate
        return data


def _stencil_dx(F: np.ndarray, h: float, k: int) -> np.ndarray:
    """Central x-derivative of order k (1, 2 or 3) on axis 0, shrinking the
    array by the stencil halo."""
    if k == 1:
        return (F[2:, :] - F[:-2, :]) / (2 * h)
    if k == 2:
        return (F[2:, :] - 2 * F[1:-1, :] + F[:-2, :]) / (h * h)
    if k == 3:
        return (F[4:, :] - 2 * F[3:-1, :] + 2 * F[1:-3, :] - F[:-4, :]) / (2 * h**3)
    raise ValueError(f"unsupported derivative order {k}")


def _stencil_dt(F: np.ndarray, h: float) -> np.ndarray:
    return (F[:, 2:] - F[:, :-2]) / (2 * h)


def _crop_x(F: np.ndarray, k: int) -> np.ndarray:
    return F[k:-k, :] if k else F


def _residual_arrays(u: np.ndarray, v: np.ndarray, grid: Grid):
    """Interior fields and both equation residuals from haloed samples."""
    hx, ht = grid.hx, grid.ht

    def jets(F):
        # x-jets on the t-extended interior, cropped to a common x-window
        F0 = _crop_x(F, 3)
        F1 = _crop_x(_stencil_dx(F, hx, 1), 2)
        F2 = _crop_x(_stencil_dx(F, hx, 2), 2)
        F3 = _crop_x(_stencil_dx(F, hx, 3), 1)
        return F0, F1, F2, F3

    u0, u1, u2, u3 = jets(u)
    v0, v1, v2, v3 = jets(v)

    def interior_t(F):
        return F[:, 1:-1]

    ut = _stencil_dt(u0, ht)
    vt = _stencil_dt(v0, ht)
    uxxt = _stencil_dt(u2, ht)
    vxxt = _stencil_dt(v2, ht)
    u0, u1, u2, u3 = map(interior_t, (u0, u1, u2, u3))
    v0, v1, v2, v3 = map(interior_t, (v0, v1, v2, v3))

    mm = u0 - u2
    nn = v0 - v2
    mm_x = u1 - u3
    nn_x = v1 - v3
    B = u0 * v0 - u1 * v1
    Bx = u1 * v0 + u0 * v1 - u2 * v1 - u1 * v2
    C = u0 * v1 - u1 * v0
    F_rhs = 0.5 * (mm_x * B + mm * Bx) - 0.5 * mm * C
    G_rhs = 0.5 * (nn_x * B + nn * Bx) + 0.5 * nn * C
    res1 = ut - uxxt - F_rhs
    res2 = vt - vxxt - G_rhs
    return u0, v0, res1, res2


def fd_residual_arrays(u: np.ndarray, v: np.ndarray, grid: Grid) -> ResidualReport:
    """Residuals of the cubic two-component flow on sampled fields.

    u, v must be sampled with a 3-cell halo in x and a 1-cell halo in t; the
    returned norms cover the interior grid.
    """
    _, _, res1, res2 = _residual_arrays(u, v, grid)
    mask = np.isfinite(res1) & np.isfinite(res2)
    total = res1.size
    masked_fraction = 1.0 - float(np.count_nonzero(mask)) / total

    def norms(r):
        vals = r[mask]
        if vals.size == 0:
            return math.inf, math.inf
        return float(np.max(np.abs(vals))), float(np.sqrt(np.mean(vals**2)))

    m1, l1 = norms(res1)
    m2, l2 = norms(res2)
    return ResidualReport(grid, (m1, m2), (l1, l2), masked_fraction)


@dataclass
class SolutionSampler:
    """Samples the transformed fields on a rectangular grid in the
    transformed coordinates by inverting the coordinate map per node."""

    sol: ExactSolution

    def sample(self, grid: Grid, halo_x: int = 3, halo_t: int = 1):
        xs, ts = grid.axes(halo_x=halo_x, halo_t=halo_t)
        X = invert_grid(self.sol.x_tilde, xs, ts)
        TT = np.meshgrid(xs, ts, indexing="ij")[1]
        u = self.sol.u_tilde(X, TT)
        v = self.sol.v_tilde(X, TT)
        return u, v, X, TT


def convergence_ladder(
    sampler, base_grid: Grid, rungs: int = 3
) -> ResidualReport:
    """Run the residual oracle over a refinement ladder and fit the observed
    order from the l2 norms."""
    reports = []
    grid = base_grid
    for _ in range(rungs):
        u, v, _, _ = sampler.sample(grid)
        reports.append(fd_residual_arrays(u, v, grid))
        grid = grid.refined()
    order = None
    if len(reports) >= 3:
        hs = np.array([r.grid.hx for r in reports])
        norms = np.array([max(r.l2_norms) for r in reports])
        if np.all(norms > 0):
            slope = np.polyfit(np.log(hs), np.log(norms), 1)[0]
            order = float(slope)
        else:
            order = math.inf
    top = reports[0]
    return ResidualReport(
        top.grid,
        top.max_norms,
        top.l2_norms,
        max(r.masked_fraction for r in reports),
        rungs=tuple(reports),
        order_estimate=order,
    )


def write_residual_csv(path: str, sampler, grid: Grid, header: str) -> None:
    """Interior fields and both equation residuals, one row per node."""
    u, v, _, _ = sampler.sample(grid)
    u0, v0, res1, res2 = _residual_arrays(u, v, grid)
    xs, ts = grid.axes()
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {header}\n")
        fh.write("x,t,u,v,residual_1,residual_2\n")
        for i, xv in enumerate(xs):
            for j, tv in enumerate(ts):
                fh.write(
                    ",".join(
                        repr(float(val))
                        for val in (xv, tv, u0[i, j], v0[i, j], res1[i, j], res2[i, j])
                    )
                    + "\n"
                )


def write_solution_csv(path: str, sol: ExactSolution, grid: Grid) -> None:
    """Fields on the grid in transformed coordinates, one row per node."""
    sampler = SolutionSampler(sol)
    xs, ts = grid.axes()
    X = invert_grid(sol.x_tilde, xs, ts)
    TT = np.meshgrid(xs, ts, indexing="ij")[1]
    fields = {
        "u": sol.u_tilde(X, TT),
        "v": sol.v_tilde(X, TT),
        "m": sol.m_tilde(X, TT),
        "n": sol.n_tilde(X, TT),
    }
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            f"# u0={sol.u0} eta={sol.eta} eps={sol.eps} k={sol.k} speed={sol.speed} "
            f"grid={grid.x_min}:{grid.x_max}:{grid.hx},{grid.t_min}:{grid.t_max}:{grid.ht}\n"
        )
        fh.write("x,t,u,v,m,n\n")
        for i, xv in enumerate(xs):
            for j, tv in enumerate(ts):
                row = ",".join(
                    repr(float(val))
                    for val in (xv, tv, fields["u"][i, j], fields["v"][i, j],
                                fields["m"][i, j], fields["n"][i, j])
                )
                fh.write(row + "\n")
