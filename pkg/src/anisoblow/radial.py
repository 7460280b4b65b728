"""Radial profiles, grids, weighted inner products and derivative helpers.

A RadialProfile bundles values and first derivative of a function of r >= 0
on a strictly increasing grid.  Profiles produced by the solvers live on a
grid with an optional short linearly spaced prefix near the origin followed
by a log-uniform section, which is what the high-order derivative stencils
below assume for their accuracy (they fall back to 2nd order on arbitrary
grids).

The weighted measure used everywhere in the radial sector is
rho_r r**(d-1) dr with rho_r = exp(-r**2/4).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson
from scipy.interpolate import CubicHermiteSpline


# ---------------------------------------------------------------------------
# grids

def log_uniform_grid(rmin: float, rmax: float, n: int) -> np.ndarray:
    """n nodes, geometrically spaced on [rmin, rmax]."""
    return np.exp(np.linspace(np.log(rmin), np.log(rmax), n))


def graded_grid(r_inner: float, r_switch: float, rmax: float,
                n_log: int, n_lin: int) -> np.ndarray:
    """Geometric nodes on [r_inner, r_switch] then uniform up to rmax."""
    geo = log_uniform_grid(r_inner, r_switch, n_log)
    lin = np.linspace(r_switch, rmax, n_lin + 1)[1:]
    return np.concatenate([geo, lin])


# ---------------------------------------------------------------------------
# weighted measure

def radial_weight(r: np.ndarray, d: int) -> np.ndarray:
    """rho_r r**(d-1) with rho_r = exp(-r^2/4)."""
    return np.exp(-0.25 * r ** 2) * r ** (d - 1.0)


def weighted_dot(r: np.ndarray, f: np.ndarray, g: np.ndarray, d: int) -> float:
    """Simpson approximation of int f g rho_r r^(d-1) dr on the grid."""
    return float(simpson(f * g * radial_weight(r, d), x=r))


def weighted_norm(r: np.ndarray, f: np.ndarray, d: int) -> float:
    return float(np.sqrt(max(weighted_dot(r, f, f, d), 0.0)))


# ---------------------------------------------------------------------------
# derivatives

_STENCIL6 = np.array([-1.0, 9.0, -45.0, 0.0, 45.0, -9.0, 1.0]) / 60.0


def _derivative_uniform(s: np.ndarray, f: np.ndarray) -> np.ndarray:
    """6th-order first derivative on a uniform grid, one-sided at the edges."""
    h = s[1] - s[0]
    df = np.empty_like(f)
    n = len(f)
    if n >= 7:
        core = sum(c * f[k: n - 6 + k] for k, c in enumerate(_STENCIL6) if c)
        df[3:-3] = core / h
    # 2nd-order one-sided / central fallback at the edges
    df[0] = (-3 * f[0] + 4 * f[1] - f[2]) / (2 * h)
    df[-1] = (3 * f[-1] - 4 * f[-2] + f[-3]) / (2 * h)
    for k in (1, 2, n - 3, n - 2):
        if 0 < k < n - 1:
            df[k] = (f[k + 1] - f[k - 1]) / (2 * h)
    return df


def _is_uniform(x: np.ndarray) -> bool:
    dx = np.diff(x)
    return bool(np.allclose(dx, dx[0], rtol=1e-8, atol=1e-12))


def grid_derivative(r: np.ndarray, f: np.ndarray) -> np.ndarray:
    """First derivative of sampled data, high order where the grid allows.

    Log-uniform sections get a 6th-order stencil in s = log r
    (df/dr = (1/r) df/ds), uniform sections the same stencil in r.  Grids
    made of a short uniform prefix followed by a log-uniform body (the
    canonical solver output) are split and the two sections differentiated
    separately.  Anything else falls back to np.gradient (2nd order).
    """
    r = np.asarray(r, dtype=float)
    f = np.asarray(f, dtype=float)
    if r[0] > 0 and _is_uniform(np.log(r)):
        return _derivative_uniform(np.log(r), f) / r
    if _is_uniform(r):
        return _derivative_uniform(r, f)
    # prefix + log-uniform body: locate the longest log-uniform suffix
    pos = np.flatnonzero(r > 0)
    if pos.size >= 16:
        s = np.log(r[pos[0]:])
        ds = np.diff(s)
        k = len(ds)
        while k > 0 and np.isclose(ds[k - 1], ds[-1], rtol=1e-8, atol=1e-12):
            k -= 1
        start = pos[0] + k  # first index of the log-uniform suffix
        if len(r) - start >= 16 and start >= 1:
            df = np.empty_like(f)
            df[start:] = _derivative_uniform(s[start - pos[0]:], f[start:]) / r[start:]
            lo = np.gradient(f[: start + 3], r[: start + 3], edge_order=2)
            df[:start] = lo[:start]
            return df
    return np.gradient(f, r, edge_order=2)


# ---------------------------------------------------------------------------
# the profile container

@dataclass
class RadialProfile:
    """Sampled radial function with values and first derivative.

    r is strictly increasing (r[0] may be 0); val and dval have the same
    length.  meta records provenance (producing operation, parameter hash).
    """

    r: np.ndarray
    val: np.ndarray
    dval: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.r = np.asarray(self.r, dtype=float)
        self.val = np.asarray(self.val, dtype=float)
        self.dval = np.asarray(self.dval, dtype=float)
        if not (len(self.r) == len(self.val) == len(self.dval)):
            raise ValueError("r, val, dval must have equal length")
        if np.any(np.diff(self.r) <= 0):
            raise ValueError("r must be strictly increasing")

    def interpolator(self) -> CubicHermiteSpline:
        """C1 cubic Hermite interpolant using the stored exact derivative."""
        return CubicHermiteSpline(self.r, self.val, self.dval)

    def restricted(self, r_lo: float, r_hi: float) -> "RadialProfile":
        m = (self.r >= r_lo) & (self.r <= r_hi)
        return RadialProfile(self.r[m], self.val[m], self.dval[m],
                             meta=dict(self.meta))

    def derivative_consistency(self) -> float:
        """Max mismatch of dval against centered differences of val (O(h^2)).

        Nodes where the grid spacing jumps by more than 50% (grid-section
        junctions) are excluded: the centered stencil is only second-order
        accurate on locally near-uniform spacing.
        """
        r, v = self.r, self.val
        cd = (v[2:] - v[:-2]) / (r[2:] - r[:-2])
        h = np.diff(r)
        ratio = h[1:] / h[:-1]
        ok = (ratio > 2.0 / 3.0) & (ratio < 1.5)
        scale = np.max(np.abs(self.dval)) or 1.0
        return float(np.max(np.abs(cd[ok] - self.dval[1:-1][ok])) / scale)


def loglog_slope(r: np.ndarray, f: np.ndarray) -> float:
    """Least-squares slope of log|f| vs log r (decay-exponent estimator)."""
    m = f != 0
    x = np.log(r[m])
    y = np.log(np.abs(f[m]))
    A = np.vstack([x, np.ones_like(x)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(sol[0])
