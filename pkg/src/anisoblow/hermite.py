"""Even Gaussian-Hermite modes in z, combinatorial tables, limit eigenfunctions.

The z-measure is rho_z = exp(-z**2/4) / (2 sqrt(pi)), whose even moments are
computable in closed form:

    int z**(2k) rho_z dz = (2k-1)!! * 2**k.

P_m denotes the degree-m orthonormal polynomial for this measure (leading
coefficient positive), which solves the eigenvalue identity

    -P'' + (z/2) P' = (m/2) P.

Only even m are used; P_0 = 1 and e.g. P_2 = (z**2 - 2) / (2 sqrt(2)).

The triangular coefficient table c[i][j] and the sequence C_i,

    c_{i,0} = 1,  c_{i,j+1} = -c_{i,j} (i - j)      (== (-1)^j i!/(i-j)!)
    C_i = 2**(-2i) / ( i! * (d/2 - gamma)_i )       ((x)_k = rising factorial)

assemble the explicit eigenfunctions of the limit radial operator

    H_inf = -Delta_r + (1/2) Lambda_r - p c_inf^{p-1} / r**2,
    phi_i(r) = sum_{j<=i} c_{i,j} C_j r**(2j - gamma),   eigenvalue i - alpha/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import SingularEvaluationError, UnsupportedParityError
from .exponents import SupercriticalParams
from .radial import RadialProfile


def pochhammer(x: float, k: int) -> float:
    """Rising factorial (x)_k = x (x+1) ... (x+k-1), with (x)_0 = 1."""
    if k < 0:
        raise ValueError(f"need k >= 0, got k={k}")
    out = 1.0
    for j in range(k):
        out *= x + j
    return out


def gaussian_moment(k: int) -> int:
    """Exact even moment int z**(2k) rho_z dz = (2k-1)!! 2**k."""
    out = 1
    for j in range(1, 2 * k, 2):
        out *= j
    return out * 2 ** k


@dataclass(frozen=True)
class HermiteMode:
    """Normalized even mode: coefficient of z**k at index k, plus c_m."""

    m: int
    coeffs: np.ndarray
    norm_constant: float

    def __call__(self, z):
        return np.polynomial.polynomial.polyval(z, self.coeffs)

    def deriv(self, z, order: int = 1):
        c = np.polynomial.polynomial.polyder(self.coeffs, order)
        return np.polynomial.polynomial.polyval(z, c)

    @property
    def leading_coefficient(self) -> float:
        return float(self.coeffs[-1])

    def eigen_residual_coeffs(self) -> np.ndarray:
        """Coefficients of -P'' + (z/2)P' - (m/2)P; all zero for a true mode."""
        c = self.coeffs
        n = len(c)
        res = np.zeros(n)
        # (z/2) P' contributes (k/2) c_k to z^k; -(m/2) P contributes -(m/2) c_k
        for k in range(n):
            res[k] += (0.5 * k - 0.5 * self.m) * c[k]
        # -P'' contributes -(k+2)(k+1) c_{k+2} to z^k
        for k in range(n - 2):
            res[k] -= (k + 2) * (k + 1) * c[k + 2]
        return res


def _raw_even_coeffs(m: int) -> list[Fraction]:
    """Monomial coefficients of sum_k m!/(k!(m-2k)!) (-1)^k z^(m-2k), exact."""
    coeffs = [Fraction(0)] * (m + 1)
    for k in range(m // 2 + 1):
        coeffs[m - 2 * k] = Fraction((-1) ** k * math.factorial(m),
                                     math.factorial(k) * math.factorial(m - 2 * k))
    return coeffs


def hermite_even(m: int, params: SupercriticalParams | None = None) -> HermiteMode:
    """Orthonormal even mode of degree m under rho_z.

    The normalization constant comes from the exact double-factorial moments
    (no quadrature); sign convention: leading coefficient > 0.
    """
    if m % 2 != 0 or m < 0:
        raise UnsupportedParityError(f"only even modes are defined, got m={m}")
    if params is not None and m > 2 * params.ell:
        raise ValueError(f"m={m} exceeds 2*ell={2 * params.ell}")
    raw = _raw_even_coeffs(m)
    norm_sq = Fraction(0)
    for a in range(0, m + 1, 2):
        for b in range(0, m + 1, 2):
            if raw[a] and raw[b]:
                norm_sq += raw[a] * raw[b] * gaussian_moment((a + b) // 2)
    c_m = 1.0 / math.sqrt(float(norm_sq))
    coeffs = np.array([float(c) * c_m for c in raw])
    return HermiteMode(m=m, coeffs=coeffs, norm_constant=c_m)


def mode_inner_product_exact(p1: HermiteMode, p2: HermiteMode) -> float:
    """<P, P'>_{rho_z} assembled from the exact moments."""
    out = 0.0
    for a, ca in enumerate(p1.coeffs):
        if ca == 0.0:
            continue
        for b, cb in enumerate(p2.coeffs):
            if cb == 0.0 or (a + b) % 2 == 1:
                continue
            out += ca * cb * gaussian_moment((a + b) // 2)
    return out


def rho_z(z):
    return np.exp(-0.25 * np.asarray(z) ** 2) / (2.0 * np.sqrt(np.pi))


def gauss_hermite_rule(n: int = 200):
    """Nodes and weights so that sum w_i f(z_i) ~= int f rho_z dz."""
    x, w = np.polynomial.hermite.hermgauss(n)
    return 2.0 * x, w / np.sqrt(np.pi)


# ---------------------------------------------------------------------------
# coefficient tables

@dataclass(frozen=True)
class CoeffTable:
    ell_max: int
    cij: list
    Ci: np.ndarray

    def c(self, i: int, j: int) -> float:
        return self.cij[i][j]


def coeff_table(params: SupercriticalParams, ell_max: int | None = None) -> CoeffTable:
    """Triangular table c_{i,j} and sequence C_i up to ell."""
    n = params.ell if ell_max is None else ell_max
    cij = []
    for i in range(n + 1):
        row = [1.0]
        for j in range(i):
            row.append(-row[j] * (i - j))
        cij.append(row)
    half = params.d / 2.0 - params.gamma
    Ci = np.array([2.0 ** (-2 * i) / (math.factorial(i) * pochhammer(half, i))
                   for i in range(n + 1)])
    return CoeffTable(ell_max=n, cij=cij, Ci=Ci)


# ---------------------------------------------------------------------------
# limit eigenfunctions of H_inf

def phi_inf_powers(i: int, params: SupercriticalParams):
    """(exponents, coefficients) of phi_i = sum_j c_{i,j} C_j r**(2j-gamma)."""
    table = coeff_table(params, ell_max=i)
    expo = np.array([2.0 * j - params.gamma for j in range(i + 1)])
    coef = np.array([table.c(i, j) * table.Ci[j] for j in range(i + 1)])
    return expo, coef


def phi_inf(i: int, params: SupercriticalParams, rgrid: np.ndarray) -> RadialProfile:
    """Limit eigenfunction phi_i on a strictly positive grid, analytic derivative."""
    rgrid = np.asarray(rgrid, dtype=float)
    if np.any(rgrid <= 0.0):
        raise SingularEvaluationError("phi_inf ~ r**(-gamma) blows up at r = 0")
    if not 0 <= i <= params.ell:
        raise ValueError(f"need 0 <= i <= ell={params.ell}, got i={i}")
    expo, coef = phi_inf_powers(i, params)
    val = sum(c * rgrid ** e for c, e in zip(coef, expo))
    dval = sum(c * e * rgrid ** (e - 1.0) for c, e in zip(coef, expo))
    return RadialProfile(rgrid, val, dval, meta={"op": "phi_inf", "i": i})


def hinf_apply_powers(expo: np.ndarray, coef: np.ndarray,
                      params: SupercriticalParams, r: np.ndarray) -> np.ndarray:
    """Apply H_inf analytically to a finite power sum sum c_k r**(e_k).

    For a single power r**s:
        H_inf r**s = -[s(s+d-2) + p c_inf^{p-1}] r**(s-2)
                     + (1/2)(2/(p-1) + s) r**s.
    """
    r = np.asarray(r, dtype=float)
    pc = params.p * params.c_inf ** (params.p - 1.0)
    out = np.zeros_like(r)
    for s, c in zip(expo, coef):
        out += c * 0.5 * (2.0 / (params.p - 1.0) + s) * r ** s
        out -= c * (s * (s + params.d - 2.0) + pc) * r ** (s - 2.0)
    return out
