"""Supercritical numerology: every derived constant of the problem.

The free inputs are the radial dimension d, the nonlinearity exponent p and
the anisotropy mode index ell.  Everything else follows by arithmetic:

    c_inf**(p-1) = (2/(p-1)) * (d - 2 - 2/(p-1))
    Delta        = ((d-2)/2)**2 - p*c_inf**(p-1)
    gamma        = (d-2)/2 - sqrt(Delta),   gamma2 = d - 2 - gamma
    alpha        = gamma - 2/(p-1)
    g            = min(alpha, gamma2 - gamma, 2) - epsilon_g

gamma and gamma2 are the two roots of the quadratic

    gamma * (d - 2 - gamma) = p * c_inf**(p-1),

which is enforced here by back-substitution: gamma = (d-2)/2 - sqrt(Delta)
is the unique smaller root (the variant (d-2-sqrt(Delta))/2 that sometimes
circulates fails the quadratic and contradicts the numerically observed
soliton tail decay r**(-gamma); ``gamma_printed_variant`` exposes it for
comparison).  At (d, p) = (15, 3): Delta = 6.25, gamma = 4, gamma2 = 9,
alpha = 3.

c_inf is the coefficient of the singular steady state
Phi*(r) = c_inf * r**(-2/(p-1)); the exponent 1/(p-1) on the bracket is the
unique one for which Delta(Phi*) + (Phi*)**p = 0 holds identically (the
alternative exponent 2/(p-1) that sometimes circulates fails this PDE check;
see ``c_inf_printed_variant``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import InvalidDimensionError, ModeTooLowError, SubcriticalError

DEFAULT_EPSILON_G = 0.01


def compute_pjl(n: int) -> float:
    """Joseph-Lundgren exponent of dimension n.

    Returns +inf (math.inf, the IEEE tagged infinity) for n <= 10 and
    1 + 4/(n - 4 - 2*sqrt(n-1)) for n >= 11.
    """
    if n < 2:
        raise InvalidDimensionError(f"need n >= 2, got n={n}")
    if n <= 10:
        return math.inf
    return 1.0 + 4.0 / (n - 4.0 - 2.0 * math.sqrt(n - 1.0))


@dataclass(frozen=True)
class SupercriticalParams:
    """All fixed constants of a supercritical configuration, plus validity flags."""

    d: int
    p: float
    ell: int
    c_inf: float
    gamma: float
    gamma2: float
    Delta: float
    alpha: float
    epsilon_g: float
    g: float
    flags: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.flags.values())

    @property
    def sqrt_Delta(self) -> float:
        return math.sqrt(self.Delta)

    @property
    def gap(self) -> float:
        """gamma2 - gamma = 2 sqrt(Delta): decay gap between the two roots."""
        return self.gamma2 - self.gamma

    @property
    def m(self) -> float:
        """Scaling exponent 2/(p-1) of the singular profile."""
        return 2.0 / (self.p - 1.0)

    def phi_star(self, r):
        """Singular steady state Phi*(r) = c_inf * r**(-2/(p-1))."""
        return self.c_inf * r ** (-self.m)

    def dphi_star(self, r):
        return -self.m * self.c_inf * r ** (-self.m - 1.0)

    def csv_row(self) -> str:
        cols = [self.d, self.p, self.ell, self.c_inf, self.gamma, self.gamma2,
                self.Delta, self.alpha, self.g, self.valid]
        return ",".join(repr(c) if isinstance(c, float) else str(c) for c in cols)

    CSV_HEADER = "d,p,ell,c_inf,gamma,gamma2,Delta,alpha,g,valid"


def c_inf_value(d: int, p: float) -> float:
    """PDE-consistent coefficient of the singular profile (exponent 1/(p-1))."""
    base = (2.0 / (p - 1.0)) * (d - 2.0 - 2.0 / (p - 1.0))
    return base ** (1.0 / (p - 1.0))


def c_inf_printed_variant(d: int, p: float) -> float:
    """Variant with exponent 2/(p-1) on the bracket, for comparison only.

    This value does NOT make Phi* an exact solution; it is exposed so that the
    two conventions can be printed side by side from the command line.
    """
    base = (2.0 / (p - 1.0)) * (d - 2.0 - 2.0 / (p - 1.0))
    return base ** (2.0 / (p - 1.0))


def gamma_printed_variant(d: int, p: float) -> float:
    """(d - 2 - sqrt(Delta))/2: NOT a root of the quadratic, comparison only."""
    c_inf = c_inf_value(d, p)
    Delta = ((d - 2.0) / 2.0) ** 2 - p * c_inf ** (p - 1.0)
    return (d - 2.0 - math.sqrt(Delta)) / 2.0


def derive_params(d: int, p: float, ell: int,
                  epsilon_g: float = DEFAULT_EPSILON_G) -> SupercriticalParams:
    """Populate the full constant record for (d, p, ell).

    Raises SubcriticalError when Delta <= 0 (below Joseph-Lundgren: gamma is
    not real) and ModeTooLowError when ell <= alpha/2.  Softer assumption
    failures (e.g. sqrt(Delta) > 2) are recorded as flags on the returned
    record without raising, so borderline configurations can be inspected.
    """
    if d < 11:
        raise InvalidDimensionError(f"need d >= 11, got d={d}")
    if p < 3:
        raise SubcriticalError(f"need p >= 3, got p={p}")
    if ell < 1:
        raise ModeTooLowError(f"need ell >= 1, got ell={ell}")
    if not (0.0 < epsilon_g < 0.5):
        raise ValueError(f"need 0 < epsilon_g < 0.5, got {epsilon_g}")

    c_inf = c_inf_value(d, p)
    pc = p * c_inf ** (p - 1.0)
    Delta = ((d - 2.0) / 2.0) ** 2 - pc
    if Delta <= 0.0:
        raise SubcriticalError(
            f"Delta = {Delta:.6g} <= 0 at (d={d}, p={p}): below Joseph-Lundgren")
    sq = math.sqrt(Delta)
    gamma = (d - 2.0) / 2.0 - sq
    gamma2 = d - 2.0 - gamma
    alpha = gamma - 2.0 / (p - 1.0)
    if ell <= alpha / 2.0:
        raise ModeTooLowError(
            f"ell = {ell} <= alpha/2 = {alpha / 2.0:.6g}: mode too low")
    g = min(alpha, gamma2 - gamma, 2.0) - epsilon_g

    pjl = compute_pjl(d)
    flags = {
        "d_ge_11": d >= 11,
        "p_ge_3": p >= 3.0,
        "p_ge_pjl": p >= pjl,
        "Delta_pos": Delta > 0.0,
        "sqrtDelta_gt_2": sq > 2.0,
        "ell_gt_alpha_half": ell > alpha / 2.0,
        "g_in_range": 0.0 < g < 2.0,
    }
    return SupercriticalParams(d=d, p=float(p), ell=ell, c_inf=c_inf,
                               gamma=gamma, gamma2=gamma2, Delta=Delta,
                               alpha=alpha, epsilon_g=epsilon_g, g=g,
                               flags=flags)


def quadratic_residual(params: SupercriticalParams) -> float:
    """Relative residual of gamma*(d-2-gamma) = p*c_inf**(p-1) by back-substitution."""
    lhs = params.gamma * (params.d - 2.0 - params.gamma)
    rhs = params.p * params.c_inf ** (params.p - 1.0)
    return abs(lhs - rhs) / abs(rhs)
