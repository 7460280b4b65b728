"""Radial soliton profile Q, its scaling derivative and tail asymptotics.

Q is the unique bounded radial solution of

    Q'' + (d-1)/r Q' + Q**p = 0,   Q(0) = 1, Q'(0) = 0,

integrated from a Taylor start Q = 1 - r^2/(2d) + p r^4/(8d(d+2)) + O(r^6)
out to r_max with adaptive error control.  Above the Joseph-Lundgren
exponent Q is squeezed under the singular profile, 0 < Q < Phi*, the scaling
derivative Lambda Q = 2/(p-1) Q + r Q' stays positive, and at infinity

    Q = Phi* - c r**(-gamma) + O(r**(-gamma-delta)),  c > 0,
    Lambda Q = alpha c r**(-gamma) + O(r**(-gamma-delta)),

with delta the correction exponent min(gamma2-gamma, alpha) up to fit
resolution.  fit_tail extracts (c, delta) by least squares on a window.

The rescaled family is Q_b(r) = b**(-1/(p-1)) Q(r/sqrt(b)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import curve_fit

from .errors import SignChangeError, StiffnessError, WindowError
from .exponents import SupercriticalParams
from .radial import RadialProfile, grid_derivative, log_uniform_grid

R_TAYLOR = 1e-3           # switch from series to integration
R_SWITCH = 5.0            # switch from (Q, Q') to (w, w'), w = Phi* - Q
DEFAULT_RMAX = 1e4
DEFAULT_TOL = 1e-8
DEFAULT_NGRID = 4000
DEFAULT_FIT_WINDOW = (50.0, 500.0)


def taylor_series(r, d: int, p: float):
    """(Q, Q') near the origin through O(r^6)."""
    q2 = -1.0 / (2.0 * d)
    q4 = p / (8.0 * d * (d + 2.0))
    # r^4 coefficient of Q^p is p*q4 + p(p-1)/2 q2^2; balance 6(d+4) q6
    q6 = -(p * q4 + 0.5 * p * (p - 1.0) * q2 ** 2) / (6.0 * (d + 4.0))
    q = 1.0 + q2 * r ** 2 + q4 * r ** 4 + q6 * r ** 6
    dq = 2.0 * q2 * r + 4.0 * q4 * r ** 3 + 6.0 * q6 * r ** 5
    return q, dq


@dataclass
class SolitonBundle:
    """Solved soliton with derived quantities and interpolants.

    Q and LambdaQ are RadialProfiles on a grid with a linear prefix
    [0, R_TAYLOR) and a log-uniform body; tail_c is the fitted constant of
    Q = Phi* - c r^-gamma, tail_delta the fitted correction exponent and
    lambda_tail_c the fitted tail coefficient of Lambda Q (~ alpha * tail_c).
    """

    params: SupercriticalParams
    Q: RadialProfile
    LambdaQ: RadialProfile
    r_max: float
    ode_tol: float
    tail_c: float = math.nan
    tail_delta: float = math.nan
    lambda_tail_c: float = math.nan
    LambdaQ_d2: np.ndarray | None = None
    _logq_spline: CubicHermiteSpline | None = field(default=None, repr=False)
    _loglq_spline: CubicHermiteSpline | None = field(default=None, repr=False)

    def _splines(self):
        # interpolate log Q (and log LambdaQ) against log r with exact slopes:
        # positivity is automatic and the relative error is ~ h^4
        if self._logq_spline is None:
            m = self.Q.r >= R_TAYLOR
            s = np.log(self.Q.r[m])
            q, dq = self.Q.val[m], self.Q.dval[m]
            self._logq_spline = CubicHermiteSpline(s, np.log(q), self.Q.r[m] * dq / q)
            lq, dlq = self.LambdaQ.val[m], self.LambdaQ.dval[m]
            self._loglq_spline = CubicHermiteSpline(
                s, np.log(lq), self.Q.r[m] * dlq / lq)
        return self._logq_spline, self._loglq_spline

    def eval_Q(self, r):
        """Q at arbitrary r >= 0: series core, spline body, fitted tail."""
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        core = r < R_TAYLOR
        body = (~core) & (r <= self.r_max)
        far = r > self.r_max
        d, p = self.params.d, self.params.p
        if np.any(core):
            out[core] = taylor_series(r[core], d, p)[0]
        if np.any(body):
            sp, _ = self._splines()
            out[body] = np.exp(sp(np.log(r[body])))
        if np.any(far):
            out[far] = (self.params.phi_star(r[far])
                        - self.tail_c * r[far] ** (-self.params.gamma))
        return out

    def eval_LambdaQ(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        core = r < R_TAYLOR
        body = (~core) & (r <= self.r_max)
        far = r > self.r_max
        d, p = self.params.d, self.params.p
        if np.any(core):
            q, dq = taylor_series(r[core], d, p)
            out[core] = 2.0 / (p - 1.0) * q + r[core] * dq
        if np.any(body):
            _, sp = self._splines()
            out[body] = np.exp(sp(np.log(r[body])))
        if np.any(far):
            out[far] = (self.lambda_tail_c * r[far] ** (-self.params.gamma))
        return out

    def ode_residual(self) -> float:
        """Cell-flux residual of the sampled (Q, Q') data, max over cells.

        The ODE in conservative form reads (r^(d-1) Q')' = -r^(d-1) Q^p, so
        on every grid cell
            F(r_{i+1}) - F(r_i) + int_cell r^(d-1) Q^p dr = 0,
        with F = r^(d-1) Q'.  The flux difference uses only first-derivative
        data (no noisy second-derivative reconstruction); the cell integral
        is Simpson with the cubic-Hermite midpoint value.  Normalized by the
        cell integral of r^(d-1) |Q|^p.
        """
        m = self.Q.r >= R_TAYLOR
        r, q, dq = self.Q.r[m], self.Q.val[m], self.Q.dval[m]
        d, p = self.params.d, self.params.p
        flux = r ** (d - 1.0) * dq
        h = np.diff(r)
        rm = 0.5 * (r[:-1] + r[1:])
        # cubic Hermite midpoint of Q on each cell
        qm = 0.5 * (q[:-1] + q[1:]) + 0.125 * h * (dq[:-1] - dq[1:])
        f_l = r[:-1] ** (d - 1.0) * q[:-1] ** p
        f_m = rm ** (d - 1.0) * qm ** p
        f_r = r[1:] ** (d - 1.0) * q[1:] ** p
        cell = h / 6.0 * (f_l + 4.0 * f_m + f_r)
        res = np.abs(np.diff(flux) + cell)
        return float(np.max(res / np.abs(cell)))


def solve_soliton(params: SupercriticalParams, r_max: float = DEFAULT_RMAX,
                  tol: float = DEFAULT_TOL, n_grid: int = DEFAULT_NGRID,
                  fit_window=DEFAULT_FIT_WINDOW) -> SolitonBundle:
    """Integrate the soliton ODE and package profiles plus tail fit.

    The output grid is a short uniform prefix on [0, R_TAYLOR) followed by
    n_grid log-uniform nodes on [R_TAYLOR, r_max].

    Two integration phases keep everything well conditioned: (Q, Q') from the
    Taylor start to R_SWITCH, then w = Phi* - Q outward.  Lambda Q suffers a
    catastrophic cancellation at large r (it decays a factor r**-alpha faster
    than Q), but Lambda Phi* = 0 makes Lambda Q = -Lambda_r w exact, and the
    relative tolerance on w carries over to Lambda Q.
    """
    if r_max < 100.0:
        raise ValueError(f"need r_max >= 100, got {r_max}")
    if not (1e-12 <= tol <= 1e-6):
        raise ValueError(f"need 1e-12 <= tol <= 1e-6, got {tol}")
    d, p = params.d, params.p

    # both phases are integrated in s = log r: the steps then track the
    # log-uniform output grid and the dense output keeps uniform relative
    # accuracy across the ten decades.  Phase 1 carries z = Q'/r (which is
    # O(1/d) at the origin, same scale as Q) so the error control never
    # drowns the small derivative in the O(1) state:
    #   dQ/ds = r^2 z,   dz/ds = -d z - Q^p.
    def rhs_q(s, y):
        q, z = y
        r2 = math.exp(2.0 * s)
        return (r2 * z, -d * z - abs(q) ** (p - 1.0) * q)

    def crossing(s, y):
        return y[0]
    crossing.terminal = True
    crossing.direction = -1

    def diffpow(r, w):
        # Phi*^p - (Phi*-w)^p without cancellation for w << Phi*
        ps = params.phi_star(r)
        u = w / ps
        if u < 1.0:
            return -ps ** p * math.expm1(p * math.log1p(-u))
        q = ps - w
        return ps ** p - abs(q) ** (p - 1.0) * q

    def rhs_w(s, y):
        w, v = y
        r = math.exp(s)
        return (v, (2.0 - d) * v - r * r * diffpow(r, w))

    def crossing_w(s, y):
        return params.phi_star(math.exp(s)) - y[0]
    crossing_w.terminal = True
    crossing_w.direction = -1

    q0, dq0 = taylor_series(R_TAYLOR, d, p)
    sol_in = solve_ivp(rhs_q, (math.log(R_TAYLOR), math.log(R_SWITCH)),
                       (q0, dq0 / R_TAYLOR), method="DOP853",
                       rtol=tol, atol=tol * 1e-2, dense_output=True,
                       events=crossing)
    if sol_in.t_events[0].size:
        raise SignChangeError(
            f"Q crossed zero at r = {math.exp(sol_in.t_events[0][0]):.4g}")
    if not sol_in.success:
        raise StiffnessError(sol_in.message)

    q_sw, z_sw = sol_in.y[:, -1]
    w0 = (params.phi_star(R_SWITCH) - q_sw,
          R_SWITCH * (params.dphi_star(R_SWITCH) - R_SWITCH * z_sw))
    sol_out = solve_ivp(rhs_w, (math.log(R_SWITCH), math.log(r_max)), w0,
                        method="DOP853", rtol=tol, atol=1e-300,
                        dense_output=True, events=crossing_w)
    if sol_out.t_events[0].size:
        raise SignChangeError(
            f"Q crossed zero at r = {math.exp(sol_out.t_events[0][0]):.4g}"
            " (< r_max)")
    if not sol_out.success:
        raise StiffnessError(sol_out.message)

    r_log = log_uniform_grid(R_TAYLOR, r_max, n_grid)
    r_pre = np.linspace(0.0, R_TAYLOR, 8, endpoint=False)
    q_pre, dq_pre = taylor_series(r_pre, d, p)
    inner = r_log <= R_SWITCH
    r_in, r_out = r_log[inner], r_log[~inner]
    q_in, z_in = sol_in.sol(np.log(r_in))
    w_out, vw_out = sol_out.sol(np.log(r_out))
    dq_in = z_in * r_in
    dw_out = vw_out / r_out
    r = np.concatenate([r_pre, r_log])
    q = np.concatenate([q_pre, q_in, params.phi_star(r_out) - w_out])
    dq = np.concatenate([dq_pre, dq_in, params.dphi_star(r_out) - dw_out])

    meta = {"op": "solve_soliton", "d": d, "p": p, "tol": tol}
    Q = RadialProfile(r, q, dq, meta=meta)

    m = 2.0 / (p - 1.0)
    # Lambda Q = m Q + r Q' inside, -(m w + r w') outside (Lambda Phi* = 0);
    # first and second derivatives come from Q'' resp. w'' straight from the
    # ODEs (plus one more differentiation of the right-hand sides)
    n_in = len(r_pre) + int(inner.sum())
    lam = np.empty_like(r)
    dlam = np.empty_like(r)
    d2lam = np.empty_like(r)
    lam[:n_in] = m * q[:n_in] + r[:n_in] * dq[:n_in]
    ri, qi, dqi = r[1:n_in], q[1:n_in], dq[1:n_in]
    d2q = np.concatenate([[-1.0 / d], -(d - 1.0) / ri * dqi - qi ** p])
    d3q = np.concatenate(
        [[0.0], -(d - 1.0) * (d2q[1:] / ri - dqi / ri ** 2)
         - p * qi ** (p - 1.0) * dqi])
    dlam[:n_in] = (m + 1.0) * dq[:n_in] + r[:n_in] * d2q
    d2lam[:n_in] = (m + 2.0) * d2q + r[:n_in] * d3q

    lam[n_in:] = -(m * w_out + r_out * dw_out)
    ps = params.phi_star(r_out)
    dps = params.dphi_star(r_out)
    u = w_out / ps
    dpow = -ps ** p * np.expm1(p * np.log1p(-u))
    # d/dr [Phi*^p - q^p] = p [ (Phi*^(p-1) - q^(p-1)) Phi*' + q^(p-1) w' ]
    qv = ps - w_out
    dpow_r = p * (-ps ** (p - 1.0) * np.expm1((p - 1.0) * np.log1p(-u)) * dps
                  + qv ** (p - 1.0) * dw_out)
    d2w = -(d - 1.0) / r_out * dw_out - dpow
    d3w = -(d - 1.0) * (d2w / r_out - dw_out / r_out ** 2) - dpow_r
    dlam[n_in:] = -((m + 1.0) * dw_out + r_out * d2w)
    d2lam[n_in:] = -((m + 2.0) * d2w + r_out * d3w)
    LambdaQ = RadialProfile(r, lam, dlam, meta={**meta, "op": "lambda_Q"})

    bundle = SolitonBundle(params=params, Q=Q, LambdaQ=LambdaQ,
                           r_max=r_max, ode_tol=tol, LambdaQ_d2=d2lam)
    c, delta, _ = fit_tail(bundle, fit_window)
    bundle.tail_c = c
    bundle.tail_delta = delta
    lam_c, _, _ = _fit_power_tail(params, r, lam, fit_window,
                                  params.gamma, params)
    bundle.lambda_tail_c = lam_c
    return bundle


def lambda_r(profile: RadialProfile, params: SupercriticalParams) -> RadialProfile:
    """Scaling operator 2/(p-1) + r d/dr applied to a sampled profile.

    The derivative of the result comes from a second numerical
    differentiation pass over the input's dval.
    """
    m = 2.0 / (params.p - 1.0)
    val = m * profile.val + profile.r * profile.dval
    d2 = grid_derivative(profile.r, profile.dval)
    dval = (m + 1.0) * profile.dval + profile.r * d2
    return RadialProfile(profile.r, val, dval,
                         meta={**profile.meta, "op": "lambda_r"})


def _fit_power_tail(params, r, f, window, gamma_expected, prm):
    """Fit f ~ c r^-gamma (1 + e r^-delta) on the window; return (c, delta, resid)."""
    r_lo, r_hi = window
    m = (r >= r_lo) & (r <= r_hi)
    if m.sum() < 16:
        raise WindowError(f"window [{r_lo}, {r_hi}] holds {m.sum()} nodes")
    rw, fw = r[m], f[m]
    # stage 1: free log-log fit of the leading exponent (sanity diagnostics)
    A = np.vstack([np.log(rw), np.ones_like(rw)]).T
    slope, logc0 = np.linalg.lstsq(A, np.log(np.abs(fw)), rcond=None)[0]
    # stage 2: pin gamma, fit the correction w(r) = f r^gamma = c + e r^-delta
    w = fw * rw ** gamma_expected
    delta_cap = min(prm.gap, prm.alpha)

    def model(rr, c, e, delta):
        return c + e * rr ** (-delta)

    p0 = (w[-1], (w[0] - w[-1]) * rw[0] ** (0.5 * delta_cap), 0.5 * delta_cap)
    popt, _ = curve_fit(model, rw, w, p0=p0,
                        bounds=([-np.inf, -np.inf, 1e-3],
                                [np.inf, np.inf, delta_cap]),
                        maxfev=20000)
    c, _, delta = popt
    resid = float(np.max(np.abs(model(rw, *popt) - w) / np.abs(w)))
    return float(c), float(delta), resid


def fit_tail(bundle: SolitonBundle, window=DEFAULT_FIT_WINDOW):
    """Fit Phi* - Q ~ c r^-gamma (1 + e r^-delta) over the window.

    Returns (c, delta_estimate, fit_residual); c > 0 and the free log-log
    slope agreeing with gamma are asserted downstream, not here.
    """
    prm = bundle.params
    r_lo, r_hi = window
    if r_lo < 20.0:
        raise WindowError(f"need r_lo >= 20, got {r_lo}")
    if r_hi > bundle.r_max / 2.0:
        raise WindowError(f"need r_hi <= r_max/2 = {bundle.r_max / 2}")
    diff = prm.phi_star(bundle.Q.r[1:]) - bundle.Q.val[1:]
    return _fit_power_tail(prm, bundle.Q.r[1:], diff, window, prm.gamma, prm)


def tail_free_slope(bundle: SolitonBundle, window=DEFAULT_FIT_WINDOW) -> float:
    """Unconstrained log-log slope of Phi* - Q on the window (should be -gamma)."""
    prm = bundle.params
    r = bundle.Q.r[1:]
    val = bundle.Q.val[1:]
    m = (r >= window[0]) & (r <= window[1])
    diff = prm.phi_star(r[m]) - val[m]
    A = np.vstack([np.log(r[m]), np.ones_like(r[m])]).T
    slope, _ = np.linalg.lstsq(A, np.log(np.abs(diff)), rcond=None)[0]
    return float(slope)


def rescale_Qb(bundle: SolitonBundle, b: float) -> "QbFamily":
    """Rescaled soliton Q_b(r) = b^(-1/(p-1)) Q(r/sqrt(b))."""
    if b <= 0.0:
        raise ValueError(f"need b > 0, got {b}")
    return QbFamily(bundle, b)


@dataclass(frozen=True)
class QbFamily:
    """Callable rescaled soliton; also exposes Lambda Q_b."""

    bundle: SolitonBundle
    b: float

    def __call__(self, r):
        p = self.bundle.params.p
        sb = math.sqrt(self.b)
        return sb ** (-2.0 / (p - 1.0)) * self.bundle.eval_Q(np.asarray(r) / sb)

    def lam(self, r):
        """Lambda_r Q_b (the scaling operator commutes with the rescaling)."""
        p = self.bundle.params.p
        sb = math.sqrt(self.b)
        return sb ** (-2.0 / (p - 1.0)) * self.bundle.eval_LambdaQ(np.asarray(r) / sb)


# ---------------------------------------------------------------------------
# global tail bounds (pointwise, every node)

def tail_bound_report(bundle: SolitonBundle, noise_factor: float = 100.0) -> dict:
    """Pointwise bounds on V = log Lambda Q at every grid node r > 0.

        -gamma/r < V' <= 0,      V'' <= gamma/r^2,

    plus monotonicity of Phi(r) = -r V' (increasing, bounded by gamma), and
    the squeeze 0 < Q < Phi*, Lambda Q > 0.

    The V-bounds become asymptotically tight as r -> inf (Phi -> gamma with
    an O(r^-delta) margin), so they are checked in the dimensionless form
    (multiplied through by r resp. r^2) with a slack of
    noise_factor * ode_tol * gamma, the data noise floor of the integrated
    profile.  The positivity/ordering checks carry no slack.
    """
    prm = bundle.params
    slack = noise_factor * bundle.ode_tol * max(1.0, prm.gamma)
    r = bundle.Q.r[1:]
    q = bundle.Q.val[1:]
    lam = bundle.LambdaQ.val[1:]
    dlam = bundle.LambdaQ.dval[1:]
    rvp = r * dlam / lam                  # r V' = r (Lambda Q)'/Lambda Q
    # V'' = (Lambda Q)''/Lambda Q - (V')^2, all factors analytic
    vpp = bundle.LambdaQ_d2[1:] / lam - (dlam / lam) ** 2
    phi = -rvp
    checks = {
        "Q_below_phistar": bool(np.all((q > 0) & (q < prm.phi_star(r)))),
        "lambdaQ_positive": bool(np.all(lam > 0)),
        "Vprime_le_0": bool(np.all(rvp <= slack)),
        "Vprime_gt_minus_gamma_over_r": bool(np.all(rvp > -prm.gamma - slack)),
        "Vsecond_le_gamma_over_r2": bool(np.all(r ** 2 * vpp <= prm.gamma + slack)),
        "phi_increasing": bool(np.all(np.diff(phi) > -slack)),
        "phi_below_gamma": bool(np.all(phi < prm.gamma + slack)),
    }
    checks["all"] = all(checks.values())
    return checks
