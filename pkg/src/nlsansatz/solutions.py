"""Reduced ODEs, their closed-form and numerical solutions, and lifting.

The Z=0 branch (omega = t) is solved in quadratures; the Z=1 branch is
integrated with a classical 4th-order one-step scheme.  Every solution
object evaluates lazily as a field over (t, x) so the residual oracles can
certify it.

Note on normalization: the second-order reduced equation is kept in the
form  phi'' = phi F(|phi|) + 2 S(omega) phi - (N/omega) phi'.  Direct
substitution of u = exp(i f) phi(omega) shows that an ansatz whose phase
satisfies 2 f_t + |grad f|^2 = S_fam reduces to that equation with
S = S_fam / 2; ``reduced_ode_for`` applies the matching factor so lifted
solutions solve the full equation (the residual suite enforces this).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable

import numpy as np
from scipy import integrate as sp_integrate
from scipy.interpolate import CubicSpline

from .catalog import AnsatzSpec, Nonlinearity, ReductionProfile
from .errors import BlowUpError, ConfigError, DomainError
from .numerics import Field


@dataclass(frozen=True)
class Solution(Field):
    """A candidate exact solution with provenance and parameters."""

    provenance: str = "user"
    params: dict = dc_field(default_factory=dict)


@dataclass(frozen=True)
class ReducedODE:
    """Right-hand side of the ODE in phi(omega) for one profile and F.

    branch 'second-order' (Z=1): rhs(omega, phi, dphi) -> phi''
        phi'' = phi F(|phi|) + 2 S(omega) phi - (N/omega) phi'
    branch 'first-order' (Z=0): rhs(t, phi) -> phi'
        2 phi' = -T(t) phi - i phi F(|phi|)
    """

    profile: ReductionProfile
    F: Nonlinearity
    branch: str
    rhs: Callable
    singular: tuple = ()


def build_reduced_ode(profile: ReductionProfile, F: Nonlinearity) -> ReducedODE:
    """The branch-appropriate reduced ODE for a consistent profile."""
    if profile.Z == 1:
        N = profile.N
        S = profile.S

        def rhs(w, phi, dphi):
            out = phi * complex(F(abs(phi))) + 2.0 * float(S(w)) * phi
            if N:
                out = out - (N / w) * dphi
            return out

        return ReducedODE(profile, F, "second-order", rhs,
                          singular=(("omega", 0.0),) if N else ())

    T = profile.T

    def rhs(t, phi):
        return -0.5 * float(T(t)) * phi - 0.5j * phi * complex(F(abs(phi)))

    return ReducedODE(profile, F, "first-order", rhs)


def reduced_ode_for(spec: AnsatzSpec, F: Nonlinearity) -> ReducedODE:
    """The reduced ODE whose solutions lift through ``spec`` exactly.

    Halves the family's S to match the 2 S normalization of the printed
    second-order form (see module docstring); the Z=0 branch needs no
    adjustment (S == 0 there).
    """
    pr = spec.profile
    if pr.Z == 1:
        pr = replace(pr, S=lambda w, _S=pr.S: 0.5 * np.asarray(_S(w)))
    return build_reduced_ode(pr, F)


# ---------------------------------------------------------------------------
# closed-form Z=0 solutions
# ---------------------------------------------------------------------------


def plane_wave_solution(c: float, c1: float, c2: float, F: Nonlinearity, n: int = 3) -> Solution:
    """u = c exp i(c1 x1 - F(c) t / 2 + c2 - c1^2 t / 2); exact for any F."""
    if c <= 0:
        raise ConfigError("plane-wave amplitude c must be positive")
    Fc = float(F(c))
    if not math.isfinite(Fc):
        raise DomainError(f"nonlinearity undefined at modulus {c}")

    def u(t, x):
        t = np.asarray(t, dtype=float)
        x1 = np.asarray(x, dtype=float)[..., 0]
        return c * np.exp(1j * (c1 * x1 - 0.5 * Fc * t + c2 - 0.5 * c1**2 * t))

    return Solution(
        func=u,
        dim=n,
        surfaces=(),
        provenance="plane-wave",
        params={"c": c, "c1": c1, "c2": c2, "F": F.describe()},
    )


def _phase_integral(poles, C: float, F: Nonlinearity, anchor: float):
    """Antiderivative of F(r(t)) along r(t) = C prod(t+B_i)^(-1/2).

    Closed forms: F == 0; power law with m == 1 (any p) or p == 2 with
    m <= 2; logarithmic F for any m.  Everything else falls back to
    adaptive quadrature from the anchor time (any antiderivative works --
    the constant only rotates the global phase).
    """
    m = len(poles)
    if F.kind == "none":
        return lambda t: np.zeros_like(np.asarray(t, dtype=float))
    if F.kind == "power":
        g, p = F.g, F.p
        amp = g * C**p
        if m == 1:
            B = poles[0]
            if p == 2.0:
                return lambda t: amp * np.log(np.asarray(t, dtype=float) + B)
            ex = 1.0 - 0.5 * p
            return lambda t: amp * (np.asarray(t, dtype=float) + B) ** ex / ex
        if m == 2 and p == 2.0:
            B1, B2 = poles
            return lambda t: amp * (
                np.log(np.asarray(t, dtype=float) + B1) - np.log(np.asarray(t, dtype=float) + B2)
            ) / (B2 - B1)
    if F.kind == "log":
        s = F.s

        def I_log(t):
            t = np.asarray(t, dtype=float)
            out = s * math.log(C) * t
            for B in poles:
                out = out - 0.5 * s * ((t + B) * (np.log(t + B) - 1.0))
            return out

        return I_log

    def integrand(tau):
        r = C * np.prod([tau + B for B in poles]) ** -0.5
        return float(F(r))

    def I_quad(t):
        t = np.asarray(t, dtype=float)
        flat = np.atleast_1d(t).astype(float)
        vals = np.array(
            [sp_integrate.quad(integrand, anchor, ti, epsabs=1e-10, epsrel=1e-10)[0] for ti in flat]
        )
        return vals.reshape(t.shape) if t.shape else vals[0]

    return I_quad


def caseI_quadrature_solution(
    poles,
    C: float,
    F: Nonlinearity,
    n: int = 3,
    anchor: float | None = None,
) -> Solution:
    """The Z=0 quadrature solution for the m-pole quadratic phase.

    u(t, x) = r(t) exp( (i/2) ( sum_l x_l^2/(t+B_l) - int F(r) dt ) ),
    r(t) = C prod_i (t + B_i)^(-1/2),  valid where every t + B_i > 0.

    The amplitude exponent is -1/2: it is forced by the modulus law
    2 r' + T r = 0, and the residual oracle certifies the result.  m = 0
    is rejected (that degeneration is plane_wave_solution's job).
    """
    poles = tuple(float(b) for b in poles)
    m = len(poles)
    if m < 1:
        raise ConfigError("quadrature solution needs at least one pole; use plane_wave_solution")
    if m > n:
        raise ConfigError(f"{m} poles need at least {m} space dimensions, got n={n}")
    if C <= 0:
        raise ConfigError("amplitude constant C must be positive")
    if anchor is None:
        anchor = max(-B for B in poles) + 1.0
    phase_int = _phase_integral(poles, C, F, anchor)

    def u(t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        prod = np.ones_like(t + x[..., 0] * 0.0)
        phase = np.zeros_like(prod)
        for l, B in enumerate(poles):
            prod = prod * (t + B)
            phase = phase + x[..., l] ** 2 / (t + B)
        r = C * prod**-0.5
        return r * np.exp(0.5j * (phase - phase_int(t)))

    surfaces = tuple(
        (lambda t, x, B=B: np.abs(np.asarray(t, dtype=float) + B)) for B in poles
    )
    return Solution(
        func=u,
        dim=n,
        surfaces=surfaces,
        provenance="caseI-quadrature",
        params={"poles": list(poles), "C": C, "F": F.describe(), "anchor": anchor},
    )


# ---------------------------------------------------------------------------
# Z=1 numerical integration
# ---------------------------------------------------------------------------


@dataclass
class ODESolution:
    """Sampled phi(omega) with cubic interpolation between the nodes."""

    omega: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    step: float

    def __post_init__(self):
        self._spline_re = None
        self._spline_im = None

    @property
    def domain(self) -> tuple[float, float]:
        return float(self.omega[0]), float(self.omega[-1])

    @property
    def interpolation_error_bound(self) -> float | None:
        """max|phi''''| step^4 / 384 via fourth differences, when estimable."""
        if self.phi.size < 5:
            return None
        d4 = np.diff(self.phi, 4)
        return float(np.max(np.abs(d4)) / 384.0)

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        lo, hi = self.domain
        pad = 1e-12 * max(1.0, abs(hi))
        if np.any(w < lo - pad) or np.any(w > hi + pad):
            raise DomainError(f"omega outside the integrated range [{lo}, {hi}]")
        if self._spline_re is None:
            self._spline_re = CubicSpline(self.omega, self.phi.real)
            self._spline_im = CubicSpline(self.omega, self.phi.imag)
        return self._spline_re(w) + 1j * self._spline_im(w)


def integrate_caseII(
    ode: ReducedODE,
    phi0: complex,
    dphi0: complex,
    omega_range: tuple[float, float],
    step: float,
) -> ODESolution:
    """Fixed-step classical RK4 on the second-order complex system.

    Global error O(step^4) on smooth solutions.  Blows up loudly: a
    non-finite state raises BlowUpError carrying the last good omega.
    """
    if ode.branch != "second-order":
        raise ConfigError("integrate_caseII expects the second-order (Z=1) branch")
    a, b = float(omega_range[0]), float(omega_range[1])
    if not b > a:
        raise ConfigError("omega range must be increasing")
    if ode.profile.N and a <= 0.0:
        raise ConfigError("omega range must stay positive when N >= 1")
    if step <= 0 or step > (b - a) / 10.0:
        raise ConfigError("step must be positive and at most a tenth of the range")

    nsteps = max(10, int(round((b - a) / step)))
    hh = (b - a) / nsteps
    rhs = ode.rhs

    ws = [a]
    phis = [complex(phi0)]
    dphis = [complex(dphi0)]
    w, p, d = a, complex(phi0), complex(dphi0)
    for _ in range(nsteps):
        k1p, k1d = d, rhs(w, p, d)
        k2p, k2d = d + 0.5 * hh * k1d, rhs(w + 0.5 * hh, p + 0.5 * hh * k1p, d + 0.5 * hh * k1d)
        k3p, k3d = d + 0.5 * hh * k2d, rhs(w + 0.5 * hh, p + 0.5 * hh * k2p, d + 0.5 * hh * k2d)
        k4p, k4d = d + hh * k3d, rhs(w + hh, p + hh * k3p, d + hh * k3d)
        p = p + hh / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        d = d + hh / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d)
        w = w + hh
        if not (math.isfinite(p.real) and math.isfinite(p.imag)
                and math.isfinite(d.real) and math.isfinite(d.imag)):
            raise BlowUpError(f"integration blew up near omega={w:.6g}", last_good=w - hh)
        ws.append(w)
        phis.append(p)
        dphis.append(d)
    return ODESolution(np.array(ws), np.array(phis), np.array(dphis), hh)


def lift(spec: AnsatzSpec, phi) -> Solution:
    """u(t, x) = exp(i f(t, x)) * phi(omega(t, x)).

    ``phi`` may be any callable of omega, including an ODESolution (cubic
    interpolation; its error bound is recorded in the params).
    """
    def u(t, x):
        return np.exp(1j * spec.f(t, x)) * np.asarray(phi(spec.omega(t, x)))

    params: dict = {"family": spec.family, "ansatz_params": dict(spec.params)}
    if isinstance(phi, ODESolution):
        params["phi_domain"] = list(phi.domain)
        params["interpolation_error_bound"] = phi.interpolation_error_bound
    return Solution(
        func=u,
        dim=spec.n,
        surfaces=spec.surfaces,
        provenance="lifted",
        params=params,
    )
