"""Null-variable reduction u = f(x) phi(omega) for Box u = lam u^k.

Here omega = x0 + x3 (a null variable: Box omega = 0 and its Minkowski
gradient square vanishes), u is real, and k != 1.  Writing

    f = [ Phi(omega, x1, x2) + (x0 - x3)/2 ]^(1/(1-k))

makes 2 (f_0 - f_3) = f^k * 2/(1-k) an exact identity, and Box f = f^k T
holds exactly when Phi solves

    Phi_11 + Phi_22 = (k - 1) T(omega),    2 Phi_w = Phi_1^2 + Phi_2^2.

Two Phi families close the system:

    quadratic:  Phi = -(1/2) sum_i x_i^2/(omega + B_i)   (m = 1 or 2)
                T = (1/(1-k)) sum_i 1/(omega + B_i)
    linear:     Phi = B1 x1 + B2 + (B1^2/2) omega,   T = 0.

The sign of the quadratic T (and the (k-1) factor above) is fixed by
back-substituting f into Box f; the residual suite certifies the whole
chain through Box u = lam u^k.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate as sp_integrate
from scipy.optimize import brentq

from . import numerics
from .errors import CertificationError, ConfigError, DomainError, DomainSplitError
from .numerics import Field, GridSpec

WAVE_CONDITION_NAMES = (
    "box f - f^k T(omega)",
    "2(f_0 - f_3) - f^k 2/(1-k)",
    "Phi_11 + Phi_22 - (k-1) T(omega)",
    "2 Phi_w - Phi_1^2 - Phi_2^2",
)


@dataclass(frozen=True)
class WaveTProfile:
    """T(omega) with enough structure to integrate the reduced ODE.

    kind 'zero' is T == 0; kind 'poles' is T = coeff * sum_i 1/(omega+B_i).
    """

    kind: str = "zero"
    coeff: float = 0.0
    poles: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in ("zero", "poles"):
            raise ConfigError(f"unknown T profile kind {self.kind!r}")
        if self.kind == "poles" and not self.poles:
            raise ConfigError("pole-type T profile needs at least one pole")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "zero":
            return np.zeros_like(w)
        return self.coeff * sum(1.0 / (w + B) for B in self.poles)


@dataclass(frozen=True)
class WaveAnsatz:
    """One wave ansatz: exponent, Phi closures with derivatives, f, T.

    Phi closures take (omega, x1, x2); f-side closures take (x0, x) with
    x = (x1, x2, x3), matching the residual oracles' time-axis convention
    (x0 plays t).
    """

    k: float
    lam: float
    family: str
    params: dict
    Phi: Callable
    Phi_1: Callable
    Phi_2: Callable
    Phi_11: Callable
    Phi_22: Callable
    Phi_w: Callable
    T: WaveTProfile
    surfaces: tuple = ()

    @property
    def q(self) -> float:
        return 1.0 / (1.0 - self.k)

    def bracket(self, x0, x):
        """W = Phi + (x0 - x3)/2; f = W^(1/(1-k)), singular where W = 0."""
        x0 = np.asarray(x0, dtype=float)
        x = np.asarray(x, dtype=float)
        w = x0 + x[..., 2]
        return self.Phi(w, x[..., 0], x[..., 1]) + 0.5 * (x0 - x[..., 2])

    def f(self, x0, x):
        return self.bracket(x0, x) ** self.q

    def f_field(self) -> Field:
        return Field(self.f, 3, self.surfaces)

    def omega(self, x0, x):
        return np.asarray(x0, dtype=float) + np.asarray(x, dtype=float)[..., 2]


def _with_surfaces(wa: WaveAnsatz, poles) -> WaveAnsatz:
    """Attach clearance callables: |bracket| plus |omega + B_i| per pole."""
    surfaces = [lambda x0, x: np.abs(wa.bracket(x0, x))]
    for B in poles:
        surfaces.append(
            lambda x0, x, B=B: np.abs(
                np.asarray(x0, dtype=float) + np.asarray(x, dtype=float)[..., 2] + B
            )
        )
    return replace(wa, surfaces=tuple(surfaces))


def make_wave_ansatz(
    k: float,
    lam: float,
    family: str = "linear",
    params: dict | None = None,
) -> WaveAnsatz:
    """Build a wave ansatz from one of the two Phi families.

    linear:    params B1, B2 (defaults 1, 1), T == 0.
    quadratic: params B1 [, B2] pole offsets (defaults 1, 2); passing only
               B1 selects m = 1.  Coincident poles are rejected.
    k = 1 is rejected (the construction divides by 1 - k); k = 0 makes the
    equation linear-inhomogeneous but is permitted.
    """
    if k == 1:
        raise ConfigError("wave ansatz requires k != 1")
    if family == "linear":
        p = {"B1": 1.0, "B2": 1.0} if params is None else dict(params)
        unknown = set(p) - {"B1", "B2"}
        if unknown:
            raise ConfigError(f"unknown linear-family parameters: {sorted(unknown)}")
        B1, B2 = float(p.get("B1", 1.0)), float(p.get("B2", 1.0))
        wa = WaveAnsatz(
            k=float(k),
            lam=float(lam),
            family="linear",
            params={"B1": B1, "B2": B2},
            Phi=lambda w, x1, x2: B1 * x1 + B2 + 0.5 * B1**2 * np.asarray(w, dtype=float),
            Phi_1=lambda w, x1, x2: np.full_like(np.asarray(x1, dtype=float), B1),
            Phi_2=lambda w, x1, x2: np.zeros_like(np.asarray(x1, dtype=float)),
            Phi_11=lambda w, x1, x2: np.zeros_like(np.asarray(x1, dtype=float)),
            Phi_22=lambda w, x1, x2: np.zeros_like(np.asarray(x1, dtype=float)),
            Phi_w=lambda w, x1, x2: np.full_like(np.asarray(x1, dtype=float), 0.5 * B1**2),
            T=WaveTProfile("zero"),
        )
        return _with_surfaces(wa, ())
    elif family == "quadratic":
        p = {"B1": 1.0, "B2": 2.0} if params is None else dict(params)
        unknown = set(p) - {"B1", "B2"}
        if unknown:
            raise ConfigError(f"unknown quadratic-family parameters: {sorted(unknown)}")
        poles = tuple(float(p[name]) for name in ("B1", "B2") if name in p)
        if len(set(poles)) != len(poles):
            raise ConfigError("quadratic family requires distinct poles")

        def Phi(w, x1, x2):
            w = np.asarray(w, dtype=float)
            xs = (np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
            return -0.5 * sum(xs[i] ** 2 / (w + B) for i, B in enumerate(poles))

        def Phi_w(w, x1, x2):
            w = np.asarray(w, dtype=float)
            xs = (np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
            return 0.5 * sum(xs[i] ** 2 / (w + B) ** 2 for i, B in enumerate(poles))

        def _grad_i(i):
            def g(w, x1, x2):
                w = np.asarray(w, dtype=float)
                xs = (np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
                if i < len(poles):
                    return -xs[i] / (w + poles[i])
                return np.zeros_like(xs[i])

            return g

        def _second_i(i):
            def g(w, x1, x2):
                w = np.asarray(w, dtype=float)
                ref_arr = np.zeros_like(np.asarray(x1, dtype=float) + w)
                if i < len(poles):
                    return -1.0 / (w + poles[i]) + ref_arr
                return ref_arr

            return g

        wa = WaveAnsatz(
            k=float(k),
            lam=float(lam),
            family="quadratic",
            params={f"B{i + 1}": B for i, B in enumerate(poles)},
            Phi=Phi,
            Phi_1=_grad_i(0),
            Phi_2=_grad_i(1),
            Phi_11=_second_i(0),
            Phi_22=_second_i(1),
            Phi_w=Phi_w,
            T=WaveTProfile("poles", coeff=1.0 / (1.0 - k), poles=poles),
        )
        return _with_surfaces(wa, poles)
    raise ConfigError(f"unknown wave family {family!r}; valid: linear, quadratic")


def broken_phi_ansatz(k: float = 2.0, lam: float = 1.0) -> WaveAnsatz:
    """Negative control: Phi = x1^3 violates 2 Phi_w = Phi_1^2 + Phi_2^2."""
    wa = WaveAnsatz(
        k=float(k),
        lam=float(lam),
        family="broken-phi",
        params={},
        Phi=lambda w, x1, x2: np.asarray(x1, dtype=float) ** 3,
        Phi_1=lambda w, x1, x2: 3.0 * np.asarray(x1, dtype=float) ** 2,
        Phi_2=lambda w, x1, x2: np.zeros_like(np.asarray(x1, dtype=float)),
        Phi_11=lambda w, x1, x2: 6.0 * np.asarray(x1, dtype=float),
        Phi_22=lambda w, x1, x2: np.zeros_like(np.asarray(x1, dtype=float)),
        Phi_w=lambda w, x1, x2: np.zeros_like(np.asarray(x1, dtype=float)),
        T=WaveTProfile("zero"),
    )
    return _with_surfaces(wa, ())


def _analytic_f_pieces(wa: WaveAnsatz, x0, x):
    x0 = np.asarray(x0, dtype=float)
    x = np.asarray(x, dtype=float)
    w = x0 + x[..., 2]
    x1, x2 = x[..., 0], x[..., 1]
    W = wa.Phi(w, x1, x2) + 0.5 * (x0 - x[..., 2])
    q = wa.q
    Pw = wa.Phi_w(w, x1, x2)
    P1, P2 = wa.Phi_1(w, x1, x2), wa.Phi_2(w, x1, x2)
    P11, P22 = wa.Phi_11(w, x1, x2), wa.Phi_22(w, x1, x2)
    fk = W ** (q * wa.k)
    # W_mu^2 Minkowski square collapses to 2 Phi_w - Phi_1^2 - Phi_2^2
    box_f = q * (q - 1.0) * W ** (q - 2.0) * (2.0 * Pw - P1**2 - P2**2) - q * W ** (
        q - 1.0
    ) * (P11 + P22)
    f0_minus_f3 = q * W ** (q - 1.0)  # W_0 - W_3 = 1 exactly
    return w, x1, x2, fk, box_f, f0_minus_f3, (P11, P22, Pw, P1, P2)


def check_wave_conditions(
    wa: WaveAnsatz,
    grid: GridSpec,
    method: str = "analytic",
    tolerance: float | None = None,
):
    """Residuals of the two f-conditions and the two Phi-conditions.

    The grid sweeps (x0, x1, x2, x3) with x0 on the time axis; Phi's
    oracle derivatives are taken in its own variables (omega, x1, x2).
    Returns a verify.ResidualReport.
    """
    from .verify import ANALYTIC_TOL, ConditionRecord, ResidualReport, oracle_tolerance

    if tolerance is None:
        tolerance = ANALYTIC_TOL if method == "analytic" else oracle_tolerance(grid.h)
    x0, X, n_excl = grid.sample(wa.surfaces)
    k, lam = wa.k, wa.lam

    if method == "analytic":
        w, x1, x2, fk, box_f, f03, (P11, P22, Pw, P1, P2) = _analytic_f_pieces(wa, x0, X)
    elif method == "oracle":
        h = grid.h
        ffield = wa.f_field()
        w = wa.omega(x0, X)
        x1, x2 = X[..., 0], X[..., 1]
        fk = ffield(x0, X) ** k
        box_f = numerics.fd_second_time_derivative(ffield, x0, X, h) - numerics.fd_laplacian(
            ffield, x0, X, h
        )
        gf = numerics.fd_gradient(ffield, x0, X, h)
        f03 = numerics.fd_time_derivative(ffield, x0, X, h) - gf[..., 2]
        # Phi as a field over (omega; x1, x2) reuses the same oracles
        phif = Field(
            lambda tw, yx: wa.Phi(tw, np.asarray(yx)[..., 0], np.asarray(yx)[..., 1]), 2
        )
        Y = np.stack([x1, x2], axis=-1)
        lapP = numerics.fd_laplacian(phif, w, Y, h)
        gP = numerics.fd_gradient(phif, w, Y, h)
        Pw = numerics.fd_time_derivative(phif, w, Y, h)
        P11 = P22 = None  # only the sum enters; lapP has it
    else:
        raise ValueError(f"method must be 'analytic' or 'oracle', got {method!r}")

    Tw = wa.T(w)
    if method == "analytic":
        phi_cond1 = P11 + P22 - (k - 1.0) * Tw
        phi_cond2 = 2.0 * Pw - P1**2 - P2**2
    else:
        phi_cond1 = lapP - (k - 1.0) * Tw
        phi_cond2 = 2.0 * Pw - gP[..., 0] ** 2 - gP[..., 1] ** 2

    residuals = (
        box_f - fk * Tw,
        2.0 * f03 - fk * 2.0 / (1.0 - k),
        phi_cond1,
        phi_cond2,
    )
    records = []
    for name, res in zip(WAVE_CONDITION_NAMES, residuals):
        mx, rms = numerics.max_and_rms(res)
        records.append(ConditionRecord(name, mx, rms, tolerance))
    return ResidualReport(
        conditions=tuple(records),
        n_points=int(x0.size),
        n_excluded=n_excl,
        method=method,
        label=f"wave {wa.family} family conditions (k={k})",
    )


# ---------------------------------------------------------------------------
# reduced wave ODE:  phi' * 2/(1-k) + T(omega) phi = lam phi^k
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WavePhi:
    """Certified quadrature solution of the reduced wave ODE on a domain."""

    func: Callable
    deriv: Callable
    domain: tuple[float, float]
    T: WaveTProfile
    lam: float
    k: float
    const: float

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        lo, hi = self.domain
        pad = 1e-12 * max(1.0, abs(hi))
        if np.any(w < lo - pad) or np.any(w > hi + pad):
            raise DomainError(f"omega outside the solved range [{lo}, {hi}]")
        return self.func(w)


def _homogeneous_factor(T: WaveTProfile, k: float):
    """phi_h with phi_h' * 2/(1-k) + T phi_h = 0, and phi_h^(k-1) closed forms."""
    if T.kind == "zero":
        return (
            lambda w: np.ones_like(np.asarray(w, dtype=float)),
            lambda w: np.zeros_like(np.asarray(w, dtype=float)),
            0.0,
        )
    e = -T.coeff * (1.0 - k) / 2.0  # phi_h = prod (w+B)^e

    def phi_h(w):
        w = np.asarray(w, dtype=float)
        out = np.ones_like(w)
        for B in T.poles:
            out = out * (w + B) ** e
        return out

    def dphi_h(w):
        w = np.asarray(w, dtype=float)
        return phi_h(w) * e * sum(1.0 / (w + B) for B in T.poles)

    return phi_h, dphi_h, e


def _power_antiderivative(T: WaveTProfile, k: float, e: float, anchor: float):
    """J(omega) = int phi_h^(k-1) d omega, closed form where feasible."""
    if T.kind == "zero":
        return lambda w: np.asarray(w, dtype=float), lambda w: np.ones_like(np.asarray(w, dtype=float))
    sigma = e * (k - 1.0)  # phi_h^(k-1) = prod (w+B)^sigma
    poles = T.poles

    def integrand(w):
        w = np.asarray(w, dtype=float)
        out = np.ones_like(w)
        for B in poles:
            out = out * (w + B) ** sigma
        return out

    if len(poles) == 1:
        B = poles[0]
        if sigma == -1.0:
            return lambda w: np.log(np.asarray(w, dtype=float) + B), integrand
        return (
            lambda w: (np.asarray(w, dtype=float) + B) ** (sigma + 1.0) / (sigma + 1.0),
            integrand,
        )
    if sigma == int(sigma) and sigma >= 0:
        rho = npoly.polymul([poles[0], 1.0], [poles[1], 1.0])
        prim = npoly.polyint(npoly.polypow(rho, int(sigma)))
        return lambda w: npoly.polyval(np.asarray(w, dtype=float), prim), integrand
    if sigma == -1.0:
        B1, B2 = poles
        return (
            lambda w: (
                np.log(np.asarray(w, dtype=float) + B1) - np.log(np.asarray(w, dtype=float) + B2)
            ) / (B2 - B1),
            integrand,
        )

    def J(w):
        w = np.asarray(w, dtype=float)
        flat = np.atleast_1d(w).astype(float)
        vals = np.array(
            [
                sp_integrate.quad(lambda s: float(integrand(s)), anchor, wi, epsabs=1e-12, epsrel=1e-12)[0]
                for wi in flat
            ]
        )
        return vals.reshape(w.shape) if w.shape else vals[0]

    return J, integrand


def solve_wave_ode(
    T: WaveTProfile,
    lam: float,
    k: float,
    const: float,
    domain: tuple[float, float],
) -> WavePhi:
    """Quadrature solution of phi' 2/(1-k) + T phi = lam phi^k on ``domain``.

    phi = phi_h * [ lam (1-k)^2 / 2 * int phi_h^(k-1) d omega + const ]^(1/(1-k))

    with phi_h the homogeneous solution determined by T.  The base is
    required to keep one sign on the domain (DomainSplitError otherwise),
    pole offsets must stay positive, and the result is certified against
    the ODE by a five-point derivative oracle before being returned.
    """
    if k == 1:
        raise ConfigError("reduced wave ODE requires k != 1")
    lo, hi = float(domain[0]), float(domain[1])
    if not hi > lo:
        raise ConfigError("domain must be increasing")
    if T.kind == "poles" and any(lo + B <= 0.0 for B in T.poles):
        raise DomainError("domain must keep every omega + B_i positive")

    phi_h, dphi_h, e = _homogeneous_factor(T, k)
    J, integrand = _power_antiderivative(T, k, e, lo)
    pref = lam * (1.0 - k) ** 2 / 2.0
    q = 1.0 / (1.0 - k)

    def base(w):
        return pref * J(w) + const

    # locate base zeros on a dense scan: fractional powers need one sign
    ws = np.linspace(lo, hi, 512)
    bs = np.asarray(base(ws), dtype=float)
    zeros = []
    for i in range(len(ws) - 1):
        if bs[i] == 0.0 or (bs[i] * bs[i + 1] < 0.0):
            zeros.append(brentq(lambda s: float(base(s)), ws[i], ws[i + 1]))
    if zeros:
        raise DomainSplitError(
            f"integration base crosses zero inside [{lo}, {hi}] at {zeros}", zeros=zeros
        )
    if q != int(q) and bs[0] < 0.0:
        raise DomainError("fractional exponent needs a positive base on the domain")

    def func(w):
        w = np.asarray(w, dtype=float)
        return phi_h(w) * base(w) ** q

    def deriv(w):
        w = np.asarray(w, dtype=float)
        return dphi_h(w) * base(w) ** q + phi_h(w) * q * base(w) ** (q - 1.0) * pref * integrand(w)

    phi = WavePhi(func=func, deriv=deriv, domain=(lo, hi), T=T, lam=lam, k=k, const=const)
    _certify_wave_phi(phi)
    return phi


def _certify_wave_phi(phi: WavePhi, tol: float = 1e-8, n_samples: int = 41):
    """Independent five-point derivative oracle check of the reduced ODE."""
    lo, hi = phi.domain
    h = min(1e-3, (hi - lo) / 100.0)
    ws = np.linspace(lo + 2.5 * h, hi - 2.5 * h, n_samples)
    vals = phi.func(ws)
    d = (-phi.func(ws + 2 * h) + 8 * phi.func(ws + h) - 8 * phi.func(ws - h) + phi.func(ws - 2 * h)) / (
        12.0 * h
    )
    res = d * 2.0 / (1.0 - phi.k) + phi.T(ws) * vals - phi.lam * vals**phi.k
    worst = float(np.max(np.abs(res)))
    if worst > tol:
        raise CertificationError(
            f"wave ODE quadrature failed its derivative-oracle certificate: {worst:.3e} > {tol:.1e}"
        )


def wave_solution(wa: WaveAnsatz, phi) -> Field:
    """u = f(x) phi(omega); certified downstream by the wave residual oracle."""
    def u(x0, x):
        return wa.f(x0, x) * np.asarray(phi(wa.omega(x0, x)))

    return Field(func=u, dim=3, surfaces=wa.surfaces)
