"""Certification of reducing pairs: residual checks, profile fits, structure tests.

The verifier is the ground truth of the toolkit: every claim the catalog
makes (analytic derivatives, profile functions, invariance under the
equivalence maps, level-set constancy) is checked here against either the
analytic closures or the independent finite-difference oracles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import numerics
from .catalog import AnsatzSpec, Nonlinearity, equivalence_transform
from .errors import DegenerateSampleError, DomainError, EmptySampleError
from .numerics import Field, GridSpec

#: analytic-path tolerance (rounding noise only)
ANALYTIC_TOL = 1e-10

#: residuals below this are treated as rounding floor in convergence ratios
NOISE_FLOOR = 1e-12


def fd_noise_floor(h: float) -> float:
    """Cancellation noise of the second-difference stencils, ~eps/h^2.

    Families whose stencils are exact (polynomial f and omega) leave only
    this floor; a shrink ratio measured below it says nothing about order.
    """
    return 64.0 * float(np.finfo(float).eps) / (h * h)

CONDITION_NAMES = (
    "2*f_t + |grad f|^2 - S(omega)",
    "lap f - T(omega)",
    "omega_t + grad f . grad omega - X(omega)",
    "lap omega - Y(omega)",
    "|grad omega|^2 - Z",
)


def oracle_tolerance(h: float) -> float:
    """Default pass threshold for the finite-difference path."""
    return max(1e-5, 10.0 * h * h)


@dataclass(frozen=True)
class ConditionRecord:
    name: str
    max_abs: float
    rms: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.max_abs <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "condition": self.name,
            "max_abs": self.max_abs,
            "rms": self.rms,
            "tolerance": self.tolerance,
            "verdict": "pass" if self.passed else "fail",
        }


@dataclass(frozen=True)
class ResidualReport:
    """Per-condition residual statistics over one sampled grid."""

    conditions: tuple[ConditionRecord, ...]
    n_points: int
    n_excluded: int
    method: str
    label: str = ""

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.conditions)

    @property
    def max_abs(self) -> float:
        return max(c.max_abs for c in self.conditions)

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "method": self.method,
            "n_points": self.n_points,
            "n_excluded": self.n_excluded,
            "verdict": "pass" if self.passed else "fail",
            "conditions": [c.to_dict() for c in self.conditions],
        }

    def to_text(self) -> str:
        width = max(len(c.name) for c in self.conditions)
        lines = [
            f"{self.label or 'residual report'}  [{self.method}]  "
            f"points={self.n_points} excluded={self.n_excluded}",
            f"{'condition'.ljust(width)}  {'max_abs':>12}  {'rms':>12}  {'tol':>9}  verdict",
        ]
        for c in self.conditions:
            lines.append(
                f"{c.name.ljust(width)}  {c.max_abs:12.4e}  {c.rms:12.4e}  "
                f"{c.tolerance:9.1e}  {'pass' if c.passed else 'FAIL'}"
            )
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _residual_arrays(spec: AnsatzSpec, T, X, method: str, h: float):
    """The five reduction-condition residuals at the given samples."""
    w = spec.omega(T, X)
    pr = spec.profile
    if method == "analytic":
        f_t = spec.f_t(T, X)
        gf = spec.grad_f(T, X)
        lf = spec.lap_f(T, X)
        w_t = spec.omega_t(T, X)
        gw = spec.grad_omega(T, X)
        lw = spec.lap_omega(T, X)
    elif method == "oracle":
        ffield = Field(spec.f, spec.n, spec.surfaces)
        wfield = Field(spec.omega, spec.n, spec.surfaces)
        f_t = numerics.fd_time_derivative(ffield, T, X, h)
        gf = numerics.fd_gradient(ffield, T, X, h)
        lf = numerics.fd_laplacian(ffield, T, X, h)
        w_t = numerics.fd_time_derivative(wfield, T, X, h)
        gw = numerics.fd_gradient(wfield, T, X, h)
        lw = numerics.fd_laplacian(wfield, T, X, h)
    else:
        raise ValueError(f"method must be 'analytic' or 'oracle', got {method!r}")
    return (
        2.0 * f_t + np.sum(gf * gf, axis=-1) - pr.S(w),
        lf - pr.T(w),
        w_t + np.sum(gf * gw, axis=-1) - pr.X(w),
        lw - pr.Y(w),
        np.sum(gw * gw, axis=-1) - float(pr.Z),
    )


def check_conditions(
    spec: AnsatzSpec,
    grid: GridSpec,
    method: str = "analytic",
    tolerance: float | None = None,
) -> ResidualReport:
    """Certify the five reduction conditions over a pole-free grid sample.

    ``analytic`` uses the catalog's derivative closures, ``oracle`` the
    independent central-difference operators with the grid's h.
    """
    if tolerance is None:
        tolerance = ANALYTIC_TOL if method == "analytic" else oracle_tolerance(grid.h)
    T, X, n_excl = grid.sample(spec.surfaces)
    residuals = _residual_arrays(spec, T, X, method, grid.h)
    records = []
    for name, res in zip(CONDITION_NAMES, residuals):
        mx, rms = numerics.max_and_rms(res)
        records.append(ConditionRecord(name, mx, rms, tolerance))
    return ResidualReport(
        conditions=tuple(records),
        n_points=int(T.size),
        n_excluded=n_excl,
        method=method,
        label=f"{spec.family} reduction conditions",
    )


def oracle_convergence(spec: AnsatzSpec, grid: GridSpec, h: float | None = None):
    """Max oracle residual at h and h/2 plus the shrink ratio.

    Returns (res_h, res_half, ratio); ratio is None when both residuals sit
    at the rounding floor (stencils exact for the family, nothing left to
    converge).
    """
    h = grid.h if h is None else h
    res = []
    for step in (h, h / 2.0):
        g = GridSpec(grid.t_range, grid.x_ranges, grid.counts, h=step,
                     exclusion_radius=grid.radius)
        T, X, _ = g.sample(spec.surfaces)
        arrays = _residual_arrays(spec, T, X, "oracle", step)
        res.append(max(float(np.max(np.abs(a))) for a in arrays))
    if res[0] <= fd_noise_floor(h) and res[1] <= fd_noise_floor(h / 2.0):
        return res[0], res[1], None
    return res[0], res[1], res[0] / res[1]


# ---------------------------------------------------------------------------
# profile recovery and structure checks
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileFit:
    """Least-squares fit of a recovered profile function in its small basis."""

    basis: tuple[str, ...]
    coefficients: tuple[float, ...]
    residual_rms: float
    target: str  # 'S' for Z=1 families, 'T' for Z=0 families

    def to_dict(self) -> dict:
        return {
            "target": self.target,
            "basis": list(self.basis),
            "coefficients": list(self.coefficients),
            "residual_rms": self.residual_rms,
        }


def _fit_basis(spec: AnsatzSpec):
    pr = spec.profile
    if pr.Z == 1:
        if pr.N == 0:
            return ("1", "omega"), (lambda w: np.ones_like(w), lambda w: w), "S"
        if pr.N == 1:
            return ("1", "omega^-2"), (lambda w: np.ones_like(w), lambda w: w**-2.0), "S"
        return ("1",), (lambda w: np.ones_like(w),), "S"
    labels = tuple(f"1/(t+{p:g})" for p in spec.poles)
    funcs = tuple((lambda w, p=p: 1.0 / (w + p)) for p in spec.poles)
    return labels, funcs, "T"


def profile_samples(spec: AnsatzSpec, grid: GridSpec, method: str = "analytic"):
    """(omega, recovered) samples for fit_profile.

    Z=1 families recover S from 2 f_t + |grad f|^2; Z=0 families recover
    T from lap f (omega = t there).
    """
    T, X, _ = grid.sample(spec.surfaces)
    w = spec.omega(T, X)
    if method == "analytic":
        if spec.profile.Z == 1:
            rec = 2.0 * spec.f_t(T, X) + np.sum(spec.grad_f(T, X) ** 2, axis=-1)
        else:
            rec = spec.lap_f(T, X)
        return w, rec
    ffield = Field(spec.f, spec.n, spec.surfaces)
    if spec.profile.Z == 1:
        gf = numerics.fd_gradient(ffield, T, X, grid.h)
        rec = 2.0 * numerics.fd_time_derivative(ffield, T, X, grid.h) + np.sum(gf * gf, axis=-1)
    else:
        rec = numerics.fd_laplacian(ffield, T, X, grid.h)
    return w, rec


def fit_profile(spec: AnsatzSpec, omega, recovered) -> ProfileFit:
    """Fit the recovered profile samples in the basis the family's N fixes.

    Ordinary least squares through the normal equations (the bases have at
    most two functions); raises DegenerateSampleError when the samples do
    not span the basis.
    """
    omega = np.asarray(omega, dtype=float).reshape(-1)
    recovered = np.asarray(recovered, dtype=float).reshape(-1)
    labels, funcs, target = _fit_basis(spec)
    k = len(funcs)
    if k == 0:
        _, rms = numerics.max_and_rms(recovered)
        return ProfileFit(labels, (), rms, target)
    if omega.size < 2 * k:
        raise DegenerateSampleError(f"need at least {2 * k} samples, got {omega.size}")
    if np.unique(omega).size < k:
        raise DegenerateSampleError("samples do not contain enough distinct omega values")
    G = np.stack([fn(omega) for fn in funcs], axis=-1)
    if np.linalg.matrix_rank(G) < k:
        raise DegenerateSampleError("basis matrix is rank deficient on these samples")
    coeffs = np.linalg.solve(G.T @ G, G.T @ recovered)
    _, rms = numerics.max_and_rms(recovered - G @ coeffs)
    return ProfileFit(labels, tuple(float(c) for c in coeffs), rms, target)


@dataclass(frozen=True)
class Theorem1Fit:
    """Best monic theta with T = theta'/theta, minimizing rms(theta*T - theta')."""

    theta: tuple[float, ...]  # ascending coefficients, monic
    degree: int
    defect: float
    tolerance: float
    reading: str = (
        "T(t) = theta'(t)/theta(t), defect = theta*T - theta'; the printed "
        "product form theta'*theta is not satisfied by the pole-sum profiles"
    )

    @property
    def satisfied(self) -> bool:
        return self.defect <= self.tolerance

    def to_dict(self) -> dict:
        return {
            "theta_coefficients": list(self.theta),
            "degree": self.degree,
            "defect": self.defect,
            "tolerance": self.tolerance,
            "satisfied": self.satisfied,
            "reading": self.reading,
        }


def check_theorem1(times, T_values, n: int, tolerance: float = 1e-9) -> Theorem1Fit:
    """Search monic polynomials theta of degree <= n for theta*T = theta'.

    Returns the lowest degree whose defect clears the tolerance, else the
    degree with the smallest defect (a condition-violated verdict, not an
    exception).  Needs at least n + 2 sample times.
    """
    t = np.asarray(times, dtype=float).reshape(-1)
    Tv = np.asarray(T_values, dtype=float).reshape(-1)
    if t.size != Tv.size:
        raise ValueError("times and T values must align")
    if t.size < n + 2:
        raise DegenerateSampleError(f"need at least {n + 2} samples, got {t.size}")
    best = None
    for deg in range(n + 1):
        # theta = t^deg + sum_j a_j t^j; defect linear in the a_j
        target = -(t**deg * Tv - deg * t ** max(deg - 1, 0) * (deg > 0))
        if deg == 0:
            a = np.zeros(0)
            defect_vec = -target
        else:
            cols = np.stack(
                [t**j * Tv - (j * t ** max(j - 1, 0) if j > 0 else 0.0) for j in range(deg)],
                axis=-1,
            )
            a, *_ = np.linalg.lstsq(cols, target, rcond=None)
            defect_vec = cols @ a - target
        defect = float(np.sqrt(np.mean(defect_vec**2)))
        coeffs = tuple(float(c) for c in a) + (1.0,)
        fit = Theorem1Fit(coeffs, deg, defect, tolerance)
        if fit.satisfied:
            return fit
        if best is None or defect < best.defect:
            best = fit
    return best


# ---------------------------------------------------------------------------
# absolute reduction: level-set constancy
# ---------------------------------------------------------------------------

LEVEL_SET_ATOL = 1e-12


def level_set_points(spec: AnsatzSpec, value: float, count: int, seed: int = 0):
    """Exact preimage points of omega == value from the family's sampler."""
    if spec.level_sampler is None:
        raise DomainError(f"family {spec.family} has no level-set sampler")
    rng = np.random.default_rng(seed)
    T, X = spec.level_sampler(value, count, rng)
    return T, X


def check_level_set_constancy(
    spec: AnsatzSpec,
    F: Nonlinearity,
    test_phi: Callable,
    omega_value: float,
    T,
    X,
    h: float = numerics.DEFAULT_H,
) -> float:
    """Max pairwise spread of the reduced expression over one omega level set.

    Builds u = exp(i f) * test_phi(omega) and evaluates
    E = (2i u_t + Lap u - u F(|u|)) * exp(-i f) at every point by the
    finite-difference oracles.  If the ansatz absolutely reduces the
    equation, E depends on omega only, so the spread is O(h^2); a broken
    omega leaves old-variable dependence and a spread of order one.
    """
    T = np.asarray(T, dtype=float).reshape(-1)
    X = np.asarray(X, dtype=float)
    if T.size < 2:
        raise DomainError("need at least two preimage points")
    w = spec.omega(T, X)
    off = np.max(np.abs(w - omega_value))
    if off > LEVEL_SET_ATOL:
        raise DomainError(
            f"points stray {off:.2e} from the omega={omega_value} level set"
        )

    def u(t, x):
        return np.exp(1j * spec.f(t, x)) * test_phi(spec.omega(t, x))

    ufield = Field(u, spec.n, spec.surfaces)
    u0 = ufield(T, X)
    raw = (
        2j * numerics.fd_time_derivative(ufield, T, X, h)
        + numerics.fd_laplacian(ufield, T, X, h)
        - u0 * F(np.abs(u0))
    )
    E = raw * np.exp(-1j * spec.f(T, X))
    return float(np.max(np.abs(E[:, None] - E[None, :])))


def check_transform_invariance(
    spec: AnsatzSpec,
    grid: GridSpec,
    rotation=None,
    boost=None,
    translation=None,
    method: str = "analytic",
    tolerance: float | None = None,
) -> ResidualReport:
    """Transform the spec, then re-certify the reduction conditions.

    A pass means the transformed pair still satisfies the system with the
    original profile (same S, T, X, Y, Z, N).
    """
    moved = equivalence_transform(spec, rotation=rotation, boost=boost, translation=translation)
    report = check_conditions(moved, grid, method=method, tolerance=tolerance)
    return ResidualReport(
        conditions=report.conditions,
        n_points=report.n_points,
        n_excluded=report.n_excluded,
        method=report.method,
        label=f"{spec.family} after equivalence transform",
    )
