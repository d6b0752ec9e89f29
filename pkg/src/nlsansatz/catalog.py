"""The seven reducing-ansatz families, their profiles, and equivalence maps.

Each family packages a phase f(t,x) and a reduction variable omega(t,x)
together with hand-derived analytic derivatives and the profile functions
(S, T, X, Y, Z, N) they satisfy.  The verifier module certifies every one
of these claims numerically; nothing here is trusted unchecked.

Family summary (n = space dimension, poles are pairwise distinct):

==========  =====  ==========================================  =====================
family      n      f(t, x)                                     omega(t, x)
==========  =====  ==========================================  =====================
I.1         3      (x1^2/(t+A1) + x2^2/(t+A2) + x3^2/(t+A3))/2  t
I.2         2, 3   (x1^2/(t+B1) + x2^2/(t+B2))/2                t
I.3         2, 3   x1^2/(2t + c1)                               t
I.4         2, 3   c2 x1 + c3 - c2^2 t / 2                      t
II.1        2, 3   -2 a t x1 - (4/3) a^2 t^3 + b t              x1 + a t^2
II.2        2, 3   c atan2(x1, x2) + alpha t                    hypot(x1, x2)
II.3        3      beta t                                       |x|
==========  =====  ==========================================  =====================

Case I has Z=0 (omega = t, S == 0, X == 1); case II has Z=1, X == 0,
Y = N/omega with N = 0, 1, 2 for II.1, II.2, II.3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field, replace
from typing import Callable

import numpy as np

from .errors import ConfigError


def _like(t, x):
    """Broadcast reference with the shape of a combined (t, x) sample."""
    return np.asarray(t, dtype=float) + 0.0 * np.asarray(x, dtype=float)[..., 0]


def _vec(ref, n, components: dict | None = None):
    """Assemble a gradient array of shape ref.shape + (n,) from per-axis terms."""
    out = np.zeros(np.shape(ref) + (n,))
    if components:
        for axis, value in components.items():
            out[..., axis] = value
    return out


@dataclass(frozen=True)
class Nonlinearity:
    """The multiplier F(|u|) in the equation 2i u_t + Lap u = u F(|u|).

    kinds: ``power`` F(r) = g r^p, ``log`` F(r) = s ln r, ``none`` F == 0,
    ``custom`` an arbitrary handle of the modulus.
    """

    kind: str = "power"
    g: float = 1.0
    p: float = 2.0
    s: float = 1.0
    func: Callable | None = None

    def __post_init__(self):
        if self.kind not in ("power", "log", "none", "custom"):
            raise ConfigError(f"unknown nonlinearity kind {self.kind!r}")
        if self.kind == "custom" and self.func is None:
            raise ConfigError("custom nonlinearity needs a callable")

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "power":
            return self.g * np.power(r, self.p)
        if self.kind == "log":
            return self.s * np.log(r)
        if self.kind == "none":
            return np.zeros_like(r)
        return self.func(r)

    def describe(self) -> str:
        if self.kind == "power":
            return f"F(r) = {self.g}*r^{self.p}"
        if self.kind == "log":
            return f"F(r) = {self.s}*ln(r)"
        if self.kind == "none":
            return "F = 0"
        return "F = user handle"

    def to_config(self) -> dict:
        return {"kind": self.kind, "g": self.g, "p": self.p, "s": self.s}

    @classmethod
    def from_config(cls, cfg: dict) -> "Nonlinearity":
        known = {"kind", "g", "p", "s"}
        unknown = set(cfg) - known
        if unknown:
            raise ConfigError(f"unknown nonlinearity keys: {sorted(unknown)}")
        return cls(**cfg)


@dataclass(frozen=True)
class ReductionProfile:
    """Right-hand sides of the reduction conditions.

    The pair (f, omega) reduces the equation when

        2 f_t + f_a f_a = S(omega),   Lap f = T(omega),
        omega_t + f_a omega_a = X(omega),
        Lap omega = Y(omega),         omega_a omega_a = Z.

    Z is normalized to 0 or 1.  For Z=1, Y = N/omega with integer N and
    X == 0; for Z=0, omega = t, S == 0 and X == 1.
    """

    S: Callable
    T: Callable
    X: Callable
    Y: Callable
    Z: int
    N: int | None
    n: int

    def __post_init__(self):
        if self.Z not in (0, 1):
            raise ConfigError("Z must be normalized to 0 or 1")
        if self.Z == 1:
            if self.N is None or not 0 <= self.N <= self.n - 1:
                raise ConfigError("Z=1 requires integer N with N <= n - 1")


def _zero(w):
    return np.zeros_like(np.asarray(w, dtype=float))


def _one(w):
    return np.ones_like(np.asarray(w, dtype=float))


@dataclass(frozen=True)
class AnsatzSpec:
    """One catalog family instance: closures, analytic derivatives, profile.

    Instances are immutable; all closures are pure and broadcastable, so a
    spec can be shared freely across threads.  ``surfaces`` holds clearance
    callables for the declared singular surfaces; ``poles`` lists the case-I
    time poles (empty for case II); ``level_sampler(value, count, rng)``
    produces exact preimage points of ``omega == value``.
    """

    family: str
    n: int
    params: dict
    f: Callable
    f_t: Callable
    grad_f: Callable
    lap_f: Callable
    omega: Callable
    omega_t: Callable
    grad_omega: Callable
    lap_omega: Callable
    profile: ReductionProfile
    surfaces: tuple = ()
    poles: tuple = ()
    level_sampler: Callable | None = None
    transform: tuple = ()


# family -> (allowed dimensions, parameter names)
FAMILIES: dict[str, tuple[tuple[int, ...], tuple[str, ...]]] = {
    "I.1": ((3,), ("A1", "A2", "A3")),
    "I.2": ((2, 3), ("B1", "B2")),
    "I.3": ((2, 3), ("c1",)),
    "I.4": ((2, 3), ("c2", "c3")),
    "II.1": ((2, 3), ("a", "b")),
    "II.2": ((2, 3), ("c", "alpha")),
    "II.3": ((3,), ("beta",)),
}

_DEFAULTS = {
    "I.1": {"A1": 1.0, "A2": 2.0, "A3": 3.0},
    "I.2": {"B1": 1.0, "B2": 2.0},
    "I.3": {"c1": 1.0},
    "I.4": {"c2": 1.0, "c3": 1.0},
    "II.1": {"a": 1.0, "b": 1.0},
    "II.2": {"c": 1.0, "alpha": 1.0},
    "II.3": {"beta": 1.0},
}

#: sampling box used by the level-set generators (away from all default poles)
_BOX = (0.3, 1.3)
_TSPAN = (0.0, 0.8)


def default_params(family: str) -> dict:
    if family not in _DEFAULTS:
        raise ConfigError(f"unknown family {family!r}")
    return dict(_DEFAULTS[family])


def _check_family_args(family: str, n: int | None, params: dict | None):
    if family not in FAMILIES:
        raise ConfigError(f"unknown family {family!r}; valid: {sorted(FAMILIES)}")
    dims, names = FAMILIES[family]
    if n is None:
        n = dims[-1]
    if n not in dims:
        raise ConfigError(f"family {family} requires n in {dims}, got n={n}")
    if params is None:
        params = default_params(family)
    unknown = set(params) - set(names)
    if unknown:
        raise ConfigError(f"unknown parameters for {family}: {sorted(unknown)}")
    missing = set(names) - set(params)
    if missing:
        raise ConfigError(f"missing parameters for {family}: {sorted(missing)}")
    return n, {k: float(params[k]) for k in names}


def _pole_surfaces(poles):
    return tuple(
        (lambda t, x, p=p: np.abs(np.asarray(t, dtype=float) + p)) for p in poles
    )


def _box_sampler(n):
    def sampler(value, count, rng):
        T = np.full(count, float(value))
        X = rng.uniform(*_BOX, size=(count, n))
        return T, X

    return sampler


def _quadratic_phase_family(family, n, params, poles):
    """Case-I template: f = sum_l x_l^2 / (2 (t + p_l)), omega = t."""
    m = len(poles)
    if len(set(poles)) != m:
        raise ConfigError(f"family {family} requires pairwise distinct poles, got {poles}")

    def f(t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return 0.5 * sum(x[..., l] ** 2 / (t + poles[l]) for l in range(m))

    def f_t(t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        return -0.5 * sum(x[..., l] ** 2 / (t + poles[l]) ** 2 for l in range(m))

    def grad_f(t, x):
        t = np.asarray(t, dtype=float)
        x = np.asarray(x, dtype=float)
        ref = _like(t, x)
        return _vec(ref, n, {l: x[..., l] / (t + poles[l]) for l in range(m)})

    def lap_f(t, x):
        t = np.asarray(t, dtype=float)
        return sum(1.0 / (t + p) for p in poles) + 0.0 * _like(t, x)

    def T_of(w):
        w = np.asarray(w, dtype=float)
        return sum(1.0 / (w + p) for p in poles) if poles else np.zeros_like(w)

    profile = ReductionProfile(S=_zero, T=T_of, X=_one, Y=_zero, Z=0, N=None, n=n)
    return AnsatzSpec(
        family=family,
        n=n,
        params=params,
        f=f,
        f_t=f_t,
        grad_f=grad_f,
        lap_f=lap_f,
        omega=lambda t, x: _like(t, x) * 0.0 + np.asarray(t, dtype=float),
        omega_t=lambda t, x: np.ones_like(_like(t, x)),
        grad_omega=lambda t, x: _vec(_like(t, x), n),
        lap_omega=lambda t, x: np.zeros_like(_like(t, x)),
        profile=profile,
        surfaces=_pole_surfaces(poles),
        poles=tuple(poles),
        level_sampler=_box_sampler(n),
    )


def _linear_phase_family(n, params):
    """Case I.4: f = c2 x1 + c3 - c2^2 t / 2, omega = t."""
    c2, c3 = params["c2"], params["c3"]

    def f(t, x):
        return c2 * np.asarray(x, dtype=float)[..., 0] + c3 - 0.5 * c2**2 * np.asarray(t, dtype=float)

    profile = ReductionProfile(S=_zero, T=_zero, X=_one, Y=_zero, Z=0, N=None, n=n)
    return AnsatzSpec(
        family="I.4",
        n=n,
        params=params,
        f=f,
        f_t=lambda t, x: np.full_like(_like(t, x), -0.5 * c2**2),
        grad_f=lambda t, x: _vec(_like(t, x), n, {0: c2}),
        lap_f=lambda t, x: np.zeros_like(_like(t, x)),
        omega=lambda t, x: _like(t, x) * 0.0 + np.asarray(t, dtype=float),
        omega_t=lambda t, x: np.ones_like(_like(t, x)),
        grad_omega=lambda t, x: _vec(_like(t, x), n),
        lap_omega=lambda t, x: np.zeros_like(_like(t, x)),
        profile=profile,
        surfaces=(),
        poles=(),
        level_sampler=_box_sampler(n),
    )


def _accelerated_plane_family(n, params):
    """Case II.1: omega = x1 + a t^2, f = -2 a t x1 - (4/3) a^2 t^3 + b t."""
    a, b = params["a"], params["b"]

    def f(t, x):
        t = np.asarray(t, dtype=float)
        return -2.0 * a * t * np.asarray(x, dtype=float)[..., 0] - (4.0 / 3.0) * a**2 * t**3 + b * t

    def omega(t, x):
        return np.asarray(x, dtype=float)[..., 0] + a * np.asarray(t, dtype=float) ** 2

    def S(w):
        return -4.0 * a * np.asarray(w, dtype=float) + 2.0 * b

    def sampler(value, count, rng):
        T = rng.uniform(*_TSPAN, size=count)
        X = rng.uniform(*_BOX, size=(count, n))
        X[:, 0] = value - a * T**2
        return T, X

    profile = ReductionProfile(S=S, T=_zero, X=_zero, Y=_zero, Z=1, N=0, n=n)
    return AnsatzSpec(
        family="II.1",
        n=n,
        params=params,
        f=f,
        f_t=lambda t, x: -2.0 * a * np.asarray(x, dtype=float)[..., 0]
        - 4.0 * a**2 * np.asarray(t, dtype=float) ** 2
        + b
        + 0.0 * _like(t, x),
        grad_f=lambda t, x: _vec(_like(t, x), n, {0: -2.0 * a * np.asarray(t, dtype=float) + 0.0 * _like(t, x)}),
        lap_f=lambda t, x: np.zeros_like(_like(t, x)),
        omega=omega,
        omega_t=lambda t, x: 2.0 * a * np.asarray(t, dtype=float) + 0.0 * _like(t, x),
        grad_omega=lambda t, x: _vec(_like(t, x), n, {0: 1.0}),
        lap_omega=lambda t, x: np.zeros_like(_like(t, x)),
        profile=profile,
        surfaces=(),
        poles=(),
        level_sampler=sampler,
    )


def _cylindrical_family(n, params):
    """Case II.2: omega = hypot(x1, x2), f = c atan2(x1, x2) + alpha t.

    atan2 keeps f single-valued off the half-plane x2 <= 0; the plane
    x2 = 0 is declared singular so sampling never crosses the branch.
    """
    c, alpha = params["c"], params["alpha"]

    def f(t, x):
        x = np.asarray(x, dtype=float)
        return c * np.arctan2(x[..., 0], x[..., 1]) + alpha * np.asarray(t, dtype=float)

    def omega(t, x):
        x = np.asarray(x, dtype=float)
        return np.hypot(x[..., 0], x[..., 1]) + 0.0 * _like(t, x)

    def grad_f(t, x):
        x = np.asarray(x, dtype=float)
        w2 = x[..., 0] ** 2 + x[..., 1] ** 2
        return _vec(_like(t, x), n, {0: c * x[..., 1] / w2, 1: -c * x[..., 0] / w2})

    def grad_omega(t, x):
        x = np.asarray(x, dtype=float)
        w = np.hypot(x[..., 0], x[..., 1])
        return _vec(_like(t, x), n, {0: x[..., 0] / w, 1: x[..., 1] / w})

    def S(w):
        w = np.asarray(w, dtype=float)
        return 2.0 * alpha + c**2 / w**2

    def sampler(value, count, rng):
        theta = rng.uniform(-1.1, 1.1, size=count)
        T = rng.uniform(*_TSPAN, size=count)
        X = rng.uniform(*_BOX, size=(count, n))
        X[:, 0] = value * np.sin(theta)
        X[:, 1] = value * np.cos(theta)
        return T, X

    profile = ReductionProfile(
        S=S,
        T=_zero,
        X=_zero,
        Y=lambda w: 1.0 / np.asarray(w, dtype=float),
        Z=1,
        N=1,
        n=n,
    )
    return AnsatzSpec(
        family="II.2",
        n=n,
        params=params,
        f=f,
        f_t=lambda t, x: np.full_like(_like(t, x), alpha),
        grad_f=grad_f,
        lap_f=lambda t, x: np.zeros_like(_like(t, x)),
        omega=omega,
        omega_t=lambda t, x: np.zeros_like(_like(t, x)),
        grad_omega=grad_omega,
        lap_omega=lambda t, x: 1.0 / omega(t, x),
        profile=profile,
        surfaces=(
            lambda t, x: np.hypot(np.asarray(x, dtype=float)[..., 0], np.asarray(x, dtype=float)[..., 1])
            + 0.0 * _like(t, x),
            lambda t, x: np.abs(np.asarray(x, dtype=float)[..., 1]) + 0.0 * _like(t, x),
        ),
        poles=(),
        level_sampler=sampler,
    )


def _spherical_family(n, params):
    """Case II.3: omega = |x|, f = beta t (n = 3 only)."""
    beta = params["beta"]

    def omega(t, x):
        x = np.asarray(x, dtype=float)
        return np.sqrt(np.sum(x * x, axis=-1)) + 0.0 * _like(t, x)

    def grad_omega(t, x):
        x = np.asarray(x, dtype=float)
        w = np.sqrt(np.sum(x * x, axis=-1))
        return x / w[..., None]

    def sampler(value, count, rng):
        d = rng.standard_normal((count, n))
        d /= np.linalg.norm(d, axis=1, keepdims=True)
        T = rng.uniform(*_TSPAN, size=count)
        return T, value * d

    profile = ReductionProfile(
        S=lambda w: np.full_like(np.asarray(w, dtype=float), 2.0 * beta),
        T=_zero,
        X=_zero,
        Y=lambda w: 2.0 / np.asarray(w, dtype=float),
        Z=1,
        N=2,
        n=n,
    )
    return AnsatzSpec(
        family="II.3",
        n=n,
        params=params,
        f=lambda t, x: beta * np.asarray(t, dtype=float) + 0.0 * _like(t, x),
        f_t=lambda t, x: np.full_like(_like(t, x), beta),
        grad_f=lambda t, x: _vec(_like(t, x), n),
        lap_f=lambda t, x: np.zeros_like(_like(t, x)),
        omega=omega,
        omega_t=lambda t, x: np.zeros_like(_like(t, x)),
        grad_omega=grad_omega,
        lap_omega=lambda t, x: 2.0 / omega(t, x),
        profile=profile,
        surfaces=(lambda t, x: omega(t, x),),
        poles=(),
        level_sampler=sampler,
    )


def make_family(family: str, n: int | None = None, params: dict | None = None) -> AnsatzSpec:
    """Construct a catalog family instance.

    ``params=None`` applies the documented defaults (poles 1, 2, 3; all
    other constants 1).  An explicit dict must name every parameter of the
    family.  Dimension defaults to the largest the family supports.
    """
    n, params = _check_family_args(family, n, params)
    if family == "I.1":
        return _quadratic_phase_family(family, n, params, (params["A1"], params["A2"], params["A3"]))
    if family == "I.2":
        return _quadratic_phase_family(family, n, params, (params["B1"], params["B2"]))
    if family == "I.3":
        # f = x1^2/(2t + c1) is the one-pole template with pole c1/2
        return _quadratic_phase_family(family, n, params, (params["c1"] / 2.0,))
    if family == "I.4":
        return _linear_phase_family(n, params)
    if family == "II.1":
        return _accelerated_plane_family(n, params)
    if family == "II.2":
        return _cylindrical_family(n, params)
    return _spherical_family(n, params)


def reduction_profile(spec: AnsatzSpec) -> ReductionProfile:
    """The profile (S, T, X, Y, Z, N) the spec's (f, omega) pair satisfies."""
    return spec.profile


def spec_config(spec: AnsatzSpec) -> dict:
    """JSON-ready descriptor {family, n, params} (round-trips make_family)."""
    return {"family": spec.family, "n": spec.n, "params": dict(spec.params)}


def spec_from_config(cfg: dict) -> AnsatzSpec:
    known = {"family", "n", "params"}
    unknown = set(cfg) - known
    if unknown:
        raise ConfigError(f"unknown ansatz keys: {sorted(unknown)}")
    if "family" not in cfg:
        raise ConfigError("ansatz descriptor needs a 'family' key")
    return make_family(cfg["family"], cfg.get("n"), cfg.get("params"))


# ---------------------------------------------------------------------------
# equivalence transformations (rotation, Galilei boost, translation)
# ---------------------------------------------------------------------------

ORTHOGONALITY_TOL = 1e-12


def rotated(spec: AnsatzSpec, rotation) -> AnsatzSpec:
    """Pull back (f, omega) under x -> R x; the profile is untouched."""
    R = np.asarray(rotation, dtype=float)
    if R.shape != (spec.n, spec.n):
        raise ValueError(f"rotation must be {spec.n}x{spec.n}")
    if np.max(np.abs(R.T @ R - np.eye(spec.n))) > ORTHOGONALITY_TOL:
        raise ValueError("rotation matrix is not orthogonal")

    def pull(t, x):
        return np.asarray(x, dtype=float) @ R  # y = R^T x

    old = spec
    sampler = None
    if old.level_sampler is not None:
        def sampler(value, count, rng):
            T, Y = old.level_sampler(value, count, rng)
            return T, Y @ R.T

    return replace(
        spec,
        f=lambda t, x: old.f(t, pull(t, x)),
        f_t=lambda t, x: old.f_t(t, pull(t, x)),
        grad_f=lambda t, x: old.grad_f(t, pull(t, x)) @ R.T,
        lap_f=lambda t, x: old.lap_f(t, pull(t, x)),
        omega=lambda t, x: old.omega(t, pull(t, x)),
        omega_t=lambda t, x: old.omega_t(t, pull(t, x)),
        grad_omega=lambda t, x: old.grad_omega(t, pull(t, x)) @ R.T,
        lap_omega=lambda t, x: old.lap_omega(t, pull(t, x)),
        surfaces=tuple((lambda t, x, s=s: s(t, pull(t, x))) for s in old.surfaces),
        level_sampler=sampler,
        transform=old.transform + (("rotate", R),),
    )


def boosted(spec: AnsatzSpec, velocity) -> AnsatzSpec:
    """Galilei boost x -> x + g t; f picks up the generator's additive term.

    f~(t, x) = f(t, y) + g.y + |g|^2 t / 2 with y = x - g t, which keeps
    2 f_t + f_a f_a and the coupling condition intact.
    """
    g = np.asarray(velocity, dtype=float).reshape(-1)
    if g.shape != (spec.n,):
        raise ValueError(f"boost velocity must have {spec.n} components")
    g2 = float(g @ g)

    def pull(t, x):
        return np.asarray(x, dtype=float) - np.multiply.outer(np.asarray(t, dtype=float), g)

    old = spec
    sampler = None
    if old.level_sampler is not None:
        def sampler(value, count, rng):
            T, Y = old.level_sampler(value, count, rng)
            return T, Y + np.multiply.outer(T, g)

    return replace(
        spec,
        f=lambda t, x: old.f(t, pull(t, x))
        + pull(t, x) @ g
        + 0.5 * g2 * np.asarray(t, dtype=float),
        f_t=lambda t, x: old.f_t(t, pull(t, x)) - old.grad_f(t, pull(t, x)) @ g - 0.5 * g2,
        grad_f=lambda t, x: old.grad_f(t, pull(t, x)) + g,
        lap_f=lambda t, x: old.lap_f(t, pull(t, x)),
        omega=lambda t, x: old.omega(t, pull(t, x)),
        omega_t=lambda t, x: old.omega_t(t, pull(t, x)) - old.grad_omega(t, pull(t, x)) @ g,
        grad_omega=lambda t, x: old.grad_omega(t, pull(t, x)),
        lap_omega=lambda t, x: old.lap_omega(t, pull(t, x)),
        surfaces=tuple((lambda t, x, s=s: s(t, pull(t, x))) for s in old.surfaces),
        level_sampler=sampler,
        transform=old.transform + (("boost", g),),
    )


def translated(spec: AnsatzSpec, shift) -> AnsatzSpec:
    """Spatial translation x -> x + beta."""
    beta = np.asarray(shift, dtype=float).reshape(-1)
    if beta.shape != (spec.n,):
        raise ValueError(f"translation must have {spec.n} components")

    def pull(t, x):
        return np.asarray(x, dtype=float) - beta

    old = spec
    sampler = None
    if old.level_sampler is not None:
        def sampler(value, count, rng):
            T, Y = old.level_sampler(value, count, rng)
            return T, Y + beta

    return replace(
        spec,
        f=lambda t, x: old.f(t, pull(t, x)),
        f_t=lambda t, x: old.f_t(t, pull(t, x)),
        grad_f=lambda t, x: old.grad_f(t, pull(t, x)),
        lap_f=lambda t, x: old.lap_f(t, pull(t, x)),
        omega=lambda t, x: old.omega(t, pull(t, x)),
        omega_t=lambda t, x: old.omega_t(t, pull(t, x)),
        grad_omega=lambda t, x: old.grad_omega(t, pull(t, x)),
        lap_omega=lambda t, x: old.lap_omega(t, pull(t, x)),
        surfaces=tuple((lambda t, x, s=s: s(t, pull(t, x))) for s in old.surfaces),
        level_sampler=sampler,
        transform=old.transform + (("translate", beta),),
    )


def equivalence_transform(
    spec: AnsatzSpec,
    rotation=None,
    boost=None,
    translation=None,
) -> AnsatzSpec:
    """Compose rotation, then boost, then translation.

    The result satisfies the same reduction system with the same profile
    (same S, T, X, Y, Z, N); the verifier certifies this claim.
    """
    out = spec
    if rotation is not None:
        out = rotated(out, rotation)
    if boost is not None:
        out = boosted(out, boost)
    if translation is not None:
        out = translated(out, translation)
    return out


def random_rotation(n: int, rng: np.random.Generator):
    """Haar-ish random orthogonal matrix via QR with sign fixing."""
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))


# ---------------------------------------------------------------------------
# documented negative controls
# ---------------------------------------------------------------------------


def with_phase_perturbation(spec: AnsatzSpec, eps: float = 0.1) -> AnsatzSpec:
    """Break the phase condition: f -> f + eps x1 x2 (Lap f unchanged)."""
    old = spec

    def extra(t, x):
        x = np.asarray(x, dtype=float)
        return eps * x[..., 0] * x[..., 1]

    def grad_extra(t, x):
        x = np.asarray(x, dtype=float)
        return _vec(_like(t, x), old.n, {0: eps * x[..., 1], 1: eps * x[..., 0]})

    return replace(
        spec,
        f=lambda t, x: old.f(t, x) + extra(t, x),
        grad_f=lambda t, x: old.grad_f(t, x) + grad_extra(t, x),
        transform=old.transform + (("perturb-f", eps),),
    )


def with_broken_omega(spec: AnsatzSpec, eps: float = 0.1) -> AnsatzSpec:
    """Replace omega with the documented broken variable x1 + eps x2^2."""
    old = spec

    def omega(t, x):
        x = np.asarray(x, dtype=float)
        return x[..., 0] + eps * x[..., 1] ** 2 + 0.0 * _like(t, x)

    def sampler(value, count, rng):
        T = rng.uniform(*_TSPAN, size=count)
        X = rng.uniform(0.0, 1.5, size=(count, old.n))
        X[:, 0] = value - eps * X[:, 1] ** 2
        return T, X

    return replace(
        spec,
        omega=omega,
        omega_t=lambda t, x: np.zeros_like(_like(t, x)),
        grad_omega=lambda t, x: _vec(
            _like(t, x), old.n, {0: 1.0, 1: 2.0 * eps * np.asarray(x, dtype=float)[..., 1]}
        ),
        lap_omega=lambda t, x: np.full_like(_like(t, x), 2.0 * eps),
        level_sampler=sampler,
        transform=old.transform + (("break-omega", eps),),
    )
