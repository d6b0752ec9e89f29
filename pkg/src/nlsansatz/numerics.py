"""Grid sampling, finite-difference oracles, and PDE residual evaluators.

Everything here is deliberately independent of the analytic layer: the
derivative oracles know nothing about closed-form derivatives, so they can
certify them.  All field callables are vectorized over a leading sample
axis: ``func(t, x)`` takes ``t`` of shape ``(M,)`` (or scalar) and ``x`` of
shape ``(M, n)`` (or ``(n,)``) and returns shape ``(M,)``.

Conventions
-----------
* first derivatives: central differences, error O(h^2), exact on
  polynomials of degree <= 2;
* second derivatives: 3-point central differences per axis, same order;
* singular surfaces are declared by the field producer as clearance
  callables ``(t, x) -> nonnegative float`` (approximate distance to the
  surface); stencils refuse to evaluate within ``2h`` of a surface and the
  grid sampler drops points within the exclusion radius (default ``10h``).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable, Sequence

import numpy as np

from .errors import EmptySampleError, PoleProximityError

# clearance callable: (t, x) -> approximate distance to a singular surface
Surface = Callable[[np.ndarray, np.ndarray], np.ndarray]

#: default finite-difference step
DEFAULT_H = 1e-3

#: stencil guard: refuse differencing closer than this many h to a surface
STENCIL_GUARD = 2.0


@dataclass(frozen=True)
class Point:
    """A space-time sample location (t, x_1..x_n)."""

    t: float
    x: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float))
        if self.x.ndim != 1:
            raise ValueError("x must be a flat coordinate vector")
        if not (np.isfinite(self.t) and np.all(np.isfinite(self.x))):
            raise ValueError("coordinates must be finite")

    @property
    def n(self) -> int:
        return self.x.shape[0]


@dataclass(frozen=True)
class Field:
    """An evaluable scalar- or complex-valued function of (t, x).

    ``func`` must be deterministic and numpy-broadcastable over the sample
    axis.  ``surfaces`` lists clearance callables for the singular surfaces
    the producer knows about; the oracles and samplers stay away from them.
    """

    func: Callable
    dim: int
    surfaces: tuple = ()

    def __call__(self, t, x):
        return self.func(t, x)

    def at(self, p: Point):
        return self.func(p.t, p.x)

    def clearance(self, t, x):
        """Minimum clearance to any declared singular surface (inf if none)."""
        t = np.asarray(t, dtype=float)
        if not self.surfaces:
            return np.full(np.shape(t), np.inf)
        return np.min([np.asarray(s(t, x), dtype=float) for s in self.surfaces], axis=0)


@dataclass(frozen=True)
class GridSpec:
    """Uniform sampling lattice in (t, x_1..x_n) with a pole-exclusion guard.

    ``counts`` gives the number of samples per axis, t first.  ``h`` is the
    finite-difference step used by oracle evaluations on this grid;
    ``exclusion_radius`` (default ``10 h``) is the minimum clearance a kept
    sample must have from every declared singular surface.
    """

    t_range: tuple[float, float]
    x_ranges: tuple[tuple[float, float], ...]
    counts: tuple[int, ...]
    h: float = DEFAULT_H
    exclusion_radius: float | None = None

    def __post_init__(self):
        if len(self.counts) != len(self.x_ranges) + 1:
            raise ValueError("counts must cover the t axis plus every x axis")
        if any(c < 1 for c in self.counts):
            raise ValueError("axis counts must be positive")
        if self.h <= 0:
            raise ValueError("fd step h must be positive")
        if self.exclusion_radius is not None and self.exclusion_radius <= 0:
            raise ValueError("exclusion radius must be positive")

    @property
    def n(self) -> int:
        return len(self.x_ranges)

    @property
    def radius(self) -> float:
        return 10.0 * self.h if self.exclusion_radius is None else self.exclusion_radius

    def lattice(self):
        """All lattice points as (T, X) with shapes (M,) and (M, n)."""
        axes = [np.linspace(*self.t_range, self.counts[0])]
        for rng, cnt in zip(self.x_ranges, self.counts[1:]):
            axes.append(np.linspace(*rng, cnt))
        mesh = np.meshgrid(*axes, indexing="ij")
        flat = [m.reshape(-1) for m in mesh]
        return flat[0], np.stack(flat[1:], axis=-1)

    def sample(self, surfaces: Sequence[Surface] = ()):
        """Lattice points with at least ``radius`` clearance from every surface.

        Returns (T, X, n_excluded).  Raises EmptySampleError if nothing
        survives the guard.
        """
        T, X = self.lattice()
        keep = np.ones(T.shape, dtype=bool)
        for s in surfaces:
            keep &= np.asarray(s(T, X), dtype=float) >= self.radius
        n_excl = int(np.count_nonzero(~keep))
        if not np.any(keep):
            raise EmptySampleError(
                f"all {T.size} grid points lie within {self.radius} of a singular surface"
            )
        return T[keep], X[keep], n_excl


def _guard(field: Field, t, x, h: float):
    """Refuse stencils that could touch a declared singular surface."""
    clear = field.clearance(t, x)
    bad = clear < STENCIL_GUARD * h
    if np.any(bad):
        raise PoleProximityError(
            f"{int(np.count_nonzero(bad))} stencil point(s) within "
            f"{STENCIL_GUARD}h of a singular surface (h={h})"
        )


def _axis_shift(x, a: int, delta: float):
    x = np.asarray(x, dtype=float)
    shifted = x.copy()
    shifted[..., a] = shifted[..., a] + delta
    return shifted


def fd_gradient(field: Field, t, x, h: float = DEFAULT_H):
    """Spatial gradient by central differences; shape (..., n).

    Exact on fields quadratic in x; error O(h^2) for C^3 fields.
    """
    _guard(field, t, x, h)
    x = np.asarray(x, dtype=float)
    comps = [
        (field(t, _axis_shift(x, a, +h)) - field(t, _axis_shift(x, a, -h))) / (2.0 * h)
        for a in range(field.dim)
    ]
    return np.stack(comps, axis=-1)


def fd_laplacian(field: Field, t, x, h: float = DEFAULT_H):
    """Spatial Laplacian: sum of second central differences over the axes."""
    _guard(field, t, x, h)
    x = np.asarray(x, dtype=float)
    center = field(t, x)
    total = -2.0 * field.dim * center
    for a in range(field.dim):
        total = total + field(t, _axis_shift(x, a, +h)) + field(t, _axis_shift(x, a, -h))
    return total / (h * h)


def fd_time_derivative(field: Field, t, x, h: float = DEFAULT_H):
    """First t-derivative by central differences."""
    _guard(field, t, x, h)
    t = np.asarray(t, dtype=float)
    return (field(t + h, x) - field(t - h, x)) / (2.0 * h)


def fd_second_time_derivative(field: Field, t, x, h: float = DEFAULT_H):
    """Second t-derivative by 3-point central differences."""
    _guard(field, t, x, h)
    t = np.asarray(t, dtype=float)
    return (field(t + h, x) - 2.0 * field(t, x) + field(t - h, x)) / (h * h)


def nls_residual(u: Field, t, x, F, h: float = DEFAULT_H):
    """Residual of 2i u_t + Lap u - u F(|u|) with oracle derivatives.

    Exact solutions give O(h^2) values; ``F`` is any callable of the
    modulus (see catalog.Nonlinearity).
    """
    u0 = np.asarray(u(t, x))
    ut = fd_time_derivative(u, t, x, h)
    lap = fd_laplacian(u, t, x, h)
    return 2j * ut + lap - u0 * F(np.abs(u0))


def wave_residual(u: Field, t, x, lam: float, k: float, h: float = DEFAULT_H):
    """Residual of u_00 - u_11 - u_22 - u_33 - lam u^k.

    The field's time axis plays x_0; ``x`` carries (x_1, x_2, x_3).
    For non-integer k the field must be positive on the stencil.
    """
    u0 = np.asarray(u(t, x), dtype=float)
    if k != int(k) and np.any(u0 <= 0.0):
        raise ValueError("non-integer exponent k requires a positive field")
    utt = fd_second_time_derivative(u, t, x, h)
    lap = fd_laplacian(u, t, x, h)
    nonlin = lam * np.power(u0, k) if lam != 0.0 else 0.0
    return utt - lap - nonlin


def max_and_rms(values) -> tuple[float, float]:
    """Max-abs and root-mean-square of a residual sample."""
    v = np.abs(np.asarray(values))
    if v.size == 0:
        raise EmptySampleError("no residual samples")
    return float(v.max()), float(np.sqrt(np.mean(v * v)))
