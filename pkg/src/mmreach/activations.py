"""Activation functions described as 3-piece piecewise-monotone functions.

A :class:`PiecewiseMonotoneDescriptor` wraps a vectorised scalar function
together with its global argmin ``zmin`` and global argmax ``zmax``.  The
function must be non-increasing on ``(-inf, zmin]``, non-decreasing on
``[zmin, zmax]`` and non-increasing on ``[zmax, inf)``; either argument may be
infinite, which collapses the corresponding outer piece.  For this class the
exact range over any bounded interval is obtained from at most three
evaluations (:func:`local_bounds`).

An :class:`ActivationSpec` pairs descriptors for the activation and its
derivative.  Specs are kept in a process-wide registry; :func:`register`
validates new entries by sampling before accepting them.
"""

from __future__ import annotations

import logging
import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import bisect
from scipy.special import expit

from .errors import DerivativeMismatch, ShapeViolation, UnknownActivation
from .interval import Interval

log = logging.getLogger(__name__)

INF = math.inf


@dataclass(frozen=True)
class PiecewiseMonotoneDescriptor:
    eval: Callable[[np.ndarray], np.ndarray]
    zmin: float = -INF
    zmax: float = INF

    def __call__(self, x):
        return self.eval(np.asarray(x, dtype=float))

    @property
    def is_monotone(self) -> bool:
        return self.zmin == -INF and self.zmax == INF


@dataclass(frozen=True)
class ActivationSpec:
    name: str
    phi: PiecewiseMonotoneDescriptor
    dphi: PiecewiseMonotoneDescriptor
    # points where phi is not differentiable; skipped by the derivative check
    kinks: tuple[float, ...] = field(default=())


def local_bounds(d: PiecewiseMonotoneDescriptor, x: Interval) -> Interval:
    """Exact range of ``d`` over the finite interval ``x``."""
    lo, hi = local_bounds_array(d, np.array([x.lo]), np.array([x.hi]))
    return Interval(lo[0], hi[0])


def local_bounds_array(d: PiecewiseMonotoneDescriptor, lo: np.ndarray, hi: np.ndarray):
    """Vectorised :func:`local_bounds` over arrays of interval endpoints."""
    f_lo = d.eval(lo)
    f_hi = d.eval(hi)
    lower = np.minimum(f_lo, f_hi)
    upper = np.maximum(f_lo, f_hi)
    if math.isfinite(d.zmin):
        inside = (lo <= d.zmin) & (d.zmin <= hi)
        if inside.any():
            lower = np.where(inside, d.eval(np.float64(d.zmin)), lower)
    if math.isfinite(d.zmax):
        inside = (lo <= d.zmax) & (d.zmax <= hi)
        if inside.any():
            upper = np.where(inside, d.eval(np.float64(d.zmax)), upper)
    return lower, upper


# --- builtin functions ------------------------------------------------------


def _identity(x):
    return np.array(x, dtype=float, copy=True)


def _one(x):
    return np.ones_like(x, dtype=float)


def _relu(x):
    return np.maximum(x, 0.0)


def _relu_grad(x):
    # 0 at the kink: tight on intervals ending at 0 and still sound
    return (x > 0).astype(float)


def _make_leaky(slope: float):
    def phi(x):
        return np.where(x > 0, x, slope * x)

    def dphi(x):
        return np.where(x > 0, 1.0, slope)

    return phi, dphi


def _tanh_grad(x):
    t = np.tanh(x)
    return 1.0 - t * t


def _sigmoid_grad(x):
    s = expit(x)
    return s * (1.0 - s)


def _elu(x):
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))


def _elu_grad(x):
    return np.where(x > 0, 1.0, np.exp(np.minimum(x, 0.0)))


def _softplus(x):
    return np.logaddexp(0.0, x)


def _silu(x):
    return x * expit(x)


def _silu_grad(x):
    s = expit(x)
    return s * (1.0 + x * (1.0 - s))


def _silu_grad2(x):
    s = expit(x)
    return s * (1.0 - s) * (2.0 + x * (1.0 - 2.0 * s))


def _refine_root(f, a: float, b: float) -> float:
    return float(bisect(lambda t: float(f(np.float64(t))), a, b, xtol=1e-13, maxiter=200))


# argmin of SiLU is the root of its derivative; extremes of the derivative
# are the roots of the second derivative (symmetric about 0)
SILU_ARGMIN = _refine_root(_silu_grad, -2.0, -1.0)
SILU_GRAD_ARGMAX = _refine_root(_silu_grad2, 2.0, 3.0)
SILU_GRAD_ARGMIN = -SILU_GRAD_ARGMAX

DEFAULT_LEAKY_SLOPE = 0.01


def make_leaky_relu(slope: float = DEFAULT_LEAKY_SLOPE, name: str = "leaky_relu") -> ActivationSpec:
    if not 0 <= slope <= 1:
        raise ValueError(f"leaky ReLU slope must lie in [0, 1], got {slope}")
    phi, dphi = _make_leaky(slope)
    return ActivationSpec(
        name, PiecewiseMonotoneDescriptor(phi), PiecewiseMonotoneDescriptor(dphi), kinks=(0.0,)
    )


def _builtins() -> dict[str, ActivationSpec]:
    P = PiecewiseMonotoneDescriptor
    specs = [
        ActivationSpec("identity", P(_identity), P(_one)),
        ActivationSpec("relu", P(_relu), P(_relu_grad), kinks=(0.0,)),
        make_leaky_relu(),
        ActivationSpec("tanh", P(np.tanh), P(_tanh_grad, zmax=0.0)),
        ActivationSpec("sigmoid", P(expit), P(_sigmoid_grad, zmax=0.0)),
        ActivationSpec("elu", P(_elu), P(_elu_grad), kinks=(0.0,)),
        ActivationSpec("softplus", P(_softplus), P(expit)),
        ActivationSpec(
            "silu",
            P(_silu, zmin=SILU_ARGMIN),
            P(_silu_grad, zmin=SILU_GRAD_ARGMIN, zmax=SILU_GRAD_ARGMAX),
        ),
    ]
    return {s.name: s for s in specs}


BUILTIN_NAMES = ("identity", "relu", "leaky_relu", "tanh", "sigmoid", "elu", "silu", "softplus")

_registry: dict[str, ActivationSpec] = _builtins()
_registry_lock = threading.Lock()


def builtin(name: str) -> ActivationSpec:
    """Return a registered activation by name."""
    try:
        return _registry[name]
    except KeyError:
        raise UnknownActivation(f"unknown activation {name!r}") from None


get_activation = builtin


def registered_names() -> list[str]:
    return sorted(_registry)


def register(spec: ActivationSpec, *, scale: float = 1.0, validate: bool = True) -> ActivationSpec:
    """Validate ``spec`` by sampling and add it to the registry.

    A spec with an existing name replaces the old one (with a warning).
    """
    if validate:
        check_descriptor(spec.phi, scale=scale, what=f"{spec.name}.phi")
        check_descriptor(spec.dphi, scale=scale, what=f"{spec.name}.dphi")
        check_derivative(spec)
    with _registry_lock:
        if spec.name in _registry:
            log.warning("replacing registered activation %r", spec.name)
        _registry[spec.name] = spec
    return spec


def unregister(name: str):
    with _registry_lock:
        if _registry.pop(name, None) is None:
            raise UnknownActivation(f"unknown activation {name!r}")
        if name in BUILTIN_NAMES:
            _registry[name] = _builtins()[name]


def builtin_table() -> dict[str, dict]:
    """Machine-readable argmin/argmax constants of every registered activation."""

    def enc(z):
        return z if math.isfinite(z) else ("inf" if z > 0 else "-inf")

    return {
        name: {
            "phi": {"zmin": enc(s.phi.zmin), "zmax": enc(s.phi.zmax)},
            "dphi": {"zmin": enc(s.dphi.zmin), "zmax": enc(s.dphi.zmax)},
        }
        for name, s in sorted(_registry.items())
    }


# --- sampled validation -----------------------------------------------------


def check_descriptor(
    d: PiecewiseMonotoneDescriptor, *, scale: float = 1.0, n: int = 4001, what: str = "descriptor"
):
    """Best-effort check of the 3-piece shape on ``[-6 scale, 6 scale]``.

    Raises :class:`ShapeViolation` if a piece is not monotone in the expected
    direction or if ``zmin``/``zmax`` are not global extrema of the samples.
    """
    if d.zmin > d.zmax:
        raise ShapeViolation(f"{what}: zmin {d.zmin} exceeds zmax {d.zmax}")
    xs = np.linspace(-6.0 * scale, 6.0 * scale, n)
    extra = [z for z in (d.zmin, d.zmax) if math.isfinite(z)]
    xs = np.unique(np.concatenate([xs, extra]))
    ys = np.asarray(d.eval(xs), dtype=float)
    if not np.all(np.isfinite(ys)):
        raise ShapeViolation(f"{what}: non-finite values on the sampling range")
    tol = 1e-12 * max(1.0, float(np.max(np.abs(ys))))
    dy = np.diff(ys)
    left = xs[:-1]
    right = xs[1:]
    dec1 = right <= d.zmin
    inc = (left >= d.zmin) & (right <= d.zmax)
    dec2 = left >= d.zmax
    if np.any(dy[dec1] > tol) or np.any(dy[dec2] > tol):
        raise ShapeViolation(f"{what}: increases on a piece that must be non-increasing")
    if np.any(dy[inc] < -tol):
        raise ShapeViolation(f"{what}: decreases on a piece that must be non-decreasing")
    if math.isfinite(d.zmin) and float(d.eval(np.float64(d.zmin))) > ys.min() + tol:
        raise ShapeViolation(f"{what}: value at zmin is not the global minimum")
    if math.isfinite(d.zmax) and float(d.eval(np.float64(d.zmax))) < ys.max() - tol:
        raise ShapeViolation(f"{what}: value at zmax is not the global maximum")


def check_derivative(spec: ActivationSpec, *, points: int = 100, h: float = 1e-5, tol: float = 1e-4):
    """Compare ``dphi`` to central differences of ``phi`` at sampled points."""
    rng = np.random.default_rng(0)
    xs = rng.uniform(-6.0, 6.0, size=points)
    for k in spec.kinks:
        xs = xs[np.abs(xs - k) > 2 * h]
    fd = (spec.phi.eval(xs + h) - spec.phi.eval(xs - h)) / (2 * h)
    err = np.abs(spec.dphi.eval(xs) - fd)
    if np.any(err > tol):
        i = int(np.argmax(err))
        raise DerivativeMismatch(
            f"{spec.name}: derivative off by {err[i]:.3g} at x={xs[i]:.6g}"
        )
