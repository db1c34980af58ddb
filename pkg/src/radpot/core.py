"""Radial profiles, grids, adaptive integration and spherical means.

A radial function u(x) = u0(|x|) on R^n is represented by a profile object
carrying the ambient dimension and a vectorized evaluator for u0.  All
profile types are immutable; every operation in this module is a pure
function, safe for concurrent use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from . import _quad
from .errors import DomainError, QuadratureFailure

__all__ = [
    "QuadratureSpec", "Grid", "RadialProfile",
    "Gaussian", "SmoothBump", "PowerCutoff", "PowerTail",
    "AnnulusIndicator", "Sampled",
    "eval_profile", "integrate", "surface_area", "sphere_mean",
]


# ---------------------------------------------------------------------------
# quadrature specification


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and endpoint handling for every 1-D integral."""

    rel_tol: float = 1e-8
    abs_tol: float = 1e-12
    max_subdivisions: int = 2048
    endpoint_rule: str = "gauss"  # "gauss" | "double_exponential"

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise DomainError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise DomainError("max_subdivisions must be >= 1")
        if self.endpoint_rule not in ("gauss", "double_exponential"):
            raise DomainError(f"unknown endpoint rule {self.endpoint_rule!r}")


DEFAULT_SPEC = QuadratureSpec()
DE_SPEC = QuadratureSpec(endpoint_rule="double_exponential")


def integrate(f, interval, spec: QuadratureSpec = DEFAULT_SPEC):
    """Integrate ``f`` over ``interval = (a, b)``; either end may be infinite.

    Half-infinite ranges are mapped through the fixed substitution
    r = a + t/(1-t).  With endpoint_rule="double_exponential" the panels
    touching the (finite) endpoints use the tanh-sinh rule, so integrable
    power or log endpoint singularities are admissible.

    Returns (value, error_estimate).
    """
    a, b = interval
    if math.isnan(a) or math.isnan(b):
        raise DomainError("interval endpoints must not be NaN")
    if a >= b:
        raise DomainError("interval must satisfy a < b")
    if math.isinf(a) and math.isinf(b):
        v1, e1 = integrate(lambda r: f(-r), (0.0, math.inf), spec)
        v2, e2 = integrate(f, (0.0, math.inf), spec)
        return v1 + v2, e1 + e2
    if math.isinf(a):
        return integrate(lambda r: f(-r), (-b, math.inf), spec)
    if math.isinf(b):
        g = _quad.compactified(f, a)
        # dyadic seed towards t = 1 so far-field structure is not missed
        seed = [0.0] + [1.0 - 2.0 ** (-k) for k in range(1, 11)] + [1.0]
        return _integrate_finite(g, 0.0, 1.0, spec, seed_edges=seed)
    return _integrate_finite(f, a, b, spec)


def _integrate_finite(f, a, b, spec, seed_edges=None):
    if spec.endpoint_rule == "double_exponential":
        return _quad.tanh_sinh(f, a, b, rel_tol=spec.rel_tol,
                               abs_tol=spec.abs_tol, max_level=11)
    if seed_edges is None:
        seed_edges = np.linspace(a, b, 9)
    interior = [p for p in seed_edges if a < p < b]
    return _quad.adaptive_gk(f, a, b, rel_tol=spec.rel_tol, abs_tol=spec.abs_tol,
                             max_panels=spec.max_subdivisions, breakpoints=interior)


# ---------------------------------------------------------------------------
# grids


@dataclass(frozen=True)
class Grid:
    """Strictly increasing positive radii."""

    radii: tuple
    spacing: str = "explicit"

    def __post_init__(self):
        r = np.asarray(self.radii, dtype=float)
        if r.ndim != 1 or len(r) == 0:
            raise DomainError("grid needs at least one radius")
        if r[0] <= 0 or np.any(np.diff(r) <= 0) or not np.all(np.isfinite(r)):
            raise DomainError("grid radii must be finite, positive, strictly increasing")
        object.__setattr__(self, "radii", tuple(float(x) for x in r))

    @classmethod
    def log_uniform(cls, r_min, r_max, m):
        if not (0 < r_min < r_max) or m < 2:
            raise DomainError("log grid needs 0 < r_min < r_max and m >= 2")
        return cls(tuple(np.geomspace(r_min, r_max, int(m))), spacing="log-uniform")

    @property
    def array(self):
        return np.asarray(self.radii)

    def __len__(self):
        return len(self.radii)


# ---------------------------------------------------------------------------
# radial profiles


class RadialProfile:
    """Common interface of all radial profiles; subclasses are frozen."""

    dim: int

    # -- evaluation ---------------------------------------------------------
    def values(self, r):
        """Vectorized u0 at nonnegative radii (ndarray in, ndarray out)."""
        raise NotImplementedError

    def __call__(self, r):
        return self.values(np.asarray(r, dtype=float))

    # -- decay/support metadata used by the quadrature drivers --------------
    @property
    def tail_exponent(self):
        """Declared power decay at infinity; None means faster than any power."""
        return None

    @property
    def origin_exponent(self):
        """Power behavior u0 ~ r^origin_exponent as r -> 0 (0 when bounded)."""
        return 0.0

    @property
    def support_radius(self):
        """Radius of compact support, or None if unbounded."""
        return None

    def quad_knots(self):
        """Interior radii quadrature panels should align with (dense kinks)."""
        return None

    def decay_radius(self, tol=1e-9):
        """Radius beyond which |u0| is below tol * (profile scale)."""
        raise NotImplementedError

    def breakpoints(self):
        """Radii where u0 is not smooth (for quadrature panel splitting)."""
        return ()

    def dilate(self, lam):
        """Profile of x -> u(lam * x)."""
        raise NotImplementedError

    def _check_dim(self):
        if not isinstance(self.dim, int) or self.dim < 1:
            raise DomainError("dimension must be an integer >= 1")


@dataclass(frozen=True)
class Gaussian(RadialProfile):
    """u0(r) = exp(-r^2 / (2 sigma^2))."""

    dim: int
    sigma: float = 1.0

    def __post_init__(self):
        self._check_dim()
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError("sigma must be positive and finite")

    def values(self, r):
        return np.exp(-0.5 * (r / self.sigma) ** 2)

    def decay_radius(self, tol=1e-9):
        return self.sigma * math.sqrt(2.0 * math.log(1.0 / tol))

    def dilate(self, lam):
        return Gaussian(self.dim, self.sigma / lam)


@dataclass(frozen=True)
class SmoothBump(RadialProfile):
    """C^infinity cutoff exp(1 - 1/(1-z^2)) with z = (r-center)/width, |z|<1."""

    dim: int
    center: float = 1.0
    width: float = 0.5

    def __post_init__(self):
        self._check_dim()
        if self.width <= 0 or self.center < 0:
            raise DomainError("need width > 0 and center >= 0")

    def values(self, r):
        z = (r - self.center) / self.width
        out = np.zeros_like(z)
        inside = np.abs(z) < 1.0
        zi = z[inside]
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - zi * zi))
        return out

    @property
    def support_radius(self):
        return self.center + self.width

    def decay_radius(self, tol=1e-9):
        return self.support_radius

    def breakpoints(self):
        lo = self.center - self.width
        return tuple(p for p in (lo, self.support_radius) if p > 0)

    def quad_knots(self):
        # flanks vary violently; cluster panel edges toward the support ends
        t = -np.cos(np.linspace(0.0, np.pi, 33))
        kn = self.center + self.width * t
        return kn[kn > 0]

    def dilate(self, lam):
        return SmoothBump(self.dim, self.center / lam, self.width / lam)


@dataclass(frozen=True)
class PowerCutoff(RadialProfile):
    """u0(r) = (r/cutoff)^(-exponent) on (0, cutoff], zero beyond.

    For exponent > 0 the profile is singular at the origin (the value grows
    like r^-exponent); it is still locally integrable whenever
    exponent < dim, which callers must ensure per use.
    """

    dim: int
    exponent: float = 1.0
    cutoff: float = 1.0

    def __post_init__(self):
        self._check_dim()
        if self.cutoff <= 0 or not math.isfinite(self.exponent):
            raise DomainError("need cutoff > 0 and finite exponent")

    def values(self, r):
        out = np.zeros_like(r)
        inside = (r <= self.cutoff) & (r > 0)
        out[inside] = (r[inside] / self.cutoff) ** (-self.exponent)
        if self.exponent < 0:
            out[r == 0.0] = 0.0
        elif self.exponent == 0:
            out[r == 0.0] = 1.0
        else:
            out[r == 0.0] = np.inf
        return out

    @property
    def origin_exponent(self):
        return -self.exponent

    @property
    def support_radius(self):
        return self.cutoff

    def decay_radius(self, tol=1e-9):
        return self.cutoff

    def breakpoints(self):
        return (self.cutoff,)

    def dilate(self, lam):
        return PowerCutoff(self.dim, self.exponent, self.cutoff / lam)


@dataclass(frozen=True)
class PowerTail(RadialProfile):
    """Smooth profile (1 + (r/scale)^2)^(-exponent/2) with power tail r^-exponent."""

    dim: int
    exponent: float = 4.0
    scale: float = 1.0

    def __post_init__(self):
        self._check_dim()
        if self.scale <= 0 or self.exponent <= 0:
            raise DomainError("need scale > 0 and exponent > 0")

    def values(self, r):
        return (1.0 + (r / self.scale) ** 2) ** (-0.5 * self.exponent)

    @property
    def tail_exponent(self):
        return -self.exponent

    def decay_radius(self, tol=1e-9):
        return self.scale * tol ** (-1.0 / self.exponent)

    def dilate(self, lam):
        return PowerTail(self.dim, self.exponent, self.scale / lam)


@dataclass(frozen=True)
class AnnulusIndicator(RadialProfile):
    """Indicator of the annulus r1 <= r <= r2 (a ball when r1 = 0)."""

    dim: int
    r1: float = 1.0
    r2: float = 2.0

    def __post_init__(self):
        self._check_dim()
        if not (0 <= self.r1 < self.r2) or not math.isfinite(self.r2):
            raise DomainError("need 0 <= r1 < r2 < inf")

    def values(self, r):
        return np.where((r >= self.r1) & (r <= self.r2), 1.0, 0.0)

    @property
    def support_radius(self):
        return self.r2

    def decay_radius(self, tol=1e-9):
        return self.r2

    def breakpoints(self):
        return tuple(p for p in (self.r1, self.r2) if p > 0)

    def dilate(self, lam):
        return AnnulusIndicator(self.dim, self.r1 / lam, self.r2 / lam)


@dataclass(frozen=True)
class Sampled(RadialProfile):
    """Profile given by values on a strictly increasing positive grid.

    Interpolation between nodes is log-linear when both bracketing values
    are positive, linear otherwise.  Below the first node the value is
    continued as a constant; beyond the last node it follows the declared
    power tail  u0(r) = v_last * (r / r_last)^tail_exponent.
    """

    dim: int
    radii: tuple
    vals: tuple
    tail_exp: float = -math.inf

    def __post_init__(self):
        self._check_dim()
        r = np.asarray(self.radii, dtype=float)
        v = np.asarray(self.vals, dtype=float)
        if r.ndim != 1 or v.shape != r.shape or len(r) < 2:
            raise DomainError("need matching 1-D radii/values with >= 2 nodes")
        if r[0] <= 0 or np.any(np.diff(r) <= 0):
            raise DomainError("sampled radii must be positive and strictly increasing")
        if not np.all(np.isfinite(v)):
            raise DomainError("sampled values must be finite")
        if math.isnan(self.tail_exp):
            raise DomainError("tail exponent must be declared (may be -inf)")
        object.__setattr__(self, "radii", tuple(float(x) for x in r))
        object.__setattr__(self, "vals", tuple(float(x) for x in v))

    @property
    def _arrays(self):
        cached = getattr(self, "_arr_cache", None)
        if cached is None:
            r = np.asarray(self.radii)
            v = np.asarray(self.vals)
            logr = np.log(r)
            pos = v > 0
            # log-linear between node pairs where both values are positive
            both_pos = pos[:-1] & pos[1:]
            logv = np.where(pos, np.log(np.where(pos, v, 1.0)), 0.0)
            cached = (r, v, logr, logv, both_pos)
            object.__setattr__(self, "_arr_cache", cached)
        return cached

    def values(self, r):
        rr, vv, logr, logv, both_pos = self._arrays
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        below = r <= rr[0]
        above = r >= rr[-1]
        mid = ~(below | above)
        out[below] = vv[0]
        if np.any(above):
            ra = r[above]
            if math.isinf(self.tail_exp):
                out[above] = np.where(ra == rr[-1], vv[-1], 0.0)
            else:
                out[above] = vv[-1] * (ra / rr[-1]) ** self.tail_exp
        if np.any(mid):
            rm = r[mid]
            idx = np.searchsorted(rr, rm, side="right") - 1
            idx = np.clip(idx, 0, len(rr) - 2)
            t = (np.log(rm) - logr[idx]) / (logr[idx + 1] - logr[idx])
            loglin = np.exp(logv[idx] * (1.0 - t) + logv[idx + 1] * t)
            tlin = (rm - rr[idx]) / (rr[idx + 1] - rr[idx])
            lin = vv[idx] * (1.0 - tlin) + vv[idx + 1] * tlin
            out[mid] = np.where(both_pos[idx], loglin, lin)
        return out

    @property
    def tail_exponent(self):
        return None if math.isinf(self.tail_exp) else self.tail_exp

    @property
    def support_radius(self):
        return self.radii[-1] if math.isinf(self.tail_exp) else None

    def decay_radius(self, tol=1e-9):
        rr = np.asarray(self.radii)
        vv = np.abs(np.asarray(self.vals))
        peak = vv.max()
        if peak == 0.0 or math.isinf(self.tail_exp):
            return self.radii[-1]
        if vv[-1] <= tol * peak:
            keep = np.nonzero(vv > tol * peak)[0]
            return float(rr[min(keep[-1] + 1, len(rr) - 1)]) if len(keep) else self.radii[-1]
        # extrapolate the declared tail down to the threshold
        return float(rr[-1] * (tol * peak / vv[-1]) ** (1.0 / self.tail_exp))

    def breakpoints(self):
        return (self.radii[0], self.radii[-1])

    def quad_knots(self):
        return self._arrays[0]

    def dilate(self, lam):
        return Sampled(self.dim, tuple(r / lam for r in self.radii), self.vals, self.tail_exp)


@dataclass(frozen=True)
class SampledSmooth(Sampled):
    """Sampled profile with C^2 cubic-spline interpolation.

    Used for operator outputs (transforms, potentials) whose downstream
    consumers difference or re-integrate the values: the spline keeps the
    interpolation error at fourth order and avoids the kink noise of the
    piecewise log-linear rule.  Interpolation runs in (log r, log v) when
    all values are positive (exact on power laws), else in (log r, v).
    Extrapolation rules (constant below, declared power tail above) match
    the plain sampled contract.
    """

    @property
    def _spline(self):
        cached = getattr(self, "_spline_cache", None)
        if cached is None:
            from scipy.interpolate import CubicSpline

            r = np.asarray(self.radii)
            v = np.asarray(self.vals)
            logmode = bool(np.all(v > 0))
            if logmode:
                sp = CubicSpline(np.log(r), np.log(v))
            else:
                sp = CubicSpline(np.log(r), v)
            cached = (sp, logmode, r[0], r[-1])
            object.__setattr__(self, "_spline_cache", cached)
        return cached

    def values(self, r):
        sp, logmode, r_lo, r_hi = self._spline
        rr, vv = np.asarray(self.radii), np.asarray(self.vals)
        r = np.asarray(r, dtype=float)
        out = np.empty_like(r)
        below = r <= r_lo
        above = r >= r_hi
        mid = ~(below | above)
        out[below] = vv[0]
        if np.any(above):
            ra = r[above]
            if math.isinf(self.tail_exp):
                out[above] = np.where(ra == r_hi, vv[-1], 0.0)
            else:
                out[above] = vv[-1] * (ra / r_hi) ** self.tail_exp
        if np.any(mid):
            val = sp(np.log(r[mid]))
            out[mid] = np.exp(val) if logmode else val
        return out


def eval_profile(u: RadialProfile, r):
    """Evaluate u0 at r >= 0 (scalar or array); deterministic and pure."""
    arr = np.asarray(r, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise DomainError("radius must be finite")
    if np.any(arr < 0):
        raise DomainError("radius must be nonnegative")
    out = u.values(arr if arr.ndim else arr.reshape(1))
    return float(out[0]) if arr.ndim == 0 else out


# ---------------------------------------------------------------------------
# spherical geometry


def surface_area(n: int) -> float:
    """Area of the unit sphere S^{n-1} in R^n: 2 pi^{n/2} / Gamma(n/2)."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError("dimension must be an integer >= 1")
    return 2.0 * math.pi ** (n / 2.0) / math.gamma(n / 2.0)


@lru_cache(maxsize=64)
def jacobi_rule(n: int, order: int = 48):
    """Gauss-Jacobi nodes/weights for weight (1-t^2)^((n-3)/2) on (-1, 1),
    normalized so the weights sum to 1 (probability measure of the sphere
    cosine).  For n = 1 the measure is the two-point average at t = +-1."""
    if n == 1:
        return np.array([-1.0, 1.0]), np.array([0.5, 0.5])
    alpha = (n - 3) / 2.0
    t, w = roots_jacobi(order, alpha, alpha)
    return t, w / w.sum()


def sphere_mean(u: RadialProfile, rho: float, h: float, order: int = 48) -> float:
    """Mean of u over the sphere of radius h centered at distance rho from 0.

    Reduces to the cosine integral with weight (1-t^2)^((n-3)/2) for n >= 2
    and to the two-point average for n = 1.  Equals u0(rho) when h = 0.
    """
    if rho < 0 or h < 0:
        raise DomainError("rho and h must be nonnegative")
    if h == 0.0:
        return eval_profile(u, rho)
    t, w = jacobi_rule(u.dim, order)
    rad = np.sqrt(np.maximum(rho * rho + h * h + 2.0 * rho * h * t, 0.0))
    return float(np.dot(w, u(rad)))


def sphere_mean_many(u: RadialProfile, rho: float, hs, order: int = 48):
    """Vectorized sphere_mean over an array of sphere radii hs."""
    hs = np.asarray(hs, dtype=float)
    t, w = jacobi_rule(u.dim, order)
    rad = np.sqrt(np.maximum(rho * rho + hs[:, None] ** 2
                             + 2.0 * rho * hs[:, None] * t[None, :], 0.0))
    vals = u(rad.ravel()).reshape(rad.shape)
    return vals @ w
