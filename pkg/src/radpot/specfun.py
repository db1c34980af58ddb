"""Special functions behind the kernels: Gamma, Bessel J, its zeros, and
the kernel of the resolvent-type potential G_s.

G_s is evaluated directly from its subordination integral

    G_s(r) = (2 sqrt(pi))^-n / Gamma(s/2) *
             int_0^inf exp(-t) exp(-r^2/(4t)) t^((s-n)/2) dt/t

with the log substitution t = e^u (the integrand decays doubly
exponentially in u on both sides), so no modified-Bessel dependency is
needed.  Near the origin G_s(r) ~ riesz_constant(n, s) * r^(s-n); at
infinity it is dominated by C * exp(-r/2).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import jv

from . import _quad
from .core import Grid, surface_area
from .errors import DomainError

__all__ = [
    "BesselOrder", "gamma_fn", "bessel_j", "bessel_zero", "bessel_zeros_upto",
    "kernel_gs", "KernelGs", "riesz_constant",
]


@dataclass(frozen=True)
class BesselOrder:
    """Order nu >= -1/2: the regime where sqrt(x)|J_nu(x)| stays bounded."""

    nu: float

    def __post_init__(self):
        if not (self.nu >= -0.5 and math.isfinite(self.nu)):
            raise DomainError("Bessel order must satisfy nu >= -1/2")


def gamma_fn(x: float) -> float:
    """Gamma(x) for x not a nonpositive integer."""
    if not math.isfinite(x):
        raise DomainError("gamma argument must be finite")
    if x <= 0 and x == int(x):
        raise DomainError(f"gamma pole at {x}")
    return math.gamma(x)


def _order(nu) -> float:
    return nu.nu if isinstance(nu, BesselOrder) else BesselOrder(float(nu)).nu


def bessel_j(nu, x):
    """J_nu(x) for x >= 0, vectorized over x."""
    v = _order(nu)
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr < 0):
        raise DomainError("argument must be finite and nonnegative")
    out = jv(v, arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


# zero tables are extend-only; guarded for concurrent callers
_ZEROS: dict[float, list] = {}
_ZEROS_LOCK = threading.Lock()


def _extend_zeros(v: float, k: int):
    zs = _ZEROS.setdefault(v, [])
    # scan forward in steps below the minimal gap between consecutive zeros
    step = math.pi / 4.0
    if zs:
        x = zs[-1] + 1e-9
    else:
        # J_nu > 0 on (0, nu]; first zero lies above nu
        x = max(v, 0.0) + 1e-6
    fx = jv(v, x)
    while len(zs) < k:
        x2 = x + step
        fx2 = jv(v, x2)
        if fx == 0.0:
            zs.append(x)
            x, fx = x2, fx2
            continue
        if fx * fx2 < 0:
            root = brentq(lambda t: jv(v, t), x, x2, xtol=1e-15, rtol=8.9e-16)
            # one Newton polish: J_nu' = (J_{nu-1} - J_{nu+1}) / 2
            dj = 0.5 * (jv(v - 1.0, root) - jv(v + 1.0, root))
            if dj != 0.0:
                root -= jv(v, root) / dj
            zs.append(float(root))
        x, fx = x2, fx2


def bessel_zero(nu, k: int) -> float:
    """The k-th positive zero j_{nu,k}, refined to near machine precision."""
    v = _order(nu)
    if k < 1:
        raise DomainError("zero index must be >= 1")
    with _ZEROS_LOCK:
        if len(_ZEROS.get(v, ())) < k:
            _extend_zeros(v, k)
        return _ZEROS[v][k - 1]


def bessel_zeros_upto(nu, k: int) -> np.ndarray:
    """First k positive zeros of J_nu as an array."""
    v = _order(nu)
    with _ZEROS_LOCK:
        if len(_ZEROS.get(v, ())) < k:
            _extend_zeros(v, k)
        return np.array(_ZEROS[v][:k])


# ---------------------------------------------------------------------------
# the potential kernel G_s


def riesz_constant(n: int, s: float) -> float:
    """Normalization Gamma((n-s)/2) / (2^s pi^(n/2) Gamma(s/2)).

    Makes the power kernel c(n,s) |x|^(s-n) the integral realization of the
    inverse fractional Laplacian with Fourier symbol |omega|^-s; it is also
    the r -> 0 limit of G_s(r) r^(n-s).
    """
    if not (0 < s < n):
        raise DomainError("need 0 < s < n")
    return gamma_fn((n - s) / 2.0) / (2.0 ** s * math.pi ** (n / 2.0) * gamma_fn(s / 2.0))


def _gs_integrand_log(u, r2, half_sn):
    eu = np.exp(u)
    return np.exp(-eu - r2 / (4.0 * eu) + half_sn * u)


def kernel_gs(n: int, s: float, r) -> float | np.ndarray:
    """G_s(r) for r > 0, 0 < s < n, by quadrature of the subordination
    integral in the log variable."""
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError("dimension must be an integer >= 1")
    if not (0 < s < n):
        raise DomainError("need 0 < s < n")
    arr = np.asarray(r, dtype=float)
    if np.any(arr <= 0) or not np.all(np.isfinite(arr)):
        raise DomainError("radius must be positive and finite")
    pref = (2.0 * math.sqrt(math.pi)) ** (-n) / gamma_fn(s / 2.0)
    half_sn = 0.5 * (s - n)
    out = np.empty(arr.size)
    flat = arr.ravel()
    for i, ri in enumerate(flat):
        r2 = ri * ri
        # integrand peaks near u* and decays doubly exponentially either side
        ustar = math.log(0.5 * (half_sn + math.sqrt(half_sn * half_sn + r2)) + 1e-300)
        lo = min(ustar, 2.0 * math.log(ri / 2.0 + 1e-300)) - 75.0
        hi = max(ustar, 0.0) + 45.0
        val, _ = _quad.adaptive_gk(
            lambda u: _gs_integrand_log(u, r2, half_sn), lo, hi,
            rel_tol=1e-12, abs_tol=1e-280, max_panels=4096,
            breakpoints=list(np.linspace(lo, hi, 17)[1:-1]),
        )
        out[i] = pref * val
    out = out.reshape(arr.shape)
    return float(out) if arr.ndim == 0 else out


def _gs_bulk(n: int, s: float, radii: np.ndarray) -> np.ndarray:
    """Vectorized G_s over many radii with a fixed composite GK rule in the
    log variable (shared window, panel width 0.5)."""
    pref = (2.0 * math.sqrt(math.pi)) ** (-n) / gamma_fn(s / 2.0)
    half_sn = 0.5 * (s - n)
    r2 = radii * radii
    lo = 2.0 * math.log(radii.min() / 2.0) - 75.0
    hi = math.log(max(radii.max(), 1.0)) + 45.0
    edges = np.linspace(lo, hi, int((hi - lo) / 0.5) + 2)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (0.5 * (a + b))[:, None] + half[:, None] * _quad._XGK[None, :]
    u = nodes.ravel()
    eu = np.exp(u)
    # integrand for all radii at once: (n_r, n_nodes)
    expo = -eu[None, :] - r2[:, None] / (4.0 * eu[None, :]) + half_sn * u[None, :]
    with np.errstate(under="ignore"):
        fv = np.exp(expo)
    w = (half[:, None] * _quad._WGK[None, :]).ravel()
    return pref * (fv @ w)


@dataclass(frozen=True)
class KernelGs:
    """G_s evaluations cached on a two-zone grid; write-once and immutable.

    Zone 1 (r <= 2): log-spaced nodes, monotone cubic interpolation of
    log G_s against log r (the kernel is a near-power there).  Zone 2
    (r >= 2): uniform nodes, same interpolation against r (the kernel is
    near-exponential).  Below the grid the exact power asymptote
    riesz_constant * r^(s-n) applies; beyond it the kernel has decayed
    under 1e-40 of its r = 2 value and is treated as zero.
    """

    n: int
    s: float
    grid: Grid
    values: tuple

    R_SPLIT = 2.0
    R_MAX = 190.0

    @classmethod
    def build(cls, n: int, s: float, r_min: float = 1e-6):
        if not (0 < s < n):
            raise DomainError("need 0 < s < n")
        log_zone = np.geomspace(r_min, cls.R_SPLIT, int(128 * math.log10(cls.R_SPLIT / r_min)) + 1)
        lin_zone = np.arange(cls.R_SPLIT, cls.R_MAX + 0.05, 0.05)[1:]
        radii = np.concatenate([log_zone, lin_zone])
        grid = Grid(tuple(radii))
        vals = _gs_bulk(n, s, radii)
        return cls(n, s, grid, tuple(float(v) for v in vals))

    @property
    def _interp(self):
        cached = getattr(self, "_interp_cache", None)
        if cached is None:
            from scipy.interpolate import PchipInterpolator

            r = self.grid.array
            logv = np.log(np.maximum(np.asarray(self.values), 1e-320))
            split = np.searchsorted(r, self.R_SPLIT, side="right")
            low = PchipInterpolator(np.log(r[:split]), logv[:split], extrapolate=False)
            high = PchipInterpolator(r[split - 1:], logv[split - 1:], extrapolate=False)
            cached = (low, high, r[0], r[-1])
            object.__setattr__(self, "_interp_cache", cached)
        return cached

    def __call__(self, r):
        low, high, r_lo, r_hi = self._interp
        arr = np.asarray(r, dtype=float)
        out = np.zeros_like(arr)
        small = arr < r_lo
        if np.any(small):
            out[small] = riesz_constant(self.n, self.s) * arr[small] ** (self.s - self.n)
        zone1 = (arr >= r_lo) & (arr < self.R_SPLIT)
        if np.any(zone1):
            out[zone1] = np.exp(low(np.log(arr[zone1])))
        zone2 = (arr >= self.R_SPLIT) & (arr <= r_hi)
        if np.any(zone2):
            out[zone2] = np.exp(high(arr[zone2]))
        return out


_GS_CACHE: dict[tuple, KernelGs] = {}
_GS_LOCK = threading.Lock()


def gs_cached(n: int, s: float) -> KernelGs:
    """Shared immutable G_s cache per (n, s)."""
    key = (int(n), float(s))
    with _GS_LOCK:
        if key not in _GS_CACHE:
            _GS_CACHE[key] = KernelGs.build(n, s)
        return _GS_CACHE[key]
