"""Fourier transform of radial functions and radial Fourier multipliers.

The transform is fixed to the unitary convention

    F[u](omega) = (2 pi)^(-n/2) int u(x) exp(-i omega . x) dx,

under which a radial profile maps to the one-dimensional Bessel integral

    uhat(rho) = rho^(-nu) int_0^inf u0(r) J_nu(r rho) r^(n/2) dr,
    nu = n/2 - 1,

real radial profiles are even, forward and inverse transforms coincide,
Plancherel is exact, and exp(-r^2/2) is a fixed point.  Oscillatory
integrals are split at the zeros of J_nu and summed panel by panel, with
epsilon acceleration for slowly decaying tails.

Everything here is pure; dense frequency tables are built once and read
immutably afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _quad
from .core import (DEFAULT_SPEC, Grid, QuadratureSpec, RadialProfile,
                   SampledSmooth, eval_profile)
from .errors import DomainError
from .specfun import bessel_zeros_upto, gamma_fn, jv

__all__ = ["FourierConvention", "FOURIER_CONVENTION", "hankel_fourier",
           "hankel_values", "hankel_origin", "apply_multiplier", "SpectralTable",
           "dense_transform"]


@dataclass(frozen=True)
class FourierConvention:
    """Module-wide transform convention; not configurable."""

    sign: int = -1            # kernel exp(sign * i omega.x)
    normalization: str = "unitary"  # (2 pi)^(-n/2) on both directions


FOURIER_CONVENTION = FourierConvention()

_MAX_EXTRA_PANELS = 96


def _check_transformable(u: RadialProfile):
    te = u.tail_exponent
    if te is not None and te >= -(u.dim + 1) / 2.0:
        raise DomainError(
            f"tail exponent {te} too slow for an absolutely convergent "
            f"transform in dimension {u.dim} (need < -(n+1)/2)")


def hankel_origin(u: RadialProfile, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """uhat(0) = 2^(-nu)/Gamma(nu+1) * int_0^inf u0(r) r^(n-1) dr."""
    n = u.dim
    nu = 0.5 * n - 1.0
    r_cut = u.decay_radius(1e-13)
    te = u.tail_exponent
    if te is not None and te + n - 1 >= -1:
        raise DomainError("radial mass diverges for this tail exponent")

    def integrand(r):
        return u(r) * r ** (n - 1)

    edges = _panel_edges(0.0, r_cut, nu, list(u.breakpoints()), u.quad_knots())
    val = 0.0
    if u.origin_exponent < 0:
        head, _ = _quad.tanh_sinh(integrand, edges[0], edges[1],
                                  rel_tol=spec.rel_tol, abs_tol=spec.abs_tol)
        val += head
        edges = edges[1:]
    pv, _ = _quad.gk_panels(integrand, edges)
    val += float(np.sum(pv))
    if te is not None and u.support_radius is None:
        # analytic continuation of the declared power tail
        edge = float(u(np.array([r_cut]))[0])
        val += -edge * r_cut / (te + n)
    return 2.0 ** (-nu) / gamma_fn(nu + 1.0) * val


def _panel_edges(rho, r_cut, nu, bps, dense_knots=None):
    """Sorted panel edges on (0, r_cut]: Bessel zero crossings, profile
    kinks, and either the sample knots or a geometric ladder resolving the
    profile zone."""
    parts = [np.array([0.0, r_cut])]
    if rho > 0:
        kmax = int(rho * r_cut / math.pi) + 2
        zeros = bessel_zeros_upto(nu, kmax) / rho
        parts.append(zeros[zeros < r_cut])
    if dense_knots is not None:
        kn = dense_knots
        parts.append(kn[(kn > 0) & (kn < r_cut)])
    else:
        parts.append(np.geomspace(r_cut * 1e-6, r_cut, 40)[:-1])
    if bps:
        parts.append(np.array([b for b in bps if 0 < b < r_cut]))
    return np.unique(np.concatenate(parts))


def hankel_values(u: RadialProfile, rhos, spec: QuadratureSpec = DEFAULT_SPEC):
    """Transform values at given frequencies.  Returns (values, err_estimates).

    Panels are split at the zeros of J_nu(r rho), at profile kinks, and at
    every interpolation knot of sampled profiles (GK15 is then effectively
    exact per smooth piece).  A tanh-sinh head panel absorbs an origin
    singularity of the profile; power tails are summed over further
    oscillation cells with epsilon acceleration.
    """
    _check_transformable(u)
    n = u.dim
    nu = 0.5 * n - 1.0
    half_n = 0.5 * n
    r_cut_full = u.decay_radius(1e-12)
    r_cut_soft = u.decay_radius(1e-6)
    bps = list(u.breakpoints())
    knots = u.quad_knots()
    singular_origin = u.origin_exponent < 0
    has_power_tail = u.tail_exponent is not None and u.support_radius is None
    rhos = np.asarray(rhos, dtype=float)
    vals = np.empty(rhos.shape)
    errs = np.empty(rhos.shape)

    for i, rho in enumerate(rhos.ravel()):
        if rho == 0.0:
            vals.ravel()[i] = hankel_origin(u, spec)
            errs.ravel()[i] = spec.abs_tol
            continue

        def integrand(r, rho=rho):
            return u(r) * jv(nu, r * rho) * r ** half_n

        if has_power_tail:
            # cut where acceleration can take over, but keep enough
            # oscillation cells (or deep decay) before the cut
            r_cut = min(r_cut_full, max(r_cut_soft, 80.0 / rho))
        else:
            r_cut = r_cut_full
        edges = _panel_edges(rho, r_cut, nu, bps, knots)
        err = 0.0
        total = 0.0
        if singular_origin and len(edges) > 1:
            head, he = _quad.tanh_sinh(integrand, edges[0], edges[1],
                                       rel_tol=spec.rel_tol, abs_tol=spec.abs_tol)
            total += head
            err += he
            edges = edges[1:]
        if len(edges) > 1:
            pv, pe = _quad.gk_panels(integrand, edges)
            total += float(np.sum(pv))
            err += float(np.sum(pe))
        if has_power_tail:
            # continue over further oscillation cells and accelerate
            k0 = int(rho * r_cut / math.pi) + 2
            zs = bessel_zeros_upto(nu, k0 + _MAX_EXTRA_PANELS) / rho
            ext = zs[zs >= r_cut][:_MAX_EXTRA_PANELS]
            if len(ext) > 1:
                xv, xe = _quad.gk_panels(integrand, np.concatenate([[r_cut], ext]))
                resid = float(np.abs(xv[-3:]).max())
                plain = total + float(np.sum(xv))
                if resid > max(spec.abs_tol, 0.1 * spec.rel_tol * abs(plain)):
                    partial = total + np.cumsum(xv)
                    acc = _quad.accelerated_tail(list(partial))
                    if abs(acc - partial[-1]) <= 4.0 * resid:
                        err += min(resid, abs(acc - partial[-1]))
                        total = acc
                    else:
                        # extrapolation unreliable; keep the direct sum
                        total = plain
                        err += resid
                else:
                    total = plain
                    err += resid + float(xe.sum())
        scale = rho ** (-nu) if nu != 0 else 1.0
        vals.ravel()[i] = scale * total
        errs.ravel()[i] = scale * err
    return vals, errs


def hankel_fourier(u: RadialProfile, out_grid: Grid,
                   spec: QuadratureSpec = DEFAULT_SPEC,
                   tail_exponent: float | None = None) -> SampledSmooth:
    """Forward (= inverse) transform, sampled on ``out_grid``.

    The returned profile carries a conservative power-tail declaration
    (default -(n+2)); grids are normally sized so the edge values have
    already decayed to working precision.
    """
    vals, _ = hankel_values(u, out_grid.array, spec)
    te = -(u.dim + 2.0) if tail_exponent is None else float(tail_exponent)
    return SampledSmooth(u.dim, out_grid.radii, tuple(float(v) for v in vals), te)


# ---------------------------------------------------------------------------
# dense spectral tables for multiplier application


@dataclass(frozen=True)
class SpectralTable:
    """Immutable table of transform values on [0, rho_max].

    Knots consist of a geometric zone resolving any power behavior at the
    origin followed by a uniform zone resolving oscillation and curvature.
    Queries use a monotone-safe cubic spline per zone (in log-log
    coordinates on the geometric zone when all values there are positive).
    """

    dim: int
    knots: tuple
    vals: tuple
    split: int            # first index of the uniform zone
    origin_value: float
    origin_exponent: float

    @property
    def rho_max(self):
        return self.knots[-1]

    @property
    def _interp(self):
        cached = getattr(self, "_interp_cache", None)
        if cached is None:
            from scipy.interpolate import CubicSpline

            k = np.asarray(self.knots)
            v = np.asarray(self.vals)
            s = self.split
            geo_log = bool(np.all(v[:s + 1] > 0))
            if geo_log:
                low = CubicSpline(np.log(k[:s + 1]), np.log(v[:s + 1]))
            else:
                low = CubicSpline(np.log(k[:s + 1]), v[:s + 1])
            high = CubicSpline(k[s:], v[s:])
            cached = (k, v, low, high, geo_log)
            object.__setattr__(self, "_interp_cache", cached)
        return cached

    def __call__(self, rho):
        k, v, low, high, geo_log = self._interp
        rho = np.asarray(rho, dtype=float)
        out = np.zeros_like(rho)
        k_split = k[self.split]
        below = rho < k[0]
        geo = (rho >= k[0]) & (rho < k_split)
        uni = (rho >= k_split) & (rho <= k[-1])
        if np.any(below):
            if self.origin_exponent < 0:
                out[below] = v[0] * (rho[below] / k[0]) ** self.origin_exponent
            else:
                out[below] = self.origin_value + (v[0] - self.origin_value) * rho[below] / k[0]
        if np.any(geo):
            out[geo] = np.exp(low(np.log(rho[geo]))) if geo_log else low(np.log(rho[geo]))
        if np.any(uni):
            out[uni] = high(rho[uni])
        return out


def _hat_origin_exponent(u: RadialProfile) -> float:
    te = u.tail_exponent
    if te is None or te < -u.dim:
        return 0.0
    return -(u.dim + te)


def _points_per_wave(tol: float) -> float:
    if tol >= 1e-3:
        return 16.0
    if tol >= 3e-5:
        return 28.0
    return 44.0


def dense_transform(u: RadialProfile, tol: float = 1e-5,
                    mult_growth: float = 0.0,
                    spec: QuadratureSpec = DEFAULT_SPEC) -> SpectralTable:
    """Sample the transform densely enough that spline interpolation error
    stays below ``tol`` relative, extending until the (multiplier-weighted)
    envelope has decayed."""
    _check_transformable(u)
    r_scale = u.decay_radius(1e-9)
    drho = 2.0 * math.pi / (_points_per_wave(tol) * r_scale)
    origin = hankel_origin(u, spec)
    oe = _hat_origin_exponent(u)
    geo = np.geomspace(drho / 1e3, drho, 120)[:-1] if oe < 0 else \
        np.geomspace(drho / 64.0, drho, 24)[:-1]
    knots = [geo]
    vals = [hankel_values(u, geo, spec)[0]]
    peak = 0.0
    lo = drho
    batch = 192
    hard_cap = 1200.0 / r_scale
    while lo < hard_cap:
        chunk = lo + drho * np.arange(batch)
        chunk = chunk[chunk <= hard_cap + drho]
        if len(chunk) == 0:
            break
        v = hankel_values(u, chunk, spec)[0]
        knots.append(chunk)
        vals.append(v)
        wenv = np.abs(v) * np.maximum(1.0, chunk) ** mult_growth
        peak = max(peak, float(wenv.max()))
        if float(wenv[-25:].max()) < tol * 2e-2 * peak:
            break
        lo = chunk[-1] + drho
    k = np.concatenate(knots)
    v = np.concatenate(vals)
    return SpectralTable(u.dim, tuple(k), tuple(v), len(geo), origin, oe)


def _inverse_from_table(table: SpectralTable, m, r_out, n, spec):
    """Evaluate the profile with transform m(rho) * table(rho) at radii r_out."""
    nu = 0.5 * n - 1.0
    half_n = 0.5 * n
    rho_hi = table.rho_max

    knots = np.asarray(table.knots)
    # spline pieces are C^2: panels need only every third knot plus zeros
    coarse = np.unique(np.concatenate([knots[:table.split], knots[table.split::3],
                                       knots[-1:]]))
    out = np.empty(len(r_out))
    for i, r in enumerate(r_out):
        def integrand(rho, r=r):
            return table(rho) * m(rho) * jv(nu, rho * r) * rho ** half_n

        if r == 0.0:
            def radial(rho):
                return table(rho) * m(rho) * rho ** (n - 1)

            head, _ = _quad.tanh_sinh(radial, 0.0, coarse[0],
                                      rel_tol=spec.rel_tol, abs_tol=spec.abs_tol)
            pv, _ = _quad.gk_panels(radial, coarse)
            out[i] = 2.0 ** (-nu) / gamma_fn(nu + 1.0) * (head + float(np.sum(pv)))
            continue
        kmax = int(r * rho_hi / math.pi) + 2
        zeros = bessel_zeros_upto(nu, kmax) / r
        zeros = zeros[(zeros > 0) & (zeros < rho_hi)]
        # panels aligned with the (coarsened) table knots and kernel zeros;
        # a tanh-sinh head absorbs any integrable multiplier singularity
        edges = np.unique(np.concatenate([coarse, zeros]))
        head, _ = _quad.tanh_sinh(integrand, 0.0, edges[0],
                                  rel_tol=spec.rel_tol, abs_tol=spec.abs_tol)
        pv, _ = _quad.gk_panels(integrand, edges)
        total = head + float(np.sum(pv))
        out[i] = r ** (-nu) * total if nu != 0 else total
    return out


def apply_multiplier(u: RadialProfile, m, out_grid: Grid, *,
                     tol: float = 1e-5, tail_exponent: float | None = None,
                     mult_growth: float = 0.0,
                     spec: QuadratureSpec = DEFAULT_SPEC) -> SampledSmooth:
    """Profile whose transform is m(rho) * uhat(rho), sampled on out_grid.

    ``m`` is a vectorized function of rho >= 0; integrable power
    singularities of m at the origin are admissible.  ``mult_growth``
    hints the polynomial growth of m so the internal frequency table is
    extended far enough.
    """
    table = dense_transform(u, tol=tol, mult_growth=mult_growth, spec=spec)
    vals = _inverse_from_table(table, m, out_grid.array, u.dim, spec)
    te = -(u.dim + 2.0) if tail_exponent is None else float(tail_exponent)
    return SampledSmooth(u.dim, out_grid.radii, tuple(float(v) for v in vals), te)
