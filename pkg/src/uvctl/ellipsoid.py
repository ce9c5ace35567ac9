"""Analytic exterior potentials for an ellipsoidal hull.

The hull is the ellipsoid (y1/c1)^2 + (y2/c2)^2 + (y3/c3)^2 <= 1 with
semi-axes c1 >= c2 >= c3 > 0.  Exterior space is described in confocal
coordinates: for a point y outside the hull, (lam, mu, nu) are the three
real roots of

    y1^2/(c1^2 + t) + y2^2/(c2^2 + t) + y3^2/(c3^2 + t) - 1 = 0,

with lam in (-c3^2, inf), mu in (-c2^2, -c3^2), nu in (-c1^2, -c2^2).
The hull surface is the level set lam = 0.

Two families of exterior harmonic potentials are provided:

* ``phi_i``   -- unit-translation potential along axis i, with Neumann data
  equal to the i-th normal component and decaying gradient at infinity.
  It has the separated form phi_i = y_i * xi_i(lam).
* ``varphi_i`` -- unit-rotation potential about axis i, of the form
  (y1 y2 y3 / y_i) * zeta_i(lam), with Neumann data (y x nu)_i.

The coefficients involve the elliptic shape integrals

    alpha_i = c1 c2 c3 * int_0^inf ds / ((c_i^2 + s) f(s)),
    beta_1  = c1 c2 c3 (c2^2 + c3^2) * int_0^inf ds / ((c2^2+s)(c3^2+s) f(s)),

(beta_2, beta_3 by cyclic permutation), where
f(s) = sqrt((c1^2+s)(c2^2+s)(c3^2+s)).  The alphas satisfy the sum rule
alpha_1 + alpha_2 + alpha_3 = 2 and take the value 2/3 on a sphere; the
betas tend to 4/5 in the equal-axes limit.

Semi-infinite integrals are evaluated with the substitution
s = s0 * t / (1 - t) followed by adaptive Gauss-Kronrod quadrature.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from .errors import GeometryError, NumericsError

_QUAD_EPSREL = 1e-12
_QUAD_CHECK = 1e-9
_DENOM_GUARD = 1e-6
_EQUAL_AXES_TOL = 1e-9
_BOUNDARY_TOL = 1e-8


def _cyclic(i):
    """Indices (j, k) completing {0,1,2} after i, in cyclic order."""
    return (i + 1) % 3, (i + 2) % 3


@dataclass(frozen=True)
class EllipsoidGeometry:
    """Ellipsoid semi-axes, ordered c1 >= c2 >= c3 > 0.

    The shape integrals alpha_i and beta_i are computed at construction and
    the construction fails fast if any coefficient denominator 2 - alpha_i
    or 2 - beta_i falls below 1e-6 in magnitude.
    """

    c1: float
    c2: float
    c3: float
    alphas: np.ndarray = field(init=False, repr=False, compare=False)
    betas: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (self.c1 >= self.c2 >= self.c3 > 0.0):
            raise GeometryError(
                f"semi-axes must satisfy c1 >= c2 >= c3 > 0, got "
                f"({self.c1}, {self.c2}, {self.c3})")
        alphas = np.array([_alpha_integral(self.axes, i) for i in range(3)])
        betas = np.array([_beta_integral(self.axes, i) for i in range(3)])
        for name, vals in (("alpha", alphas), ("beta", betas)):
            bad = np.abs(2.0 - vals) < _DENOM_GUARD
            if bad.any():
                i = int(np.argmax(bad))
                raise GeometryError(
                    f"coefficient denominator 2 - {name}_{i + 1} = "
                    f"{2.0 - vals[i]:.3e} is too close to zero")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "betas", betas)

    @property
    def axes(self):
        return (self.c1, self.c2, self.c3)

    @property
    def axes_sq(self):
        return np.array([self.c1 ** 2, self.c2 ** 2, self.c3 ** 2])

    @property
    def volume(self):
        return 4.0 * np.pi / 3.0 * self.c1 * self.c2 * self.c3

    def is_spheroidal_pair(self, j, k):
        """True when axes j and k are equal within the degeneracy tolerance."""
        cj, ck = self.axes[j], self.axes[k]
        return abs(cj - ck) <= _EQUAL_AXES_TOL * max(cj, ck)

    def boundary_residual(self, y):
        y = np.asarray(y, dtype=float)
        return (y ** 2 / self.axes_sq).sum(axis=-1) - 1.0


def _f_poly(axes, s):
    c1, c2, c3 = axes
    return np.sqrt((c1 * c1 + s) * (c2 * c2 + s) * (c3 * c3 + s))


def _semi_infinite(integrand, scale, lower=0.0):
    """Integrate ``integrand(s)`` on [lower, inf) via s = lower + scale*t/(1-t)."""

    def transformed(t):
        s = lower + scale * t / (1.0 - t)
        return integrand(s) * scale / (1.0 - t) ** 2

    value, err = quad(transformed, 0.0, 1.0, epsabs=1e-300,
                      epsrel=_QUAD_EPSREL, limit=200)
    if err > _QUAD_CHECK * (abs(value) + 1e-300):
        raise NumericsError(
            f"semi-infinite quadrature achieved only {err:.3e} absolute error "
            f"for value {value:.6e}")
    return value


@lru_cache(maxsize=512)
def _alpha_integral(axes, i):
    c1, c2, c3 = axes
    ci2 = axes[i] ** 2
    return c1 * c2 * c3 * _semi_infinite(
        lambda s: 1.0 / ((ci2 + s) * _f_poly(axes, s)), c3 * c3)


@lru_cache(maxsize=512)
def _beta_integral(axes, i):
    c1, c2, c3 = axes
    j, k = _cyclic(i)
    cj2, ck2 = axes[j] ** 2, axes[k] ** 2
    return (c1 * c2 * c3 * (cj2 + ck2) * _semi_infinite(
        lambda s: 1.0 / ((cj2 + s) * (ck2 + s) * _f_poly(axes, s)), c3 * c3))


def elliptic_alpha(geom: EllipsoidGeometry, i: int) -> float:
    """Shape integral alpha_i for axis i in {0, 1, 2}."""
    return float(geom.alphas[i])


def elliptic_beta(geom: EllipsoidGeometry, i: int) -> float:
    """Shape integral beta_i for axis i in {0, 1, 2}."""
    return float(geom.betas[i])


# ---------------------------------------------------------------------------
# Confocal coordinates
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConfocalCoords:
    lam: float
    mu: float
    nu: float


def _cubic_coefficients(geom, y):
    """Monic cubic t^3 + a t^2 + b t + c whose roots are (lam, mu, nu)."""
    cs = geom.axes_sq
    y2 = np.asarray(y, dtype=float) ** 2
    a = cs.sum() - y2.sum()
    b = (cs[0] * cs[1] + cs[0] * cs[2] + cs[1] * cs[2]
         - y2[0] * (cs[1] + cs[2]) - y2[1] * (cs[0] + cs[2])
         - y2[2] * (cs[0] + cs[1]))
    c = cs.prod() - y2[0] * cs[1] * cs[2] - y2[1] * cs[0] * cs[2] - y2[2] * cs[0] * cs[1]
    return a, b, c


def _cubic_residual(geom, y, t):
    y2 = np.asarray(y, dtype=float) ** 2
    return (y2 / (geom.axes_sq + t)).sum() - 1.0


def lambda_root(geom: EllipsoidGeometry, y) -> float:
    """Largest confocal root for an exterior (or boundary) point.

    Bracketed bisection/Newton on the rational form; lam >= 0 up to the
    boundary tolerance, and lam = 0 exactly on the hull.
    """
    y = np.asarray(y, dtype=float)
    e = geom.boundary_residual(y)
    if e < -_BOUNDARY_TOL:
        raise GeometryError(f"point lies strictly inside the hull (residual {e:.3e})")
    y2 = y ** 2
    cs = geom.axes_sq
    r2 = y2.sum()
    lo = max(r2 - cs[0], 0.0)
    hi = max(r2 - cs[2], lo + 1e-30)

    def g(t):
        return (y2 / (cs + t)).sum() - 1.0

    # g is strictly decreasing on (-c3^2, inf); expand the bracket on the
    # rare occasions rounding puts the root marginally outside it.
    glo = g(lo)
    if glo < 0.0:
        width = max(hi - lo, 1e-12 * (1.0 + r2))
        while glo < 0.0 and lo > -cs[2]:
            lo = max(lo - width, -cs[2] * (1.0 - 1e-15))
            glo = g(lo)
            width *= 2.0
    while g(hi) > 0.0:
        hi = 2.0 * hi + 1.0

    t = 0.5 * (lo + hi)
    for _ in range(200):
        gt = g(t)
        if gt > 0.0:
            lo = t
        else:
            hi = t
        dg = -(y2 / (cs + t) ** 2).sum()
        step = gt / dg
        t_new = t - step
        if not (lo < t_new < hi):
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= 1e-15 * (1.0 + abs(t)):
            t = t_new
            break
        t = t_new
    return float(t)


def _polish_inner_root(geom, y, t0, lo, hi):
    """Newton-polish a deflated root on the rational form, kept in (lo, hi).

    Near a coordinate plane the rational form has a pole next to the root
    and the deflated value, accurate for the cubic, can carry an amplified
    rational residual.  Roots at an interval endpoint (a hull coordinate
    plane) are left untouched: there the rational form is singular and the
    endpoint itself is the limit value.
    """
    y2 = np.asarray(y, dtype=float) ** 2
    cs = geom.axes_sq
    width = hi - lo
    if min(t0 - lo, hi - t0) <= 1e-12 * width:
        return t0
    t = t0
    for _ in range(60):
        den = cs + t
        if np.any(den == 0.0):
            break
        g = (y2 / den).sum() - 1.0
        dg = -(y2 / den ** 2).sum()
        if dg == 0.0:
            break
        t_new = t - g / dg
        if not (lo < t_new < hi):
            break
        if abs(t_new - t) <= 1e-16 * (1.0 + abs(t)):
            t = t_new
            break
        t = t_new
    return float(t)


def confocal_roots(geom: EllipsoidGeometry, y) -> ConfocalCoords:
    """All three confocal roots of an exterior or boundary point.

    lam is found by safeguarded Newton in its bracket; mu and nu come from
    deflating the cubic and are clipped into their defining intervals
    (points on a coordinate plane put a root exactly at an interval end).
    """
    if not (geom.c1 > geom.c2 > geom.c3):
        raise GeometryError("confocal coordinates require strictly ordered axes")
    y = np.asarray(y, dtype=float)
    lam = lambda_root(geom, y)
    a, b, c = _cubic_coefficients(geom, y)
    # synthetic division by (t - lam): t^2 + p t + q
    p = a + lam
    q = b + lam * p
    disc = max(p * p - 4.0 * q, 0.0)
    root = np.sqrt(disc)
    if p >= 0.0:
        s = -0.5 * (p + root)
    else:
        s = -0.5 * (p - root)
    r1, r2 = (s, q / s) if s != 0.0 else (-0.5 * p, -0.5 * p)
    nu, mu = sorted((r1, r2))

    cs = geom.axes_sq
    mu = float(np.clip(mu, -cs[1], -cs[2]))
    nu = float(np.clip(nu, -cs[0], -cs[1]))
    mu = _polish_inner_root(geom, y, mu, -cs[1], -cs[2])
    nu = _polish_inner_root(geom, y, nu, -cs[0], -cs[1])
    # Validate against the polynomial form; for points on a coordinate plane
    # a root sits at an interval endpoint where the rational form is singular.
    for t in (lam, mu, nu):
        q = ((t + a) * t + b) * t + c
        scale = abs(t) ** 3 + abs(a) * t * t + abs(b) * abs(t) + abs(c)
        if abs(q) > 1e-9 * max(scale, 1e-30):
            raise NumericsError(f"confocal root {t} has residual {q:.3e}")
    return ConfocalCoords(lam=lam, mu=mu, nu=nu)


# ---------------------------------------------------------------------------
# Potentials: radial profiles and coefficients
# ---------------------------------------------------------------------------

def _c_hat(geom, i):
    """Coefficient of the translation potential profile."""
    c1, c2, c3 = geom.axes
    return c1 * c2 * c3 / (2.0 - geom.alphas[i])


def _c_tilde(geom, i):
    """Coefficient of the rotation potential profile; exactly 0 for equal axes."""
    j, k = _cyclic(i)
    if geom.is_spheroidal_pair(j, k):
        return 0.0
    c1, c2, c3 = geom.axes
    cj2, ck2 = geom.axes[j] ** 2, geom.axes[k] ** 2
    return c1 * c2 * c3 * (cj2 - ck2) / (2.0 - geom.betas[i])


def _xi(geom, i, lam):
    """Profile xi_i(lam) = -C_i int_lam^inf ds / ((c_i^2+s) f(s))."""
    ci2 = geom.axes_sq[i]
    axes = geom.axes
    tail = _semi_infinite(lambda s: 1.0 / ((ci2 + s) * _f_poly(axes, s)),
                          geom.c3 ** 2 + lam, lower=lam)
    return -_c_hat(geom, i) * tail


def _xi_prime(geom, i, lam):
    ci2 = geom.axes_sq[i]
    return _c_hat(geom, i) / ((ci2 + lam) * _f_poly(geom.axes, lam))


def _zeta(geom, i, lam):
    """Profile zeta_i(lam) = -Ct_i int_lam^inf (c_i^2+s) / f(s)^3 ds."""
    ct = _c_tilde(geom, i)
    if ct == 0.0:
        return 0.0
    ci2 = geom.axes_sq[i]
    axes = geom.axes
    tail = _semi_infinite(lambda s: (ci2 + s) / _f_poly(axes, s) ** 3,
                          geom.c3 ** 2 + lam, lower=lam)
    return -ct * tail


def _zeta_prime(geom, i, lam):
    ct = _c_tilde(geom, i)
    if ct == 0.0:
        return 0.0
    ci2 = geom.axes_sq[i]
    return ct * (ci2 + lam) / _f_poly(geom.axes, lam) ** 3


def _grad_lambda(geom, y, lam):
    """Gradient of the confocal coordinate lam by implicit differentiation."""
    y = np.asarray(y, dtype=float)
    cs = geom.axes_sq
    denom = (y ** 2 / (cs + lam) ** 2).sum(axis=-1)
    return (2.0 * y / (cs + lam)) / denom[..., None]


def _require_boundary(geom, y):
    e = np.abs(geom.boundary_residual(y))
    if np.any(e > _BOUNDARY_TOL):
        raise GeometryError(
            f"point is off the hull surface (max residual {float(np.max(e)):.3e})")


def _other_coords_product(y, i):
    j, k = _cyclic(i)
    return y[..., j] * y[..., k]


def _grad_other_coords_product(y, i):
    j, k = _cyclic(i)
    out = np.zeros_like(y)
    out[..., j] = y[..., k]
    out[..., k] = y[..., j]
    return out


# ---------------------------------------------------------------------------
# Boundary traces and gradients (vectorized over trailing point axis)
# ---------------------------------------------------------------------------

def phi_boundary(geom: EllipsoidGeometry, i: int, y) -> np.ndarray:
    """Boundary trace of the translation potential: -alpha_i/(2-alpha_i) y_i."""
    y = np.asarray(y, dtype=float)
    _require_boundary(geom, y)
    a = geom.alphas[i]
    return -a / (2.0 - a) * y[..., i]


def varphi_boundary(geom: EllipsoidGeometry, i: int, y) -> np.ndarray:
    """Boundary trace of the rotation potential; identically 0 on a sphere."""
    y = np.asarray(y, dtype=float)
    _require_boundary(geom, y)
    return _zeta(geom, i, 0.0) * _other_coords_product(y, i)


def grad_phi_boundary(geom: EllipsoidGeometry, i: int, y) -> np.ndarray:
    """Surface value of grad(phi_i); satisfies grad(phi_i).nu = nu_i."""
    y = np.asarray(y, dtype=float)
    _require_boundary(geom, y)
    xi0 = _xi(geom, i, 0.0)
    dxi0 = _xi_prime(geom, i, 0.0)
    grad = xi0 * np.eye(3)[i] * np.ones_like(y)
    grad = grad + y[..., i, None] * dxi0 * _grad_lambda(geom, y, 0.0)
    return grad


def grad_varphi_boundary(geom: EllipsoidGeometry, i: int, y) -> np.ndarray:
    """Surface value of grad(varphi_i); satisfies grad(varphi_i).nu = (y x nu)_i."""
    y = np.asarray(y, dtype=float)
    _require_boundary(geom, y)
    z0 = _zeta(geom, i, 0.0)
    dz0 = _zeta_prime(geom, i, 0.0)
    grad = z0 * _grad_other_coords_product(y, i)
    grad = grad + (_other_coords_product(y, i) * dz0)[..., None] * _grad_lambda(geom, y, 0.0)
    return grad


# ---------------------------------------------------------------------------
# Exterior evaluation (single points; used for decay/harmonicity checks)
# ---------------------------------------------------------------------------

def phi_exterior(geom: EllipsoidGeometry, i: int, y) -> float:
    lam = lambda_root(geom, y)
    return float(np.asarray(y)[i] * _xi(geom, i, lam))


def grad_phi_exterior(geom: EllipsoidGeometry, i: int, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    lam = lambda_root(geom, y)
    grad = _xi(geom, i, lam) * np.eye(3)[i].copy()
    grad = grad + y[i] * _xi_prime(geom, i, lam) * _grad_lambda(geom, y, lam)
    return grad


def varphi_exterior(geom: EllipsoidGeometry, i: int, y) -> float:
    lam = lambda_root(geom, y)
    return float(_other_coords_product(np.asarray(y, dtype=float), i)
                 * _zeta(geom, i, lam))


def grad_varphi_exterior(geom: EllipsoidGeometry, i: int, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    lam = lambda_root(geom, y)
    grad = _zeta(geom, i, lam) * _grad_other_coords_product(y, i)
    grad = grad + _other_coords_product(y, i) * _zeta_prime(geom, i, lam) \
        * _grad_lambda(geom, y, lam)
    return grad


# ---------------------------------------------------------------------------
# Quadrature grid on the hull surface
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SurfaceGrid:
    """Quadrature nodes on the hull: point, outward normal, y x n, weight."""

    points: np.ndarray    # (N, 3)
    normals: np.ndarray   # (N, 3), unit, pointing out of the body
    moments: np.ndarray   # (N, 3), y x n
    weights: np.ndarray   # (N,), area weights

    @property
    def area(self):
        return float(self.weights.sum())

    def integrate(self, values):
        """Weighted sum over nodes; ``values`` may carry trailing axes."""
        values = np.asarray(values)
        return np.tensordot(self.weights, values, axes=(0, 0))


def _mirrored_circle_table(n):
    """cos/sin at 2*pi*k/n, k=0..n-1, with exact reflection symmetry.

    Values are computed on the first quadrant only and extended by sign
    flips, so the node set is closed bitwise under all three reflections.
    """
    if n % 4 != 0:
        raise GeometryError("azimuthal node count must be divisible by 4")
    n4 = n // 4
    k = np.arange(n4 + 1)
    c = np.cos(0.5 * np.pi * k / n4)
    s = np.sin(0.5 * np.pi * k / n4)
    c[0], s[0] = 1.0, 0.0
    c[n4], s[n4] = 0.0, 1.0
    cos_t = np.empty(n)
    sin_t = np.empty(n)
    cos_t[: n4 + 1] = c
    sin_t[: n4 + 1] = s
    # second quadrant: phi -> pi - phi
    cos_t[n4: 2 * n4 + 1] = -c[::-1]
    sin_t[n4: 2 * n4 + 1] = s[::-1]
    # lower half: phi -> 2*pi - phi
    cos_t[2 * n4 + 1:] = cos_t[1: 2 * n4][::-1]
    sin_t[2 * n4 + 1:] = -sin_t[1: 2 * n4][::-1]
    return cos_t, sin_t


def surface_grid(geom: EllipsoidGeometry, n_polar: int = 64, n_azimuth: int = 128) -> SurfaceGrid:
    """Tensor quadrature grid: Gauss-Legendre in the polar variable t = y3/c3
    and uniform (trapezoid) nodes in azimuth.

    Both node families are symmetrized so the grid maps to itself exactly
    under each coordinate reflection; parity integrals then vanish to
    roundoff.  Smooth integrands converge spectrally.
    """
    if n_polar < 8 or n_azimuth < 16:
        raise GeometryError("surface grid resolution must be at least 8 x 16")
    t, wt = np.polynomial.legendre.leggauss(n_polar)
    t = 0.5 * (t - t[::-1])       # exactly antisymmetric nodes
    wt = 0.5 * (wt + wt[::-1])    # exactly symmetric weights
    cos_p, sin_p = _mirrored_circle_table(n_azimuth)
    wp = 2.0 * np.pi / n_azimuth

    c1, c2, c3 = geom.axes
    st = np.sqrt(1.0 - t ** 2)

    T = t[:, None]
    ST = st[:, None]
    CP = cos_p[None, :]
    SP = sin_p[None, :]

    x = c1 * ST * CP
    yy = c2 * ST * SP
    z = c3 * T * np.ones_like(CP)
    points = np.stack([x, yy, z], axis=-1).reshape(-1, 3)

    nx = c2 * c3 * ST * CP
    ny = c1 * c3 * ST * SP
    nz = c1 * c2 * T * np.ones_like(CP)
    raw = np.stack([nx, ny, nz], axis=-1).reshape(-1, 3)
    jac = np.linalg.norm(raw, axis=-1)
    normals = raw / jac[:, None]
    weights = (jac.reshape(n_polar, n_azimuth) * wt[:, None] * wp).reshape(-1)
    moments = np.cross(points, normals)
    return SurfaceGrid(points=points, normals=normals, moments=moments, weights=weights)
