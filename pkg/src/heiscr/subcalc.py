"""Horizontal calculus on H^n by finite differences.

With ``X_j = d/dx_j + 2 y_j d/dt`` and ``Y_j = d/dy_j - 2 x_j d/dt`` the
sub-Laplacian expands to

    sum_j [u_xx + u_yy + 4 y_j u_xt - 4 x_j u_yt] + 4 |z|^2 u_tt,

and every partial is taken by central differences (3-point for pure second
derivatives, 4-point cross stencil for mixed ones) with Richardson
extrapolation at step ratio 2.  Steps scale anisotropically with the point:
``h (1 + |a|_H)`` in x, y and ``h (1 + |a|_H)^2`` in t.

The module also carries closed-form derivatives of the bubble family, used as
an independent oracle for the finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crmaps import CRMap, GCRInversion, gcr_apply, jacobian_det_abs
from .errors import DomainError
from .fields import (
    BubbleParams,
    FBetaParams,
    ScalarField,
    alpha_beta_of,
    blackbox,
    kelvin_field,
)
from .hgroup import HPoint, dist, homogeneous_dimension, koranyi_norm
from .numerics import richardson

__all__ = [
    "DerivativeReport",
    "FDConfig",
    "calc_lemma_derivative_checks",
    "conformal_covariance_check",
    "exact_bubble_derivatives",
    "horizontal_gradient",
    "pde_residual_ratio",
    "sub_laplacian",
    "subcritical_residual_check",
]


@dataclass(frozen=True)
class FDConfig:
    h: float = 1e-3
    richardson_levels: int = 2

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise DomainError(f"FD step must be positive, got {self.h!r}")
        if not 1 <= self.richardson_levels <= 4:
            raise DomainError(
                f"richardson_levels must be in [1, 4], got {self.richardson_levels}")


DEFAULT_FD = FDConfig()


class _Stencil:
    """Evaluates ``u`` at coordinate offsets around a batch of points."""

    def __init__(self, u: ScalarField, a: HPoint, cfg: FDConfig):
        self.u = u
        self.c = a.coords()
        self.n = a.n
        scale = 1.0 + np.asarray(koranyi_norm(a), dtype=float)
        self.hz = cfg.h * scale
        self.ht = cfg.h * scale * scale

    def step(self, axis: int, level: int) -> np.ndarray:
        base = self.ht if axis == 2 * self.n else self.hz
        return base / 2.0 ** level

    def at(self, *shifts: tuple[int, np.ndarray]) -> np.ndarray:
        c = self.c.copy()
        for axis, delta in shifts:
            c[..., axis] += delta
        return np.asarray(self.u(HPoint.from_coords(c)), dtype=float)

    def d1(self, i: int, level: int) -> np.ndarray:
        h = self.step(i, level)
        return (self.at((i, h)) - self.at((i, -h))) / (2.0 * h)

    def d2(self, i: int, level: int, centre: np.ndarray) -> np.ndarray:
        h = self.step(i, level)
        return (self.at((i, h)) - 2.0 * centre + self.at((i, -h))) / (h * h)

    def d11(self, i: int, k: int, level: int) -> np.ndarray:
        hi, hk = self.step(i, level), self.step(k, level)
        return (self.at((i, hi), (k, hk)) - self.at((i, hi), (k, -hk))
                - self.at((i, -hi), (k, hk)) + self.at((i, -hi), (k, -hk))) / (4.0 * hi * hk)


def _extrapolate(levels: list[np.ndarray]) -> np.ndarray:
    return richardson(levels, ratio=2.0, order=2)


def horizontal_gradient(u: ScalarField, a: HPoint, cfg: FDConfig = DEFAULT_FD) -> np.ndarray:
    """``(X_1 u, ..., X_n u, Y_1 u, ..., Y_n u)`` at ``a``; shape ``(..., 2n)``."""
    st = _Stencil(u, a, cfg)
    n, c = a.n, st.c
    per_level = []
    for level in range(cfg.richardson_levels):
        ut = st.d1(2 * n, level)
        comps = []
        for j in range(n):
            comps.append(st.d1(j, level) + 2.0 * c[..., n + j] * ut)
        for j in range(n):
            comps.append(st.d1(n + j, level) - 2.0 * c[..., j] * ut)
        per_level.append(np.stack(comps, axis=-1))
    return _extrapolate(per_level)


def sub_laplacian(u: ScalarField, a: HPoint, cfg: FDConfig = DEFAULT_FD) -> np.ndarray | float:
    """``sum_j (X_j^2 + Y_j^2) u`` at ``a``."""
    st = _Stencil(u, a, cfg)
    n, c = a.n, st.c
    T = 2 * n
    centre = st.at()
    per_level = []
    for level in range(cfg.richardson_levels):
        r2 = np.sum(c[..., :T] ** 2, axis=-1)
        total = 4.0 * r2 * st.d2(T, level, centre)
        for j in range(n):
            x, y = c[..., j], c[..., n + j]
            total = total + st.d2(j, level, centre) + st.d2(n + j, level, centre)
            total = total + 4.0 * y * st.d11(j, T, level) - 4.0 * x * st.d11(n + j, T, level)
        per_level.append(total)
    out = _extrapolate(per_level)
    return float(out) if out.ndim == 0 else out


def exact_bubble_derivatives(params: BubbleParams | FBetaParams,
                             a: HPoint) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form ``(grad_H u, Delta_H u)`` for ``u = K |q|^(-2s)``.

    ``q = t + i|z|^2 + mu.z + kappa``.  With ``a_j = X_j q = 2i conj(z_j) + mu_j``
    one has ``Y_j q = i a_j`` and ``X_j^2 q = Y_j^2 q = 2i``, so for
    ``g = |q|^2``: ``X_j g = 2 Re(conj(q) a_j)``, ``Y_j g = -2 Im(conj(q) a_j)``,
    ``Delta_H g = 8n Im q + 4 sum |a_j|^2`` and
    ``|grad_H g|^2 = 4 |q|^2 sum |a_j|^2``.  Bubbles use ``s = (Q-2)/4``; the
    model functions ``f_beta`` are ``K = 1, mu = 0, kappa = i beta, s = nu/4``.
    """
    n = a.n
    if isinstance(params, FBetaParams):
        K, mu, kappa, s = 1.0, np.zeros(n, dtype=complex), 1j * params.beta, params.nu / 4.0
    else:
        K, mu, kappa = params.K, params.mu, params.kappa
        s = (homogeneous_dimension(n) - 2) / 4.0
    r2 = np.sum(np.abs(a.z) ** 2, axis=-1)
    q = a.t + 1j * r2 + np.sum(mu * a.z, axis=-1) + kappa
    g = np.abs(q) ** 2
    aj = 2j * np.conj(a.z) + mu
    A = np.sum(np.abs(aj) ** 2, axis=-1)
    qa = np.conj(q)[..., None] * aj
    grad_g = np.concatenate([2.0 * qa.real, -2.0 * qa.imag], axis=-1)
    lap_g = 8.0 * n * q.imag + 4.0 * A
    grad_u = (-s * K * g ** (-s - 1.0))[..., None] * grad_g
    lap_u = K * (-s * g ** (-s - 1.0) * lap_g + s * (s + 1.0) * g ** (-s - 2.0) * 4.0 * g * A)
    return grad_u, lap_u


def pde_residual_ratio(u: ScalarField, p: float, points: HPoint,
                       cfg: FDConfig = DEFAULT_FD) -> tuple[float, float]:
    """Mean and relative spread of ``-Delta_H u / u^p`` over ``points``.

    The spread is ``(max - min) / |mean|``; for a solution of
    ``-Delta_H u = c u^p`` it vanishes up to discretisation error.
    """
    vals = np.atleast_1d(np.asarray(u(points), dtype=float))
    if np.any(vals <= 0):
        raise DomainError("pde_residual_ratio needs u > 0 at every point")
    ratio = -np.atleast_1d(sub_laplacian(u, points, cfg)) / vals ** p
    mean = float(np.mean(ratio))
    spread = float(np.max(ratio) - np.min(ratio)) / abs(mean) if mean else float("inf")
    return mean, spread


def _rel_err(lhs, rhs) -> np.ndarray:
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    return np.abs(lhs - rhs) / np.maximum(np.abs(rhs), np.finfo(float).tiny)


def conformal_covariance_check(u: ScalarField, psi: CRMap, points: HPoint,
                               cfg: FDConfig = DEFAULT_FD) -> float:
    """Max relative error of ``u_psi^-p Delta_H u_psi = (u^-p Delta_H u) o psi``.

    ``p = (Q+2)/(Q-2)`` and ``u_psi = |J_psi|^((Q-2)/(2Q)) u o psi``, both sides
    by finite differences.  Points where ``psi`` is singular raise a
    SingularityError naming the offending primitive.
    """
    Q = u.Q
    expo = (Q + 2.0) / (Q - 2.0)
    weight = (Q - 2.0) / (2.0 * Q)
    image = psi(points)
    u_psi = blackbox(lambda a: jacobian_det_abs(psi, a) ** weight * u(psi(a)), u.n)
    lhs = np.asarray(u_psi(points)) ** (-expo) * sub_laplacian(u_psi, points, cfg)
    rhs = np.asarray(u(image)) ** (-expo) * sub_laplacian(u, image, cfg)
    return float(np.max(_rel_err(lhs, rhs)))


def subcritical_residual_check(u: ScalarField, p: float, xi: HPoint, lam: float,
                               beta: float, points: HPoint,
                               cfg: FDConfig = DEFAULT_FD) -> float:
    """Max relative error of the Kelvin-transformed equation with exponent ``p``.

    Checks ``-Delta_H u_K(zeta) = (lam / d(xi, zeta))^((Q+2) - (Q-2) p)
    u_K(zeta)^p g(Phi(zeta))`` where ``u_K`` is the Kelvin transform and
    ``g = -Delta_H u / u^p`` is the source ratio of ``u`` (identically 1 when
    ``u`` solves ``-Delta_H u = u^p``).  Both Laplacians are finite differences.
    """
    Q = u.Q
    if not 1.0 < p <= (Q + 2.0) / (Q - 2.0):
        raise DomainError(f"p must lie in (1, (Q+2)/(Q-2)] = (1, {(Q + 2) / (Q - 2):g}], got {p!r}")
    uk = kelvin_field(u, xi, lam, beta)
    image = gcr_apply(GCRInversion(xi, lam, beta), points)
    source = -np.asarray(sub_laplacian(u, image, cfg)) / np.asarray(u(image)) ** p
    factor = (lam / np.asarray(dist(xi, points))) ** ((Q + 2.0) - (Q - 2.0) * p)
    lhs = -np.asarray(sub_laplacian(uk, points, cfg))
    rhs = factor * np.asarray(uk(points)) ** p * source
    return float(np.max(_rel_err(lhs, rhs)))


@dataclass(frozen=True)
class DerivativeReport:
    """Max errors of the derivative identities for a max-at-origin field.

    ``t_ode``, ``x_partial`` and ``y_partial`` compare finite-difference
    partials with their closed forms; ``origin`` is the largest partial at the
    origin relative to ``f(0)``; the ``affine_*`` entries describe the fit of
    ``f(z, 0)^(-2/nu)`` against ``|z|^2``.
    """

    alpha: float
    beta: float
    t_ode: float
    x_partial: float
    y_partial: float
    origin: float
    affine_residual: float
    slope_error: float
    intercept_error: float

    @property
    def max_error(self) -> float:
        return max(self.t_ode, self.x_partial, self.y_partial, self.origin,
                   self.affine_residual, self.slope_error, self.intercept_error)


def _partials(f: ScalarField, a: HPoint, cfg: FDConfig) -> np.ndarray:
    """Plain coordinate partials ``(d_x.., d_y.., d_t)``; shape ``(..., 2n+1)``."""
    st = _Stencil(f, a, cfg)
    per_level = [np.stack([st.d1(i, lv) for i in range(2 * a.n + 1)], axis=-1)
                 for lv in range(cfg.richardson_levels)]
    return _extrapolate(per_level)


def calc_lemma_derivative_checks(f: ScalarField, nu: float, points: HPoint,
                                 cfg: FDConfig = DEFAULT_FD, *,
                                 alpha: float | None = None,
                                 beta: float | None = None) -> DerivativeReport:
    """Check the derivative identities satisfied by the classified profiles.

    For ``f`` with maximum at the origin and decay coefficient ``alpha``:

    * ``d_t f = -(nu/2) alpha^(-4/nu) t f^(1 + 4/nu)`` at ``points``;
    * ``d_{x_k} f(z, 0) = -nu alpha^(-2/nu) x_k f(z, 0)^(1 + 2/nu)`` and the same
      with ``y_k``, on the slice ``t = 0`` through ``points``;
    * ``f(z, 0)^(-2/nu)`` is affine in ``|z|^2`` with slope ``alpha^(-2/nu)`` and
      intercept ``alpha^(-2/nu) beta_f``.

    ``alpha`` and ``beta`` default to the ray-extrapolated decay coefficients.
    Slice errors are relative to the norm of the closed-form gradient.
    """
    if alpha is None or beta is None:
        est_alpha, est_beta = alpha_beta_of(f, nu)
        alpha = est_alpha if alpha is None else alpha
        beta = est_beta if beta is None else beta
    n = f.n
    a_m4 = alpha ** (-4.0 / nu)
    a_m2 = alpha ** (-2.0 / nu)

    vals = np.asarray(f(points), dtype=float)
    dt = _partials(f, points, cfg)[..., 2 * n]
    rhs_t = -(nu / 2.0) * a_m4 * points.t * vals ** (1.0 + 4.0 / nu)
    t_err = float(np.max(_rel_err(dt, rhs_t)))

    slice_pts = HPoint(points.z, np.zeros(points.shape))
    fs = np.asarray(f(slice_pts), dtype=float)
    grads = _partials(f, slice_pts, cfg)[..., :2 * n]
    coeff = (-nu * a_m2 * fs ** (1.0 + 2.0 / nu))[..., None]
    rhs_xy = coeff * np.concatenate([points.z.real, points.z.imag], axis=-1)
    scale = np.maximum(np.linalg.norm(rhs_xy, axis=-1), np.finfo(float).tiny)[..., None]
    err_xy = np.abs(grads - rhs_xy) / scale
    x_err = float(np.max(err_xy[..., :n]))
    y_err = float(np.max(err_xy[..., n:]))

    origin = HPoint.origin(n)
    at0 = _partials(f, origin, cfg)
    origin_err = float(np.max(np.abs(at0)) / float(f(origin)))

    F = fs.reshape(-1) ** (-2.0 / nu)
    r2 = np.sum(np.abs(slice_pts.z) ** 2, axis=-1).reshape(-1)
    design = np.stack([r2, np.ones_like(r2)], axis=1)
    (slope, intercept), *_ = np.linalg.lstsq(design, F, rcond=None)
    resid = float(np.max(np.abs(design @ np.array([slope, intercept]) - F)) / np.max(np.abs(F)))
    return DerivativeReport(
        alpha=float(alpha), beta=float(beta),
        t_ode=t_err, x_partial=x_err, y_partial=y_err, origin=origin_err,
        affine_residual=resid,
        slope_error=abs(slope - a_m2) / a_m2,
        intercept_error=abs(intercept - a_m2 * beta) / abs(a_m2 * beta),
    )
