"""Seeded identity checks with machine-readable verdicts.

Every registered check draws its inputs from ``stream(seed, name, n)``, runs
over each dimension of its :class:`CheckSpec`, and reports the largest error
together with the input that produced it.  Floats in ``worst_input`` are
hexadecimal so a failure can be replayed exactly.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .crmaps import (
    CRInv,
    CRMap,
    Dilate,
    GCRInversion,
    Iota,
    Rotate,
    Translate,
    build_m,
    cr_inversion,
    fixed_point_center,
    gcr_apply,
    jacobian_det_abs,
    radius_from_decay,
)
from .errors import ConfigurationError, DomainError
from .fields import (
    BubbleParams,
    FBetaParams,
    ScalarField,
    alpha_beta_of,
    bubble,
    centered_bubble,
    constant,
    fbeta,
    fbeta_eval,
    kelvin,
    kelvin_field,
    lambda_of_xi,
)
from .hgroup import (
    HPoint,
    Unitary,
    dilate,
    dist,
    group_inv,
    group_mul,
    koranyi_norm,
    random_points,
    rotate,
)
from .movesphere import SphereConfig, estimate_lambda_underline
from .numerics import richardson
from .rng import stream
from .subcalc import (
    FDConfig,
    calc_lemma_derivative_checks,
    conformal_covariance_check,
    exact_bubble_derivatives,
    horizontal_gradient,
    pde_residual_ratio,
    sub_laplacian,
    subcritical_residual_check,
)

__all__ = [
    "CheckResult",
    "CheckSpec",
    "Witness",
    "comparison_falsifier",
    "default_suite",
    "registered_checks",
    "report_json",
    "run_suite",
]


@dataclass(frozen=True)
class CheckSpec:
    name: str
    paper_anchor: str
    dimensions: tuple[int, ...]
    samples: int
    seed: int
    tolerance: float

    def __post_init__(self) -> None:
        if not self.tolerance >= 0 or math.isnan(self.tolerance):
            raise ConfigurationError(f"{self.name}: tolerance must be >= 0")
        if self.samples < 1:
            raise ConfigurationError(f"{self.name}: samples must be >= 1")
        if not self.dimensions or any(n < 1 for n in self.dimensions):
            raise ConfigurationError(f"{self.name}: dimensions must be positive integers")


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    max_err: float | None
    worst_input: dict
    runtime_ms: float | None = None

    def to_dict(self) -> dict:
        return {"name": self.name, "pass": self.passed, "max_err": self.max_err,
                "worst_input": self.worst_input, "runtime_ms": self.runtime_ms}


# -- serialization helpers ------------------------------------------------------

def _hex(x: float) -> str:
    return float(x).hex()


def _hex_point(a: HPoint) -> list[str]:
    return [_hex(c) for c in np.asarray(a.coords(), dtype=float).reshape(-1)]


class _Worst:
    """Running maximum of an error together with the input that produced it."""

    def __init__(self) -> None:
        self.err = 0.0
        self.input: dict = {}

    def update(self, errs, describe: Callable[[int], dict]) -> None:
        errs = np.atleast_1d(np.asarray(errs, dtype=float))
        if errs.size == 0:
            return
        bad = np.isnan(errs)
        i = int(np.argmax(bad)) if bad.any() else int(np.argmax(errs))
        e = math.inf if bad.any() else float(errs[i])
        if e > self.err or not self.input:
            self.err = e
            self.input = describe(i)


def _rel(lhs, rhs) -> np.ndarray:
    lhs, rhs = np.asarray(lhs, dtype=float), np.asarray(rhs, dtype=float)
    return np.abs(lhs - rhs) / np.maximum(np.abs(rhs), np.finfo(float).tiny)


def _coord_err(a: HPoint, b: HPoint) -> np.ndarray:
    """Max coordinate difference, relative to ``max(1, |b coords|_inf)``."""
    ca, cb = a.coords(), b.coords()
    return np.max(np.abs(ca - cb), axis=-1) / np.maximum(1.0, np.max(np.abs(cb), axis=-1))


def _random_centre(rng: np.random.Generator, n: int) -> HPoint:
    return random_points(rng, n, 1)[0]


def _shell(rng: np.random.Generator, xi: HPoint, size: int, r_lo: float,
           r_hi: float) -> HPoint:
    """Points ``xi . delta_r(v)`` with ``|v|_H = 1`` and ``r`` uniform in a range."""
    v = random_points(rng, xi.n, size)
    unit = HPoint(v.z / np.asarray(koranyi_norm(v))[:, None],
                  v.t / np.asarray(koranyi_norm(v)) ** 2)
    r = rng.uniform(r_lo, r_hi, size)
    return group_mul(xi, HPoint(unit.z * r[:, None], unit.t * r * r))


def _random_bubble(rng: np.random.Generator, n: int) -> BubbleParams:
    mu = 0.5 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    bound = float(np.sum(np.abs(mu) ** 2)) / 4.0
    kappa = complex(rng.normal(0.0, 0.5), bound + rng.uniform(0.5, 2.0))
    return BubbleParams(rng.uniform(0.5, 2.0), mu, kappa)


def _bubble_input(p: BubbleParams) -> dict:
    return {"K": _hex(p.K), "mu": [[_hex(m.real), _hex(m.imag)] for m in p.mu],
            "kappa": [_hex(p.kappa.real), _hex(p.kappa.imag)]}


def _phi_setup(rng: np.random.Generator, n: int) -> tuple[HPoint, float, float]:
    xi = _random_centre(rng, n)
    return xi, float(np.exp(rng.uniform(-1.0, 1.0))), float(rng.uniform(-3.0, 3.0))


def _phi_input(xi: HPoint, lam: float, beta: float, **extra) -> dict:
    out = {"xi": _hex_point(xi), "lambda": _hex(lam), "beta": _hex(beta)}
    out.update(extra)
    return out


# -- algebra and metric ---------------------------------------------------------

def _check_group_axioms(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    a, b, c = (random_points(rng, n, k) for _ in range(3))
    e = HPoint.origin(n).repeat(k)
    errs = np.maximum.reduce([
        _coord_err(group_mul(group_mul(a, b), c), group_mul(a, group_mul(b, c))),
        _coord_err(group_mul(a, group_inv(a)), e),
        _coord_err(group_mul(group_inv(a), a), e),
        _coord_err(group_mul(a, e), a),
        _coord_err(group_mul(e, a), a),
    ])
    w.update(errs, lambda i: {"n": n, "a": _hex_point(a[i]), "b": _hex_point(b[i]),
                              "c": _hex_point(c[i])})


def _check_norm_homogeneity(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    a = random_points(rng, n, k)
    lam = np.exp(rng.uniform(-3.0, 3.0, k))
    scaled = HPoint(a.z * lam[:, None], a.t * lam * lam)
    errs = np.maximum(_rel(koranyi_norm(scaled), lam * koranyi_norm(a)),
                      _rel(koranyi_norm(group_inv(a)), koranyi_norm(a)))
    w.update(errs, lambda i: {"n": n, "a": _hex_point(a[i]), "lambda": _hex(lam[i])})


def _check_inversion_norm(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    a = random_points(rng, n, k, scale=float(np.exp(rng.uniform(-2.0, 2.0))))
    prod = np.asarray(koranyi_norm(cr_inversion(a))) * np.asarray(koranyi_norm(a))
    w.update(np.abs(prod - 1.0), lambda i: {"n": n, "a": _hex_point(a[i])})


def _check_reflection(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(10):
        xi, lam, beta = _phi_setup(rng, n)
        z = _shell(rng, xi, k // 10, 0.05 * lam, 20.0 * lam)
        img = gcr_apply(GCRInversion(xi, lam, beta), z)
        errs = _rel(np.asarray(dist(img, xi)) * np.asarray(dist(z, xi)), lam * lam)
        w.update(errs, lambda i: _phi_input(xi, lam, beta, zeta=_hex_point(z[i])))


def _check_involution(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(10):
        xi, lam, beta = _phi_setup(rng, n)
        z = _shell(rng, xi, k // 10, 0.05 * lam, 20.0 * lam)
        phi = GCRInversion(xi, lam, beta)
        back = gcr_apply(phi, gcr_apply(phi, z))
        scale = 1.0 + np.asarray(koranyi_norm(z)) ** 2
        errs = np.max(np.abs(back.coords() - z.coords()), axis=-1) / scale
        w.update(errs, lambda i: _phi_input(xi, lam, beta, zeta=_hex_point(z[i])))


def _check_ball_swap(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(10):
        xi, lam, beta = _phi_setup(rng, n)
        z = _shell(rng, xi, k // 10, 0.01 * lam, 10.0 * lam)
        inside = np.asarray(dist(z, xi)) < lam
        img = gcr_apply(GCRInversion(xi, lam, beta), z)
        img_inside = np.asarray(dist(img, xi)) < lam
        # Points within rounding of the sphere are not classified.
        clear = np.abs(np.asarray(dist(z, xi)) / lam - 1.0) > 1e-12
        errs = ((inside == img_inside) & clear).astype(float)
        w.update(errs, lambda i: _phi_input(xi, lam, beta, zeta=_hex_point(z[i])))


def _check_conjugation(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(10):
        lam = float(np.exp(rng.uniform(-1.0, 1.0)))
        m = Unitary.diag(rng.uniform(-np.pi, np.pi, n))
        phi0 = CRMap.of(Dilate(lam * lam), CRInv(), Iota())
        z = random_points(rng, n, k // 10)
        lhs = rotate(m, phi0(z))
        rhs = phi0(rotate(m.inverse(), z))
        w.update(_coord_err(lhs, rhs),
                 lambda i: {"n": n, "lambda": _hex(lam),
                            "angles": [_hex(a) for a in np.angle(np.diag(m.m))],
                            "zeta": _hex_point(z[i])})


def _check_branch_invariance(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    # Shifting every angle by 2 pi leaves the rotation unchanged.
    for _ in range(k):
        xi = _random_centre(rng, n)
        beta = float(rng.uniform(-3.0, 3.0))
        m = build_m(xi, beta).m
        theta = np.angle(np.diag(m))
        shifted = Unitary.diag(theta + 2.0 * np.pi).m
        w.update(np.max(np.abs(shifted - m)),
                 lambda i: {"n": n, "xi": _hex_point(xi), "beta": _hex(beta)})


# -- the model functions -------------------------------------------------------

def _random_fbeta(rng: np.random.Generator, n: int,
                  positive: bool = False) -> tuple[FBetaParams, HPoint]:
    nu = float(rng.uniform(0.2, 6.0))
    beta = float(rng.uniform(0.2, 5.0) if positive else rng.uniform(-5.0, 5.0))
    return FBetaParams(nu, beta), _random_centre(rng, n)


def _check_functional_equation(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(k):
        p, xi = _random_fbeta(rng, n)
        f = fbeta(p, n)
        lam = float(lambda_of_xi(p, xi))
        z = _shell(rng, xi, 100, 0.05 * lam, 20.0 * lam)
        lhs = kelvin(f, xi, lam, p.beta, z, exponent=p.nu)
        w.update(_rel(lhs, f(z)),
                 lambda i: _phi_input(xi, lam, p.beta, nu=_hex(p.nu), zeta=_hex_point(z[i])))


def _check_radius_identity(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    nu = rng.uniform(0.2, 6.0, k)
    beta = rng.uniform(-5.0, 5.0, k)
    xi = random_points(rng, n, k)
    lam = np.array([lambda_of_xi(FBetaParams(nu[i], beta[i]), xi[i]) for i in range(k)])
    fx = np.array([fbeta_eval(FBetaParams(nu[i], beta[i]), xi[i]) for i in range(k)])
    w.update(np.abs(lam ** nu * fx - 1.0),
             lambda i: {"n": n, "nu": _hex(nu[i]), "beta": _hex(beta[i]),
                        "xi": _hex_point(xi[i])})


def _check_decay(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(k):
        p, _ = _random_fbeta(rng, n, positive=True)
        scale = float(rng.uniform(0.5, 2.0))
        f = fbeta(p, n).scaled(scale)
        alpha, beta_f = alpha_beta_of(f, p.nu)
        err = max(abs(alpha - scale) / scale, abs(beta_f - p.beta) / max(1.0, p.beta))
        w.update(err, lambda i: {"n": n, "nu": _hex(p.nu), "beta": _hex(p.beta),
                                 "scale": _hex(scale)})


def _check_fixed_point(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(k):
        p, _ = _random_fbeta(rng, n, positive=True)
        f = fbeta(p, n)
        v = random_points(rng, n, 1)[0]
        zeta = dilate(1e3 / koranyi_norm(v), v)
        fp = fixed_point_center(radius_from_decay(f, p.nu, 1.0), p.beta, zeta, 0.1)
        w.update(fp.residual, lambda i: {"n": n, "nu": _hex(p.nu), "beta": _hex(p.beta),
                                         "zeta": _hex_point(zeta),
                                         "iterations": fp.iterations})


# -- horizontal calculus ---------------------------------------------------------

def _check_bubble_oracle(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    p = _random_bubble(rng, n)
    pts = random_points(rng, n, k)
    u = bubble(p)
    grad, lap = exact_bubble_derivatives(p, pts)
    scale = np.asarray(u(pts))
    err_g = np.max(np.abs(horizontal_gradient(u, pts) - grad), axis=-1) / scale
    err_l = np.abs(np.asarray(sub_laplacian(u, pts)) - lap) / scale
    w.update(np.maximum(err_g, err_l),
             lambda i: {"n": n, "params": _bubble_input(p), "point": _hex_point(pts[i])})


def _check_pde_ratio(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(10):
        p = _random_bubble(rng, n)
        u = bubble(p)
        pts = random_points(rng, n, k)
        expo = (u.Q + 2.0) / (u.Q - 2.0)
        mean, spread = pde_residual_ratio(u, expo, pts)
        # -Delta(c u) / (c u)^p = c^(1-p) * ratio, so this c normalises the mean.
        c = mean ** (1.0 / (expo - 1.0))
        mean2, spread2 = pde_residual_ratio(u.scaled(c), expo, pts)
        exact = 4.0 * n * n * p.K ** (1.0 - expo) * (
            p.kappa.imag - float(np.sum(np.abs(p.mu) ** 2)) / 4.0)
        err = max(spread, spread2, abs(mean2 - 1.0), abs(mean - exact) / exact)
        w.update(err, lambda i: {"n": n, "params": _bubble_input(p)})


def _random_chain(rng: np.random.Generator, n: int, length: int) -> CRMap:
    prims = []
    for _ in range(length):
        kind = int(rng.integers(5))
        if kind == 0:
            prims.append(Translate(_random_centre(rng, n)))
        elif kind == 1:
            prims.append(Dilate(float(np.exp(rng.uniform(-1.0, 1.0)))))
        elif kind == 2:
            prims.append(Rotate(Unitary.random(n, rng)))
        elif kind == 3:
            prims.append(Iota())
        else:
            prims.append(CRInv())
    return CRMap(tuple(prims))


def _check_conformal(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    p = _random_bubble(rng, n)
    u = bubble(p)
    xi, lam, beta = _phi_setup(rng, n)
    centre = HPoint.origin(n)
    chains = [
        (CRMap.of(Translate(_random_centre(rng, n)), Rotate(Unitary.random(n, rng))), centre),
        (CRMap.of(Dilate(lam * lam), CRInv(), Iota()), centre),
        (GCRInversion(xi, lam, beta).crmap, xi),
    ]
    for psi, c in chains:
        pts = _shell(rng, c, k, 0.7, 1.5)
        err = conformal_covariance_check(u, psi, pts)
        w.update(err, lambda i: _phi_input(xi, lam, beta, chain=[type(q).__name__ for q in psi.chain],
                                           params=_bubble_input(p)))


def _check_subcritical(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    p = _random_bubble(rng, n)
    u = bubble(p)
    xi, lam, beta = _phi_setup(rng, n)
    pts = _shell(rng, xi, k, 0.6 * lam, 1.6 * lam)
    Q = u.Q
    for expo in (2.0, (Q + 2.0) / (Q - 2.0)):
        err = subcritical_residual_check(u, expo, xi, lam, beta, pts)
        w.update(err, lambda i: _phi_input(xi, lam, beta, p=_hex(expo),
                                           params=_bubble_input(p)))


def _slab_points(rng: np.random.Generator, n: int, k: int) -> HPoint:
    a = random_points(rng, n, k)
    t = rng.choice([-1.0, 1.0], k) * rng.uniform(0.2, 2.0, k)
    return HPoint(a.z, t)


def _check_derivative_identities(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    p, _ = _random_fbeta(rng, n, positive=True)
    pts = _slab_points(rng, n, k)
    rep = calc_lemma_derivative_checks(fbeta(p, n), p.nu, pts, alpha=1.0, beta=p.beta)
    w.update(rep.max_error, lambda i: {"n": n, "field": "fbeta", "nu": _hex(p.nu),
                                       "beta": _hex(p.beta)})
    bp = _random_bubble(rng, n)
    U, beta_u = centered_bubble(bp)
    rep = calc_lemma_derivative_checks(U, float(U.Q - 2), pts, alpha=bp.K, beta=beta_u)
    w.update(rep.max_error, lambda i: {"n": n, "field": "centred bubble",
                                       "params": _bubble_input(bp)})


def _numeric_jacobian(psi: CRMap, a: HPoint, h: float) -> float:
    x0 = a.coords()
    levels = []
    for step in (h, h / 2.0):
        cols = []
        for j in range(x0.size):
            e = np.zeros_like(x0)
            e[j] = step
            plus = psi(HPoint.from_coords(x0 + e)).coords()
            minus = psi(HPoint.from_coords(x0 - e)).coords()
            cols.append((plus - minus) / (2.0 * step))
        levels.append(np.stack(cols, axis=1))
    jac = richardson(levels, 2.0, 2)
    return abs(float(np.linalg.det(jac)))


def _check_jacobian(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    for _ in range(k):
        psi = _random_chain(rng, n, int(rng.integers(1, 6)))
        a = _shell(rng, HPoint.origin(n), 1, 0.5, 2.0)[0]
        try:
            orbit = psi.orbit(a)
        except DomainError:
            continue
        if min(koranyi_norm(q) for q in orbit) < 0.1:
            continue
        exact = jacobian_det_abs(psi, a)
        approx = _numeric_jacobian(psi, a, 1e-4)
        w.update(abs(approx - exact) / exact,
                 lambda i: {"n": n, "chain": [type(q).__name__ for q in psi.chain],
                            "a": _hex_point(a)})


def _check_double_kelvin(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    u = bubble(_random_bubble(rng, n))
    for _ in range(10):
        xi, lam, beta = _phi_setup(rng, n)
        pts = _shell(rng, xi, k // 10, 0.05 * lam, 20.0 * lam)
        twice = kelvin(kelvin_field(u, xi, lam, beta), xi, lam, beta, pts)
        w.update(_rel(twice, u(pts)),
                 lambda i: _phi_input(xi, lam, beta, zeta=_hex_point(pts[i])))


# -- comparison falsifier ---------------------------------------------------------

# Relative tolerance of a single evaluation of the comparison inequality.
EVAL_TOL = 1e-12


class Witness(NamedTuple):
    xi: HPoint
    lam: float
    zeta: HPoint
    lhs: float
    rhs: float


def comparison_falsifier(f: ScalarField, nu: float, beta: float, trials: int, seed: int,
                         radius: Callable[[HPoint], float] | None = None) -> Witness | None:
    """Search for ``(xi, lam, zeta)``, ``zeta`` outside ``B_lam(xi)``, violating
    ``(lam / d(xi, zeta))^nu f(Phi(zeta)) <= f(zeta)``.

    A function satisfying this for every centre, radius and exterior point is
    constant, so any nonconstant ``f`` should produce a witness.  A triple only
    counts when the violation exceeds ``10 * EVAL_TOL`` relative to the larger
    side.  ``radius`` pins the radius to a function of the centre.
    """
    rng = stream(seed, "comparison_falsifier", f.n)
    done = 0
    while done < trials:
        m = min(100, trials - done)
        done += m
        xi = _random_centre(rng, f.n)
        lam = float(radius(xi)) if radius is not None else float(np.exp(rng.uniform(-2.0, 2.0)))
        zeta = _shell(rng, xi, m, lam * (1.0 + 1e-6), lam * (1.0 + 10.0 * rng.random()))
        lhs = np.atleast_1d(kelvin(f, xi, lam, beta, zeta, exponent=nu))
        rhs = np.atleast_1d(np.asarray(f(zeta), dtype=float))
        hit = lhs - rhs > 10.0 * EVAL_TOL * np.maximum(np.abs(lhs), np.abs(rhs))
        if hit.any():
            i = int(np.argmax(hit))
            return Witness(xi, lam, zeta[i], float(lhs[i]), float(rhs[i]))
    return None


def _check_falsifier(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    seed = int(rng.integers(2 ** 31))
    p, _ = _random_fbeta(rng, n, positive=True)
    f = fbeta(p, n)
    none_const = comparison_falsifier(constant(1.7, n), p.nu, p.beta, k, seed) is None
    wit = comparison_falsifier(f, p.nu, p.beta, k, seed)
    valid = False
    if wit is not None:
        lhs = kelvin(f, wit.xi, wit.lam, p.beta, wit.zeta, exponent=p.nu)
        rhs = f(wit.zeta)
        valid = lhs - rhs > 10.0 * EVAL_TOL * max(abs(lhs), abs(rhs))
    pinned = comparison_falsifier(f, p.nu, p.beta, k, seed,
                                  radius=lambda xi: float(lambda_of_xi(p, xi))) is None
    err = 0.0 if (none_const and valid and pinned) else 1.0
    w.update(err, lambda i: {"n": n, "nu": _hex(p.nu), "beta": _hex(p.beta), "seed": seed,
                             "constant_clean": none_const, "witness_valid": valid,
                             "symmetric_radius_clean": pinned})


# -- moving spheres ----------------------------------------------------------------

def _check_moving_spheres(n: int, k: int, rng: np.random.Generator, w: _Worst) -> None:
    p = FBetaParams(float(2 * n), 4.0)
    u = fbeta(p, n)
    cfg = SphereConfig(lambda_min=0.05, lambda_max=50.0, samples=k,
                       seed=int(rng.integers(2 ** 31)))
    for t in (-1.0, 0.0, 1.5):
        xi = HPoint(np.zeros(n, dtype=complex), t)
        est, _ = estimate_lambda_underline(u, xi, p.beta, cfg)
        target = float(lambda_of_xi(p, xi))
        w.update(abs(est - target) / target,
                 lambda i: {"n": n, "xi": _hex_point(xi), "beta": _hex(p.beta),
                            "estimate": _hex(est)})


# -- registry ----------------------------------------------------------------------

class _Entry(NamedTuple):
    anchor: str
    dimensions: tuple[int, ...]
    samples: int
    tolerance: float
    run: Callable[[int, int, np.random.Generator, _Worst], None]


_REGISTRY: dict[str, _Entry] = {
    "group_axioms": _Entry(
        "group law: associativity, identity and inverses", (1, 2, 3), 10_000, 1e-10,
        _check_group_axioms),
    "norm_homogeneity": _Entry(
        "Korányi norm is homogeneous under dilations and inversion-invariant",
        (1, 2, 3), 10_000, 1e-10, _check_norm_homogeneity),
    "inversion_norm": _Entry(
        "CR inversion: |J(a)|_H |a|_H = 1", (1, 2, 3), 10_000, 1e-10, _check_inversion_norm),
    "reflection_identity": _Entry(
        "reflection identity: d(Phi(zeta), xi) d(zeta, xi) = lambda^2",
        (1, 2, 3), 10_000, 1e-10, _check_reflection),
    "involution": _Entry(
        "Phi is an involution: Phi o Phi = id", (1, 2, 3), 10_000, 1e-10, _check_involution),
    "ball_swap": _Entry(
        "Phi exchanges the ball B_lambda(xi) and its exterior", (1, 2, 3), 10_000, 1e-10,
        _check_ball_swap),
    "conjugation_identity": _Entry(
        "rho_M o Phi_0 = Phi_0 o rho_M^-1 for diagonal unitary M", (1, 2, 3), 10_000, 1e-10,
        _check_conjugation),
    "branch_invariance": _Entry(
        "rotation M_{xi,beta} is independent of the arg branch", (1, 2, 3), 200, 1e-12,
        _check_branch_invariance),
    "functional_equation": _Entry(
        "f_beta equals its weighted reflection at the radius |conj(w') - i beta|^(1/2)",
        (1, 2, 3), 1000, 1e-10, _check_functional_equation),
    "radius_identity": _Entry(
        "lambda(xi)^nu f(xi) = alpha_f for f_beta", (1, 2, 3), 10_000, 1e-10,
        _check_radius_identity),
    "decay_coefficients": _Entry(
        "alpha_f and beta_f recovered by extrapolation along rays", (1, 2, 3), 20, 1e-3,
        _check_decay),
    "fixed_point_centre": _Entry(
        "there exists a centre xi* with Phi_{xi*, lambda(xi*)}(zeta) = 0 and |xi*|_H small",
        (1, 2), 5, 1e-8, _check_fixed_point),
    "conformal_covariance": _Entry(
        "every CR map psi preserves u^-p Delta_H u under the weighted pull-back",
        (1, 2), 100, 1e-5, _check_conformal),
    "bubble_pde_ratio": _Entry(
        "bubbles solve the critical equation with constant 4 n^2 K^(1-p) (Im kappa - |mu|^2/4)",
        (1, 2), 100, 1e-5, _check_pde_ratio),
    "bubble_derivative_oracle": _Entry(
        "finite differences agree with closed-form bubble derivatives", (1, 2, 3), 200, 1e-6,
        _check_bubble_oracle),
    "derivative_identities": _Entry(
        "profiles with maximum at the origin admit the representation "
        "alpha |t + i|z|^2 + i beta|^(-nu/2): t-ODE, x/y partials, affine law",
        (1, 2), 100, 1e-6, _check_derivative_identities),
    "subcritical_factor": _Entry(
        "the Kelvin transform also satisfies the equation, with factor "
        "(lambda/d)^((Q+2)-(Q-2)p)", (1,), 100, 1e-5, _check_subcritical),
    "jacobian_determinant": _Entry(
        "Jacobian of a CR chain equals the product of primitive determinants",
        (1, 2, 3), 40, 1e-6, _check_jacobian),
    "double_kelvin": _Entry(
        "the generalized Kelvin transform is an involution", (1, 2, 3), 10_000, 1e-10,
        _check_double_kelvin),
    "comparison_falsifier": _Entry(
        "functions satisfying the comparison inequality for all centres and radii are constant",
        (1, 2), 10_000, 0.5, _check_falsifier),
    "moving_spheres_axis": _Entry(
        "critical moving-spheres radius equals the symmetric radius for centres on the t-axis",
        (1,), 20_000, 1e-2, _check_moving_spheres),
}


def registered_checks() -> list[tuple[str, str]]:
    """``(name, anchor)`` for every registered check, in registry order."""
    return [(name, e.anchor) for name, e in _REGISTRY.items()]


def default_suite(seed: int = 42, tolerance: float | None = None) -> list[CheckSpec]:
    """Every registered check with its default settings; ``tolerance`` overrides all."""
    return [CheckSpec(name, e.anchor, e.dimensions, e.samples, seed,
                      e.tolerance if tolerance is None else tolerance)
            for name, e in _REGISTRY.items()]


def run_suite(suite: list[CheckSpec], *, timings: bool = False) -> list[CheckResult]:
    """Run every check in ``suite``, in order, collecting all results.

    Unknown names or duplicates raise ConfigurationError before anything runs.
    A check that raises is recorded as failed with ``max_err = None`` and the
    exception in ``worst_input``.  ``runtime_ms`` is filled only when
    ``timings`` is set, so reports are byte-identical across runs otherwise.
    """
    names = [s.name for s in suite]
    unknown = [nm for nm in names if nm not in _REGISTRY]
    if unknown:
        raise ConfigurationError(f"unknown check(s): {', '.join(unknown)}")
    if len(set(names)) != len(names):
        raise ConfigurationError("check names must be unique within a suite")
    results = []
    for spec in suite:
        entry = _REGISTRY[spec.name]
        start = time.perf_counter()
        worst = _Worst()
        try:
            with np.errstate(all="ignore"):
                for n in spec.dimensions:
                    entry.run(n, spec.samples, stream(spec.seed, spec.name, n), worst)
        except Exception as exc:  # noqa: BLE001 - fail soft, report the error
            result = CheckResult(spec.name, False, None,
                                 {"error": f"{type(exc).__name__}: {exc}"})
        else:
            err = worst.err
            result = CheckResult(spec.name, bool(err <= spec.tolerance),
                                 err if math.isfinite(err) else None, worst.input)
        if timings:
            result = CheckResult(result.name, result.passed, result.max_err,
                                 result.worst_input,
                                 round((time.perf_counter() - start) * 1e3, 3))
        results.append(result)
    return results


def report_json(results: list[CheckResult]) -> str:
    return json.dumps([r.to_dict() for r in results], indent=2) + "\n"
