from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from heiscr.crmaps import CRInv, CRMap, Dilate, GCRInversion, Iota, Rotate, Translate
from heiscr.errors import DomainError
from heiscr.fields import BubbleParams, FBetaParams, blackbox, bubble, centered_bubble, fbeta
from heiscr.hgroup import HPoint, Unitary, dilate, group_mul, koranyi_norm, random_points
from heiscr.rng import stream
from heiscr.subcalc import (
    FDConfig,
    calc_lemma_derivative_checks,
    conformal_covariance_check,
    exact_bubble_derivatives,
    horizontal_gradient,
    pde_residual_ratio,
    sub_laplacian,
    subcritical_residual_check,
)


def random_bubble(rng, n):
    mu = 0.6 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    kappa = complex(rng.normal(), np.sum(np.abs(mu) ** 2) / 4 + rng.uniform(0.3, 2))
    return BubbleParams(rng.uniform(0.5, 2), mu, kappa)


def shell(rng, xi, k, lo, hi):
    v = random_points(rng, xi.n, k)
    r = np.asarray(koranyi_norm(v))
    unit = HPoint(v.z / r[:, None], v.t / r ** 2)
    s = rng.uniform(lo, hi, k)
    return group_mul(xi, HPoint(unit.z * s[:, None], unit.t * s * s))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_polynomials_with_known_horizontal_derivatives(n):
    pts = random_points(stream(40, n), n, 50)
    x, y, t = pts.z.real, pts.z.imag, pts.t
    r2 = np.sum(x * x + y * y, axis=-1)

    grad = horizontal_gradient(blackbox(lambda a: a.t, n), pts)
    np.testing.assert_allclose(grad, np.concatenate([2 * y, -2 * x], axis=-1), atol=1e-9)
    np.testing.assert_allclose(sub_laplacian(blackbox(lambda a: a.t, n), pts), 0, atol=1e-7)

    sq = blackbox(lambda a: np.sum(np.abs(a.z) ** 2, axis=-1), n)
    np.testing.assert_allclose(horizontal_gradient(sq, pts),
                               np.concatenate([2 * x, 2 * y], axis=-1), atol=1e-9)
    np.testing.assert_allclose(sub_laplacian(sq, pts), 4 * n, rtol=1e-8)

    np.testing.assert_allclose(sub_laplacian(blackbox(lambda a: a.t ** 2, n), pts), 8 * r2,
                               rtol=1e-7, atol=1e-7)
    mixed = blackbox(lambda a: a.z[..., 0].real * a.t, n)
    np.testing.assert_allclose(sub_laplacian(mixed, pts), 4 * y[:, 0], atol=1e-7)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_finite_differences_agree_with_the_closed_forms(n):
    rng = stream(41, n)
    pts = random_points(rng, n, 200, 1.5)
    for params, u in [(p := random_bubble(rng, n), bubble(p)),
                      (q := FBetaParams(1.3, 2.5), fbeta(q, n))]:
        grad, lap = exact_bubble_derivatives(params, pts)
        scale = np.asarray(u(pts))[:, None]
        np.testing.assert_allclose(horizontal_gradient(u, pts) / scale, grad / scale, atol=1e-8)
        np.testing.assert_allclose(sub_laplacian(u, pts), lap, rtol=1e-6)


@pytest.mark.parametrize("n", [1, 2])
def test_bubble_ratio_is_constant_and_scales(n):
    rng = stream(42, n)
    p = random_bubble(rng, n)
    u = bubble(p)
    pts = random_points(rng, n, 100)
    expo = (2 * n + 4) / (2 * n)
    mean, spread = pde_residual_ratio(u, expo, pts)
    assert spread <= 1e-6
    exact = 4 * n * n * p.K ** (1 - expo) * (p.kappa.imag - np.sum(np.abs(p.mu) ** 2) / 4)
    assert math.isclose(mean, exact, rel_tol=1e-6)
    c = 3.0
    mean_c, _ = pde_residual_ratio(u.scaled(c), expo, pts)
    assert math.isclose(mean_c, c ** (1 - expo) * mean, rel_tol=1e-6)
    lap = sub_laplacian(u, pts)
    np.testing.assert_allclose(sub_laplacian(u.scaled(c), pts), c * lap, rtol=1e-7)


def test_ratio_needs_positive_values():
    with pytest.raises(DomainError):
        pde_residual_ratio(blackbox(lambda a: -np.ones(a.shape), 1), 3.0,
                           random_points(stream(0), 1, 5))


@pytest.mark.parametrize("n", [1, 2])
def test_conformal_covariance_for_several_chains(n):
    rng = stream(43, n)
    u = bubble(random_bubble(rng, n))
    xi = random_points(rng, n, 1)[0]
    origin = HPoint.origin(n)
    cases = [
        (CRMap(), origin),
        (CRMap.of(Translate(xi), Rotate(Unitary.random(n, rng)), Dilate(1.4)), origin),
        (CRMap.of(Dilate(1.7), CRInv(), Iota()), origin),
        (GCRInversion(xi, 1.2, -0.8).crmap, xi),
    ]
    for psi, centre in cases:
        pts = shell(rng, centre, 60, 0.7, 1.5)
        assert conformal_covariance_check(u, psi, pts) <= 1e-5


def test_weight_is_essential_in_the_conformal_check():
    # Without the Jacobian weight, a dilation changes u^-p Delta u.
    u = bubble(BubbleParams(1.0, [0j], 1j))
    pts = random_points(stream(44), 1, 20)
    d = CRMap.of(Dilate(2.0))
    unweighted = blackbox(lambda a: u(d(a)), 1)
    lhs = np.asarray(unweighted(pts)) ** -3 * sub_laplacian(unweighted, pts)
    rhs = np.asarray(u(d(pts))) ** -3 * sub_laplacian(u, d(pts))
    assert np.max(np.abs(lhs / rhs - 1)) > 0.5


@pytest.mark.parametrize("p", [2.0, 3.0, 1.5])
def test_subcritical_identity(p):
    rng = stream(45, str(p))
    u = bubble(random_bubble(rng, 1))
    xi = random_points(rng, 1, 1)[0]
    pts = shell(rng, xi, 100, 0.6, 1.6)
    # Points here sit at |a|_H ~ 3, where the default steps are coarse for the
    # Kelvin field; one more extrapolation level absorbs that.
    cfg = FDConfig(richardson_levels=3)
    assert subcritical_residual_check(u, p, xi, 1.0, 0.5, pts, cfg) <= 1e-5


def test_subcritical_exponent_range():
    u = bubble(BubbleParams(1.0, [0j], 1j))
    xi = HPoint.origin(1)
    pts = random_points(stream(46), 1, 3)
    for p in (1.0, 3.5):
        with pytest.raises(DomainError):
            subcritical_residual_check(u, p, xi, 1.0, 0.0, pts)


@pytest.mark.parametrize("n", [1, 2])
def test_derivative_identities(n):
    rng = stream(47, n)
    a = random_points(rng, n, 60)
    pts = HPoint(a.z, np.sign(a.t) * (0.2 + np.abs(a.t)))
    rep = calc_lemma_derivative_checks(fbeta(FBetaParams(1.7, 2.2), n), 1.7, pts)
    assert rep.max_error <= 1e-6
    assert math.isclose(rep.alpha, 1.0, rel_tol=1e-3) and math.isclose(rep.beta, 2.2, rel_tol=1e-3)
    p = random_bubble(rng, n)
    U, beta_u = centered_bubble(p)
    rep = calc_lemma_derivative_checks(U, 2.0 * n, pts, alpha=p.K, beta=beta_u)
    assert rep.max_error <= 1e-6


def test_derivative_identities_detect_a_wrong_profile():
    # A Gaussian-like profile has its maximum at the origin but is not of the form.
    f = blackbox(lambda a: 1.0 / (1.0 + np.sum(np.abs(a.z) ** 4, axis=-1) + a.t ** 2), 1)
    pts = random_points(stream(48), 1, 30)
    rep = calc_lemma_derivative_checks(f, 2.0, pts, alpha=1.0, beta=1.0)
    assert rep.max_error > 1e-2


def test_fd_config_validation_and_zero_tolerance():
    with pytest.raises(DomainError):
        FDConfig(h=0.0)
    with pytest.raises(DomainError):
        FDConfig(richardson_levels=5)
    u = bubble(BubbleParams(1.0, [0.3j], 1.0 + 1j))
    pts = random_points(stream(49), 1, 20)
    _, lap = exact_bubble_derivatives(u.params, pts)
    assert np.max(np.abs(sub_laplacian(u, pts) - lap)) > 0


@given(st.floats(0.5, 3.0), st.floats(1e-4, 1e-2))
def test_richardson_levels_do_not_change_the_answer_much(scale, h):
    u = fbeta(FBetaParams(2.0, 1.0), 1)
    a = dilate(scale, HPoint(np.array([0.3 + 0.4j]), 0.5))
    one = sub_laplacian(u, a, FDConfig(h=h, richardson_levels=3))
    _, exact = exact_bubble_derivatives(u.params, a)
    assert math.isclose(one, float(exact), rel_tol=1e-5)
