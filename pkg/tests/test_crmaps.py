from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import points
from heiscr.crmaps import (
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
    iota,
    jacobian_det_abs,
    radius_from_decay,
)
from heiscr.errors import ConvergenceError, DomainError, SingularityError
from heiscr.fields import FBetaParams, fbeta
from heiscr.hgroup import HPoint, Unitary, dist, group_inv, group_mul, koranyi_norm, rotate
from heiscr.rng import stream

radii = st.floats(0.2, 5.0)
betas = st.floats(-4.0, 4.0)


def fd_jacobian(psi: CRMap, a: HPoint, h: float = 1e-5) -> float:
    """Central-difference Jacobian determinant in real coordinates."""
    x = a.coords()
    cols = []
    for j in range(x.size):
        e = np.zeros_like(x)
        e[j] = h
        cols.append((psi(HPoint.from_coords(x + e)).coords()
                     - psi(HPoint.from_coords(x - e)).coords()) / (2 * h))
    return abs(float(np.linalg.det(np.stack(cols, axis=1))))


@given(points())
def test_inversion_inverts_the_norm(a):
    assume(koranyi_norm(a) > 1e-3)
    assert math.isclose(koranyi_norm(cr_inversion(a)) * koranyi_norm(a), 1.0, rel_tol=1e-12)


def test_inversion_hand_value_and_singularity():
    # (1, 1): w = 1 + i, J = (1/(1+i), -1/2)
    img = cr_inversion(HPoint(np.array([1.0 + 0j]), 1.0))
    assert np.isclose(img.z[0], 0.5 - 0.5j)
    assert math.isclose(float(img.t), -0.5, rel_tol=1e-15)
    with pytest.raises(SingularityError):
        cr_inversion(HPoint.origin(2))


@pytest.mark.parametrize("n", [1, 2, 3])
@given(data=st.data(), lam=radii, beta=betas)
def test_reflection_identity(n, data, lam, beta):
    xi, zeta = data.draw(points(n)), data.draw(points(n))
    assume(dist(zeta, xi) > 1e-2)
    img = GCRInversion(xi, lam, beta)(zeta)
    assert math.isclose(dist(img, xi) * dist(zeta, xi), lam * lam, rel_tol=1e-10)


@given(points(n=2), points(n=2), radii, betas)
def test_involution(xi, zeta, lam, beta):
    assume(dist(zeta, xi) > 1e-2)
    phi = GCRInversion(xi, lam, beta)
    back = phi(phi(zeta))
    err = np.max(np.abs(back.coords() - zeta.coords()))
    assert err <= 1e-9 * (1 + koranyi_norm(zeta) ** 2)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_ball_swap(n):
    rng = stream(5, "ball_swap", n)
    xi = HPoint.from_coords(rng.standard_normal(2 * n + 1))
    lam, beta = 1.3, -0.7
    pts = HPoint.from_coords(rng.uniform(-3, 3, (10_000, 2 * n + 1)))
    inside = np.asarray(dist(pts, xi)) < lam
    img_inside = np.asarray(dist(gcr_apply(GCRInversion(xi, lam, beta), pts), xi)) < lam
    assert inside.any() and (~inside).any()
    assert np.all(inside != img_inside)


@given(points(n=2), st.lists(st.floats(-4, 4), min_size=2, max_size=2), radii)
def test_rotation_commutes_with_model_inversion_up_to_inverse(zeta, angles, lam):
    assume(koranyi_norm(zeta) > 1e-3)
    m = Unitary.diag(angles)
    phi0 = CRMap.of(Dilate(lam * lam), CRInv(), Iota())
    lhs = rotate(m, phi0(zeta))
    rhs = phi0(rotate(m.inverse(), zeta))
    np.testing.assert_allclose(lhs.coords(), rhs.coords(), rtol=1e-12, atol=1e-12)


def test_build_m_cases():
    np.testing.assert_array_equal(build_m(HPoint.origin(2), 3.0).m, np.eye(2))
    xi = HPoint(np.array([1j, 0j]), 1.0)
    # theta_1 = 2 * pi/2 + arg(1 + 2i); the second entry stays 1
    m = build_m(xi, 1.0).m
    assert np.isclose(m[0, 0], np.exp(1j * (np.pi + np.angle(1 + 2j))))
    assert m[1, 1] == 1.0
    with pytest.raises(DomainError):
        build_m(HPoint(np.array([1.0 + 0j]), 0.0), -1.0)
    # arg is irrelevant when z' = 0, even though w' + i beta vanishes
    build_m(HPoint.origin(1), 0.0)


@given(points(), betas)
def test_rotation_does_not_depend_on_branch(xi, beta):
    assume(abs(complex(float(xi.t), float(np.sum(np.abs(xi.z) ** 2)) + beta)) > 1e-9)
    m = build_m(xi, beta).m
    theta = np.angle(np.diag(m))
    np.testing.assert_allclose(Unitary.diag(theta + 2 * np.pi).m, m, atol=1e-14)


def test_centre_is_singular_and_error_names_primitive():
    xi = HPoint(np.array([0.2 + 0.1j]), 0.4)
    with pytest.raises(SingularityError):
        GCRInversion(xi, 1.0, 1.0)(xi)
    # With a real z the product xi^-1 . xi is exactly the identity.
    exact = HPoint(np.array([0.5 + 0j]), 0.25)
    chain = CRMap.of(Translate(exact), CRInv(), Translate(group_inv(exact)))
    with pytest.raises(SingularityError, match="CRInv at chain position 1"):
        chain(exact)
    with pytest.raises(DomainError):
        GCRInversion(xi, 0.0, 1.0)
    with pytest.raises(DomainError):
        Dilate(-1.0)


def test_composition_order():
    a = HPoint(np.array([1.0 + 0j]), 0.0)
    f = CRMap.of(Dilate(2.0))
    g = CRMap.of(Translate(a))
    # (f @ g)(0) = f(g(0)) = delta_2(a)
    np.testing.assert_allclose((f @ g)(HPoint.origin(1)).coords(), [2.0, 0.0, 0.0])
    np.testing.assert_allclose((g @ f)(HPoint.origin(1)).coords(), [1.0, 0.0, 0.0])
    assert len(f @ g) == 2
    np.testing.assert_array_equal(CRMap()(a).coords(), a.coords())


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inversion_jacobian_matches_finite_differences(n):
    rng = stream(11, n)
    for _ in range(5):
        a = HPoint.from_coords(rng.uniform(-1.5, 1.5, 2 * n + 1))
        psi = CRMap.of(CRInv())
        exact = jacobian_det_abs(psi, a)
        assert math.isclose(exact, koranyi_norm(a) ** (-2 * (2 * n + 2)), rel_tol=1e-13)
        assert math.isclose(fd_jacobian(psi, a), exact, rel_tol=1e-6)


@pytest.mark.parametrize("n", [1, 2])
def test_chain_jacobians_match_finite_differences(n):
    rng = stream(12, n)
    xi = HPoint.from_coords(rng.standard_normal(2 * n + 1))
    chains = [
        CRMap.of(Translate(xi), Rotate(Unitary.random(n, rng)), Dilate(1.7)),
        CRMap.of(Dilate(0.6), CRInv(), Iota(), Translate(xi)),
        GCRInversion(xi, 1.3, 0.4).crmap,
    ]
    for psi in chains:
        for _ in range(3):
            a = HPoint.from_coords(rng.uniform(-2, 2, 2 * n + 1))
            assume_far = dist(a, group_inv(xi)) > 0.3 and dist(a, xi) > 0.3
            if not assume_far:
                continue
            assert math.isclose(fd_jacobian(psi, a), jacobian_det_abs(psi, a), rel_tol=1e-6)


def test_iota_is_an_involutive_automorphism():
    rng = stream(13)
    a, b = (HPoint.from_coords(rng.standard_normal(5)) for _ in range(2))
    np.testing.assert_allclose(iota(group_mul(a, b)).coords(),
                               group_mul(iota(a), iota(b)).coords(), atol=1e-14)
    np.testing.assert_array_equal(iota(iota(a)).coords(), a.coords())


def _fbeta_radius(nu=2.0, beta=4.0, n=1):
    f = fbeta(FBetaParams(nu, beta), n)
    return radius_from_decay(f, nu, 1.0), beta


@pytest.mark.parametrize("n", [1, 2])
def test_fixed_point_far_away(n):
    radius, beta = _fbeta_radius(n=n)
    rng = stream(21, n)
    v = HPoint.from_coords(rng.standard_normal(2 * n + 1))
    zeta = HPoint(v.z * 1e3 / koranyi_norm(v), v.t * 1e6 / koranyi_norm(v) ** 2)
    fp = fixed_point_center(radius, beta, zeta, 0.1)
    assert fp.residual <= 1e-8
    assert koranyi_norm(fp.xi) <= 0.1
    assert fp.iterations < 10_000
    lam = radius(fp.xi)
    assert koranyi_norm(GCRInversion(fp.xi, lam, beta)(zeta)) <= 1e-8


def test_fixed_point_shrinks_with_distance_and_keeps_axis():
    radius, beta = _fbeta_radius()
    norms = []
    for r in (1e2, 1e3, 1e4):
        fp = fixed_point_center(radius, beta, HPoint(np.array([0j]), r * r), 1.0)
        assert np.all(fp.xi.z == 0)
        norms.append(koranyi_norm(fp.xi))
    assert norms[0] > norms[1] > norms[2]
    off = HPoint(np.array([300.0 + 400.0j]), 2e5)
    prev = fixed_point_center(radius, beta, off, 1.0)
    far = fixed_point_center(radius, beta, HPoint(off.z * 10, off.t * 100), 1.0)
    assert koranyi_norm(far.xi) < koranyi_norm(prev.xi)


def test_fixed_point_reports_non_convergence():
    radius, beta = _fbeta_radius()
    with pytest.raises(ConvergenceError) as info:
        fixed_point_center(radius, beta, HPoint(np.array([0j]), 1e4), 1e-12)
    assert info.value.residual <= 1e-8
    with pytest.raises(ConvergenceError) as info:
        fixed_point_center(radius, beta, HPoint(np.array([3.0 + 0j]), 1.0), 0.1, max_iter=2,
                           tol=1e-300)
    assert info.value.iterations == 2


def test_radius_from_decay_validation():
    f = fbeta(FBetaParams(2.0, 4.0), 1)
    with pytest.raises(DomainError):
        radius_from_decay(f, 0.0, 1.0)
    assert math.isclose(radius_from_decay(f, 2.0, 1.0)(HPoint.origin(1)), 2.0)
