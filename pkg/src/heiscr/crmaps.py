"""CR maps of H^n and the generalized CR inversion.

A CR map is a finite composition of five primitives: left translation,
dilation, unitary rotation, the conjugation ``iota(z, t) = (conj z, -t)`` and
the CR inversion ``J(z, t) = (z / w, -t / |w|^2)`` with ``w = t + i|z|^2``.
:class:`CRMap` keeps the chain exactly as written (leftmost map applied last)
and evaluates it right to left without simplification, which keeps the
Jacobian bookkeeping trivially correct.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Union

import numpy as np

from .errors import ConvergenceError, DomainError, SingularityError
from .hgroup import (
    HPoint,
    Unitary,
    dilate,
    group_inv,
    group_mul,
    homogeneous_dimension,
    koranyi_norm,
    rotate,
)

__all__ = [
    "CRInv",
    "CRMap",
    "Dilate",
    "FixedPoint",
    "GCRInversion",
    "Iota",
    "Rotate",
    "Translate",
    "build_m",
    "cr_inversion",
    "fixed_point_center",
    "gcr_apply",
    "iota",
    "jacobian_det_abs",
    "radius_from_decay",
]

# |w| below this is treated as the singular point of J.
SINGULAR_W = 1e-300


def iota(a: HPoint) -> HPoint:
    return HPoint(np.conj(a.z), -a.t)


def cr_inversion(a: HPoint) -> HPoint:
    """The CR inversion ``(z / w, -t / |w|^2)``, ``w = t + i|z|^2``.

    Raises SingularityError at the identity.  Satisfies
    ``|J(a)|_H = 1 / |a|_H``.
    """
    r2 = np.sum(a.z.real ** 2 + a.z.imag ** 2, axis=-1)
    w = a.t + 1j * r2
    aw = np.abs(w)
    if np.any(aw < SINGULAR_W):
        raise SingularityError("CR inversion evaluated at the group identity")
    return HPoint(a.z / w[..., None], -a.t / (aw * aw))


def _ones(a: HPoint) -> np.ndarray:
    return np.ones(a.shape)


@dataclass(frozen=True)
class Translate:
    """Left translation ``zeta -> xi . zeta``."""

    xi: HPoint

    def apply(self, a: HPoint) -> HPoint:
        return group_mul(self.xi, a)

    def det(self, a: HPoint) -> np.ndarray:
        return _ones(a)


@dataclass(frozen=True)
class Dilate:
    lam: float

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise DomainError(f"dilation factor must be positive, got {self.lam!r}")

    def apply(self, a: HPoint) -> HPoint:
        return dilate(self.lam, a)

    def det(self, a: HPoint) -> np.ndarray:
        return np.full(a.shape, self.lam ** homogeneous_dimension(a.n))


@dataclass(frozen=True)
class Rotate:
    m: Unitary

    def apply(self, a: HPoint) -> HPoint:
        return rotate(self.m, a)

    def det(self, a: HPoint) -> np.ndarray:
        return _ones(a)


@dataclass(frozen=True)
class Iota:
    def apply(self, a: HPoint) -> HPoint:
        return iota(a)

    def det(self, a: HPoint) -> np.ndarray:
        return _ones(a)


@dataclass(frozen=True)
class CRInv:
    def apply(self, a: HPoint) -> HPoint:
        return cr_inversion(a)

    def det(self, a: HPoint) -> np.ndarray:
        # Evaluated after apply() has rejected the identity.
        return np.asarray(koranyi_norm(a), dtype=float) ** (-2 * homogeneous_dimension(a.n))


Primitive = Union[Translate, Dilate, Rotate, Iota, CRInv]


@dataclass(frozen=True)
class CRMap:
    """Composition ``chain[0] o chain[1] o ... o chain[-1]``.

    The empty chain is the identity.  ``f @ g`` is the composition f o g.
    """

    chain: tuple[Primitive, ...] = ()

    @classmethod
    def of(cls, *prims: Primitive) -> CRMap:
        return cls(tuple(prims))

    def __matmul__(self, other: CRMap) -> CRMap:
        return CRMap(self.chain + other.chain)

    def __len__(self) -> int:
        return len(self.chain)

    def __call__(self, a: HPoint) -> HPoint:
        return self.orbit(a)[-1]

    def orbit(self, a: HPoint) -> list[HPoint]:
        """Intermediate points, starting at ``a`` and ending at the image."""
        pts = [a]
        for pos in range(len(self.chain) - 1, -1, -1):
            prim = self.chain[pos]
            try:
                pts.append(prim.apply(pts[-1]))
            except SingularityError as exc:
                raise SingularityError(
                    f"{type(prim).__name__} at chain position {pos}: {exc}") from exc
        return pts

    def jacobian_det_abs(self, a: HPoint) -> np.ndarray | float:
        pts = self.orbit(a)
        det = np.ones(a.shape)
        for prim, p in zip(reversed(self.chain), pts):
            det = det * prim.det(p)
        return float(det) if det.ndim == 0 else det


def jacobian_det_abs(psi: CRMap, a: HPoint) -> np.ndarray | float:
    """|det J_psi(a)| as the product of primitive determinants along the orbit.

    Translations, rotations and ``iota`` contribute 1, ``Dilate(lam)``
    contributes ``lam^Q`` and the CR inversion at ``p`` contributes
    ``|p|_H^(-2Q)``.
    """
    return psi.jacobian_det_abs(a)


def build_m(xi: HPoint, beta: float) -> Unitary:
    """The diagonal rotation ``diag(exp(i theta_k))`` attached to ``(xi, beta)``.

    ``theta_k = 2 arg z'_k + arg(t' + i|z'|^2 + i beta)`` when ``z'_k != 0`` and
    0 otherwise, with principal-branch ``arg``.  Only ``exp(i theta_k)``
    enters, so the branch does not matter.
    """
    if xi.shape:
        raise DomainError("build_m expects a single centre point")
    zp = xi.z
    wb = complex(float(xi.t), float(np.sum(np.abs(zp) ** 2)) + beta)
    nonzero = zp != 0
    if np.any(nonzero) and wb == 0:
        raise DomainError(
            "arg(t' + i|z'|^2 + i beta) is undefined: the modulus vanishes")
    theta = np.where(nonzero, 2.0 * np.angle(zp) + np.angle(wb), 0.0)
    return Unitary.diag(theta)


@dataclass(frozen=True)
class GCRInversion:
    """Generalized CR inversion ``Phi = tau_xi o rho_M o delta_lam^2 o J o iota o tau_xi^-1``.

    Reflection in the Korányi sphere of radius ``lam`` about ``xi``; an
    involution of ``H^n \\ {xi}``.
    """

    xi: HPoint
    lam: float
    beta: float
    m: Unitary = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if not self.lam > 0:
            raise DomainError(f"radius must be positive, got {self.lam!r}")
        object.__setattr__(self, "m", build_m(self.xi, self.beta))

    @property
    def crmap(self) -> CRMap:
        return CRMap.of(
            Translate(self.xi),
            Rotate(self.m),
            Dilate(self.lam ** 2),
            CRInv(),
            Iota(),
            Translate(group_inv(self.xi)),
        )

    def __call__(self, zeta: HPoint) -> HPoint:
        return gcr_apply(self, zeta)


def gcr_apply(phi: GCRInversion, zeta: HPoint) -> HPoint:
    # xi^-1 . xi can carry a rounding residue in t, so the centre is caught
    # by coordinates rather than left to the inversion.
    at_centre = np.all(zeta.z == phi.xi.z, axis=-1) & (zeta.t == phi.xi.t)
    if np.any(at_centre):
        raise SingularityError("generalized CR inversion evaluated at its centre")
    try:
        return phi.crmap(zeta)
    except SingularityError as exc:
        raise SingularityError(
            "generalized CR inversion evaluated at its centre") from exc


class FixedPoint(NamedTuple):
    xi: HPoint
    residual: float
    iterations: int


def fixed_point_center(
    radius: Callable[[HPoint], float],
    beta: float,
    zeta: HPoint,
    eps: float,
    *,
    max_iter: int = 10_000,
    tol: float = 1e-8,
) -> FixedPoint:
    """Find ``xi*`` with ``Phi_{xi*, radius(xi*)}^beta(zeta) = 0`` and ``|xi*|_H <= eps``.

    ``radius`` is the field's radius map, typically
    ``alpha^(1/nu) f(xi)^(-1/nu)``.  The fixed points sought are those of
    ``T(xi) = (Phi_{xi, radius(xi)}^beta(zeta))^-1 . xi``.  Writing
    ``P = delta_{lam^2} J iota(xi^-1 . zeta)``, one has ``T(xi) = (-M P_z, -P_t)``
    with ``M = M_{xi,beta}``.  Because ``M`` carries ``2 arg z'_k`` the plain
    iteration doubles phase errors and never settles, so the z-part is
    replaced by the phase-consistent solution
    ``z'_k = -exp(-i arg(w' + i beta)) conj(P_k)`` of ``z' = -M(z') P_z``,
    which has exactly the same fixed points.  A step that increases the
    Korányi residual ``|Phi(zeta)|_H`` is damped by 0.5.
    """
    if zeta.shape:
        raise DomainError("fixed_point_center expects a single point zeta")

    def update(xi: HPoint) -> HPoint:
        lam = float(radius(xi))
        p = dilate(lam * lam, cr_inversion(iota(group_mul(group_inv(xi), zeta))))
        wb = complex(float(xi.t), float(np.sum(np.abs(xi.z) ** 2)) + beta)
        return HPoint(-np.exp(-1j * np.angle(wb)) * np.conj(p.z), -p.t)

    def residual(xi: HPoint) -> float:
        return koranyi_norm(gcr_apply(GCRInversion(xi, float(radius(xi)), beta), zeta))

    xi = HPoint.origin(zeta.n)
    res = residual(xi)
    it = 0
    while res > tol and it < max_iter:
        it += 1
        step = update(xi)
        step_res = residual(step)
        if step_res > res:
            step = HPoint(0.5 * (xi.z + step.z), 0.5 * (xi.t + step.t))
            step_res = residual(step)
        xi, res = step, step_res
    if res > tol:
        raise ConvergenceError(
            f"fixed-point iteration stalled at residual {res:.3e} "
            f"after {it} iterations", res, it)
    norm = koranyi_norm(xi)
    if norm > eps:
        raise ConvergenceError(
            f"fixed point has |xi*|_H = {norm:.3e} > eps = {eps:g}; "
            "|zeta|_H is below the contraction threshold", res, it)
    return FixedPoint(xi, res, it)


def radius_from_decay(f: Callable[[HPoint], float], nu: float,
                      alpha: float) -> Callable[[HPoint], float]:
    """Radius map ``xi -> alpha^(1/nu) f(xi)^(-1/nu)``."""
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu!r}")
    scale = alpha ** (1.0 / nu)
    return lambda xi: scale * float(f(xi)) ** (-1.0 / nu)

