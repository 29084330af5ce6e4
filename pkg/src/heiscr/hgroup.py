"""Algebra and metric geometry of the Heisenberg group H^n.

Points are stored as a complex vector ``z`` (numpy complex128, i.e. packed
``(re, im)`` pairs) and a real ``t``.  Every operation is vectorised: an
:class:`HPoint` whose ``z`` has shape ``(..., n)`` and ``t`` shape ``(...)``
is a batch of points and all functions act elementwise over the batch.

The group law is ``(z, t) . (z', t') = (z + z', t + t' + 2 Im <z, z'>)`` with
``<z, z'> = sum z_j conj(z'_j)``; the inverse is negation and the Haar measure
is Lebesgue measure in the coordinates ``(x, y, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, DomainError
from .rng import stream

__all__ = [
    "HPoint",
    "Unitary",
    "ball_volume",
    "dilate",
    "dist",
    "group_inv",
    "group_mul",
    "homogeneous_dimension",
    "koranyi_norm",
    "random_points",
    "rotate",
    "sample_ball",
]

UNITARY_TOL = 1e-12


def homogeneous_dimension(n: int) -> int:
    """Q = 2n + 2."""
    return 2 * n + 2


@dataclass(frozen=True, eq=False)
class HPoint:
    """A point, or a batch of points, of H^n.

    ``z`` has shape ``(..., n)`` (complex) and ``t`` shape ``(...)`` (real).
    Both arrays are copied and made read-only on construction.
    """

    z: np.ndarray
    t: np.ndarray

    def __post_init__(self) -> None:
        z = np.array(self.z, dtype=np.complex128)
        t = np.array(self.t, dtype=np.float64)
        if z.ndim == 0:
            raise DimensionError("z must be a vector of length n >= 1")
        if z.shape[-1] < 1:
            raise DimensionError("n must be at least 1")
        if t.shape != z.shape[:-1]:
            raise DimensionError(
                f"batch shapes differ: z {z.shape[:-1]} vs t {t.shape}")
        if not (np.all(np.isfinite(z)) and np.all(np.isfinite(t))):
            raise DomainError("HPoint coordinates must be finite")
        z.setflags(write=False)
        t.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", t)

    @property
    def n(self) -> int:
        return self.z.shape[-1]

    @property
    def Q(self) -> int:
        return homogeneous_dimension(self.n)

    @property
    def shape(self) -> tuple[int, ...]:
        """Batch shape; ``()`` for a single point."""
        return self.t.shape

    def __len__(self) -> int:
        if not self.shape:
            raise TypeError("a single HPoint has no length")
        return self.shape[0]

    def __getitem__(self, idx) -> HPoint:
        if not self.shape:
            raise TypeError("a single HPoint cannot be indexed")
        return HPoint(self.z[idx], self.t[idx])

    def __iter__(self):
        for i in range(len(self)):
            yield self[i]

    def __repr__(self) -> str:
        if self.shape:
            return f"HPoint(batch={self.shape}, n={self.n})"
        return f"HPoint(z={self.z.tolist()!r}, t={float(self.t)!r})"

    @classmethod
    def origin(cls, n: int) -> HPoint:
        return cls(np.zeros(n, dtype=complex), 0.0)

    @classmethod
    def from_coords(cls, coords) -> HPoint:
        """Build from real coordinates laid out as ``x_1..x_n, y_1..y_n, t``."""
        c = np.asarray(coords, dtype=float)
        if c.ndim == 0 or c.shape[-1] < 3 or c.shape[-1] % 2 == 0:
            raise DimensionError(
                f"expected 2n+1 coordinates per point, got {c.shape[-1:]}")
        n = (c.shape[-1] - 1) // 2
        return cls(c[..., :n] + 1j * c[..., n:2 * n], c[..., 2 * n])

    def coords(self) -> np.ndarray:
        """Real coordinates ``x_1..x_n, y_1..y_n, t`` as a new array."""
        return np.concatenate(
            [self.z.real, self.z.imag, self.t[..., None]], axis=-1)

    def repeat(self, count: int) -> HPoint:
        """A batch of ``count`` copies of a single point."""
        if self.shape:
            raise TypeError("repeat expects a single point")
        return HPoint(np.tile(self.z, (count, 1)), np.full(count, float(self.t)))


def _check_same_n(a: HPoint, b: HPoint) -> None:
    if a.n != b.n:
        raise DimensionError(f"dimension mismatch: n={a.n} vs n={b.n}")


def _herm(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    """<z, w> = sum z_j conj(w_j) over the last axis."""
    return np.sum(z * np.conj(w), axis=-1)


def group_mul(a: HPoint, b: HPoint) -> HPoint:
    _check_same_n(a, b)
    return HPoint(a.z + b.z, a.t + b.t + 2.0 * _herm(a.z, b.z).imag)


def group_inv(a: HPoint) -> HPoint:
    return HPoint(-a.z, -a.t)


def koranyi_norm(a: HPoint) -> np.ndarray | float:
    """(|z|^4 + t^2)^(1/4); returns a float for a single point."""
    r2 = np.sum(a.z.real ** 2 + a.z.imag ** 2, axis=-1)
    out = np.sqrt(np.hypot(r2, a.t))
    return float(out) if out.ndim == 0 else out


def dist(a: HPoint, b: HPoint) -> np.ndarray | float:
    """Korányi distance ``|b^-1 . a|_H``."""
    _check_same_n(a, b)
    return koranyi_norm(group_mul(group_inv(b), a))


def dilate(lam: float, a: HPoint) -> HPoint:
    if not lam > 0:
        raise DomainError(f"dilation factor must be positive, got {lam!r}")
    return HPoint(lam * a.z, lam * lam * a.t)


@dataclass(frozen=True, eq=False)
class Unitary:
    """An n x n unitary matrix, validated entrywise to 1e-12 on construction."""

    m: np.ndarray

    def __post_init__(self) -> None:
        m = np.array(self.m, dtype=np.complex128)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise DimensionError(f"expected a square matrix, got {m.shape}")
        defect = np.max(np.abs(m @ m.conj().T - np.eye(m.shape[0])))
        if not defect <= UNITARY_TOL:
            raise DomainError(f"matrix is not unitary (defect {defect:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "m", m)

    @property
    def n(self) -> int:
        return self.m.shape[0]

    @classmethod
    def identity(cls, n: int) -> Unitary:
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def diag(cls, angles) -> Unitary:
        return cls(np.diag(np.exp(1j * np.asarray(angles, dtype=float))))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> Unitary:
        """Haar-random unitary (QR of a complex Ginibre matrix, phase-fixed)."""
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        q, r = np.linalg.qr(g)
        d = np.diagonal(r)
        q = q * (d / np.abs(d))
        # One Newton-Schulz polish step keeps the 1e-12 check comfortable.
        q = 1.5 * q - 0.5 * q @ q.conj().T @ q
        return cls(q)

    def inverse(self) -> Unitary:
        return Unitary(self.m.conj().T)


def rotate(m: Unitary, a: HPoint) -> HPoint:
    if m.n != a.n:
        raise DimensionError(f"dimension mismatch: matrix {m.n} vs point {a.n}")
    return HPoint(a.z @ m.m.T, a.t)


def ball_volume(n: int, lam: float = 1.0) -> float:
    """Lebesgue volume of the Korányi ball of radius ``lam`` in H^n.

    vol B_1 = pi^n B(n/2, 3/2) / Gamma(n), and volumes scale as lam^Q.
    """
    beta = math.gamma(n / 2) * math.gamma(1.5) / math.gamma(n / 2 + 1.5)
    return math.pi ** n * beta / math.gamma(n) * lam ** homogeneous_dimension(n)


def sample_ball(xi: HPoint, lam: float, k: int, seed: int) -> HPoint:
    """Draw ``k`` points uniformly from the Korányi ball ``B_lam(xi)``.

    Rejection sampling from the box [-1, 1]^{2n} x [-1, 1] around the origin,
    followed by dilation by ``lam`` and left translation by ``xi``.  Since the
    Haar measure is Lebesgue measure and dilations scale it uniformly, the
    result is uniform in the ball.  For a fixed seed, the samples of
    ``B_lam(xi)`` are ``xi . delta_lam`` of the samples of ``B_1(0)``.
    """
    if not lam > 0:
        raise DomainError(f"radius must be positive, got {lam!r}")
    if k < 1:
        raise DomainError(f"sample count must be >= 1, got {k}")
    n = xi.n
    rng = stream(seed, "sample_ball", n)
    accepted = []
    have = 0
    batch = max(2 * k, 256)
    while have < k:
        c = rng.uniform(-1.0, 1.0, size=(batch, 2 * n + 1))
        r2 = np.sum(c[:, :2 * n] ** 2, axis=1)
        keep = c[r2 * r2 + c[:, 2 * n] ** 2 < 1.0]
        accepted.append(keep)
        have += len(keep)
    unit = HPoint.from_coords(np.concatenate(accepted)[:k])
    return group_mul(xi, dilate(lam, unit))


def random_points(rng: np.random.Generator, n: int, size: int,
                  scale: float = 1.0) -> HPoint:
    """Gaussian test points with z ~ scale and t ~ scale^2."""
    z = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
    t = rng.standard_normal(size)
    return HPoint(scale * z / math.sqrt(2.0), scale * scale * t)
