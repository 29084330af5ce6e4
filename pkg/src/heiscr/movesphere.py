"""Numerical moving spheres on Korányi balls.

For a positive field ``u``, a centre ``xi`` and a radius ``lam`` the violation
set is the part of ``B_lam(xi)`` where ``u`` exceeds its generalized Kelvin
transform ``u_K``.  Its measure is estimated by uniform Monte Carlo sampling,
the critical radius (the supremum of radii below which the set is empty) by
bisection on the predicate "no violating sample", and the two integrals of the
Terracini-type inequality by Monte Carlo quadrature.

Everything here is statistical: a radius is declared violation-free when none
of ``k`` samples violates, so tiny violation sets can be missed.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import BracketError, DomainError, EqualityError, MonotonicityError
from .fields import ScalarField, kelvin
from .hgroup import HPoint, ball_volume, sample_ball
from .rng import stream
from .subcalc import DEFAULT_FD, FDConfig, horizontal_gradient

__all__ = [
    "CSV_HEADER",
    "SphereConfig",
    "SphereReport",
    "estimate_lambda_underline",
    "kelvin_residual",
    "moving_spheres_demo",
    "reports_to_csv",
    "reports_to_json",
    "terracini_quantities",
    "violation_measure",
]

CSV_HEADER = ("xi_index", "lambda", "violation_measure", "stderr", "lhs", "rhs_factor")

# Radii at which a report samples the violation curve, as multiples of the
# estimated critical radius.
CURVE_FACTORS = (0.5, 0.9, 0.99, 1.01, 1.1, 2.0)


@dataclass(frozen=True)
class SphereConfig:
    """Settings shared by the moving-spheres routines.

    ``threshold`` is relative: a sample violates when
    ``u - u_K > threshold * u``.  ``exponent`` overrides the Kelvin weight
    ``Q - 2``.
    """

    lambda_min: float = 1e-2
    lambda_max: float = 1e2
    samples: int = 100_000
    iterations: int = 30
    scan: int = 8
    seed: int = 0
    threshold: float = 1e-10
    terracini_samples: int = 10_000
    residual_samples: int = 10_000
    equality_tol: float = 1e-6
    exponent: float | None = None
    curve_factors: tuple[float, ...] = CURVE_FACTORS
    fd: FDConfig = field(default=DEFAULT_FD)

    def __post_init__(self) -> None:
        if not 0 < self.lambda_min < self.lambda_max:
            raise DomainError(
                f"need 0 < lambda_min < lambda_max, got ({self.lambda_min!r}, {self.lambda_max!r})")
        if self.samples < 1000:
            raise DomainError(f"need at least 1000 samples, got {self.samples}")
        if self.scan < 0:
            raise DomainError(f"scan must be non-negative, got {self.scan}")
        if self.iterations < 1:
            raise DomainError(f"need at least one bisection step, got {self.iterations}")
        if not self.threshold >= 0:
            raise DomainError(f"threshold must be non-negative, got {self.threshold!r}")


DEFAULT_SPHERES = SphereConfig()


def _difference(u: ScalarField, xi: HPoint, lam: float, beta: float, pts: HPoint,
                exponent: float | None) -> tuple[np.ndarray, np.ndarray]:
    vals = np.atleast_1d(np.asarray(u(pts), dtype=float))
    uk = np.atleast_1d(np.asarray(kelvin(u, xi, lam, beta, pts, exponent), dtype=float))
    return vals, vals - uk


def violation_measure(u: ScalarField, xi: HPoint, lam: float, beta: float,
                      k: int, seed: int, *, threshold: float = 1e-10,
                      exponent: float | None = None) -> tuple[float, float]:
    """Monte Carlo estimate of the measure of ``{zeta in B_lam(xi): u > u_K}``.

    Returns ``(vol(B_lam) * fraction, binomial standard error)``.  Samples
    exactly at ``xi`` (probability zero) would be singular for the Kelvin
    transform and are not drawn in practice.
    """
    if not lam > 0:
        raise DomainError(f"radius must be positive, got {lam!r}")
    if k < 1000:
        raise DomainError(f"need at least 1000 samples, got {k}")
    pts = sample_ball(xi, lam, k, seed)
    vals, diff = _difference(u, xi, lam, beta, pts, exponent)
    frac = float(np.count_nonzero(diff > threshold * vals)) / k
    vol = ball_volume(xi.n, lam)
    return vol * frac, vol * math.sqrt(frac * (1.0 - frac) / k)


def estimate_lambda_underline(u: ScalarField, xi: HPoint, beta: float,
                              cfg: SphereConfig = DEFAULT_SPHERES
                              ) -> tuple[float, tuple[float, float]]:
    """Bisect for the largest radius with no violating sample.

    The predicate "zero violations among ``cfg.samples`` points" must hold at
    ``cfg.lambda_min`` and fail at ``cfg.lambda_max``; otherwise BracketError.
    Before bisecting, ``cfg.scan`` geometrically spaced radii inside the window
    are evaluated too.  Every evaluated radius is kept, and if a violation-free
    radius ever lies above a violating one the search aborts with
    MonotonicityError.
    Returns the bracket midpoint and the final bracket.
    """
    seen: list[tuple[float, bool]] = []

    def clear(lam: float) -> bool:
        measure, _ = violation_measure(u, xi, lam, beta, cfg.samples, cfg.seed,
                                       threshold=cfg.threshold, exponent=cfg.exponent)
        ok = measure == 0.0
        seen.append((lam, ok))
        return ok

    lo, hi = cfg.lambda_min, cfg.lambda_max
    if not clear(lo):
        raise BracketError(
            f"violations already at lambda_min = {lo:g}: the window does not straddle "
            "the critical radius")
    if clear(hi):
        raise BracketError(
            f"no violations at lambda_max = {hi:g}: the window does not straddle "
            "the critical radius")
    for lam in np.geomspace(lo, hi, cfg.scan + 2)[1:-1]:
        clear(float(lam))
    _check_monotone(seen)
    for _ in range(cfg.iterations):
        mid = 0.5 * (lo + hi)
        if clear(mid):
            lo = mid
        else:
            hi = mid
    _check_monotone(seen)
    return 0.5 * (lo + hi), (lo, hi)


def _check_monotone(seen: list[tuple[float, bool]]) -> None:
    worst_bad = min(lam for lam, ok in seen if not ok)
    best_ok = max(lam for lam, ok in seen if ok)
    if best_ok > worst_bad:
        raise MonotonicityError(
            f"zero-violation predicate is not monotone: clear at {best_ok:.17g} "
            f"but violated at {worst_bad:.17g}")


def terracini_quantities(u: ScalarField, xi: HPoint, lam: float, beta: float,
                         p: float, k: int, seed: int,
                         cfg: SphereConfig = DEFAULT_SPHERES) -> tuple[float, float]:
    """Monte Carlo values of the two sides of the Terracini-type inequality.

    ``lhs`` is the integral over ``B_lam(xi)`` of ``|grad_H (u - u_K)^+|^2`` and
    ``rhs_factor`` is ``(integral over the violation set of
    u^((p-1) Q / 2))^(2/Q)``.  The gradient is only evaluated at violating
    samples, so the finite differences never straddle the kink of the positive
    part except within one stencil width of its boundary.
    """
    Q = u.Q
    if not 1.0 < p <= (Q + 2.0) / (Q - 2.0):
        raise DomainError(f"p must lie in (1, {(Q + 2.0) / (Q - 2.0):g}], got {p!r}")
    pts = sample_ball(xi, lam, k, seed)
    vals, diff = _difference(u, xi, lam, beta, pts, cfg.exponent)
    mask = diff > cfg.threshold * vals
    vol = ball_volume(xi.n, lam)
    if not np.any(mask):
        return 0.0, 0.0
    hot = pts[np.flatnonzero(mask)]
    gap = ScalarField(lambda a: np.asarray(u(a)) - np.asarray(
        kelvin(u, xi, lam, beta, a, cfg.exponent)), u.n)
    grad = horizontal_gradient(gap, hot, cfg.fd)
    lhs = vol * float(np.sum(grad ** 2)) / k
    mass = vol * float(np.sum(vals[mask] ** ((p - 1.0) * Q / 2.0))) / k
    return lhs, mass ** (2.0 / Q)


def kelvin_residual(u: ScalarField, xi: HPoint, lam: float, beta: float, k: int,
                    seed: int, exponent: float | None = None) -> float:
    """``max |u - u_K| / max u`` over ``k`` uniform points of ``B_lam(xi)``."""
    pts = sample_ball(xi, lam, k, seed)
    vals, diff = _difference(u, xi, lam, beta, pts, exponent)
    return float(np.max(np.abs(diff)) / np.max(vals))


@dataclass(frozen=True)
class SphereReport:
    """Result of the moving-spheres procedure at one centre."""

    xi: HPoint
    beta: float
    lambda_lower: float
    lambda_upper: float
    violation_curve: tuple[tuple[float, float, float], ...]
    terracini: tuple[tuple[float, float, float], ...]
    samples: int
    seed: int
    kelvin_residual: float

    def __post_init__(self) -> None:
        if not self.lambda_lower <= self.lambda_upper:
            raise DomainError("bracket must satisfy lambda_lower <= lambda_upper")

    @property
    def lambda_estimate(self) -> float:
        return 0.5 * (self.lambda_lower + self.lambda_upper)

    def to_dict(self) -> dict:
        return {
            "xi": self.xi.coords().tolist(),
            "beta": self.beta,
            "lambda_lower": self.lambda_lower,
            "lambda_upper": self.lambda_upper,
            "lambda_estimate": self.lambda_estimate,
            "violation_curve": [{"lambda": lam, "measure": m, "stderr": s}
                                for lam, m, s in self.violation_curve],
            "terracini": [{"lambda": lam, "lhs": lhs, "rhs_factor": rhs}
                          for lam, lhs, rhs in self.terracini],
            "samples": self.samples,
            "seed": self.seed,
            "kelvin_residual": self.kelvin_residual,
        }

    def csv_rows(self, xi_index: int) -> list[tuple]:
        """One row per radius on the violation curve (Terracini values joined by radius)."""
        terr = {lam: (lhs, rhs) for lam, lhs, rhs in self.terracini}
        rows = []
        for lam, m, s in self.violation_curve:
            lhs, rhs = terr.get(lam, (float("nan"), float("nan")))
            rows.append((xi_index, lam, m, s, lhs, rhs))
        return rows


def reports_to_json(reports: list[SphereReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2) + "\n"


def reports_to_csv(reports: list[SphereReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for i, r in enumerate(reports):
        writer.writerows((idx, repr(lam), repr(m), repr(s), repr(lhs), repr(rhs))
                         for idx, lam, m, s, lhs, rhs in r.csv_rows(i))
    return buf.getvalue()


def _classified(u: ScalarField) -> bool:
    return u.kind in ("fbeta", "bubble")


def moving_spheres_demo(u: ScalarField, beta: float, grid: list[HPoint],
                        cfg: SphereConfig = DEFAULT_SPHERES, *,
                        p: float | None = None,
                        classified: bool | None = None) -> list[SphereReport]:
    """Run the critical-radius search and the Terracini quadrature over ``grid``.

    Centre ``i`` uses the derived seed ``stream(cfg.seed, "sphere", i)``.  For
    classified families (closed-form kinds, or ``classified=True``) the Kelvin
    residual at the estimated radius must be at most ``cfg.equality_tol``,
    else EqualityError.  Bracket failures do not stop the sweep: they are
    collected and re-raised as one BracketError whose ``failures`` lists
    ``(index, xi, message)`` and whose ``reports`` holds the successful ones.
    """
    if classified is None:
        classified = _classified(u)
    if p is None:
        p = (u.Q + 2.0) / (u.Q - 2.0)
    reports: list[SphereReport] = []
    failures: list[tuple[int, HPoint, str]] = []
    for i, xi in enumerate(grid):
        seed = int(stream(cfg.seed, "sphere", i).integers(2 ** 31))
        local = replace(cfg, seed=seed)
        try:
            est, (lo, hi) = estimate_lambda_underline(u, xi, beta, local)
        except BracketError as exc:
            failures.append((i, xi, str(exc)))
            continue
        curve, terr = [], []
        for fac in cfg.curve_factors:
            lam = fac * est
            m, s = violation_measure(u, xi, lam, beta, cfg.samples, seed,
                                     threshold=cfg.threshold, exponent=cfg.exponent)
            curve.append((lam, m, s))
            lhs, rhs = terracini_quantities(u, xi, lam, beta, p, cfg.terracini_samples,
                                            seed, local)
            terr.append((lam, lhs, rhs))
        res = kelvin_residual(u, xi, est, beta, cfg.residual_samples, seed, cfg.exponent)
        if classified and res > cfg.equality_tol:
            raise EqualityError(
                f"centre #{i} {xi!r}: Kelvin residual {res:.3e} at the estimated "
                f"radius {est:.6g} exceeds {cfg.equality_tol:g}")
        reports.append(SphereReport(xi, beta, lo, hi, tuple(curve), tuple(terr),
                                    cfg.samples, seed, res))
    if failures:
        lines = "; ".join(f"centre #{i} {xi!r}: {msg}" for i, xi, msg in failures)
        err = BracketError(f"{len(failures)} of {len(grid)} centres failed: {lines}")
        err.failures = failures
        err.reports = reports
        raise err
    return reports
