"""Closed-form solution families, decay coefficients and the Kelvin transform.

Two explicit families are provided:

* bubbles ``K |t + i|z|^2 + mu.z + kappa|^(-(Q-2)/2)`` with
  ``Im kappa > |mu|^2 / 4`` (``mu.z = sum mu_j z_j``), and
* the model functions ``f_beta(z, t) = |t + i|z|^2 + i beta|^(-nu/2)``.

Fields can also wrap an arbitrary callable.  JSON field specifications use the
schema ``{kind, n, K, mu, kappa}`` (complex numbers as ``[re, im]``) or
``{kind, n, nu, beta}``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Union

import numpy as np

from .crmaps import CRMap, GCRInversion, Translate, gcr_apply
from .errors import DimensionError, DomainError, FieldSpecError, NoLimitError, SingularityError
from .hgroup import HPoint, dist, homogeneous_dimension
from .numerics import richardson

__all__ = [
    "BubbleParams",
    "FBetaParams",
    "ScalarField",
    "alpha_beta_of",
    "blackbox",
    "bubble",
    "bubble_eval",
    "bubble_max_point",
    "centered_bubble",
    "constant",
    "fbeta",
    "fbeta_eval",
    "field_to_spec",
    "kelvin",
    "kelvin_field",
    "lambda_of_xi",
    "parse_field_spec",
]

DECAY_RADII = (1e2, 1e3, 1e4)


@dataclass(frozen=True, eq=False)
class BubbleParams:
    K: float
    mu: np.ndarray
    kappa: complex

    def __post_init__(self) -> None:
        mu = np.array(self.mu, dtype=np.complex128).reshape(-1)
        if mu.size < 1:
            raise DimensionError("mu must have length n >= 1")
        if not (np.isfinite(self.K) and self.K > 0):
            raise DomainError(f"K must be a positive real, got {self.K!r}")
        kappa = complex(self.kappa)
        bound = float(np.sum(np.abs(mu) ** 2)) / 4.0
        if not kappa.imag > bound:
            raise DomainError(
                f"bubble parameters need Im kappa > |mu|^2/4, got "
                f"Im kappa = {kappa.imag!r} <= {bound!r}")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "K", float(self.K))

    @property
    def n(self) -> int:
        return self.mu.size


@dataclass(frozen=True)
class FBetaParams:
    nu: float
    beta: float


Params = Union[BubbleParams, FBetaParams, None]


def _as_array(value) -> np.ndarray | float:
    value = np.asarray(value, dtype=float)
    return float(value) if value.ndim == 0 else value


@dataclass(frozen=True, eq=False)
class ScalarField:
    """A real function on H^n.

    ``kind`` is ``"bubble"``, ``"fbeta"`` or ``"blackbox"``; the first two carry
    their parameters.  Calling the field evaluates it (vectorised over point
    batches).  Black-box callables must be pure.
    """

    func: Callable[[HPoint], Any] = field(repr=False)
    n: int
    kind: str = "blackbox"
    params: Params = None

    def __call__(self, a: HPoint) -> np.ndarray | float:
        if a.n != self.n:
            raise DimensionError(f"field lives on H^{self.n}, point on H^{a.n}")
        return _as_array(self.func(a))

    @property
    def Q(self) -> int:
        return homogeneous_dimension(self.n)

    def scaled(self, c: float) -> ScalarField:
        """The field ``c * u``."""
        if self.kind == "bubble":
            p = self.params
            return bubble(BubbleParams(c * p.K, p.mu, p.kappa))
        return blackbox(lambda a: c * self.func(a), self.n)

    def compose(self, psi: CRMap) -> ScalarField:
        """The field ``u o psi``."""
        return blackbox(lambda a: self.func(psi(a)), self.n)


def blackbox(func: Callable[[HPoint], Any], n: int) -> ScalarField:
    return ScalarField(func, n)


def constant(c: float, n: int) -> ScalarField:
    return ScalarField(lambda a: np.full(a.shape, float(c)), n)


def bubble(p: BubbleParams) -> ScalarField:
    return ScalarField(lambda a: bubble_eval(p, a), p.n, "bubble", p)


def fbeta(p: FBetaParams, n: int) -> ScalarField:
    return ScalarField(lambda a: fbeta_eval(p, a), n, "fbeta", p)


def bubble_eval(p: BubbleParams, a: HPoint) -> np.ndarray | float:
    """``K |t + i|z|^2 + mu.z + kappa|^(-(Q-2)/2)``."""
    if a.n != p.n:
        raise DimensionError(f"bubble on H^{p.n}, point on H^{a.n}")
    r2 = np.sum(a.z.real ** 2 + a.z.imag ** 2, axis=-1)
    q = a.t + 1j * r2 + np.sum(p.mu * a.z, axis=-1) + p.kappa
    return _as_array(p.K * np.abs(q) ** (-(a.Q - 2) / 2.0))


def fbeta_eval(p: FBetaParams, a: HPoint) -> np.ndarray | float:
    """``|t + i|z|^2 + i beta|^(-nu/2)``."""
    r2 = np.sum(a.z.real ** 2 + a.z.imag ** 2, axis=-1)
    mod = np.hypot(a.t, r2 + p.beta)
    if p.nu == 0:
        return _as_array(np.ones_like(mod))
    if np.any(mod == 0):
        raise SingularityError("f_beta evaluated where t + i|z|^2 + i beta = 0")
    return _as_array(mod ** (-p.nu / 2.0))


def lambda_of_xi(p: FBetaParams, xi: HPoint) -> np.ndarray | float:
    """Symmetric radius ``|conj(w') - i beta|^(1/2)``, ``w' = t' + i|z'|^2``."""
    r2 = np.sum(xi.z.real ** 2 + xi.z.imag ** 2, axis=-1)
    mod = np.hypot(xi.t, r2 + p.beta)
    if np.any(mod == 0):
        raise DomainError("degenerate radius: conj(w') - i beta vanishes")
    return _as_array(np.sqrt(mod))


def kelvin(u: ScalarField, xi: HPoint, lam: float, beta: float, eta: HPoint,
           exponent: float | None = None) -> np.ndarray | float:
    """Generalized Kelvin transform ``(lam / d(eta, xi))^(Q-2) u(Phi(eta))``.

    ``exponent`` overrides ``Q - 2``, which is how the weighted identities
    for ``f_beta`` with arbitrary ``nu`` are expressed.
    """
    phi = GCRInversion(xi, lam, beta)
    try:
        image = gcr_apply(phi, eta)
    except SingularityError as exc:
        raise SingularityError("Kelvin transform evaluated at its centre") from exc
    power = u.Q - 2 if exponent is None else exponent
    factor = (lam / np.asarray(dist(eta, xi))) ** power
    return _as_array(factor * np.asarray(u(image)))


def kelvin_field(u: ScalarField, xi: HPoint, lam: float, beta: float,
                 exponent: float | None = None) -> ScalarField:
    return blackbox(lambda a: kelvin(u, xi, lam, beta, a, exponent), u.n)


def _ray_points(n: int, r: float) -> HPoint:
    """Points at Korányi radius ``r`` on the +/- t-axis and the 2n z-axes."""
    zs = np.zeros((2 * n + 2, n), dtype=complex)
    ts = np.zeros(2 * n + 2)
    ts[0], ts[1] = r * r, -r * r
    for j in range(n):
        zs[2 + j, j] = r
        zs[2 + n + j, j] = 1j * r
    return HPoint(zs, ts)


def alpha_beta_of(f: ScalarField, nu: float, *, radii=DECAY_RADII,
                  rtol: float = 1e-3) -> tuple[float, float]:
    """Decay coefficient ``alpha_f = lim |zeta|_H^nu f(zeta)`` and ``beta_f``.

    ``|zeta|_H^nu f`` is sampled along the t-axis (both signs) and the 2n
    coordinate z-rays at ``radii`` and extrapolated to infinity in powers of
    ``1 / |zeta|_H``.  Rays must agree, and the samples at the largest radius
    must already be within ``rtol`` of the limit; otherwise the field is not in
    the admissible class and NoLimitError is raised.  ``beta_f`` is
    ``alpha_f^(2/nu) f(0)^(-2/nu)``.
    """
    if not nu > 0:
        raise DomainError(f"nu must be positive, got {nu!r}")
    radii = sorted(radii)
    samples = [r ** nu * np.asarray(f(_ray_points(f.n, r))) for r in radii]
    ratio = radii[1] / radii[0]
    if not np.allclose(np.diff(np.log(radii)), np.log(ratio)):
        raise ValueError("decay radii must form a geometric sequence")
    est = richardson(samples, ratio, order=1)
    if not np.all(np.isfinite(est)) or np.any(est <= 0):
        raise NoLimitError("|zeta|^nu f has no positive finite limit")
    alpha = float(np.mean(est))
    spread = float(np.max(est) - np.min(est)) / alpha
    drift = float(np.max(np.abs(samples[-1] - est) / est))
    if spread > rtol or drift > rtol:
        raise NoLimitError(
            f"|zeta|^nu f does not converge along rays: ray spread {spread:.2e}, "
            f"distance from limit at r={radii[-1]:g} {drift:.2e} (rtol {rtol:g})")
    f0 = float(f(HPoint.origin(f.n)))
    return alpha, alpha ** (2.0 / nu) * f0 ** (-2.0 / nu)


def bubble_max_point(p: BubbleParams) -> HPoint:
    """Maximum point ``(-i conj(mu) / 2, -Re kappa)`` of a bubble."""
    return HPoint(-0.5j * np.conj(p.mu), -p.kappa.real)


def centered_bubble(p: BubbleParams) -> tuple[ScalarField, float]:
    """``U = u o tau_xi'`` with ``xi'`` the bubble's maximum point.

    Returns ``U`` (evaluated through the bubble formula and the translation)
    and the parameter ``beta_U = Im kappa - |mu|^2 / 4`` for which
    ``U = K f_{beta_U}``.
    """
    u = bubble(p)
    shifted = u.compose(CRMap.of(Translate(bubble_max_point(p))))
    return shifted, p.kappa.imag - float(np.sum(np.abs(p.mu) ** 2)) / 4.0


# -- JSON field specifications ------------------------------------------------

_BUBBLE_KEYS = {"kind", "n", "K", "mu", "kappa"}
_FBETA_KEYS = {"kind", "n", "nu", "beta"}


def _complex(value, where: str) -> complex:
    if (not isinstance(value, (list, tuple)) or len(value) != 2
            or not all(_is_number(v) for v in value)):
        raise FieldSpecError(f"{where}: expected [re, im] pair of numbers, got {value!r}")
    return complex(float(value[0]), float(value[1]))


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def _number(doc: Mapping, key: str) -> float:
    v = doc[key]
    if not _is_number(v):
        raise FieldSpecError(f"field '{key}': expected a number, got {v!r}")
    return float(v)


def parse_field_spec(doc: str | Mapping) -> ScalarField:
    """Build a field from a JSON document (string) or an already-parsed mapping."""
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise FieldSpecError(
                f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, Mapping):
        raise FieldSpecError("field spec must be a JSON object")
    kind = doc.get("kind")
    if kind == "bubble":
        expected = _BUBBLE_KEYS
    elif kind == "fbeta":
        expected = _FBETA_KEYS
    else:
        raise FieldSpecError(
            f"field 'kind': expected \"bubble\" or \"fbeta\", got {kind!r}")
    missing = sorted(expected - set(doc))
    unknown = sorted(set(doc) - expected)
    if missing:
        raise FieldSpecError(f"{kind} spec is missing field(s): {', '.join(missing)}")
    if unknown:
        raise FieldSpecError(f"{kind} spec has unknown field(s): {', '.join(unknown)}")
    n = doc["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise FieldSpecError(f"field 'n': expected an integer >= 1, got {n!r}")
    try:
        if kind == "fbeta":
            return fbeta(FBetaParams(_number(doc, "nu"), _number(doc, "beta")), n)
        mu = doc["mu"]
        if not isinstance(mu, list) or len(mu) != n:
            raise FieldSpecError(f"field 'mu': expected a list of {n} [re, im] pairs")
        mu = [_complex(m, f"field 'mu'[{j}]") for j, m in enumerate(mu)]
        return bubble(BubbleParams(_number(doc, "K"), mu,
                                   _complex(doc["kappa"], "field 'kappa'")))
    except DomainError as exc:
        raise FieldSpecError(f"{kind} spec: {exc}") from exc


def field_to_spec(f: ScalarField) -> dict:
    """Inverse of :func:`parse_field_spec` for the two closed-form kinds."""
    if f.kind == "fbeta":
        return {"kind": "fbeta", "n": f.n, "nu": f.params.nu, "beta": f.params.beta}
    if f.kind == "bubble":
        p = f.params
        return {"kind": "bubble", "n": f.n, "K": p.K,
                "mu": [[m.real, m.imag] for m in p.mu.tolist()],
                "kappa": [p.kappa.real, p.kappa.imag]}
    raise FieldSpecError("black-box fields have no JSON specification")
