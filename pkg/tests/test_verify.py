from __future__ import annotations

import json
import re

import numpy as np
import pytest

from heiscr import verify
from heiscr.errors import ConfigurationError
from heiscr.fields import FBetaParams, constant, fbeta, kelvin, lambda_of_xi
from heiscr.hgroup import HPoint, dist
from heiscr.verify import (
    EVAL_TOL,
    CheckSpec,
    comparison_falsifier,
    default_suite,
    registered_checks,
    report_json,
    run_suite,
)

FD_CHECKS = ["conformal_covariance", "bubble_pde_ratio", "bubble_derivative_oracle",
             "derivative_identities", "subcritical_factor", "jacobian_determinant"]


@pytest.fixture(scope="module")
def default_results():
    return run_suite(default_suite(42))


def test_registry_contract():
    checks = registered_checks()
    names = [n for n, _ in checks]
    assert len(checks) >= 12
    assert len(set(names)) == len(names)
    for _, anchor in checks:
        assert anchor.strip()
        # anchors describe the identity, they do not cite numbering
        assert not re.search(r"\b(Eq|Lemma|Prop|Corollary|Theorem)\b\.?\s*\(?\d", anchor)


def test_default_suite_passes(default_results):
    failed = [(r.name, r.max_err, r.worst_input) for r in default_results if not r.passed]
    assert not failed
    assert [r.name for r in default_results] == [n for n, _ in registered_checks()]
    for r, spec in zip(default_results, default_suite(42)):
        assert r.passed == (r.max_err <= spec.tolerance)
        assert r.runtime_ms is None


def test_report_is_deterministic(default_results):
    again = run_suite(default_suite(42))
    assert report_json(again) == report_json(default_results)
    doc = json.loads(report_json(default_results))
    assert set(doc[0]) == {"name", "pass", "max_err", "worst_input", "runtime_ms"}


def test_worst_inputs_are_exact_hex_floats(default_results):
    r = next(r for r in default_results if r.name == "reflection_identity")
    xi = [float.fromhex(h) for h in r.worst_input["xi"]]
    assert len(xi) in (3, 5, 7)
    assert all(isinstance(float.fromhex(h), float) for h in r.worst_input["zeta"])


def test_other_seed_gives_other_inputs():
    a = run_suite([s for s in default_suite(1) if s.name == "group_axioms"])
    b = run_suite([s for s in default_suite(2) if s.name == "group_axioms"])
    assert a[0].worst_input != b[0].worst_input


def test_zero_tolerance_fails_every_fd_check():
    suite = [s for s in default_suite(42, tolerance=0.0) if s.name in FD_CHECKS]
    results = run_suite(suite)
    assert len(results) == len(FD_CHECKS)
    for r in results:
        assert not r.passed and r.max_err > 0


def test_empty_suite_and_configuration_errors(monkeypatch):
    assert run_suite([]) == []
    spec = default_suite(42)[0]
    ran = []
    monkeypatch.setitem(verify._REGISTRY, "group_axioms",
                        verify._REGISTRY["group_axioms"]._replace(
                            run=lambda *a: ran.append(1)))
    bogus = CheckSpec("no_such_check", "x", (1,), 1, 0, 1.0)
    with pytest.raises(ConfigurationError):
        run_suite([spec, bogus])
    with pytest.raises(ConfigurationError):
        run_suite([spec, spec])
    assert not ran
    with pytest.raises(ConfigurationError):
        CheckSpec("a", "b", (1,), 0, 0, 1.0)
    with pytest.raises(ConfigurationError):
        CheckSpec("a", "b", (1,), 1, 0, -1.0)


def test_suite_fails_soft(monkeypatch):
    def boom(n, k, rng, worst):
        raise RuntimeError("broken check")

    monkeypatch.setitem(verify._REGISTRY, "inversion_norm",
                        verify._REGISTRY["inversion_norm"]._replace(run=boom))
    suite = [s for s in default_suite(42) if s.name in ("inversion_norm", "group_axioms")]
    results = run_suite(suite, timings=True)
    by = {r.name: r for r in results}
    assert not by["inversion_norm"].passed and by["inversion_norm"].max_err is None
    assert "broken check" in by["inversion_norm"].worst_input["error"]
    assert by["group_axioms"].passed
    assert all(r.runtime_ms is not None and r.runtime_ms >= 0 for r in results)


@pytest.mark.parametrize("n", [1, 2])
def test_falsifier_on_constant_and_model_functions(n):
    p = FBetaParams(2.0, 4.0)
    f = fbeta(p, n)
    assert comparison_falsifier(constant(2.5, n), 2.0, 4.0, 10_000, 7) is None
    wit = comparison_falsifier(f, 2.0, 4.0, 10_000, 7)
    assert wit is not None
    assert dist(wit.zeta, wit.xi) > wit.lam
    lhs = kelvin(f, wit.xi, wit.lam, 4.0, wit.zeta, exponent=2.0)
    rhs = f(wit.zeta)
    assert lhs - rhs > 10 * EVAL_TOL * max(lhs, rhs)
    pinned = comparison_falsifier(f, 2.0, 4.0, 10_000, 7,
                                  radius=lambda xi: float(lambda_of_xi(p, xi)))
    assert pinned is None


def test_symmetric_radius_gives_equality_not_a_witness():
    p = FBetaParams(1.3, 2.0)
    f = fbeta(p, 1)
    xi = HPoint(np.array([0.4 - 0.3j]), 0.8)
    lam = lambda_of_xi(p, xi)
    zeta = HPoint(np.array([2.0 + 1.0j]), -3.0)
    assert dist(zeta, xi) > lam
    lhs = kelvin(f, xi, lam, 2.0, zeta, exponent=1.3)
    assert abs(lhs - f(zeta)) <= 1e-10 * f(zeta)
