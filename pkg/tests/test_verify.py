import json

import pytest

from geomcrystal import verify
from geomcrystal.errors import ConfigError

FAST = dict(K=4000, trials=10, paths=3, K_axioms=4000)


def test_exact_suites_pass():
    results = verify.run("inversion", verify.VerifyConfig(**FAST))
    names = {r.name for r in results}
    assert {"A2 twist maps x_121(t) to x_-121(c)", "A2 explicit chart matrices"} <= names
    assert all(r.passed for r in results)


def test_asymptotics_and_involutions_pass():
    for suite in ("asymptotics", "involutions"):
        assert all(r.passed for r in verify.run(suite, verify.VerifyConfig(**FAST)))


def test_zero_tolerance_forces_failure():
    results = verify.run("tensor", verify.VerifyConfig(tol=0.0, **FAST))
    assert not all(r.passed for r in results)
    assert all(r.tolerance == 0.0 for r in results)


def test_rational_backend_skips_float_checks():
    results = verify.run("all", verify.VerifyConfig(backend="rational", **FAST))
    skipped = [r for r in results if r.max_violation is None]
    assert skipped and all("rational" in r.note for r in skipped if r.name != "BC2 relations")
    assert all(r.passed for r in results)
    exact = [r for r in results if r.max_violation is not None]
    assert {r.suite for r in exact} == {"inversion", "involutions", "asymptotics"}


def test_verma_suite_skips_non_simply_laced_cases():
    results = verify.run("verma", verify.VerifyConfig(paths=3))
    notes = {r.name: r.note for r in results if r.note}
    assert set(notes) == {"BC2 relations", "G2 relations"}
    assert all(r.passed for r in results)


def test_rank_one_skips_braid_moves():
    results = verify.run("braid", verify.VerifyConfig(n=2, **FAST))
    assert any(r.name == "braid moves" and r.max_violation is None for r in results)


def test_report_shape():
    results = verify.run("asymptotics", verify.VerifyConfig(**FAST))
    data = json.loads(verify.report_json(results))
    assert data["passed"] is True
    assert {"suite", "name", "max_violation", "tolerance", "passed"} <= set(data["checks"][0])


def test_configuration_errors():
    with pytest.raises(ConfigError):
        verify.run("nonsense", verify.VerifyConfig(**FAST))
    with pytest.raises(ConfigError):
        verify.VerifyConfig(backend="decimal")
    with pytest.raises(ConfigError):
        verify.VerifyConfig(K=8)
