from __future__ import annotations

import pytest

from sphadj import documents as docs
from sphadj.algebras import dual_numbers
from sphadj.errors import ResourceRefusal
from sphadj.verifier import (
    Report,
    Scenario,
    homology_table,
    run_counterexample,
    run_monad,
    run_sphere,
    run_twist_zeta,
    strip_timing,
)


def names(report):
    return [c.name for c in report.checks]


def test_homology_table():
    assert homology_table({0: 1, 2: 3, -1: 0}) == [[2, 3], [0, 1]]


def test_report_accounting():
    r = Report(Scenario("demo", {}))
    r.check("a", lambda: (True, {}))
    assert r.passed
    r.check("b", lambda: (False, {"why": 1}))
    assert not r.passed and [c.name for c in r.failures()] == ["b"]
    with pytest.raises(ValueError):
        r.check("a", lambda: (True, {}))
    doc = r.to_document()
    assert doc["verdict"] == "fail" and doc["type"] == "report"
    assert Report.from_document(doc).to_document() == doc


@pytest.mark.parametrize("n", [0, 1, 2])
def test_sphere_suite_passes(n):
    r = run_sphere(n, 2, trials=2, seed=1)
    assert r.passed, [c.to_doc() for c in r.failures()]
    assert "condition1[constant-k]" in names(r)
    assert "condition2[random1]" in names(r)
    assert "pullback-twist-vs-cotwist[v1]" in names(r)


def test_sphere_suite_is_deterministic():
    a = docs.dumps(strip_timing(run_sphere(1, 3, trials=2, seed=5).to_document()))
    b = docs.dumps(strip_timing(run_sphere(1, 3, trials=2, seed=5).to_document()))
    assert a == b
    c = docs.dumps(strip_timing(run_sphere(1, 3, trials=2, seed=6).to_document()))
    assert a != c


def test_sphere_bound():
    with pytest.raises(ResourceRefusal):
        run_sphere(4, 2)
    with pytest.raises(ResourceRefusal):
        run_twist_zeta(4, 2)


def test_sphere_witness_contents():
    r = run_sphere(2, 2, trials=0)
    colim = next(c for c in r.checks if c.name == "hocolim-decomposition[k]")
    assert colim.witness["hocolim"] == [[2, 1], [0, 1]]
    twist = next(c for c in r.checks if c.name == "twist-is-shift[k]")
    assert twist.witness["twist"] == [[-2, 1]]


@pytest.mark.parametrize("n", [0, 1, 2])
def test_twist_zeta(n):
    r = run_twist_zeta(n, 3, trials=4, seed=2)
    assert r.passed
    assert len(r.checks) == 1 + 2 + 4


@pytest.mark.parametrize("p", [2, 3, 5])
def test_counterexample(p):
    r = run_counterexample(p)
    assert r.passed, [c.to_doc() for c in r.failures()]
    assert len(r.checks) == 10
    counts = next(c for c in r.checks if c.name == "idempotent-counts-differ").witness
    assert counts == {"product2": 4, "dual-numbers": 2}


def test_counterexample_report_is_byte_stable():
    a = docs.dumps(strip_timing(run_counterexample(2).to_document()))
    assert a == docs.dumps(strip_timing(run_counterexample(2).to_document()))
    assert '"section-matrices-equal"' in a


def test_monad_expectations():
    assert run_monad("product3", 2).passed
    assert not run_monad("product3", 2, expect="spherical").passed
    assert run_monad("product3", 2, expect="not-spherical").passed
    assert run_monad("square-zero(-2)", 3, expect="spherical").passed
    assert run_monad(dual_numbers(5), expect="spherical").passed
    with pytest.raises(ValueError):
        run_monad("product2", 2, expect="maybe")


def test_monad_raw_structure_failures():
    a = dual_numbers(3)
    c = a.mult.copy()
    c[0, 1, 1] = 2
    r = run_monad({"p": 3, "basis": a.basis, "mult": c, "unit": a.unit.tolist(), "name": "broken"})
    assert not r.passed and names(r) == ["validation"]
    assert r.checks[0].witness["violations"]
    r = run_monad({"p": 3, "basis": a.basis, "mult": a.mult, "unit": a.unit.tolist()}, p=5)
    assert not r.passed and names(r) == ["validation", "modulus"]
