from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphadj.algebras import (
    GradedAlgebra,
    MonadPresentation,
    algebra_violations,
    brute_force_isomorphic,
    change_basis,
    count_idempotents,
    direct_product,
    dual_numbers,
    field_algebra,
    is_twist_autoequivalence,
    multiplication_matrix,
    permute_basis,
    preset,
    product_algebra,
    quadratic,
    spherical_verdict,
    square_zero,
    twist_object,
    unit_adapted,
    unit_commutation,
    validate_algebra,
)
from sphadj.complexes import ChainComplex, homology
from sphadj.errors import AlgebraValidationError, DimensionMismatch, ResourceRefusal
from sphadj.linalg import Matrix, rank

PRIMES = [2, 3, 5]
seeds = st.integers(0, 2**32 - 1)
SQUARE_ZERO_DEGREES = [-2, -1, 1, 2, 3]


def M(a):
    return MonadPresentation(a)


def idempotents_oracle(a: GradedAlgebra) -> int:
    """Plain loop over the degree-0 part, multiplying with the structure constants."""
    idx = a.degree_zero_part()
    p, n = a.p, a.dim
    count = 0
    for coords in itertools.product(range(p), repeat=len(idx)):
        x = [0] * n
        for i, v in zip(idx, coords):
            x[i] = v
        sq = [sum(x[i] * x[j] * int(a.mult[i, j, k]) for i in range(n) for j in range(n)) % p for k in range(n)]
        count += sq == x
    return count


def iso_oracle(a: GradedAlgebra, b: GradedAlgebra) -> bool:
    """Loop over all invertible matrices, testing unit and product preservation."""
    n, p = a.dim, a.p
    if n != b.dim:
        return False
    for flat in itertools.product(range(p), repeat=n * n):
        phi = np.array(flat, dtype=np.int64).reshape(n, n)
        if rank(Matrix(p, phi)) != n:
            continue
        ok_deg = all(b.degrees[i] == a.degrees[j] for i in range(n) for j in range(n) if phi[i, j])
        if not ok_deg or not np.array_equal(phi @ a.unit % p, b.unit):
            continue
        # column j of phi is the image of a_j
        lhs = np.einsum("lk,ijk->ijl", phi, a.mult) % p
        rhs = np.einsum("ai,bj,abl->ijl", phi, phi, b.mult) % p
        if np.array_equal(lhs, rhs):
            return True
    return False


def random_invertible(p, n, rng):
    while True:
        m = rng.integers(0, p, size=(n, n))
        if rank(Matrix(p, m)) == n:
            return m


# -- validation ----------------------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_presets_validate(p):
    for a in (product_algebra(p, 2), product_algebra(p, 3), dual_numbers(p), quadratic(p), field_algebra(p)):
        assert algebra_violations(a) == []
    for d in SQUARE_ZERO_DEGREES:
        assert algebra_violations(square_zero(p, d)) == []


def test_product2_over_f2():
    a = preset("product2", 2)
    assert a.dim == 2 and a.unit.tolist() == [1, 1]
    assert a.labels == ["e1", "e2"]


def test_preset_names():
    assert preset("square-zero(3)", 2).degrees == [0, 3]
    assert preset("product3", 3).dim == 3
    assert preset(" field ", 5).dim == 1
    with pytest.raises(ValueError):
        preset("no-such", 2)
    with pytest.raises(ValueError):
        preset("square-zero(x)", 2)


def test_shape_errors():
    with pytest.raises(DimensionMismatch):
        GradedAlgebra(2, [("1", 0)], np.zeros((2, 2, 2)), [1])
    with pytest.raises(DimensionMismatch):
        GradedAlgebra(2, [("1", 0)], np.ones((1, 1, 1)), [1, 0])


def test_mutated_dual_numbers_reports_associativity_quadruple():
    a = dual_numbers(3)
    c = a.mult.copy()
    c[1, 0, 1] = 2  # eps * 1 = 2 eps
    with pytest.raises(AlgebraValidationError) as info:
        validate_algebra(3, a.basis, c, a.unit)
    laws = {v["law"] for v in info.value.violations}
    assert "right-unit" in laws
    c = a.mult.copy()
    c[1, 1, 0] = 1
    c[0, 1, 1] = 2  # 1 * eps = 2 eps
    with pytest.raises(AlgebraValidationError) as info:
        validate_algebra(3, a.basis, c, a.unit)
    assoc = [v for v in info.value.violations if v["law"] == "associativity"]
    assert assoc and all(set(v) == {"law", "i", "j", "k", "l"} for v in assoc)


def test_degree_violation():
    a = square_zero(2, 1)
    c = a.mult.copy()
    c[1, 1, 0] = 1  # x * x = 1 breaks grading
    with pytest.raises(AlgebraValidationError) as info:
        validate_algebra(2, a.basis, c, a.unit)
    assert {"law": "degree", "i": 1, "j": 1, "k": 0} in info.value.violations


def test_unit_must_have_degree_zero():
    a = square_zero(2, 1)
    with pytest.raises(AlgebraValidationError) as info:
        validate_algebra(2, a.basis, a.mult, [1, 1])
    assert any(v["law"] == "unit-degree" for v in info.value.violations)


@given(seeds, st.sampled_from(PRIMES))
def test_every_single_constant_mutation_of_product_is_rejected(seed, p):
    rng = np.random.default_rng(seed)
    a = product_algebra(p, int(rng.integers(2, 4)))
    n = a.dim
    i, j, k = rng.integers(0, n, size=3)
    c = a.mult.copy()
    c[i, j, k] = (c[i, j, k] + int(rng.integers(1, p))) % p
    with pytest.raises(AlgebraValidationError):
        validate_algebra(p, a.basis, c, a.unit)


@given(seeds, st.sampled_from(PRIMES))
def test_change_of_basis_preserves_validity(seed, p):
    rng = np.random.default_rng(seed)
    a = product_algebra(p, 2) if rng.integers(0, 2) else dual_numbers(p)
    b = change_basis(a, random_invertible(p, 2, rng))
    assert algebra_violations(b) == []
    assert count_idempotents(b) == count_idempotents(a)
    assert brute_force_isomorphic(a, b)


def test_change_of_basis_rejects_mixed_degrees():
    with pytest.raises(DimensionMismatch):
        change_basis(square_zero(3, 1), np.array([[1, 1], [1, 0]]))
    with pytest.raises(DimensionMismatch):
        change_basis(dual_numbers(3), np.array([[1, 1], [1, 1]]))


def test_unit_adapted_basis_starts_with_unit():
    a = unit_adapted(product_algebra(3, 2))
    assert a.unit.tolist() == [1, 0]
    assert a.labels == ["1", "e1"]
    assert unit_adapted(dual_numbers(3)) == dual_numbers(3)


# -- twist, commutation, verdicts ------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_twist_objects(p):
    assert twist_object(M(product_algebra(p, 2))).homology() == {0: 1}
    assert twist_object(M(dual_numbers(p))).homology() == {0: 1}
    assert twist_object(M(product_algebra(p, 3))).homology() == {0: 2}
    assert twist_object(M(field_algebra(p))).homology() == {}
    for d in SQUARE_ZERO_DEGREES:
        t = twist_object(M(square_zero(p, d)))
        assert t.homology() == {d: 1}
        assert t.reduced == ChainComplex.point(p, d)


@given(seeds, st.sampled_from(PRIMES))
def test_twist_data_is_consistent(seed, p):
    rng = np.random.default_rng(seed)
    a = product_algebra(p, int(rng.integers(1, 4)))
    a = change_basis(a, random_invertible(p, a.dim, rng))
    t = twist_object(M(a))
    t.section.validate()
    t.unit.validate()
    assert homology(t.reduced) == t.homology()
    assert t.section.target == ChainComplex.point(p)


@pytest.mark.parametrize("p", PRIMES)
def test_verdicts(p):
    for a in [product_algebra(p, 2), dual_numbers(p), quadratic(p)] + [square_zero(p, d) for d in SQUARE_ZERO_DEGREES]:
        v = spherical_verdict(M(a))
        assert v.spherical and v.invertible and v.commutation is not None, a.name
        assert v.diagnostics == []
    v = spherical_verdict(M(product_algebra(p, 3)))
    assert not v.spherical and v.diagnostics == ["twist not invertible"]
    assert not spherical_verdict(M(field_algebra(p))).spherical


@given(seeds, st.sampled_from(PRIMES))
def test_verdict_equals_invertibility(seed, p):
    rng = np.random.default_rng(seed)
    a = product_algebra(p, int(rng.integers(1, 4)))
    if rng.integers(0, 2):
        a = direct_product(a, dual_numbers(p)) if a.dim < 3 else a
    a = change_basis(a, random_invertible(p, a.dim, rng))
    m = M(a)
    assert spherical_verdict(m).spherical == is_twist_autoequivalence(m)
    assert unit_commutation(m) is not None


@pytest.mark.parametrize("d", [1, 3])
def test_commutation_with_odd_generator(d):
    # swap carries (-1)^(d*d) on x (x) x, which is invisible here since the unit is even
    h = unit_commutation(M(square_zero(3, d)))
    assert h is not None and h.is_zero()


# -- multiplication matrices -------------------------------------------------------------


def test_multiplication_matrices():
    assert multiplication_matrix(quadratic(2)).tolist() == [[1, 0, 0, 1], [0, 1, 1, 0]]
    assert multiplication_matrix(M(dual_numbers(2))).tolist() == [[1, 0, 0, 0], [0, 1, 1, 0]]
    assert multiplication_matrix(field_algebra(7)).tolist() == [[1]]


@given(seeds, st.sampled_from(PRIMES))
def test_multiplication_matrix_agrees_with_multiply(seed, p):
    rng = np.random.default_rng(seed)
    a = change_basis(quadratic(p), random_invertible(p, 2, rng))
    mm = multiplication_matrix(a)
    x, y = rng.integers(0, p, size=2), rng.integers(0, p, size=2)
    assert (mm.array @ np.kron(x, y) % p).tolist() == a.multiply(x, y).tolist()


def test_multiplication_chain_map_is_associative():
    for a in (product_algebra(3, 2), dual_numbers(3), square_zero(3, 2)):
        mp = M(a)
        mp.multiplication().validate()
        mp.unit().validate()


# -- idempotents and isomorphism ----------------------------------------------------------


@pytest.mark.parametrize("p", PRIMES)
def test_idempotent_counts(p):
    assert count_idempotents(product_algebra(p, 2)) == 4
    assert count_idempotents(dual_numbers(p)) == 2
    assert count_idempotents(field_algebra(p)) == 2
    assert count_idempotents(product_algebra(p, 3)) == 8
    assert count_idempotents(quadratic(p)) == (2 if p == 2 else 4)


@given(seeds, st.sampled_from(PRIMES))
def test_idempotent_count_matches_loop_oracle(seed, p):
    rng = np.random.default_rng(seed)
    base = [product_algebra(p, 2), dual_numbers(p), quadratic(p), square_zero(p, 1)][int(rng.integers(0, 4))]
    a = base if base.degrees != [0, 0] else change_basis(base, random_invertible(p, 2, rng))
    assert count_idempotents(a) == idempotents_oracle(a)


@pytest.mark.parametrize("p", [2, 3])
def test_idempotent_count_is_multiplicative(p):
    small = [field_algebra(p), dual_numbers(p), product_algebra(p, 2)]
    for a, b in itertools.product(small, repeat=2):
        if a.dim + b.dim <= 4:
            assert count_idempotents(direct_product(a, b)) == count_idempotents(a) * count_idempotents(b)


def test_idempotent_bound():
    with pytest.raises(ResourceRefusal):
        count_idempotents(product_algebra(5, 3), bound=100)


def test_isomorphism_examples():
    a = product_algebra(2, 2)
    assert brute_force_isomorphic(a, a)
    assert not brute_force_isomorphic(a, dual_numbers(2))
    assert brute_force_isomorphic(a, permute_basis(a, [1, 0]))
    assert brute_force_isomorphic(quadratic(2), dual_numbers(2))
    assert brute_force_isomorphic(quadratic(3), product_algebra(3, 2))
    assert not brute_force_isomorphic(square_zero(2, 1), dual_numbers(2))


@pytest.mark.parametrize("p", [2, 3])
def test_isomorphism_matches_loop_oracle(p):
    algs = [product_algebra(p, 2), dual_numbers(p), quadratic(p)]
    for a, b in itertools.product(algs, repeat=2):
        assert brute_force_isomorphic(a, b) == iso_oracle(a, b)


def test_isomorphism_bounds():
    with pytest.raises(ResourceRefusal):
        brute_force_isomorphic(product_algebra(2, 4), product_algebra(2, 4))
    with pytest.raises(ResourceRefusal):
        brute_force_isomorphic(product_algebra(5, 3), product_algebra(5, 3), bound=1000)
    assert not brute_force_isomorphic(product_algebra(2, 2), product_algebra(2, 3))
