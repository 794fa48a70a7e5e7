from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sphadj.complexes import ChainComplex, ChainMap
from sphadj.errors import InvalidStructure, ResourceRefusal
from sphadj.generators import random_chain_map, random_complex, random_diagram
from sphadj.linalg import Matrix
from sphadj.posets import (
    DiagramMap,
    FinitePoset,
    PosetDiagram,
    chain_list,
    cone_diagram,
    cone_inclusion_map,
    constant_diagram,
    constant_map,
    fiber_diagram,
    fiber_inclusion_map,
    nondegenerate_chains,
    sphere_dimension_of,
    sphere_poset,
    zero_diagram,
)


def chain_counts(poset):
    return tuple(len(cs) for _, cs in nondegenerate_chains(poset).items())


def brute_chains(poset):
    """Oracle: all subsets that are totally ordered, sorted into chains."""
    els = list(poset.elements)
    out = []
    for mask in range(1, 2 ** len(els)):
        sub = [x for i, x in enumerate(els) if mask >> i & 1]
        sub.sort(key=lambda x: len(poset.down(x)))
        if all(poset.lt(sub[i], sub[i + 1]) for i in range(len(sub) - 1)):
            out.append(tuple(sub))
    return out


# -- posets ----------------------------------------------------------------------


def test_axioms_checked():
    with pytest.raises(InvalidStructure):
        FinitePoset([1, 2], [(1, 2), (2, 1)])
    with pytest.raises(InvalidStructure):
        FinitePoset([1, 2, 3], [(1, 2), (2, 3)])
    with pytest.raises(InvalidStructure):
        FinitePoset([1, 1], [])
    with pytest.raises(InvalidStructure):
        FinitePoset([1], [(1, 5)])


def test_from_covers_takes_closure():
    q = FinitePoset.from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")])
    assert q.leq("a", "c")
    assert q.covers() == [("a", "b"), ("b", "c")]


def test_sphere_poset_examples():
    p0 = sphere_poset(0)
    assert p0.elements == (1, 2) and p0.strict_pairs() == []
    p1 = sphere_poset(1)
    assert sorted(p1.strict_pairs()) == [(1, 3), (1, 4), (2, 3), (2, 4)]
    p2 = sphere_poset(2)
    assert len(p2) == 6
    assert chain_counts(p2) == (6, 12, 8)
    assert 6 - 12 + 8 == 2


@pytest.mark.parametrize("n", range(5))
def test_sphere_poset_recursion(n):
    p = sphere_poset(n)
    assert p.elements == tuple(range(1, 2 * n + 3))
    top = (2 * n + 1, 2 * n + 2)
    if n:
        assert all(p.lt(x, t) for x in range(1, 2 * n + 1) for t in top)
    assert not p.leq(top[0], top[1]) and not p.leq(top[1], top[0])
    assert sphere_dimension_of(p) == n


def test_sphere_poset_bound():
    with pytest.raises(ResourceRefusal):
        sphere_poset(5)
    assert len(sphere_poset(5, bound=5)) == 12
    with pytest.raises(ValueError):
        sphere_poset(-1)


def test_sphere_dimension_of_other_posets():
    assert sphere_dimension_of(FinitePoset([1, 2, 3], [])) is None
    assert sphere_dimension_of(FinitePoset.from_covers([1, 2], [(1, 2)])) is None


@pytest.mark.parametrize("n", range(4))
def test_chain_euler_characteristic_of_sphere(n):
    counts = chain_counts(sphere_poset(n))
    assert sum((-1) ** k * c for k, c in enumerate(counts)) == 1 + (-1) ** n
    # each length-k chain picks one of two elements on k+1 of the n+1 levels
    from math import comb

    assert counts == tuple(comb(n + 1, k + 1) * 2 ** (k + 1) for k in range(n + 1))


def test_chain_examples():
    assert chain_counts(sphere_poset(0)) == (2,)
    assert chain_counts(sphere_poset(1)) == (4, 4)
    assert chain_counts(FinitePoset(["*"], [])) == (1,)


@st.composite
def random_posets(draw):
    n = draw(st.integers(1, 6))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=10))
    covers = [(i, j) for i, j in pairs if i < j]
    return FinitePoset.from_covers(list(range(n)), covers)


@given(random_posets())
def test_chains_match_subset_enumeration(poset):
    chains = chain_list(poset)
    assert len(chains) == len(set(chains))
    assert sorted(chains) == sorted(brute_chains(poset))
    by_len = nondegenerate_chains(poset)
    for k, cs in by_len.items():
        assert all(len(c) == k + 1 for c in cs)
        keys = [[poset.index(x) for x in c] for c in cs]
        assert keys == sorted(keys)


def test_components():
    assert len(sphere_poset(0).components()) == 2
    assert len(sphere_poset(1).components()) == 1


# -- diagrams ------------------------------------------------------------------------


def test_constant_diagram_examples():
    P = sphere_poset(1)
    z = constant_diagram(P, ChainComplex.zero(2))
    assert all(z.at(x).is_zero() for x in P.elements)
    one = FinitePoset(["*"], [])
    c = ChainComplex(3, {0: 2, 1: 1}, {1: [[1], [1]]})
    assert constant_diagram(one, c).at("*") == c
    kk = constant_diagram(P, ChainComplex.point(2))
    assert all(kk.at(x) == ChainComplex.point(2) for x in P.elements)
    assert all(kk.along(x, y) == ChainMap.identity(ChainComplex.point(2)) for x, y in P.strict_pairs())
    kk.validate()
    assert zero_diagram(P, 2).at(1).is_zero()


def test_along_is_identity_on_diagonal():
    P = sphere_poset(1)
    d = constant_diagram(P, ChainComplex.point(3))
    assert d.along(3, 3) == ChainMap.identity(d.at(3))
    with pytest.raises(KeyError):
        d.along(3, 1)


def test_diagram_requires_all_transitions():
    P = sphere_poset(1)
    c = ChainComplex.point(2)
    with pytest.raises(InvalidStructure):
        PosetDiagram(P, {x: c for x in P.elements}, {})


def test_functoriality_checked():
    Q = FinitePoset.from_covers(["a", "b", "c"], [("a", "b"), ("b", "c")])
    c = ChainComplex.point(3)
    one = ChainMap(c, c, {0: [[1]]})
    two = ChainMap(c, c, {0: [[2]]})
    with pytest.raises(InvalidStructure):
        PosetDiagram(Q, {x: c for x in "abc"}, {("a", "b"): two, ("b", "c"): one, ("a", "c"): one})
    # over F_3, 2 * 2 = 1 so the same data is functorial
    PosetDiagram(Q, {x: c for x in "abc"}, {("a", "b"): two, ("b", "c"): two, ("a", "c"): one})


def test_from_covers_composes_and_detects_disagreement():
    # a square a < b, c < d: two paths from a to d
    Q = FinitePoset.from_covers("abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")])
    k = ChainComplex.point(3)
    m = lambda s: ChainMap(k, k, {0: [[s]]})
    d = PosetDiagram.from_covers(Q, {x: k for x in "abcd"}, {("a", "b"): m(2), ("b", "d"): m(2), ("a", "c"): m(1), ("c", "d"): m(1)})
    assert d.along("a", "d").f(0).tolist() == [[1]]
    with pytest.raises(InvalidStructure):
        PosetDiagram.from_covers(Q, {x: k for x in "abcd"}, {("a", "b"): m(2), ("b", "d"): m(1), ("a", "c"): m(1), ("c", "d"): m(1)})
    with pytest.raises(InvalidStructure):
        PosetDiagram.from_covers(Q, {x: k for x in "abcd"}, {("a", "b"): m(1)})


@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]), st.sampled_from([1, 2]))
def test_random_diagrams_are_strict(seed, p, n):
    rng = np.random.default_rng(seed)
    F = random_diagram(sphere_poset(n), p, rng, dims=(0, 3))
    F.validate()
    for f in F.transitions.values():
        f.validate()


def test_random_diagrams_deterministic():
    P = sphere_poset(2)
    a = random_diagram(P, 2, np.random.default_rng(7))
    b = random_diagram(P, 2, np.random.default_rng(7))
    assert a == b


def test_random_diagrams_have_nonzero_transitions():
    P = sphere_poset(2)
    rng = np.random.default_rng(11)
    nonzero = 0
    for _ in range(10):
        F = random_diagram(P, 2, rng, dims=(1, 2), degrees=(0, 1))
        nonzero += sum(not f.is_zero() for f in F.transitions.values())
    assert nonzero > 30


def test_diagram_map_naturality_checked():
    P = sphere_poset(1)
    c = ChainComplex.point(3)
    F = constant_diagram(P, c)
    comps = {x: ChainMap(c, c, {0: [[1]]}) for x in P.elements}
    comps[3] = ChainMap(c, c, {0: [[2]]})
    with pytest.raises(InvalidStructure):
        DiagramMap(F, F, comps)


@given(st.integers(0, 2**32 - 1))
def test_diagramwise_cones_and_fibers(seed):
    rng = np.random.default_rng(seed)
    P = sphere_poset(1)
    v = random_complex(3, 3, rng)
    w = random_complex(3, 3, rng)
    f = random_chain_map(v, w, rng)
    phi = constant_map(P, f)
    cone_diagram(phi).validate()
    fiber_diagram(phi).validate()
    cone_inclusion_map(phi).validate()
    fiber_inclusion_map(phi).validate()


def test_constant_map_of_scaled_identity():
    P = sphere_poset(0)
    c = ChainComplex.point(5)
    phi = constant_map(P, ChainMap(c, c, {0: Matrix(5, [[3]])}))
    assert phi.is_pointwise_qis()
