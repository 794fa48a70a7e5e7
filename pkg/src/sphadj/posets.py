"""Finite posets, the sphere posets P_n and strict diagrams of complexes over them."""

from __future__ import annotations

from itertools import product
from typing import Hashable, Iterable, Mapping, Sequence

from .complexes import (
    ChainComplex,
    ChainMap,
    cone,
    cone_functorial,
    cone_inclusion,
    fiber,
    fiber_functorial,
    fiber_inclusion,
)
from .errors import DimensionMismatch, InvalidStructure, ModulusMismatch, ResourceRefusal

Element = Hashable
Chain = tuple

DEFAULT_SPHERE_BOUND = 4


class FinitePoset:
    """A finite partially ordered set.

    ``elements`` fixes the enumeration order used for every deterministic
    listing (chains, blocks, documents).  ``relations`` are pairs ``(x, y)``
    meaning ``x <= y``; the reflexive pairs may be omitted.
    """

    def __init__(self, elements: Sequence[Element], relations: Iterable[tuple[Element, Element]]):
        self.elements: tuple = tuple(elements)
        if len(set(self.elements)) != len(self.elements):
            raise InvalidStructure("duplicate poset elements")
        self._index = {x: i for i, x in enumerate(self.elements)}
        leq = {(x, x) for x in self.elements}
        for x, y in relations:
            if x not in self._index or y not in self._index:
                raise InvalidStructure(f"relation ({x!r}, {y!r}) mentions an unknown element")
            leq.add((x, y))
        self._leq = frozenset(leq)
        self._check_order()
        self._up = {x: tuple(y for y in self.elements if (x, y) in self._leq) for x in self.elements}
        self._down = {x: tuple(y for y in self.elements if (y, x) in self._leq) for x in self.elements}
        self.sphere_dimension: int | None = None

    @classmethod
    def from_covers(cls, elements: Sequence[Element], covers: Iterable[tuple[Element, Element]]) -> "FinitePoset":
        """Poset generated by the given cover relations (transitive closure taken)."""
        elements = tuple(elements)
        up: dict = {x: set() for x in elements}
        for x, y in covers:
            if x not in up or y not in up:
                raise InvalidStructure(f"cover ({x!r}, {y!r}) mentions an unknown element")
            up[x].add(y)
        closure = set()
        for x in elements:
            stack, seen = [x], {x}
            while stack:
                z = stack.pop()
                for w in up[z]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            closure.update((x, y) for y in seen)
        return cls(elements, closure)

    def _check_order(self) -> None:
        for x, y in self._leq:
            if x != y and (y, x) in self._leq:
                raise InvalidStructure(f"antisymmetry fails for {x!r}, {y!r}")
        for (x, y), (y2, z) in product(self._leq, self._leq):
            if y == y2 and (x, z) not in self._leq:
                raise InvalidStructure(f"transitivity fails for {x!r} <= {y!r} <= {z!r}")

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._index

    def index(self, x: Element) -> int:
        return self._index[x]

    def leq(self, x: Element, y: Element) -> bool:
        return (x, y) in self._leq

    def lt(self, x: Element, y: Element) -> bool:
        return x != y and (x, y) in self._leq

    def up(self, x: Element) -> tuple:
        """Elements ``>= x`` in enumeration order."""
        return self._up[x]

    def down(self, x: Element) -> tuple:
        """Elements ``<= x`` in enumeration order."""
        return self._down[x]

    def strict_pairs(self) -> list[tuple]:
        return [(x, y) for x in self.elements for y in self._up[x] if y != x]

    def covers(self) -> list[tuple]:
        """Hasse diagram edges ``x < y`` with nothing strictly between."""
        out = []
        for x, y in self.strict_pairs():
            if not any(self.lt(x, z) and self.lt(z, y) for z in self.elements):
                out.append((x, y))
        return out

    def linear_extension(self) -> list:
        """Elements sorted so that ``x < y`` implies ``x`` comes first (stable in enumeration order)."""
        return sorted(self.elements, key=lambda x: (len(self._down[x]), self._index[x]))

    def components(self) -> list[tuple]:
        """Connected components of the comparability graph."""
        seen: set = set()
        out = []
        for x in self.elements:
            if x in seen:
                continue
            comp, stack = [], [x]
            seen.add(x)
            while stack:
                z = stack.pop()
                comp.append(z)
                for w in self._up[z] + self._down[z]:
                    if w not in seen:
                        seen.add(w)
                        stack.append(w)
            out.append(tuple(sorted(comp, key=self.index)))
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, FinitePoset):
            return NotImplemented
        return self.elements == other.elements and self._leq == other._leq

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        if self.sphere_dimension is not None:
            return f"FinitePoset(P_{self.sphere_dimension})"
        return f"FinitePoset({list(self.elements)}, covers={self.covers()})"


def sphere_poset(n: int, bound: int = DEFAULT_SPHERE_BOUND) -> FinitePoset:
    """The poset P_n with elements ``1..2n+2``.

    P_0 is two incomparable points; P_n adds ``2n+1`` and ``2n+2`` above every
    element of P_{n-1}, incomparable to each other.
    """
    if n < 0:
        raise ValueError(f"sphere dimension must be non-negative, got {n}")
    if n > bound:
        raise ResourceRefusal(f"P_{n} exceeds the configured bound n <= {bound}")
    elements = [1, 2]
    relations: list[tuple[int, int]] = []
    for m in range(1, n + 1):
        new = (2 * m + 1, 2 * m + 2)
        relations.extend((x, t) for x in elements for t in new)
        elements.extend(new)
    poset = FinitePoset(elements, relations)
    poset.sphere_dimension = n
    return poset


def sphere_dimension_of(poset: FinitePoset) -> int | None:
    """``n`` if ``poset`` equals P_n (as labeled posets), else ``None``."""
    size = len(poset)
    if size < 2 or size % 2:
        return None
    n = size // 2 - 1
    if n > DEFAULT_SPHERE_BOUND:
        return None
    return n if poset == sphere_poset(n) else None


def nondegenerate_chains(poset: FinitePoset) -> dict[int, list[Chain]]:
    """Strictly increasing chains ``x_0 < ... < x_k`` keyed by length ``k``.

    Within a length, chains are ordered lexicographically by element position.
    """
    out: dict[int, list[Chain]] = {}

    def extend(chain: tuple) -> None:
        out.setdefault(len(chain) - 1, []).append(chain)
        last = chain[-1]
        for y in poset.up(last):
            if y != last:
                extend(chain + (y,))

    for x in poset.elements:
        extend((x,))
    for k in out:
        out[k].sort(key=lambda c: [poset.index(z) for z in c])
    return dict(sorted(out.items()))


def chain_list(poset: FinitePoset) -> list[Chain]:
    """All nondegenerate chains, by length then lexicographically."""
    return [c for _, cs in nondegenerate_chains(poset).items() for c in cs]


# ---------------------------------------------------------------------------
# diagrams


class PosetDiagram:
    """A strict functor from a finite poset to chain complexes.

    ``along[(x, y)]`` is required for every ``x < y``; the identities on
    ``x = y`` are implicit.  Strict functoriality is checked entry-exactly.
    """

    def __init__(
        self,
        base: FinitePoset,
        stalks: Mapping[Element, ChainComplex],
        along: Mapping[tuple, ChainMap],
        *,
        check: bool = True,
    ):
        self.base = base
        missing = [x for x in base.elements if x not in stalks]
        if missing:
            raise InvalidStructure(f"no stalk given for {missing}")
        self.stalks = {x: stalks[x] for x in base.elements}
        ps = {c.p for c in self.stalks.values()}
        if len(ps) > 1:
            raise ModulusMismatch(f"stalks over several fields {sorted(ps)}")
        self.p = ps.pop() if ps else None
        self._along: dict[tuple, ChainMap] = {}
        for x, y in base.strict_pairs():
            if (x, y) not in along:
                raise InvalidStructure(f"no transition given for {x!r} < {y!r}")
            self._along[(x, y)] = along[(x, y)]
        extra = [k for k in along if k not in self._along and k[0] != k[1]]
        if extra:
            raise InvalidStructure(f"transitions given for non-relations {extra}")
        if check:
            self.validate()

    def at(self, x: Element) -> ChainComplex:
        return self.stalks[x]

    def along(self, x: Element, y: Element) -> ChainMap:
        if x == y:
            return ChainMap.identity(self.stalks[x])
        if (x, y) not in self._along:
            raise KeyError(f"{x!r} is not below {y!r}")
        return self._along[(x, y)]

    @property
    def transitions(self) -> dict[tuple, ChainMap]:
        return dict(self._along)

    def validate(self) -> None:
        for (x, y), f in self._along.items():
            if f.source != self.stalks[x] or f.target != self.stalks[y]:
                raise DimensionMismatch(f"transition {x!r} -> {y!r} has wrong endpoints")
        b = self.base
        for x, y in b.strict_pairs():
            for z in b.up(y):
                if z == y:
                    continue
                if self._along[(y, z)] @ self._along[(x, y)] != self._along[(x, z)]:
                    raise InvalidStructure(f"functoriality fails for {x!r} < {y!r} < {z!r}")

    @classmethod
    def from_covers(
        cls,
        base: FinitePoset,
        stalks: Mapping[Element, ChainComplex],
        cover_maps: Mapping[tuple, ChainMap],
    ) -> "PosetDiagram":
        """Build a diagram from maps on Hasse covers, composing along every path.

        Raises if two paths between the same pair disagree.
        """
        covers = base.covers()
        missing = [c for c in covers if c not in cover_maps]
        if missing:
            raise InvalidStructure(f"no transition for covers {missing}")
        extra = [c for c in cover_maps if c not in set(covers)]
        if extra:
            raise InvalidStructure(f"transitions given for non-covers {extra}")
        covered_by: dict = {y: [x for x, y2 in covers if y2 == y] for y in base.elements}
        along: dict[tuple, ChainMap] = {}
        order = base.linear_extension()
        for x in base.elements:
            for y in order:
                if not base.lt(x, y):
                    continue
                candidates = []
                for z in covered_by[y]:
                    if z == x:
                        candidates.append(cover_maps[(z, y)])
                    elif base.lt(x, z):
                        candidates.append(cover_maps[(z, y)] @ along[(x, z)])
                first = candidates[0]
                for other in candidates[1:]:
                    if other != first:
                        raise InvalidStructure(f"paths from {x!r} to {y!r} give different composites")
                along[(x, y)] = first
        return cls(base, stalks, along, check=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PosetDiagram):
            return NotImplemented
        return (
            self.base == other.base
            and all(self.stalks[x] == other.stalks[x] for x in self.base.elements)
            and all(self._along[k] == other._along[k] for k in self._along)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"PosetDiagram({self.base!r}, dims={ {x: c.dims for x, c in self.stalks.items()} })"


class DiagramMap:
    """A strictly natural transformation between diagrams over the same poset."""

    def __init__(
        self,
        source: PosetDiagram,
        target: PosetDiagram,
        components: Mapping[Element, ChainMap],
        *,
        check: bool = True,
    ):
        if source.base != target.base:
            raise DimensionMismatch("diagram map between diagrams over different posets")
        self.source = source
        self.target = target
        self.components = {x: components[x] for x in source.base.elements}
        if check:
            self.validate()

    def at(self, x: Element) -> ChainMap:
        return self.components[x]

    def validate(self) -> None:
        for x, f in self.components.items():
            if f.source != self.source.at(x) or f.target != self.target.at(x):
                raise DimensionMismatch(f"component at {x!r} has wrong endpoints")
        for x, y in self.source.base.strict_pairs():
            lhs = self.components[y] @ self.source.along(x, y)
            rhs = self.target.along(x, y) @ self.components[x]
            if lhs != rhs:
                raise InvalidStructure(f"naturality fails on {x!r} < {y!r}")

    def is_pointwise_qis(self) -> bool:
        from .complexes import is_qis

        return all(is_qis(f) for f in self.components.values())


def constant_diagram(poset: FinitePoset, c: ChainComplex) -> PosetDiagram:
    """The pullback ``g^* c``: stalk ``c`` everywhere, identity transitions."""
    ident = ChainMap.identity(c)
    return PosetDiagram(
        poset,
        {x: c for x in poset.elements},
        {pair: ident for pair in poset.strict_pairs()},
        check=False,
    )


def zero_diagram(poset: FinitePoset, p: int) -> PosetDiagram:
    return constant_diagram(poset, ChainComplex.zero(p))


def constant_map(poset: FinitePoset, f: ChainMap) -> DiagramMap:
    """``g^* f`` between constant diagrams."""
    return DiagramMap(
        constant_diagram(poset, f.source),
        constant_diagram(poset, f.target),
        {x: f for x in poset.elements},
        check=False,
    )


def cone_diagram(phi: DiagramMap) -> PosetDiagram:
    """Stalkwise mapping cone of a strict diagram map."""
    src, tgt = phi.source, phi.target
    base = src.base
    stalks = {x: cone(phi.at(x)) for x in base.elements}
    along = {
        (x, y): cone_functorial(phi.at(x), phi.at(y), src.along(x, y), tgt.along(x, y), check=False)
        for x, y in base.strict_pairs()
    }
    return PosetDiagram(base, stalks, along, check=False)


def cone_inclusion_map(phi: DiagramMap) -> DiagramMap:
    """The strict map ``target -> cone(phi)``."""
    return DiagramMap(
        phi.target,
        cone_diagram(phi),
        {x: cone_inclusion(phi.at(x)) for x in phi.source.base.elements},
        check=False,
    )


def fiber_diagram(phi: DiagramMap) -> PosetDiagram:
    """Stalkwise ``cone(phi)[-1]``."""
    src, tgt = phi.source, phi.target
    base = src.base
    stalks = {x: fiber(phi.at(x)) for x in base.elements}
    along = {
        (x, y): fiber_functorial(phi.at(x), phi.at(y), src.along(x, y), tgt.along(x, y), check=False)
        for x, y in base.strict_pairs()
    }
    return PosetDiagram(base, stalks, along, check=False)


def fiber_inclusion_map(phi: DiagramMap) -> DiagramMap:
    """The strict map ``fiber(phi) -> source``."""
    return DiagramMap(
        fiber_diagram(phi),
        phi.source,
        {x: fiber_inclusion(phi.at(x)) for x in phi.source.base.elements},
        check=False,
    )
