"""Homotopy (co)limits over finite posets via the nondegenerate bar construction.

Both constructions are total complexes of blocks indexed by chains
``s = (x_0 < ... < x_k)``:

* ``hocolim F`` has block ``F(x_0)[k]`` and horizontal differential
  ``(s, a) -> (d_0 s, F(x_0 -> x_1) a) + sum_{i>=1} (-1)^i (d_i s, a)``.
* ``holim F`` has block ``F(x_k)[-k]`` and coboundary
  ``(dphi)(t) = sum_{i<=k} (-1)^i phi(d_i t) + (-1)^{k+1} F(t_k -> t_{k+1}) phi(d_{k+1} t)``.

A block shifted by ``s`` carries the internal differential with sign ``(-1)^s``,
which makes the total differential square to zero.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .complexes import (
    ChainComplex,
    ChainMap,
    cone,
    is_qis,
)
from .errors import DimensionMismatch, InvalidStructure, UnsupportedScenario
from .linalg import Matrix
from .posets import (
    Chain,
    DiagramMap,
    FinitePoset,
    PosetDiagram,
    chain_list,
    cone_diagram,
    cone_inclusion_map,
    constant_diagram,
    fiber_diagram,
    fiber_inclusion_map,
    sphere_dimension_of,
    sphere_poset,
)


@dataclass(frozen=True)
class Block:
    key: Hashable
    stalk: ChainComplex
    shift: int


@dataclass(frozen=True)
class Horizontal:
    """A summand of the total differential from block ``src`` to block ``tgt``.

    ``tgt`` must have shift one lower than ``src``; ``map`` is ``None`` for the
    identity of a shared stalk.
    """

    src: Hashable
    tgt: Hashable
    sign: int
    map: ChainMap | None = None


class TotalComplex:
    """A chain complex assembled from shifted blocks, remembering the block layout."""

    def __init__(self, p: int, blocks: Sequence[Block], horizontals: Sequence[Horizontal], *, check: bool = True):
        self.p = p
        self.blocks: list[Block] = list(blocks)
        self.block = {b.key: b for b in self.blocks}
        if len(self.block) != len(self.blocks):
            raise InvalidStructure("duplicate block keys")
        # offsets[m][key] = start index of block ``key`` in total degree m
        self.offsets: dict[int, dict] = {}
        dims: dict[int, int] = {}
        for b in self.blocks:
            for i, n in b.stalk.dims.items():
                m = i + b.shift
                self.offsets.setdefault(m, {})
                self.offsets[m][b.key] = -1
        for m in self.offsets:
            pos = 0
            for b in self.blocks:
                if b.key in self.offsets[m]:
                    self.offsets[m][b.key] = pos
                    pos += b.stalk.dim(m - b.shift)
            dims[m] = pos
        # entries[m] lists (row block, column block, matrix) summands of D_m
        entries: dict[int, list] = {m: [] for m in dims}
        for b in self.blocks:
            sign = -1 if b.shift % 2 else 1
            for i, d in b.stalk.differentials.items():
                entries[i + b.shift].append((b.key, b.key, sign * d.array))
        for h in horizontals:
            sb, tb = self.block[h.src], self.block[h.tgt]
            if tb.shift != sb.shift - 1:
                raise InvalidStructure(f"horizontal {h.src!r} -> {h.tgt!r} must lower the shift by one")
            for i, n in sb.stalk.dims.items():
                if tb.stalk.dim(i) == 0:
                    continue
                comp = np.eye(n, dtype=np.int64) if h.map is None else h.map.f(i).array
                entries[i + sb.shift].append((h.tgt, h.src, h.sign * comp))
        if check:
            self._check_square_zero(entries)
        diffs = {}
        for m, ents in entries.items():
            if m - 1 not in dims:
                continue
            a = np.zeros((dims[m - 1], dims[m]), dtype=np.int64)
            for rk, ck, blk in ents:
                r, c = self.offsets[m - 1][rk], self.offsets[m][ck]
                a[r : r + blk.shape[0], c : c + blk.shape[1]] += blk
            diffs[m] = Matrix(p, a % p)
        self.complex = ChainComplex(p, dims, diffs, check=False)

    def _check_square_zero(self, entries: dict[int, list]) -> None:
        """Exact ``D_{m-1} D_m = 0``, computed on the block-sparse summands."""
        p = self.p
        for m, ents in entries.items():
            lower: dict = {}
            for rk, ck, blk in entries.get(m - 1, []):
                lower.setdefault(ck, []).append((rk, blk))
            acc: dict = {}
            for mid, ck, blk in ents:
                for rk, low in lower.get(mid, []):
                    prod = low @ blk
                    key = (rk, ck)
                    acc[key] = acc[key] + prod if key in acc else prod
            for (rk, ck), v in acc.items():
                if np.any(v % p):
                    raise InvalidStructure(f"total differential does not square to zero between blocks {ck!r} and {rk!r} in degree {m}")

    def block_range(self, key: Hashable, m: int) -> tuple[int, int] | None:
        """Index range of block ``key`` inside total degree ``m``."""
        off = self.offsets.get(m, {}).get(key)
        if off is None:
            return None
        b = self.block[key]
        return off, off + b.stalk.dim(m - b.shift)


def block_map(
    source: TotalComplex,
    target: TotalComplex,
    pieces: Sequence[tuple[Hashable, Hashable, ChainMap | None]],
) -> ChainMap:
    """Chain map assembled from ``(src_key, tgt_key, map)`` pieces between blocks of equal shift.

    ``None`` means the identity.  Pieces are added into the same entries.
    The result is not checked to commute with the differentials.
    """
    p = source.p
    sc, tc = source.complex, target.complex
    mats: dict[int, np.ndarray] = {}
    for skey, tkey, f in pieces:
        sb, tb = source.block[skey], target.block[tkey]
        if sb.shift != tb.shift:
            raise DimensionMismatch("block map pieces must preserve the shift")
        for i, n in sb.stalk.dims.items():
            m = i + sb.shift
            rows = tb.stalk.dim(i)
            if rows == 0:
                continue
            comp = Matrix.identity(p, n) if f is None else f.f(i)
            if m not in mats:
                mats[m] = np.zeros((tc.dim(m), sc.dim(m)), dtype=np.int64)
            r, c = target.offsets[m][tkey], source.offsets[m][skey]
            mats[m][r : r + comp.rows, c : c + comp.cols] += comp.array
    return ChainMap(sc, tc, {m: Matrix(p, a % p) for m, a in mats.items()}, check=False)


def _faces(chain: Chain) -> list[Chain]:
    return [chain[:i] + chain[i + 1 :] for i in range(len(chain))]


# ---------------------------------------------------------------------------
# the two bar constructions


def _hocolim_total(
    diagram: PosetDiagram,
    chains: Sequence[Chain],
    *,
    flip_face: tuple[Chain, int] | None = None,
    check: bool = True,
) -> TotalComplex:
    blocks = [Block(s, diagram.at(s[0]), len(s) - 1) for s in chains]
    hs = []
    for s in chains:
        k = len(s) - 1
        for i, face in enumerate(_faces(s) if k else []):
            sign = -1 if i % 2 else 1
            if flip_face is not None and flip_face == (s, i):
                sign = -sign
            hs.append(Horizontal(s, face, sign, diagram.along(s[0], s[1]) if i == 0 else None))
    return TotalComplex(diagram.p, blocks, hs, check=check)


def _holim_total(
    diagram: PosetDiagram,
    chains: Sequence[Chain],
    *,
    flip_face: tuple[Chain, int] | None = None,
    check: bool = True,
) -> TotalComplex:
    blocks = [Block(s, diagram.at(s[-1]), -(len(s) - 1)) for s in chains]
    hs = []
    for t in chains:
        k1 = len(t) - 1  # t has faces d_0 .. d_{k1}
        if k1 == 0:
            continue
        for i, face in enumerate(_faces(t)):
            sign = -1 if i % 2 else 1
            if flip_face is not None and flip_face == (t, i):
                sign = -sign
            f = diagram.along(t[-2], t[-1]) if i == k1 else None
            hs.append(Horizontal(face, t, sign, f))
    return TotalComplex(diagram.p, blocks, hs, check=check)


def hocolim_total(diagram: PosetDiagram, **kw) -> TotalComplex:
    return _hocolim_total(diagram, chain_list(diagram.base), **kw)


def holim_total(diagram: PosetDiagram, **kw) -> TotalComplex:
    return _holim_total(diagram, chain_list(diagram.base), **kw)


def hocolim(diagram: PosetDiagram) -> ChainComplex:
    """The homotopy colimit ``g_! F`` (derived left adjoint of the constant diagram)."""
    return hocolim_total(diagram).complex


def holim(diagram: PosetDiagram) -> ChainComplex:
    """The homotopy limit ``g_* F`` (derived right adjoint of the constant diagram)."""
    return holim_total(diagram).complex


def hocolim_map(phi: DiagramMap) -> ChainMap:
    src, tgt = hocolim_total(phi.source), hocolim_total(phi.target)
    return block_map(src, tgt, [(s, s, phi.at(s[0])) for s in chain_list(phi.source.base)])


def holim_map(phi: DiagramMap) -> ChainMap:
    src, tgt = holim_total(phi.source), holim_total(phi.target)
    return block_map(src, tgt, [(s, s, phi.at(s[-1])) for s in chain_list(phi.source.base)])


def unit_map(v: ChainComplex, poset: FinitePoset) -> ChainMap:
    """``v -> g_* g^* v``: the diagonal into the length-0 blocks."""
    tot = holim_total(constant_diagram(poset, v))
    single = TotalComplex(v.p, [Block("v", v, 0)], [])
    return block_map(single, tot, [("v", (x,), None) for x in poset.elements])


def counit_map(poset: FinitePoset, v: ChainComplex) -> ChainMap:
    """``g_! g^* v -> v``: the fold map on length-0 blocks."""
    tot = hocolim_total(constant_diagram(poset, v))
    single = TotalComplex(v.p, [Block("v", v, 0)], [])
    return block_map(tot, single, [((x,), "v", None) for x in poset.elements])


def sphere_twist(v: ChainComplex, n: int) -> ChainComplex:
    """The twist ``T_D v = cone(v -> g_* g^* v)`` over P_n."""
    return cone(unit_map(v, sphere_poset(n)))


# ---------------------------------------------------------------------------
# replacements


@dataclass
class ReplacementDiagram:
    """A (co)fibrant replacement together with the block layout of each stalk.

    ``kind`` is ``"cofibrant"`` (stalk at ``x`` is the bar complex over
    chains with maximum ``<= x``) or ``"fibrant"`` (chains with minimum ``>= x``).
    ``augmentation`` is ``PF -> F`` for the cofibrant kind and ``F -> QF``
    for the fibrant kind.
    """

    kind: str
    original: PosetDiagram
    diagram: PosetDiagram
    layouts: dict
    chains: dict
    augmentation: DiagramMap = field(repr=False)


def cofibrant_replacement(diagram: PosetDiagram) -> ReplacementDiagram:
    base = diagram.base
    every = chain_list(base)
    chains = {x: [s for s in every if base.leq(s[-1], x)] for x in base.elements}
    layouts = {x: _hocolim_total(diagram, chains[x]) for x in base.elements}
    stalks = {x: layouts[x].complex for x in base.elements}
    along = {
        (x, y): block_map(layouts[x], layouts[y], [(s, s, None) for s in chains[x]])
        for x, y in base.strict_pairs()
    }
    rep = PosetDiagram(base, stalks, along, check=False)
    single = {x: TotalComplex(diagram.p, [Block("v", diagram.at(x), 0)], []) for x in base.elements}
    q = DiagramMap(
        rep,
        diagram,
        {
            x: block_map(layouts[x], single[x], [((z,), "v", diagram.along(z, x)) for z in base.down(x)])
            for x in base.elements
        },
        check=False,
    )
    return ReplacementDiagram("cofibrant", diagram, rep, layouts, chains, q)


def fibrant_replacement(diagram: PosetDiagram) -> ReplacementDiagram:
    base = diagram.base
    every = chain_list(base)
    chains = {x: [s for s in every if base.leq(x, s[0])] for x in base.elements}
    layouts = {x: _holim_total(diagram, chains[x]) for x in base.elements}
    stalks = {x: layouts[x].complex for x in base.elements}
    along = {
        (x, y): block_map(layouts[x], layouts[y], [(s, s, None) for s in chains[y]])
        for x, y in base.strict_pairs()
    }
    rep = PosetDiagram(base, stalks, along, check=False)
    single = {x: TotalComplex(diagram.p, [Block("v", diagram.at(x), 0)], []) for x in base.elements}
    j = DiagramMap(
        diagram,
        rep,
        {
            x: block_map(single[x], layouts[x], [("v", (z,), diagram.along(x, z)) for z in base.up(x)])
            for x in base.elements
        },
        check=False,
    )
    return ReplacementDiagram("fibrant", diagram, rep, layouts, chains, j)


def to_constant_hocolim(rep: ReplacementDiagram) -> DiagramMap:
    """``PF -> g^* hocolim F``: each stalk includes as a sub-bar complex."""
    if rep.kind != "cofibrant":
        raise ValueError("needs a cofibrant replacement")
    full = hocolim_total(rep.original)
    target = constant_diagram(rep.original.base, full.complex)
    comps = {x: block_map(rep.layouts[x], full, [(s, s, None) for s in rep.chains[x]]) for x in rep.original.base.elements}
    return DiagramMap(rep.diagram, target, comps, check=False)


def from_constant_holim(rep: ReplacementDiagram) -> DiagramMap:
    """``g^* holim F -> QF``: each stalk is a restriction of cochains."""
    if rep.kind != "fibrant":
        raise ValueError("needs a fibrant replacement")
    full = holim_total(rep.original)
    source = constant_diagram(rep.original.base, full.complex)
    comps = {x: block_map(full, rep.layouts[x], [(s, s, None) for s in rep.chains[x]]) for x in rep.original.base.elements}
    return DiagramMap(source, rep.diagram, comps, check=False)


def colimit_of_replacement(rep: ReplacementDiagram) -> ChainComplex:
    """Strict colimit of ``PF``, assembled from the stalk data of ``PF`` alone.

    Each chain ``s`` appears as a block of ``PF(x)`` for every ``x >= max s``
    and the transitions identify these copies, so the colimit has one block
    per chain.  The column of block ``s`` is read off from ``PF(max s)``,
    which contains every face of ``s``.
    """
    return _glue(rep, by_column=True)


def limit_of_replacement(rep: ReplacementDiagram) -> ChainComplex:
    """Strict limit of ``QF``; the row of block ``t`` is read from ``QF(min t)``."""
    return _glue(rep, by_column=False)


def _glue(rep: ReplacementDiagram, *, by_column: bool) -> ChainComplex:
    every = chain_list(rep.original.base)
    p = rep.original.p
    home = (lambda s: s[-1]) if by_column else (lambda s: s[0])
    glued = TotalComplex(p, [rep.layouts[home(s)].block[s] for s in every], [], check=False)
    dims = glued.complex.dims
    mats = {m: np.zeros((dims.get(m - 1, 0), n), dtype=np.int64) for m, n in dims.items() if m - 1 in dims}
    for s in every:
        lay = rep.layouts[home(s)]
        for m, a in mats.items():
            for t in rep.chains[home(s)]:
                col_key, row_key = (s, t) if by_column else (t, s)
                cr, rr = lay.block_range(col_key, m), lay.block_range(row_key, m - 1)
                if cr is None or rr is None:
                    continue
                block = lay.complex.d(m).array[rr[0] : rr[1], cr[0] : cr[1]]
                r0, c0 = glued.offsets[m - 1][row_key], glued.offsets[m][col_key]
                a[r0 : r0 + block.shape[0], c0 : c0 + block.shape[1]] = block
    return ChainComplex(p, dims, {m: Matrix(p, a) for m, a in mats.items()}, check=True)


# ---------------------------------------------------------------------------
# the two conditions of the 2/4 criterion over the sphere posets


@dataclass
class ConditionResult:
    holds: bool
    witness: ChainMap = field(repr=False)
    condition: int = 0
    sphere_dimension: int | None = None

    def __bool__(self) -> bool:
        return self.holds


def _require_sphere(diagram: PosetDiagram) -> int:
    n = diagram.base.sphere_dimension if diagram.base.sphere_dimension is not None else sphere_dimension_of(diagram.base)
    if n is None:
        raise UnsupportedScenario("the 2/4 conditions are only implemented over the sphere posets P_n")
    return n


def condition1_witness(diagram: PosetDiagram) -> ChainMap:
    """``g_! f -> g_* g^* g_! f -> g_* T'(f)`` with ``T'(f) = cone(P f -> g^* g_! f)``."""
    base = diagram.base
    rep = cofibrant_replacement(diagram)
    incl = to_constant_hocolim(rep)
    h = incl.target.at(base.elements[0])
    u = unit_map(h, base)
    alpha = holim_map(cone_inclusion_map(incl))
    return alpha @ u


def condition2_witness(diagram: PosetDiagram) -> ChainMap:
    """``g_! T_X(f) -> g_! g^* g_* f -> g_* f`` with ``T_X(f) = fiber(g^* g_* f -> Q f)``."""
    base = diagram.base
    rep = fibrant_replacement(diagram)
    proj = from_constant_holim(rep)
    lim = proj.source.at(base.elements[0])
    beta = hocolim_map(fiber_inclusion_map(proj))
    return counit_map(base, lim) @ beta


def check_condition1(diagram: PosetDiagram) -> ConditionResult:
    n = _require_sphere(diagram)
    w = condition1_witness(diagram)
    return ConditionResult(is_qis(w), w, 1, n)


def check_condition2(diagram: PosetDiagram) -> ConditionResult:
    n = _require_sphere(diagram)
    w = condition2_witness(diagram)
    return ConditionResult(is_qis(w), w, 2, n)


check_24_condition1 = check_condition1
check_24_condition2 = check_condition2


def twist_X(diagram: PosetDiagram) -> PosetDiagram:
    """``T_X f = fiber(g^* g_* f -> Q f)``."""
    return fiber_diagram(from_constant_holim(fibrant_replacement(diagram)))


def twist_prime(diagram: PosetDiagram) -> PosetDiagram:
    """``T' f = cone(P f -> g^* g_! f)``."""
    return cone_diagram(to_constant_hocolim(cofibrant_replacement(diagram)))
