"""Seeded random complexes, chain maps and strict diagrams.

Everything is generated valid by construction: differentials are drawn inside
the kernel of the previous one, and chain maps or diagram transitions are
drawn from the solution space of the linear conditions they must satisfy.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .complexes import ChainComplex, ChainMap, Homotopy
from .linalg import Matrix, kernel_basis
from .posets import FinitePoset, PosetDiagram

DEFAULT_DEGREES = (-1, 0, 1)


def _random_matrix(p: int, rows: int, cols: int, rng: np.random.Generator) -> Matrix:
    return Matrix(p, rng.integers(0, p, size=(rows, cols), dtype=np.int64))


def random_complex(
    p: int,
    total_dim: int,
    rng: np.random.Generator,
    degrees: Sequence[int] = DEFAULT_DEGREES,
) -> ChainComplex:
    """A complex of the given total dimension spread over ``degrees``."""
    degrees = sorted(degrees)
    cuts = rng.integers(0, len(degrees), size=total_dim)
    dims = {d: int(np.sum(cuts == j)) for j, d in enumerate(degrees)}
    diffs: dict[int, Matrix] = {}
    prev: Matrix | None = None  # d_{i-1}
    for i in degrees:
        rows, cols = dims.get(i - 1, 0), dims[i]
        if rows and cols:
            k = kernel_basis(prev) if prev is not None else Matrix.identity(p, rows)
            d = k @ _random_matrix(p, k.cols, cols, rng)
            diffs[i] = d
            prev = d
        else:
            prev = Matrix.zeros(p, rows, cols)
    return ChainComplex(p, dims, diffs)


class _LinearSystem:
    """Homogeneous system in matrix unknowns, ``sum_j A_j X_j B_j = 0``."""

    def __init__(self, p: int):
        self.p = p
        self.shapes: dict = {}
        self.offsets: dict = {}
        self.size = 0
        self.rows: list[np.ndarray] = []

    def unknown(self, key, rows: int, cols: int) -> None:
        self.shapes[key] = (rows, cols)
        self.offsets[key] = self.size
        self.size += rows * cols

    def equation(self, terms: list[tuple]) -> None:
        """``terms`` are ``(key, A, B, sign)``; row-major vec gives ``kron(A, B^T)``."""
        block = None
        for key, a, b, sign in terms:
            if key not in self.shapes or self.shapes[key][0] * self.shapes[key][1] == 0:
                continue
            coeff = np.kron(a.array, b.array.T) * sign
            if block is None:
                block = np.zeros((coeff.shape[0], self.size), dtype=np.int64)
            off = self.offsets[key]
            block[:, off : off + coeff.shape[1]] += coeff
        if block is not None and block.shape[0]:
            self.rows.append(block % self.p)

    def random_solution(self, rng: np.random.Generator) -> dict:
        if self.rows:
            padded = [np.pad(r, ((0, 0), (0, self.size - r.shape[1]))) for r in self.rows]
            k = kernel_basis(Matrix(self.p, np.vstack(padded)))
        else:
            k = Matrix.identity(self.p, self.size)
        vec = (k @ _random_matrix(self.p, k.cols, 1, rng)).array[:, 0] if k.cols else np.zeros(self.size, dtype=np.int64)
        out = {}
        for key, (r, c) in self.shapes.items():
            off = self.offsets[key]
            out[key] = Matrix(self.p, vec[off : off + r * c].reshape(r, c))
        return out


def _chain_map_unknowns(sys: _LinearSystem, tag, src: ChainComplex, tgt: ChainComplex) -> list[int]:
    degrees = sorted(set(src.degrees) & set(tgt.degrees))
    for i in degrees:
        sys.unknown((tag, i), tgt.dim(i), src.dim(i))
    # f_{i-1} d^src_i - d^tgt_i f_i = 0
    p = src.p
    for i in sorted(set(src.degrees) | {j + 1 for j in tgt.degrees}):
        sys.equation(
            [
                ((tag, i - 1), Matrix.identity(p, tgt.dim(i - 1)), src.d(i), 1),
                ((tag, i), tgt.d(i), Matrix.identity(p, src.dim(i)), -1),
            ]
        )
    return degrees


def random_chain_map(src: ChainComplex, tgt: ChainComplex, rng: np.random.Generator) -> ChainMap:
    """A uniformly random element of the space of chain maps ``src -> tgt``."""
    sys = _LinearSystem(src.p)
    degrees = _chain_map_unknowns(sys, "f", src, tgt)
    sol = sys.random_solution(rng)
    return ChainMap(src, tgt, {i: sol[("f", i)] for i in degrees})


def random_homotopy(src: ChainComplex, tgt: ChainComplex, rng: np.random.Generator) -> Homotopy:
    """Random degree +1 maps ``h_i: src_i -> tgt_{i+1}``."""
    comps = {i: _random_matrix(src.p, tgt.dim(i + 1), n, rng) for i, n in src.dims.items() if tgt.dim(i + 1)}
    return Homotopy(src, tgt, comps)


def random_diagram(
    poset: FinitePoset,
    p: int,
    rng: np.random.Generator,
    dims: tuple[int, int] = (1, 2),
    degrees: Sequence[int] = DEFAULT_DEGREES,
) -> PosetDiagram:
    """A strict diagram with stalk total dimensions drawn from ``dims`` (inclusive).

    Transitions out of the covers of each element are drawn jointly from
    the space of families that are chain maps and agree on every composite.
    """
    lo, hi = dims
    stalks = {x: random_complex(p, int(rng.integers(lo, hi + 1)), rng, degrees) for x in poset.elements}
    covers = poset.covers()
    cover_maps: dict[tuple, ChainMap] = {}
    along: dict[tuple, ChainMap] = {}

    def full(x, y) -> ChainMap:
        return ChainMap.identity(stalks[x]) if x == y else along[(x, y)]

    for z in poset.linear_extension():
        below = [c for c, z2 in covers if z2 == z]
        if not below:
            continue
        sys = _LinearSystem(p)
        deg = {c: _chain_map_unknowns(sys, c, stalks[c], stalks[z]) for c in below}
        for x in poset.down(z):
            if x == z:
                continue
            through = [c for c in below if poset.leq(x, c)]
            c0 = through[0]
            for c in through[1:]:
                for i in stalks[x].degrees:
                    if not stalks[z].dim(i):
                        continue
                    sys.equation(
                        [
                            ((c, i), Matrix.identity(p, stalks[z].dim(i)), full(x, c).f(i), 1),
                            ((c0, i), Matrix.identity(p, stalks[z].dim(i)), full(x, c0).f(i), -1),
                        ]
                    )
        sol = sys.random_solution(rng)
        for c in below:
            cover_maps[(c, z)] = ChainMap(stalks[c], stalks[z], {i: sol[(c, i)] for i in deg[c]})
        for x in poset.down(z):
            if x != z:
                c = next(c for c in below if poset.leq(x, c))
                along[(x, z)] = cover_maps[(c, z)] @ full(x, c)
    return PosetDiagram(poset, stalks, along)
