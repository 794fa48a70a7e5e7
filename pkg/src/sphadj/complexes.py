"""Bounded chain complexes of finite-dimensional F_p vector spaces.

Grading is homological: the differential ``d_i`` maps degree ``i`` to degree
``i - 1`` and suspension raises degrees by one.  Fixed conventions:

* ``shift(c, n)_i = c_{i-n}`` with differential ``(-1)^n d``;
* ``cone(f)_i = src_{i-1} (+) tgt_i`` with ``d = [[-d_src, 0], [f, d_tgt]]``;
* ``d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy``; the symmetry carries
  ``(-1)^(|x||y|)``.

Every constructor validates ``d o d = 0`` and every chain map validates
strict commutation unless told otherwise, so sign slips surface immediately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, InvalidStructure, ModulusMismatch
from .linalg import Matrix, check_modulus, hstack, kernel_basis, rank, solve, vstack


def _as_matrix(p: int, m, rows: int, cols: int) -> Matrix:
    if isinstance(m, Matrix):
        if m.p != p:
            raise ModulusMismatch(f"matrix over F_{m.p} used in a complex over F_{p}")
        mat = m
    else:
        mat = Matrix(p, m, shape=(rows, cols)) if rows * cols == 0 else Matrix(p, m)
    if mat.shape != (rows, cols):
        raise DimensionMismatch(f"expected a {rows}x{cols} matrix, got {mat.shape}")
    return mat


class ChainComplex:
    """A bounded complex ``... -> C_i --d_i--> C_{i-1} -> ...`` over F_p.

    ``dims`` maps degrees to dimensions; degrees not listed (or of dimension 0)
    are zero.  ``differentials[i]`` is the matrix of ``d_i`` with
    ``dims[i-1]`` rows and ``dims[i]`` columns; missing entries mean zero.
    """

    __slots__ = ("p", "_dims", "_d")

    def __init__(
        self,
        p: int,
        dims: Mapping[int, int],
        differentials: Mapping[int, Matrix] | None = None,
        *,
        check: bool = True,
    ):
        self.p = check_modulus(p)
        self._dims: dict[int, int] = {}
        for i, n in dims.items():
            if int(n) < 0:
                raise DimensionMismatch(f"negative dimension {n} in degree {i}")
            if int(n) > 0:
                self._dims[int(i)] = int(n)
        self._d: dict[int, Matrix] = {}
        for i, m in (differentials or {}).items():
            i = int(i)
            rows, cols = self.dim(i - 1), self.dim(i)
            mat = _as_matrix(self.p, m, rows, cols)
            if rows and cols and not mat.is_zero():
                self._d[i] = mat
        if check:
            self.validate()

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, p: int) -> "ChainComplex":
        return cls(p, {})

    @classmethod
    def point(cls, p: int, degree: int = 0, dim: int = 1) -> "ChainComplex":
        """``k^dim`` concentrated in one degree."""
        return cls(p, {degree: dim})

    # accessors ------------------------------------------------------------
    def dim(self, i: int) -> int:
        return self._dims.get(i, 0)

    def d(self, i: int) -> Matrix:
        m = self._d.get(i)
        if m is None:
            return Matrix.zeros(self.p, self.dim(i - 1), self.dim(i))
        return m

    @property
    def degrees(self) -> list[int]:
        """Sorted support (degrees of positive dimension)."""
        return sorted(self._dims)

    @property
    def dims(self) -> dict[int, int]:
        return dict(sorted(self._dims.items()))

    @property
    def differentials(self) -> dict[int, Matrix]:
        """Nonzero differentials keyed by source degree."""
        return dict(sorted(self._d.items()))

    def total_dim(self) -> int:
        return sum(self._dims.values())

    def euler_characteristic(self) -> int:
        return sum((-1) ** (i % 2) * n for i, n in self._dims.items())

    def is_zero(self) -> bool:
        return not self._dims

    def validate(self) -> None:
        for i in self._d:
            if (i - 1) in self._d:
                if not (self._d[i - 1] @ self._d[i]).is_zero():
                    raise InvalidStructure(f"d_{i-1} o d_{i} != 0")

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainComplex):
            return NotImplemented
        if self.p != other.p or self._dims != other._dims or self._d.keys() != other._d.keys():
            return False
        return all(self._d[i] == other._d[i] for i in self._d)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ChainComplex(p={self.p}, dims={self.dims})"


class ChainMap:
    """A degree-preserving map of complexes, ``components[i]: source_i -> target_i``."""

    __slots__ = ("source", "target", "_f")

    def __init__(
        self,
        source: ChainComplex,
        target: ChainComplex,
        components: Mapping[int, Matrix] | None = None,
        *,
        check: bool = True,
    ):
        if source.p != target.p:
            raise ModulusMismatch("chain map between complexes over different fields")
        self.source = source
        self.target = target
        self._f: dict[int, Matrix] = {}
        for i, m in (components or {}).items():
            i = int(i)
            rows, cols = target.dim(i), source.dim(i)
            mat = _as_matrix(source.p, m, rows, cols)
            if rows and cols and not mat.is_zero():
                self._f[i] = mat
        if check:
            self.validate()

    @property
    def p(self) -> int:
        return self.source.p

    def f(self, i: int) -> Matrix:
        m = self._f.get(i)
        if m is None:
            return Matrix.zeros(self.p, self.target.dim(i), self.source.dim(i))
        return m

    @property
    def components(self) -> dict[int, Matrix]:
        return dict(sorted(self._f.items()))

    def degrees(self) -> list[int]:
        return sorted(set(self.source.degrees) | set(self.target.degrees))

    def validate(self) -> None:
        src, tgt = self.source, self.target
        for i in sorted(set(src.degrees) | {j + 1 for j in tgt.degrees}):
            lhs = self.f(i - 1) @ src.d(i)
            rhs = tgt.d(i) @ self.f(i)
            if lhs != rhs:
                raise InvalidStructure(f"chain map fails to commute with d in degree {i}")

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return cls(c, c, {i: Matrix.identity(c.p, n) for i, n in c.dims.items()}, check=False)

    @classmethod
    def zero(cls, source: ChainComplex, target: ChainComplex) -> "ChainMap":
        return cls(source, target, {}, check=False)

    def __matmul__(self, other: "ChainMap") -> "ChainMap":
        """Composition ``self o other``."""
        if other.target.dims != self.source.dims:
            raise DimensionMismatch("composable maps need matching middle complex")
        comps = {}
        for i in other.source.degrees:
            if self.target.dim(i):
                comps[i] = self.f(i) @ other.f(i)
        return ChainMap(other.source, self.target, comps, check=False)

    def _combine(self, other: "ChainMap", op) -> "ChainMap":
        if self.source.dims != other.source.dims or self.target.dims != other.target.dims:
            raise DimensionMismatch("maps have different endpoints")
        comps = {i: op(self.f(i), other.f(i)) for i in self.degrees()}
        return ChainMap(self.source, self.target, comps, check=False)

    def __add__(self, other: "ChainMap") -> "ChainMap":
        return self._combine(other, lambda a, b: a + b)

    def __sub__(self, other: "ChainMap") -> "ChainMap":
        return self._combine(other, lambda a, b: a - b)

    def __neg__(self) -> "ChainMap":
        return ChainMap(self.source, self.target, {i: -m for i, m in self._f.items()}, check=False)

    def is_zero(self) -> bool:
        return not self._f

    def __eq__(self, other) -> bool:
        if not isinstance(other, ChainMap):
            return NotImplemented
        return (
            self.source == other.source
            and self.target == other.target
            and self._f.keys() == other._f.keys()
            and all(self._f[i] == other._f[i] for i in self._f)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"ChainMap({self.source!r} -> {self.target!r})"


@dataclass(frozen=True)
class Homotopy:
    """Degree +1 maps ``h_i: source_i -> target_{i+1}`` certifying ``f - g = d h + h d``."""

    source: ChainComplex
    target: ChainComplex
    components: dict[int, Matrix]

    def h(self, i: int) -> Matrix:
        m = self.components.get(i)
        if m is None:
            return Matrix.zeros(self.source.p, self.target.dim(i + 1), self.source.dim(i))
        return m

    def boundary(self) -> ChainMap:
        """The null-homotopic map ``d h + h d``."""
        src, tgt = self.source, self.target
        comps = {
            i: tgt.d(i + 1) @ self.h(i) + self.h(i - 1) @ src.d(i)
            for i in src.degrees
            if tgt.dim(i)
        }
        return ChainMap(src, tgt, comps, check=False)

    def certifies(self, f: ChainMap, g: ChainMap) -> bool:
        return (f - g) == self.boundary()

    def is_zero(self) -> bool:
        return all(m.is_zero() for m in self.components.values())


# ---------------------------------------------------------------------------
# homology


def homology(c: ChainComplex) -> dict[int, int]:
    """``dim H_i = dim ker d_i - rank d_{i+1}``; degrees with zero homology are omitted."""
    ranks = {i: rank(m) for i, m in c.differentials.items()}
    out = {}
    for i in c.degrees:
        h = c.dim(i) - ranks.get(i, 0) - ranks.get(i + 1, 0)
        if h:
            out[i] = h
    return out


def is_acyclic(c: ChainComplex) -> bool:
    return not homology(c)


def induced_homology_ranks(f: ChainMap) -> dict[int, int]:
    """Rank of ``H_i(f): H_i(source) -> H_i(target)`` for each degree (zeros omitted)."""
    out = {}
    src, tgt = f.source, f.target
    for i in src.degrees:
        if not tgt.dim(i):
            continue
        img = f.f(i) @ kernel_basis(src.d(i))
        b_tgt = tgt.d(i + 1)
        r_b = rank(b_tgt) if b_tgt.cols else 0
        both = hstack(f.p, [img, b_tgt]) if b_tgt.cols else img
        r = rank(both) - r_b
        if r:
            out[i] = r
    return out


# ---------------------------------------------------------------------------
# shifts, sums, cones


def shift(c: ChainComplex, n: int) -> ChainComplex:
    """``c[n]``: degree ``i`` holds ``c_{i-n}``, differential scaled by ``(-1)^n``."""
    sign = -1 if n % 2 else 1
    return ChainComplex(
        c.p,
        {i + n: k for i, k in c.dims.items()},
        {i + n: m.scale(sign) for i, m in c.differentials.items()},
        check=False,
    )


def shift_map(f: ChainMap, n: int) -> ChainMap:
    """``f[n]``; components are moved without sign."""
    return ChainMap(
        shift(f.source, n),
        shift(f.target, n),
        {i + n: m for i, m in f.components.items()},
        check=False,
    )


def direct_sum(*cs: ChainComplex) -> ChainComplex:
    if not cs:
        raise ValueError("direct_sum needs at least one summand")
    p = cs[0].p
    degrees = sorted(set().union(*(c.degrees for c in cs)))
    dims = {i: sum(c.dim(i) for c in cs) for i in degrees}
    diffs = {}
    for i in degrees:
        blocks = [c.d(i) for c in cs]
        diffs[i] = _block_diag(p, blocks)
    return ChainComplex(p, dims, diffs, check=False)


def _block_diag(p: int, blocks: list[Matrix]) -> Matrix:
    rows = sum(b.rows for b in blocks)
    cols = sum(b.cols for b in blocks)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for b in blocks:
        out[r : r + b.rows, c : c + b.cols] = b.array
        r += b.rows
        c += b.cols
    return Matrix(p, out)


def cone(f: ChainMap) -> ChainComplex:
    """Mapping cone with ``cone_i = src_{i-1} (+) tgt_i`` and ``d = [[-d, 0], [f, d]]``."""
    src, tgt, p = f.source, f.target, f.p
    degrees = sorted({i + 1 for i in src.degrees} | set(tgt.degrees))
    dims = {i: src.dim(i - 1) + tgt.dim(i) for i in degrees}
    diffs = {}
    for i in degrees:
        if not dims.get(i - 1):
            continue
        top = hstack(p, [-src.d(i - 1), Matrix.zeros(p, src.dim(i - 2), tgt.dim(i))])
        bottom = hstack(p, [f.f(i - 1), tgt.d(i)])
        diffs[i] = vstack(p, [top, bottom])
    return ChainComplex(p, dims, diffs, check=False)


def cone_inclusion(f: ChainMap) -> ChainMap:
    """Canonical ``target -> cone(f)``."""
    c = cone(f)
    comps = {}
    for i in f.target.degrees:
        comps[i] = vstack(f.p, [Matrix.zeros(f.p, f.source.dim(i - 1), f.target.dim(i)), Matrix.identity(f.p, f.target.dim(i))])
    return ChainMap(f.target, c, comps, check=False)


def cone_projection(f: ChainMap) -> ChainMap:
    """Canonical ``cone(f) -> source[1]``."""
    c = cone(f)
    s1 = shift(f.source, 1)
    comps = {}
    for i in s1.degrees:
        comps[i] = hstack(f.p, [Matrix.identity(f.p, f.source.dim(i - 1)), Matrix.zeros(f.p, f.source.dim(i - 1), f.target.dim(i))])
    return ChainMap(c, s1, comps, check=False)


def cone_functorial(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap, *, check: bool = True) -> ChainMap:
    """The map ``cone(f) -> cone(g)`` induced by a strictly commuting square ``b f = g a``.

    ``a: f.source -> g.source`` and ``b: f.target -> g.target``.
    """
    if check and (b @ f) != (g @ a):
        raise InvalidStructure("square does not commute strictly")
    src, tgt = cone(f), cone(g)
    comps = {i: _block_diag(f.p, [a.f(i - 1), b.f(i)]) for i in src.degrees if tgt.dim(i)}
    return ChainMap(src, tgt, comps, check=False)


def fiber(f: ChainMap) -> ChainComplex:
    """``cone(f)[-1]``."""
    return shift(cone(f), -1)


def fiber_inclusion(f: ChainMap) -> ChainMap:
    """Canonical ``fiber(f) -> source``, the desuspended cone projection."""
    return shift_map(cone_projection(f), -1)


def fiber_functorial(f: ChainMap, g: ChainMap, a: ChainMap, b: ChainMap, *, check: bool = True) -> ChainMap:
    return shift_map(cone_functorial(f, g, a, b, check=check), -1)


def is_qis(f: ChainMap) -> bool:
    """``f`` is a quasi-isomorphism iff its cone is acyclic."""
    return is_acyclic(cone(f))


# ---------------------------------------------------------------------------
# tensor products


def _tensor_layout(a: ChainComplex, b: ChainComplex) -> dict[int, list[tuple[int, int, int]]]:
    """For each total degree, the summands ``(i, j, offset)`` with ``i + j = n``, ``i`` ascending."""
    layout: dict[int, list[tuple[int, int, int]]] = {}
    filled: dict[int, int] = {}
    for i in a.degrees:
        for j in b.degrees:
            n = i + j
            off = filled.get(n, 0)
            layout.setdefault(n, []).append((i, j, off))
            filled[n] = off + a.dim(i) * b.dim(j)
    return layout


def tensor(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    """``(a (x) b)_n = (+)_{i+j=n} a_i (x) b_j`` with the Koszul differential."""
    if a.p != b.p:
        raise ModulusMismatch("tensor of complexes over different fields")
    p = a.p
    layout = _tensor_layout(a, b)
    dims = {n: sum(a.dim(i) * b.dim(j) for i, j, _ in parts) for n, parts in layout.items()}
    diffs = {}
    for n, parts in layout.items():
        if not dims.get(n - 1):
            continue
        out = np.zeros((dims[n - 1], dims[n]), dtype=np.int64)
        lower = {(i, j): off for i, j, off in layout.get(n - 1, [])}
        for i, j, off in parts:
            w = a.dim(i) * b.dim(j)
            if (i - 1, j) in lower and a.dim(i - 1):
                blk = np.kron(a.d(i).array, np.eye(b.dim(j), dtype=np.int64))
                r = lower[(i - 1, j)]
                out[r : r + blk.shape[0], off : off + w] += blk
            if (i, j - 1) in lower and b.dim(j - 1):
                blk = np.kron(np.eye(a.dim(i), dtype=np.int64), b.d(j).array)
                if i % 2:
                    blk = -blk
                r = lower[(i, j - 1)]
                out[r : r + blk.shape[0], off : off + w] += blk
        diffs[n] = Matrix(p, out % p)
    return ChainComplex(p, dims, diffs)


def tensor_maps(f: ChainMap, g: ChainMap) -> ChainMap:
    """``f (x) g`` for degree-0 chain maps (no Koszul sign arises)."""
    src = tensor(f.source, g.source)
    tgt = tensor(f.target, g.target)
    lay_s = _tensor_layout(f.source, g.source)
    lay_t = _tensor_layout(f.target, g.target)
    comps = {}
    for n, parts in lay_s.items():
        if not tgt.dim(n):
            continue
        tgt_off = {(i, j): off for i, j, off in lay_t.get(n, [])}
        out = np.zeros((tgt.dim(n), src.dim(n)), dtype=np.int64)
        for i, j, off in parts:
            if (i, j) not in tgt_off:
                continue
            blk = np.kron(f.f(i).array, g.f(j).array)
            r = tgt_off[(i, j)]
            out[r : r + blk.shape[0], off : off + blk.shape[1]] = blk
        comps[n] = Matrix(f.p, out % f.p)
    return ChainMap(src, tgt, comps)


def swap(a: ChainComplex, b: ChainComplex) -> ChainMap:
    """The symmetry ``a (x) b -> b (x) a``, ``x (x) y -> (-1)^(|x||y|) y (x) x``."""
    src, tgt = tensor(a, b), tensor(b, a)
    lay_s = _tensor_layout(a, b)
    lay_t = _tensor_layout(b, a)
    comps = {}
    for n, parts in lay_s.items():
        tgt_off = {(j, i): off for j, i, off in lay_t[n]}
        out = np.zeros((tgt.dim(n), src.dim(n)), dtype=np.int64)
        for i, j, off in parts:
            da, db = a.dim(i), b.dim(j)
            r = tgt_off[(j, i)]
            sign = -1 if (i * j) % 2 else 1
            for s in range(da):
                for t in range(db):
                    out[r + t * da + s, off + s * db + t] = sign
        comps[n] = Matrix(a.p, out % a.p)
    return ChainMap(src, tgt, comps)


def unit_tensor_identification(c: ChainComplex, *, left: bool = True) -> ChainMap:
    """The canonical isomorphism ``c -> k (x) c`` (or ``c -> c (x) k``), k in degree 0.

    With the ordering used by :func:`tensor` both are identity matrices; the
    map is returned so that callers can compose with it explicitly.
    """
    k = ChainComplex.point(c.p)
    tgt = tensor(k, c) if left else tensor(c, k)
    comps = {i: Matrix.identity(c.p, n) for i, n in c.dims.items()}
    return ChainMap(c, tgt, comps)


# ---------------------------------------------------------------------------
# homotopies


def homotopy_between(f: ChainMap, g: ChainMap) -> Homotopy | None:
    """Solve ``f - g = d h + h d`` for ``h``; ``None`` when no homotopy exists."""
    if f.source != g.source or f.target != g.target:
        raise DimensionMismatch("homotopy_between needs maps with identical endpoints")
    src, tgt, p = f.source, f.target, f.p
    # unknown blocks h_i : src_i -> tgt_{i+1}
    unknowns = [i for i in src.degrees if tgt.dim(i + 1)]
    col_off = {}
    ncols = 0
    for i in unknowns:
        col_off[i] = ncols
        ncols += tgt.dim(i + 1) * src.dim(i)
    eq_degrees = [i for i in src.degrees if tgt.dim(i)]
    row_off = {}
    nrows = 0
    for i in eq_degrees:
        row_off[i] = nrows
        nrows += tgt.dim(i) * src.dim(i)
    diff = f - g
    if nrows == 0:
        return Homotopy(src, tgt, {})
    a = np.zeros((nrows, ncols), dtype=np.int64)
    b = np.zeros((nrows, 1), dtype=np.int64)
    for i in eq_degrees:
        r0 = row_off[i]
        ni, mi = tgt.dim(i), src.dim(i)
        b[r0 : r0 + ni * mi, 0] = diff.f(i).array.reshape(-1)
        # d^tgt_{i+1} h_i, row-major vec(A X) = (A (x) I) vec(X)
        if i in col_off:
            blk = np.kron(tgt.d(i + 1).array, np.eye(mi, dtype=np.int64))
            c0 = col_off[i]
            a[r0 : r0 + ni * mi, c0 : c0 + blk.shape[1]] += blk
        # h_{i-1} d^src_i, row-major vec(X B) = (I (x) B^T) vec(X)
        if (i - 1) in col_off:
            blk = np.kron(np.eye(ni, dtype=np.int64), src.d(i).array.T)
            c0 = col_off[i - 1]
            a[r0 : r0 + ni * mi, c0 : c0 + blk.shape[1]] += blk
    if ncols == 0:
        return Homotopy(src, tgt, {}) if not b.any() else None
    x = solve(Matrix(p, a % p), Matrix(p, b))
    if x is None:
        return None
    xs = x.array[:, 0]
    comps = {}
    for i in unknowns:
        c0 = col_off[i]
        rows, cols = tgt.dim(i + 1), src.dim(i)
        comps[i] = Matrix(p, xs[c0 : c0 + rows * cols].reshape(rows, cols))
    h = Homotopy(src, tgt, comps)
    if not h.certifies(f, g):
        raise InvalidStructure("internal error: homotopy solution does not certify")
    return h


def homology_shift(h: Mapping[int, int], n: int) -> dict[int, int]:
    """Graded dimensions moved by ``n`` degrees (as for ``c[n]``)."""
    return {i + n: k for i, k in sorted(h.items()) if k}


def add_graded(*hs: Mapping[int, int]) -> dict[int, int]:
    out: dict[int, int] = {}
    for h in hs:
        for i, k in h.items():
            out[i] = out.get(i, 0) + k
    return {i: k for i, k in sorted(out.items()) if k}

