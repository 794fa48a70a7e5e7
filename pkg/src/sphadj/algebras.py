"""Graded algebras over F_p and the tensor monads ``A (x) -`` they present."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .complexes import (
    ChainComplex,
    ChainMap,
    Homotopy,
    cone,
    fiber,
    fiber_inclusion,
    homology,
    homotopy_between,
    swap,
    tensor,
    tensor_maps,
    unit_tensor_identification,
)
from .errors import AlgebraValidationError, DimensionMismatch, ResourceRefusal
from .linalg import Matrix, check_modulus, rank

IDEMPOTENT_BOUND = 2**20
ISOMORPHISM_BOUND = 2**20
ISOMORPHISM_MAX_DIM = 3


class GradedAlgebra:
    """Associative unital graded algebra with zero differential.

    ``mult[i, j, k]`` is the coefficient of basis element ``k`` in ``e_i e_j``.
    Construction validates every identity and raises
    :class:`AlgebraValidationError` listing each failure.
    """

    def __init__(
        self,
        p: int,
        basis: Sequence[tuple[str, int]],
        mult,
        unit: Sequence[int],
        *,
        name: str | None = None,
    ):
        self.p = check_modulus(p)
        self.basis: tuple[tuple[str, int], ...] = tuple((str(lbl), int(deg)) for lbl, deg in basis)
        n = len(self.basis)
        c = np.asarray(mult, dtype=np.int64)
        if c.shape != (n, n, n):
            raise DimensionMismatch(f"structure constants must have shape {(n, n, n)}, got {c.shape}")
        u = np.asarray(unit, dtype=np.int64).reshape(-1)
        if u.shape != (n,):
            raise DimensionMismatch(f"unit must have {n} coordinates")
        self.mult = c % self.p
        self.unit = u % self.p
        self.mult.flags.writeable = False
        self.unit.flags.writeable = False
        self.name = name
        violations = algebra_violations(self)
        if violations:
            raise AlgebraValidationError(violations)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def degrees(self) -> list[int]:
        return [d for _, d in self.basis]

    @property
    def labels(self) -> list[str]:
        return [lbl for lbl, _ in self.basis]

    def multiply(self, x: Sequence[int], y: Sequence[int]) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        return np.einsum("i,j,ijk->k", x, y, self.mult) % self.p

    def degree_zero_part(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if d == 0]

    def as_complex(self) -> ChainComplex:
        """``A`` as a complex with zero differential; degree ``d`` holds the basis of degree ``d`` in order."""
        dims: dict[int, int] = {}
        for d in self.degrees:
            dims[d] = dims.get(d, 0) + 1
        return ChainComplex(self.p, dims)

    def complex_order(self) -> list[int]:
        """Basis indices in the coordinate order of :meth:`as_complex` (by degree, then index)."""
        return sorted(range(self.dim), key=lambda i: (self.degrees[i], i))

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedAlgebra):
            return NotImplemented
        return (
            self.p == other.p
            and self.basis == other.basis
            and np.array_equal(self.mult, other.mult)
            and np.array_equal(self.unit, other.unit)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        tag = self.name or "GradedAlgebra"
        return f"{tag}(p={self.p}, basis={list(self.basis)})"


def algebra_violations(a: GradedAlgebra) -> list[dict]:
    """Every failed degree, associativity or unit identity, as witness dicts."""
    p, c, u = a.p, a.mult, a.unit
    n = a.dim
    deg = np.array(a.degrees, dtype=np.int64)
    out: list[dict] = []
    bad_deg = (c != 0) & (deg[:, None, None] + deg[None, :, None] != deg[None, None, :])
    for i, j, k in zip(*np.nonzero(bad_deg)):
        out.append({"law": "degree", "i": int(i), "j": int(j), "k": int(k)})
    for i in np.nonzero(u)[0]:
        if deg[i] != 0:
            out.append({"law": "unit-degree", "i": int(i)})
    lhs = np.einsum("ijm,mkl->ijkl", c, c) % p
    rhs = np.einsum("jkm,iml->ijkl", c, c) % p
    for i, j, k, l in zip(*np.nonzero(lhs != rhs)):
        out.append({"law": "associativity", "i": int(i), "j": int(j), "k": int(k), "l": int(l)})
    eye = np.eye(n, dtype=np.int64)
    left = np.einsum("i,ijk->jk", u, c) % p
    right = np.einsum("j,ijk->ik", u, c) % p
    for j, k in zip(*np.nonzero(left != eye)):
        out.append({"law": "left-unit", "j": int(j), "k": int(k)})
    for i, k in zip(*np.nonzero(right != eye)):
        out.append({"law": "right-unit", "i": int(i), "k": int(k)})
    return out


def validate_algebra(p: int, basis, mult, unit, *, name: str | None = None) -> GradedAlgebra:
    """Build a :class:`GradedAlgebra` from raw constants, rejecting any violated identity."""
    return GradedAlgebra(p, basis, mult, unit, name=name)


# ---------------------------------------------------------------------------
# presets


def _constants(n: int, table: dict[tuple[int, int], dict[int, int]]) -> np.ndarray:
    c = np.zeros((n, n, n), dtype=np.int64)
    for (i, j), terms in table.items():
        for k, v in terms.items():
            c[i, j, k] = v
    return c


def product_algebra(p: int, n: int) -> GradedAlgebra:
    """``k^n`` with orthogonal idempotents ``e_1..e_n`` and unit their sum."""
    c = _constants(n, {(i, i): {i: 1} for i in range(n)})
    return GradedAlgebra(p, [(f"e{i + 1}", 0) for i in range(n)], c, [1] * n, name=f"product{n}")


def square_zero(p: int, d: int) -> GradedAlgebra:
    """``k (+) k x`` with ``|x| = d`` and ``x^2 = 0``."""
    c = _constants(2, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}})
    return GradedAlgebra(p, [("1", 0), ("x", d)], c, [1, 0], name=f"square-zero({d})")


def dual_numbers(p: int) -> GradedAlgebra:
    c = _constants(2, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}})
    return GradedAlgebra(p, [("1", 0), ("eps", 0)], c, [1, 0], name="dual-numbers")


def quadratic(p: int) -> GradedAlgebra:
    """``k[y]/(y^2 - 1)`` in the basis ``{1, y}``."""
    c = _constants(2, {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (1, 1): {0: 1}})
    return GradedAlgebra(p, [("1", 0), ("y", 0)], c, [1, 0], name="quadratic")


def field_algebra(p: int) -> GradedAlgebra:
    return GradedAlgebra(p, [("1", 0)], np.ones((1, 1, 1), dtype=np.int64), [1], name="field")


PRESET_NAMES = ("product2", "product3", "dual-numbers", "square-zero(d)", "quadratic", "field")


def preset(name: str, p: int) -> GradedAlgebra:
    """Named algebras; ``square-zero(d)`` takes an integer degree."""
    key = name.strip()
    if key in ("product2", "product3"):
        return product_algebra(p, int(key[-1]))
    if key == "dual-numbers":
        return dual_numbers(p)
    if key == "quadratic":
        return quadratic(p)
    if key == "field":
        return field_algebra(p)
    if key.startswith("square-zero(") and key.endswith(")"):
        try:
            d = int(key[len("square-zero(") : -1])
        except ValueError:
            raise ValueError(f"bad degree in preset name {name!r}") from None
        return square_zero(p, d)
    raise ValueError(f"unknown preset {name!r}; known: {', '.join(PRESET_NAMES)}")


def direct_product(a: GradedAlgebra, b: GradedAlgebra) -> GradedAlgebra:
    """``A x B`` with componentwise multiplication."""
    if a.p != b.p:
        raise DimensionMismatch("algebras over different fields")
    n, m = a.dim, b.dim
    c = np.zeros((n + m,) * 3, dtype=np.int64)
    c[:n, :n, :n] = a.mult
    c[n:, n:, n:] = b.mult
    basis = [(f"a.{l}", d) for l, d in a.basis] + [(f"b.{l}", d) for l, d in b.basis]
    return GradedAlgebra(a.p, basis, c, np.concatenate([a.unit, b.unit]))


def change_basis(a: GradedAlgebra, columns: np.ndarray, labels: Sequence[str] | None = None) -> GradedAlgebra:
    """Re-express ``a`` in the basis whose old coordinates are the columns of ``columns``.

    Each new basis vector must be homogeneous; its degree is inherited.
    """
    p = a.p
    P = np.asarray(columns, dtype=np.int64) % p
    n = a.dim
    if P.shape != (n, n) or rank(Matrix(p, P)) != n:
        raise DimensionMismatch("change of basis must be an invertible square matrix")
    deg = []
    for j in range(n):
        ds = {a.degrees[i] for i in np.nonzero(P[:, j])[0]}
        if len(ds) != 1:
            raise DimensionMismatch(f"new basis vector {j} is not homogeneous")
        deg.append(ds.pop())
    inv = _inverse(P, p)
    prod = np.einsum("ia,jb,ijk->abk", P, P, a.mult) % p
    c = np.einsum("lk,abk->abl", inv, prod) % p
    u = inv @ a.unit % p
    names = list(labels) if labels is not None else [f"b{j}" for j in range(n)]
    return GradedAlgebra(p, list(zip(names, deg)), c, u, name=a.name)


def _inverse(m: np.ndarray, p: int) -> np.ndarray:
    from .linalg import solve

    x = solve(Matrix(p, m), Matrix.identity(p, m.shape[0]))
    if x is None:
        raise DimensionMismatch("matrix is singular")
    return x.array


def unit_adapted(a: GradedAlgebra) -> GradedAlgebra:
    """Same algebra in a basis starting with the unit, completed greedily by standard vectors.

    The completion keeps the original order and labels of the standard
    vectors it uses; the unit is labelled ``"1"``.
    """
    p, n = a.p, a.dim
    cols = [a.unit.copy()]
    labels = ["1"]
    for i in range(n):
        e = np.zeros(n, dtype=np.int64)
        e[i] = 1
        trial = np.stack(cols + [e], axis=1)
        if rank(Matrix(p, trial)) == len(cols) + 1:
            cols.append(e)
            labels.append(a.labels[i])
    return change_basis(a, np.stack(cols, axis=1), labels)


def permute_basis(a: GradedAlgebra, perm: Sequence[int]) -> GradedAlgebra:
    """New basis element ``j`` is old element ``perm[j]``."""
    P = np.zeros((a.dim, a.dim), dtype=np.int64)
    for j, i in enumerate(perm):
        P[i, j] = 1
    return change_basis(a, P, [a.labels[i] for i in perm])


# ---------------------------------------------------------------------------
# monads


@dataclass(frozen=True)
class MonadPresentation:
    """The monad ``M = A (x) -`` on complexes over F_p.

    Unit ``u = (unit of A) (x) -`` and multiplication ``m = (mult of A) (x) -``;
    the algebra identities are exactly the monad axioms here.
    """

    algebra: GradedAlgebra

    @property
    def p(self) -> int:
        return self.algebra.p

    def apply(self, c: ChainComplex) -> ChainComplex:
        return tensor(self.algebra.as_complex(), c)

    def unit(self) -> ChainMap:
        """``u: k -> A`` in the coordinates of :meth:`GradedAlgebra.as_complex`."""
        a = self.algebra
        order = a.complex_order()
        k = ChainComplex.point(a.p)
        target = a.as_complex()
        zero_block = [i for i in order if a.degrees[i] == 0]
        col = np.array([[a.unit[i]] for i in zero_block], dtype=np.int64).reshape(len(zero_block), 1)
        comps = {0: Matrix(a.p, col)} if zero_block else {}
        return ChainMap(k, target, comps)

    def unit_at(self, c: ChainComplex) -> ChainMap:
        """``u (x) id_c: c = k (x) c -> A (x) c``."""
        return tensor_maps(self.unit(), ChainMap.identity(c)) @ unit_tensor_identification(c, left=True)

    def multiplication(self) -> ChainMap:
        """``m: A (x) A -> A`` as a chain map of zero-differential complexes."""
        a = self.algebra
        A = a.as_complex()
        AA = tensor(A, A)
        order = a.complex_order()
        by_deg: dict[int, list[int]] = {}
        for i in order:
            by_deg.setdefault(a.degrees[i], []).append(i)
        comps = {}
        for n_deg in AA.degrees:
            cols = []
            for i_deg in sorted(by_deg):
                j_deg = n_deg - i_deg
                if j_deg not in by_deg:
                    continue
                for i in by_deg[i_deg]:
                    for j in by_deg[j_deg]:
                        cols.append((i, j))
            out = np.zeros((A.dim(n_deg), len(cols)), dtype=np.int64)
            tgt = by_deg.get(n_deg, [])
            for col, (i, j) in enumerate(cols):
                for r, k in enumerate(tgt):
                    out[r, col] = a.mult[i, j, k]
            if A.dim(n_deg):
                comps[n_deg] = Matrix(a.p, out)
        return ChainMap(AA, A, comps)


def multiplication_matrix(m: MonadPresentation | GradedAlgebra) -> Matrix:
    """``A (x) A -> A`` on the lexicographic basis ``e_i (x) e_j`` (column ``i * dim + j``)."""
    a = m.algebra if isinstance(m, MonadPresentation) else m
    n = a.dim
    return Matrix(a.p, a.mult.reshape(n * n, n).T)


@dataclass(frozen=True)
class TwistData:
    """``cone(u: k -> A)`` in the unit-adapted basis, with its section.

    ``section`` is the canonical map ``cone(u)[-1] -> k`` from the defining
    fiber sequence; ``reduced`` is the one-step minimal model (the cokernel
    of ``u`` with zero differential), quasi-isomorphic to ``complex``.
    """

    complex: ChainComplex
    section: ChainMap
    reduced: ChainComplex
    unit: ChainMap
    adapted: GradedAlgebra

    def homology(self) -> dict[int, int]:
        return homology(self.complex)


def twist_object(m: MonadPresentation) -> TwistData:
    adapted = unit_adapted(m.algebra)
    u = MonadPresentation(adapted).unit()
    c = cone(u)
    section = fiber_inclusion(u)
    A = adapted.as_complex()
    reduced = ChainComplex(adapted.p, {d: n - (1 if d == 0 else 0) for d, n in A.dims.items()})
    assert section.target == ChainComplex.point(adapted.p)
    assert section.source == fiber(u)
    return TwistData(c, section, reduced, u, adapted)


def is_twist_autoequivalence(m: MonadPresentation) -> bool:
    """Invertible objects of D(k) are exactly those with one-dimensional total homology."""
    return sum(twist_object(m).homology().values()) == 1


def unit_commutation(m: MonadPresentation) -> Homotopy | None:
    """Compare ``u (x) id_X`` with ``swap o (id_X (x) u)`` on ``X = twist object``.

    Both are maps ``X -> A (x) X``; returns the homotopy witness, or ``None``.
    """
    data = twist_object(m)
    mm = MonadPresentation(data.adapted)
    x = data.complex
    u = mm.unit()
    A = data.adapted.as_complex()
    left = mm.unit_at(x)
    right_raw = tensor_maps(ChainMap.identity(x), u) @ unit_tensor_identification(x, left=False)
    right = swap(x, A) @ right_raw
    return homotopy_between(left, right)


@dataclass
class SphericalVerdict:
    twist_object: ChainComplex
    invertible: bool
    commutation: Homotopy | None
    spherical: bool
    diagnostics: list[str] = field(default_factory=list)
    twist_homology: dict[int, int] = field(default_factory=dict)


def spherical_verdict(m: MonadPresentation) -> SphericalVerdict:
    data = twist_object(m)
    h = data.homology()
    invertible = sum(h.values()) == 1
    comm = unit_commutation(m)
    notes = []
    if not invertible:
        notes.append("twist not invertible")
    if comm is None:
        notes.append("unit does not commute with the twist")
    return SphericalVerdict(data.complex, invertible, comm, invertible and comm is not None, notes, h)


# ---------------------------------------------------------------------------
# enumeration invariants


def count_idempotents(a: GradedAlgebra, bound: int = IDEMPOTENT_BOUND) -> int:
    """Number of ``x`` in the degree-0 part with ``x^2 = x``, by exhaustive enumeration."""
    idx = a.degree_zero_part()
    n0, p = len(idx), a.p
    if p**n0 > bound:
        raise ResourceRefusal(f"{p}^{n0} degree-0 elements exceed the bound {bound}")
    c = a.mult[np.ix_(idx, idx, idx)]
    total = 0
    chunk = 1 << 14
    count = p**n0
    for start in range(0, count, chunk):
        codes = np.arange(start, min(count, start + chunk), dtype=np.int64)
        xs = np.stack([(codes // p**k) % p for k in range(n0)], axis=1)
        sq = np.einsum("ni,nj,ijk->nk", xs, xs, c) % p
        total += int(np.sum(np.all(sq == xs, axis=1)))
    return total


def brute_force_isomorphic(
    a: GradedAlgebra,
    b: GradedAlgebra,
    bound: int = ISOMORPHISM_BOUND,
    max_dim: int = ISOMORPHISM_MAX_DIM,
) -> bool:
    """Exhaustive search for a degree-preserving unital algebra isomorphism ``a -> b``."""
    if a.p != b.p:
        raise DimensionMismatch("algebras over different fields")
    if a.dim != b.dim or sorted(a.degrees) != sorted(b.degrees):
        return False
    n, p = a.dim, a.p
    if n > max_dim:
        raise ResourceRefusal(f"dimension {n} exceeds the isomorphism search bound {max_dim}")
    free = [(i, j) for i in range(n) for j in range(n) if b.degrees[i] == a.degrees[j]]
    if p ** len(free) > bound:
        raise ResourceRefusal(f"{p}^{len(free)} candidate maps exceed the bound {bound}")
    count = p ** len(free)
    codes = np.arange(count, dtype=np.int64)
    phis = np.zeros((count, n, n), dtype=np.int64)
    for k, (i, j) in enumerate(free):
        phis[:, i, j] = (codes // p**k) % p
    # phi(e_i e_j) = phi(e_i) phi(e_j) and phi(1) = 1
    lhs = np.einsum("nkm,ijm->nijk", phis, a.mult) % p
    rhs = np.einsum("nki,nlj,klm->nijm", phis, phis, b.mult) % p
    hom = np.all((lhs == rhs).reshape(count, -1), axis=1)
    unital = np.all((np.einsum("nij,j->ni", phis, a.unit) % p) == b.unit, axis=1)
    for k in np.nonzero(hom & unital)[0]:
        if rank(Matrix(p, phis[k])) == n:
            return True
    return False
