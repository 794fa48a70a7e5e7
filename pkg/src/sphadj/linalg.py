"""Dense exact linear algebra over prime fields F_p.

Matrices are immutable wrappers around ``int64`` numpy arrays whose entries
are reduced into ``[0, p)``.  Everything above this module (homology,
homotopy solving, structure constants) is expressed through these few
primitives: products, row reduction, rank, kernels and linear solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, ModulusMismatch

MAX_MODULUS = 2**31

_FLOAT_EXACT = 2**53
_INT_EXACT = 2**63 - 1


@lru_cache(maxsize=None)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class PrimeField:
    """The field F_p for a prime ``2 <= p < 2**31``."""

    p: int

    def __post_init__(self):
        check_modulus(self.p)

    def reduce(self, x: int) -> int:
        return int(x) % self.p

    def inv(self, x: int) -> int:
        x = int(x) % self.p
        if x == 0:
            raise ZeroDivisionError("0 has no inverse")
        return pow(x, -1, self.p)

    def elements(self) -> range:
        return range(self.p)


def check_modulus(p: int) -> int:
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise TypeError(f"modulus must be an integer, got {type(p).__name__}")
    p = int(p)
    if not 2 <= p < MAX_MODULUS or not is_prime(p):
        raise ValueError(f"modulus must be a prime below 2**31, got {p}")
    return p


def _exact_matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    n = a.shape[1]
    if n == 0 or a.shape[0] == 0 or b.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    bound = (p - 1) ** 2 * n
    if bound < _FLOAT_EXACT:
        # BLAS in float64 is exact while every partial sum stays below 2**53.
        out = a.astype(np.float64) @ b.astype(np.float64)
        return np.mod(out, p).astype(np.int64)
    if bound < _INT_EXACT:
        return (a @ b) % p
    out = (a.astype(object) @ b.astype(object)) % p
    return out.astype(np.int64)


class Matrix:
    """An immutable ``rows x cols`` matrix over F_p."""

    __slots__ = ("p", "_a")

    def __init__(self, p: int, entries, shape: tuple[int, int] | None = None):
        self.p = check_modulus(p)
        a = entries if isinstance(entries, np.ndarray) else np.array(entries, dtype=object)
        if shape is not None:
            a = a.reshape(shape)
        if a.ndim != 2:
            raise DimensionMismatch(f"matrix entries must be 2-dimensional, got shape {a.shape}")
        if a.dtype != np.int64 or a.size and (a.min() < 0 or a.max() >= self.p):
            a = np.mod(a.astype(object), self.p).astype(np.int64) if a.size else a.astype(np.int64)
        a = np.array(a, dtype=np.int64)
        a.flags.writeable = False
        self._a = a

    # construction -----------------------------------------------------
    @classmethod
    def _wrap(cls, p: int, a: np.ndarray) -> "Matrix":
        m = object.__new__(cls)
        m.p = p
        a = np.ascontiguousarray(a, dtype=np.int64)
        a.flags.writeable = False
        m._a = a
        return m

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "Matrix":
        return cls._wrap(check_modulus(p), np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "Matrix":
        return cls._wrap(check_modulus(p), np.eye(n, dtype=np.int64))

    @classmethod
    def from_rows(cls, p: int, rows: Sequence[Sequence[int]], cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls.zeros(p, 0, cols or 0)
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionMismatch("ragged rows")
        if cols is not None and cols != width:
            raise DimensionMismatch(f"expected {cols} columns, got {width}")
        return cls(p, rows)

    # accessors ----------------------------------------------------------
    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def array(self) -> np.ndarray:
        """Read-only view of the underlying ``int64`` array."""
        return self._a

    @property
    def entries(self) -> tuple[int, ...]:
        """Row-major entries."""
        return tuple(int(x) for x in self._a.ravel())

    def tolist(self) -> list[list[int]]:
        return self._a.tolist()

    def is_zero(self) -> bool:
        return not self._a.any()

    def __getitem__(self, idx):
        out = self._a[idx]
        if isinstance(out, np.ndarray) and out.ndim == 2:
            return Matrix._wrap(self.p, out)
        if isinstance(out, np.ndarray):
            return out.copy()
        return int(out)

    # arithmetic -----------------------------------------------------------
    def _same_field(self, other: "Matrix") -> None:
        if not isinstance(other, Matrix):
            raise TypeError(f"expected Matrix, got {type(other).__name__}")
        if other.p != self.p:
            raise ModulusMismatch(f"cannot combine matrices over F_{self.p} and F_{other.p}")

    def __matmul__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix._wrap(self.p, _exact_matmul(self._a, other._a, self.p))

    def __add__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        return Matrix._wrap(self.p, (self._a + other._a) % self.p)

    def __sub__(self, other: "Matrix") -> "Matrix":
        self._same_field(other)
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {other.shape} from {self.shape}")
        return Matrix._wrap(self.p, (self._a - other._a) % self.p)

    def __neg__(self) -> "Matrix":
        return Matrix._wrap(self.p, (-self._a) % self.p)

    def scale(self, c: int) -> "Matrix":
        c = int(c) % self.p
        return Matrix._wrap(self.p, (self._a * c) % self.p)

    def __rmul__(self, c: int) -> "Matrix":
        return self.scale(c)

    @property
    def T(self) -> "Matrix":
        return Matrix._wrap(self.p, self._a.T)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and self.shape == other.shape and bool(np.array_equal(self._a, other._a))

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"Matrix(p={self.p}, {self.tolist()}, shape={self.shape})"


# block assembly ---------------------------------------------------------

def hstack(p: int, parts: Sequence[Matrix], rows: int | None = None) -> Matrix:
    if not parts:
        return Matrix.zeros(p, rows or 0, 0)
    for m in parts:
        if m.p != p:
            raise ModulusMismatch("mixed moduli in hstack")
    if len({m.rows for m in parts}) != 1:
        raise DimensionMismatch("hstack parts differ in row count")
    return Matrix._wrap(p, np.hstack([m.array for m in parts]))


def vstack(p: int, parts: Sequence[Matrix], cols: int | None = None) -> Matrix:
    if not parts:
        return Matrix.zeros(p, 0, cols or 0)
    for m in parts:
        if m.p != p:
            raise ModulusMismatch("mixed moduli in vstack")
    if len({m.cols for m in parts}) != 1:
        raise DimensionMismatch("vstack parts differ in column count")
    return Matrix._wrap(p, np.vstack([m.array for m in parts]))


def block_diag(p: int, parts: Sequence[Matrix]) -> Matrix:
    rows = sum(m.rows for m in parts)
    cols = sum(m.cols for m in parts)
    out = np.zeros((rows, cols), dtype=np.int64)
    r = c = 0
    for m in parts:
        if m.p != p:
            raise ModulusMismatch("mixed moduli in block_diag")
        out[r : r + m.rows, c : c + m.cols] = m.array
        r += m.rows
        c += m.cols
    return Matrix._wrap(p, out)


# row reduction ------------------------------------------------------------

def _rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``a`` mod p and its pivot columns."""
    a = a.copy()
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r, c:] = (a[r, c:] * pow(lead, -1, p)) % p
        col = a[:, c].copy()
        col[r] = 0
        hit = np.flatnonzero(col)
        if hit.size:
            a[hit, c:] = (a[hit, c:] - np.outer(col[hit], a[r, c:])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def _rank_array(a: np.ndarray, p: int) -> int:
    """Rank via forward elimination only (no back substitution)."""
    if a.size == 0:
        return 0
    if p == 2:
        return _rank_gf2(a)
    a = a.copy()
    rows, cols = a.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        lead = int(a[r, c])
        if lead != 1:
            a[r, c:] = (a[r, c:] * pow(lead, -1, p)) % p
        below = r + 1 + np.flatnonzero(a[r + 1 :, c])
        if below.size:
            a[below, c:] = (a[below, c:] - np.outer(a[below, c], a[r, c:])) % p
        r += 1
    return r


def _rank_gf2(a: np.ndarray) -> int:
    m = (a & 1).astype(np.bool_)
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.flatnonzero(m[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        below = r + 1 + np.flatnonzero(m[r + 1 :, c])
        if below.size:
            m[below] ^= m[r]
        r += 1
    return r


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    a, piv = _rref(m.array, m.p)
    return Matrix._wrap(m.p, a), piv


def rank(m: Matrix) -> int:
    """Rank of ``m`` over F_p."""
    return _rank_array(m.array, m.p)


def kernel_basis(m: Matrix) -> Matrix:
    """Columns spanning the right kernel of ``m``; ``cols - rank`` of them, independent."""
    p = m.p
    n = m.cols
    if m.rows == 0:
        return Matrix.identity(p, n)
    r, pivots = _rref(m.array, p)
    free = [c for c in range(n) if c not in set(pivots)]
    out = np.zeros((n, len(free)), dtype=np.int64)
    for j, f in enumerate(free):
        out[f, j] = 1
        for i, pc in enumerate(pivots):
            out[pc, j] = (-r[i, f]) % p
    return Matrix._wrap(p, out)


def solve(a: Matrix, b: Matrix) -> Matrix | None:
    """Some ``X`` with ``a @ X == b``, or ``None`` if the system is inconsistent."""
    a._same_field(b)
    if a.rows != b.rows:
        raise DimensionMismatch(f"solve: a has {a.rows} rows but b has {b.rows}")
    p = a.p
    n = a.cols
    if a.rows == 0:
        return Matrix.zeros(p, n, b.cols)
    aug = np.hstack([a.array, b.array])
    r, pivots = _rref(aug, p)
    if any(pc >= n for pc in pivots):
        return None
    x = np.zeros((n, b.cols), dtype=np.int64)
    for i, pc in enumerate(pivots):
        x[pc] = r[i, n:]
    return Matrix._wrap(p, x)


def tensor_product(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product: block ``(i, j)`` is ``a[i, j] * b``."""
    a._same_field(b)
    p = a.p
    if p**2 < _INT_EXACT:
        return Matrix._wrap(p, np.kron(a.array, b.array) % p)
    out = np.kron(a.array.astype(object), b.array.astype(object)) % p
    return Matrix._wrap(p, out.astype(np.int64).reshape(a.rows * b.rows, a.cols * b.cols))


def column_space_rank(p: int, parts: Iterable[Matrix], rows: int) -> int:
    """Rank of the horizontal concatenation of ``parts`` (all with ``rows`` rows)."""
    parts = [m for m in parts if m.cols]
    if not parts:
        return 0
    return rank(hstack(p, parts, rows))
