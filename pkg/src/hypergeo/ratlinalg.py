"""Exact rational vectors and matrices.

Entries are kept canonical: an ``int`` when the value is integral and a
``fractions.Fraction`` otherwise.  Integer matrices therefore multiply with
plain integer arithmetic, which keeps word searches over integral groups
cheap while staying exact.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Iterable, Sequence, Union

from .errors import DimensionMismatch, NotUnipotent, Singular

Rat = Union[int, Fraction]

MAX_DIM = 64


def rat(x) -> Rat:
    """Canonical exact value: int if integral, else Fraction."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return rat(Fraction(x.strip()))
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return rat(Fraction(x))


def rat_to_str(x: Rat) -> str:
    x = rat(x)
    if isinstance(x, int):
        return str(x)
    return f"{x.numerator}/{x.denominator}"


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def _denominator(x: Rat) -> int:
    return 1 if isinstance(x, int) else x.denominator


def _primitive(entries: Sequence[Rat]) -> tuple[int, ...]:
    """Scale to coprime integers with first nonzero entry positive."""
    den = 1
    for x in entries:
        den = _lcm(den, _denominator(x))
    ints = [int(x * den) for x in entries]
    g = 0
    for x in ints:
        g = gcd(g, x)
    if g == 0:
        return tuple(ints)
    first = next(x for x in ints if x)
    if first < 0:
        g = -g
    return tuple(x // g for x in ints)


class RatVec:
    __slots__ = ("entries",)

    def __init__(self, entries: Iterable):
        object.__setattr__(self, "entries", tuple(rat(x) for x in entries))

    def __setattr__(self, name, value):
        raise AttributeError("RatVec is immutable")

    @classmethod
    def basis(cls, n: int, i: int) -> RatVec:
        return cls(1 if j == i else 0 for j in range(n))

    @classmethod
    def zeros(cls, n: int) -> RatVec:
        return cls([0] * n)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __getitem__(self, i):
        return self.entries[i]

    def __eq__(self, other):
        return isinstance(other, RatVec) and self.entries == other.entries

    def __hash__(self):
        return hash(("RatVec", self.entries))

    def __add__(self, other: RatVec) -> RatVec:
        _check_len(self, other)
        return RatVec(a + b for a, b in zip(self.entries, other.entries))

    def __sub__(self, other: RatVec) -> RatVec:
        _check_len(self, other)
        return RatVec(a - b for a, b in zip(self.entries, other.entries))

    def __neg__(self):
        return RatVec(-a for a in self.entries)

    def __mul__(self, s) -> RatVec:
        s = rat(s)
        return RatVec(a * s for a in self.entries)

    __rmul__ = __mul__

    def dot(self, other: RatVec) -> Rat:
        _check_len(self, other)
        return rat(sum(a * b for a, b in zip(self.entries, other.entries)))

    def is_zero(self) -> bool:
        return not any(self.entries)

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for x in self.entries)

    def primitive(self) -> RatVec:
        """Coprime integer multiple with first nonzero entry positive."""
        return RatVec(_primitive(self.entries))

    def to_json(self) -> list[str]:
        return [rat_to_str(x) for x in self.entries]

    def __repr__(self):
        return f"RatVec({self.to_json()})"


def _check_len(a: RatVec, b: RatVec):
    if len(a) != len(b):
        raise DimensionMismatch(f"vector lengths {len(a)} and {len(b)} differ")


def _check_size(rows: int, cols: int):
    if rows < 1 or cols < 1:
        raise DimensionMismatch("matrices must have at least one row and one column")
    if rows > MAX_DIM or cols > MAX_DIM:
        raise DimensionMismatch(f"matrix exceeds the {MAX_DIM}x{MAX_DIM} size cap")


class RatMat:
    """Immutable dense matrix over Q, stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: Iterable[Iterable]):
        data = tuple(tuple(rat(x) for x in row) for row in rows)
        if not data or not data[0]:
            raise DimensionMismatch("matrices must have at least one row and one column")
        ncols = len(data[0])
        if any(len(r) != ncols for r in data):
            raise DimensionMismatch("ragged rows")
        _check_size(len(data), ncols)
        object.__setattr__(self, "rows", len(data))
        object.__setattr__(self, "cols", ncols)
        object.__setattr__(self, "entries", data)

    @classmethod
    def _trusted(cls, data: tuple) -> RatMat:
        # entries already canonical and rectangular
        m = object.__new__(cls)
        object.__setattr__(m, "rows", len(data))
        object.__setattr__(m, "cols", len(data[0]))
        object.__setattr__(m, "entries", data)
        return m

    def __setattr__(self, name, value):
        raise AttributeError("RatMat is immutable")

    @classmethod
    def identity(cls, n: int) -> RatMat:
        _check_size(n, n)
        return cls._trusted(tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> RatMat:
        cols = rows if cols is None else cols
        _check_size(rows, cols)
        return cls._trusted(tuple((0,) * cols for _ in range(rows)))

    @classmethod
    def from_columns(cls, columns: Sequence[RatVec]) -> RatMat:
        return cls(zip(*[c.entries for c in columns]))

    # access
    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def is_square(self) -> bool:
        return self.rows == self.cols

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def row(self, i: int) -> RatVec:
        return RatVec(self.entries[i])

    def column(self, j: int) -> RatVec:
        return RatVec(r[j] for r in self.entries)

    def columns(self) -> list[RatVec]:
        return [self.column(j) for j in range(self.cols)]

    def transpose(self) -> RatMat:
        return RatMat._trusted(tuple(zip(*self.entries)))

    @property
    def T(self) -> RatMat:
        return self.transpose()

    def is_integral(self) -> bool:
        return all(isinstance(x, int) for r in self.entries for x in r)

    def is_identity(self) -> bool:
        return self.is_square() and all(
            x == (1 if i == j else 0) for i, r in enumerate(self.entries) for j, x in enumerate(r)
        )

    def is_zero(self) -> bool:
        return not any(x for r in self.entries for x in r)

    def flat(self) -> tuple:
        return tuple(x for r in self.entries for x in r)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> RatMat:
        return RatMat._trusted(tuple(tuple(self.entries[i][j] for j in cols) for i in rows))

    # comparison
    def __eq__(self, other):
        return isinstance(other, RatMat) and self.entries == other.entries

    def __hash__(self):
        return hash(("RatMat", self.entries))

    # arithmetic
    def __add__(self, other: RatMat) -> RatMat:
        self._same_shape(other)
        return RatMat._trusted(
            tuple(tuple(rat(a + b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __sub__(self, other: RatMat) -> RatMat:
        self._same_shape(other)
        return RatMat._trusted(
            tuple(tuple(rat(a - b) for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries))
        )

    def __neg__(self):
        return RatMat._trusted(tuple(tuple(-a for a in r) for r in self.entries))

    def scale(self, s) -> RatMat:
        s = rat(s)
        return RatMat._trusted(tuple(tuple(rat(a * s) for a in r) for r in self.entries))

    def __mul__(self, other):
        if isinstance(other, (RatMat, RatVec)):
            return self @ other
        return self.scale(other)

    def __rmul__(self, s):
        return self.scale(s)

    def __matmul__(self, other):
        if isinstance(other, RatVec):
            if len(other) != self.cols:
                raise DimensionMismatch(f"{self.shape} @ vector of length {len(other)}")
            return RatVec(sum(a * b for a, b in zip(r, other.entries)) for r in self.entries)
        if not isinstance(other, RatMat):
            return NotImplemented
        return mat_mul(self, other)

    def __pow__(self, e: int) -> RatMat:
        return mat_pow(self, e)

    def inverse(self) -> RatMat:
        return mat_inv(self)

    def _same_shape(self, other):
        if self.shape != other.shape:
            raise DimensionMismatch(f"shapes {self.shape} and {other.shape} differ")

    # serialization
    def to_json(self) -> list[list[str]]:
        return [[rat_to_str(x) for x in r] for r in self.entries]

    @classmethod
    def from_json(cls, data) -> RatMat:
        return cls(data)

    def __repr__(self):
        return f"RatMat({self.to_json()})"

    def __str__(self):
        cells = [[rat_to_str(x) for x in r] for r in self.entries]
        width = max(len(c) for r in cells for c in r)
        return "\n".join("[" + " ".join(c.rjust(width) for c in r) + "]" for r in cells)


def mat_mul(a: RatMat, b: RatMat) -> RatMat:
    if a.cols != b.rows:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    bt = tuple(zip(*b.entries))
    return RatMat._trusted(
        tuple(tuple(rat(sum(x * y for x, y in zip(r, c))) for c in bt) for r in a.entries)
    )


def mat_pow(m: RatMat, e: int) -> RatMat:
    if not m.is_square():
        raise DimensionMismatch("power of a non-square matrix")
    if e < 0:
        m = mat_inv(m)
        e = -e
    result = RatMat.identity(m.rows)
    base = m
    while e:
        if e & 1:
            result = mat_mul(result, base)
        e >>= 1
        if e:
            base = mat_mul(base, base)
    return result


# fraction-free elimination

def _integer_rows(m: RatMat) -> tuple[list[list[int]], list[int]]:
    """Scale each row by the lcm of its denominators; returns rows and scale factors."""
    rows, scales = [], []
    for r in m.entries:
        den = 1
        for x in r:
            den = _lcm(den, _denominator(x))
        rows.append([int(x * den) for x in r])
        scales.append(den)
    return rows, scales


def _bareiss_reduce(rows: list[list[int]], pivot_limit: int | None = None):
    """Fraction-free Gauss-Jordan elimination, in place.

    Every intermediate entry is a minor of the input, so each division by the
    previous pivot is exact.  On return every pivot entry equals ``divisor``
    and all other entries of pivot columns vanish; dividing by ``divisor``
    gives the reduced row echelon form.  Returns (pivot_columns, divisor, sign)
    where sign tracks row swaps.
    """
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    limit = ncols if pivot_limit is None else pivot_limit
    prev = 1
    sign = 1
    pivots: list[int] = []
    r = 0
    for j in range(limit):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if rows[i][j]), None)
        if p is None:
            continue
        if p != r:
            rows[p], rows[r] = rows[r], rows[p]
            sign = -sign
        piv_row = rows[r]
        piv = piv_row[j]
        for i in range(nrows):
            if i == r:
                continue
            row = rows[i]
            a = row[j]
            new = []
            for x, y in zip(row, piv_row):
                q, rem = divmod(piv * x - a * y, prev)
                if rem:
                    raise ArithmeticError("inexact division in fraction-free elimination")
                new.append(q)
            rows[i] = new
        # earlier pivot rows were scaled to piv/prev; rows below the pivot likewise
        prev = piv
        pivots.append(j)
        r += 1
    return pivots, prev, sign


def rank(m: RatMat) -> int:
    rows, _ = _integer_rows(m)
    pivots, _, _ = _bareiss_reduce(rows)
    return len(pivots)


def det(m: RatMat) -> Rat:
    if not m.is_square():
        raise DimensionMismatch("determinant of a non-square matrix")
    rows, scales = _integer_rows(m)
    pivots, divisor, sign = _bareiss_reduce(rows)
    if len(pivots) < m.rows:
        return 0
    total = 1
    for s in scales:
        total *= s
    return rat(Fraction(sign * divisor, total))


def rref(m: RatMat) -> tuple[RatMat, list[int]]:
    rows, _ = _integer_rows(m)
    pivots, divisor, _ = _bareiss_reduce(rows)
    reduced = RatMat(
        [[Fraction(x, divisor) for x in row] for row in rows]
    ) if pivots else RatMat.zeros(m.rows, m.cols)
    return reduced, pivots


def mat_inv(m: RatMat) -> RatMat:
    if not m.is_square():
        raise DimensionMismatch("inverse of a non-square matrix")
    n = m.rows
    rows, scales = _integer_rows(m)
    aug = [row + [1 if i == j else 0 for j in range(n)] for i, row in enumerate(rows)]
    pivots, divisor, _ = _bareiss_reduce(aug, pivot_limit=n)
    if len(pivots) < n:
        raise Singular("matrix is singular")
    # aug = [divisor * I | divisor * (D m)^-1] and m^-1 = (D m)^-1 D
    return RatMat(
        [[Fraction(aug[i][n + j] * scales[j], divisor) for j in range(n)] for i in range(n)]
    )


def kernel(m: RatMat) -> list[RatVec]:
    """Basis of the right null space; primitive integer vectors, first nonzero entry positive."""
    rows, _ = _integer_rows(m)
    return integer_kernel(rows, m.cols)


def integer_kernel(rows: list[list[int]], ncols: int) -> list[RatVec]:
    """Null space of an integer system given as raw rows.

    Internal linear systems (such as the form equations for large n) may exceed
    the RatMat size cap; only the matrices handed to callers are capped.
    """
    rows = [list(r) for r in rows]
    pivots, _, _ = _bareiss_reduce(rows) if rows else ([], 1, 1)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        x: list[Rat] = [0] * ncols
        x[f] = 1
        for r, pc in enumerate(pivots):
            x[pc] = Fraction(-rows[r][f], rows[r][pc])
        basis.append(RatVec(_primitive(x)))
    return basis


def solve(m: RatMat, b: RatVec) -> RatVec | None:
    """One solution of m x = b (free variables zero), or None if inconsistent."""
    if len(b) != m.rows:
        raise DimensionMismatch("right-hand side length mismatch")
    aug = RatMat([list(r) + [bi] for r, bi in zip(m.entries, b.entries)])
    rows, _ = _integer_rows(aug)
    pivots, _, _ = _bareiss_reduce(rows)
    if m.cols in pivots:
        return None
    x: list[Rat] = [0] * m.cols
    for r, pc in enumerate(pivots):
        x[pc] = Fraction(rows[r][m.cols], rows[r][pc])
    return RatVec(x)


def vectors_rank(vectors: Sequence[RatVec]) -> int:
    if not vectors:
        return 0
    return rank(RatMat([v.entries for v in vectors]))


def in_span(v: RatVec, vectors: Sequence[RatVec]) -> bool:
    return vectors_rank(list(vectors) + [v]) == vectors_rank(vectors)


# nilpotent logarithms and Lie closures

def _nilpotency_powers(n_mat: RatMat) -> list[RatMat]:
    """Powers N, N^2, ... up to the last nonzero one; raise if N is not nilpotent."""
    powers = []
    p = n_mat
    for _ in range(n_mat.rows):
        if p.is_zero():
            return powers
        powers.append(p)
        p = mat_mul(p, n_mat)
    if not p.is_zero():
        raise NotUnipotent("matrix minus identity is not nilpotent")
    return powers


def nilpotent_log(u: RatMat) -> RatMat:
    """log(u) = sum_{i>=1} (-1)^(i+1) (u - I)^i / i for unipotent u."""
    if not u.is_square():
        raise DimensionMismatch("log of a non-square matrix")
    n_mat = u - RatMat.identity(u.rows)
    result = RatMat.zeros(u.rows)
    for i, p in enumerate(_nilpotency_powers(n_mat), start=1):
        result = result + p.scale(Fraction((-1) ** (i + 1), i))
    return result


def nilpotent_exp(n_mat: RatMat) -> RatMat:
    result = RatMat.identity(n_mat.rows)
    fact = 1
    for i, p in enumerate(_nilpotency_powers(n_mat), start=1):
        fact *= i
        result = result + p.scale(Fraction(1, fact))
    return result


def bracket(x: RatMat, y: RatMat) -> RatMat:
    return mat_mul(x, y) - mat_mul(y, x)


class _SpanBasis:
    """Incrementally maintained echelon basis of a subspace of Q^d."""

    def __init__(self):
        self.rows: list[list[Fraction]] = []
        self.pivots: list[int] = []

    def reduce(self, v) -> list[Fraction]:
        v = [Fraction(x) for x in v]
        for row, p in zip(self.rows, self.pivots):
            if v[p]:
                c = v[p]
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def add(self, v) -> bool:
        """Add v; return True if it enlarged the span."""
        v = self.reduce(v)
        p = next((i for i, x in enumerate(v) if x), None)
        if p is None:
            return False
        lead = v[p]
        v = [x / lead for x in v]
        # keep rows fully reduced against the new pivot
        self.rows = [[a - r[p] * b for a, b in zip(r, v)] if r[p] else r for r in self.rows]
        self.rows.append(v)
        self.pivots.append(p)
        return True

    def __len__(self):
        return len(self.rows)


def lie_closure_dim(gens: Sequence[RatMat]) -> int:
    """Dimension of the smallest bracket-closed subspace containing gens."""
    span = _SpanBasis()
    elems: list[RatMat] = []
    queue = list(gens)
    while queue:
        x = queue.pop(0)
        if not span.add(x.flat()):
            continue
        for y in elems:
            queue.append(bracket(y, x))
        elems.append(x)
    return len(span)
