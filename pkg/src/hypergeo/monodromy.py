"""Companion matrices, the transvection C = A^-1 B, and the invariant symplectic form."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    DegenerateForm,
    HypothesisViolation,
    NoInvariantForm,
    NonUniqueForm,
    NotMonic,
    NotTransvection,
)
from .polycore import IntPoly
from .ratlinalg import (
    Rat,
    RatMat,
    RatVec,
    _SpanBasis,
    _denominator,
    _lcm,
    det,
    integer_kernel,
    mat_inv,
    rank,
    rat,
    vectors_rank,
)


class Normalization(enum.Enum):
    UNIT12 = "unit12"  # Omega(e1, e2) = 1
    PRIMITIVE = "primitive"  # coprime integers, first nonzero entry positive

    @classmethod
    def parse(cls, text: str) -> Normalization:
        key = text.strip().lower().replace("-", "").replace("_", "")
        aliases = {"unit12": cls.UNIT12, "primitive": cls.PRIMITIVE, "primitiveinteger": cls.PRIMITIVE}
        if key not in aliases:
            raise ValueError(f"unknown normalization {text!r}")
        return aliases[key]


def companion(f: IntPoly) -> RatMat:
    """Companion matrix with ones on the subdiagonal and last column -(f_0, ..., f_{n-1})."""
    if f.degree < 1 or not f.is_monic():
        raise NotMonic(f"companion matrix needs a monic polynomial of degree >= 1, got {f}")
    n = f.degree
    rows = [[0] * n for _ in range(n)]
    for i in range(1, n):
        rows[i][i - 1] = 1
    for i in range(n):
        rows[i][n - 1] = -f[i]
    return RatMat(rows)


def pairing(omega: RatMat, x: RatVec, y: RatVec) -> Rat:
    """Omega(x, y) = x^T Omega y."""
    return x.dot(omega @ y)


def is_symplectic(m: RatMat, omega: RatMat) -> bool:
    return m.T @ omega @ m == omega


def invariant_form(a: RatMat, b: RatMat, normalization: Normalization = Normalization.UNIT12) -> RatMat:
    """The alternating form preserved by a and b, unique up to scalars.

    Solved as one kernel problem in the n(n-1)/2 upper-triangular unknowns.
    """
    n = a.rows
    unknowns = [(p, q) for p in range(n) for q in range(p + 1, n)]
    columns = []
    for p, q in unknowns:
        rows = [[0] * n for _ in range(n)]
        rows[p][q], rows[q][p] = 1, -1
        e = RatMat(rows)
        col = []
        for g in (a, b):
            d = g.T @ e @ g - e
            col.extend(d[i, j] for i in range(n) for j in range(i + 1, n))
        columns.append(col)
    system, _ = _integer_rows_raw(list(zip(*columns)))
    basis = integer_kernel(system, len(unknowns))
    if not basis:
        raise NoInvariantForm("no nonzero alternating form is preserved")
    if len(basis) > 1:
        raise NonUniqueForm(f"space of invariant alternating forms has dimension {len(basis)}")
    sol = basis[0]
    rows = [[0] * n for _ in range(n)]
    for (p, q), x in zip(unknowns, sol):
        rows[p][q], rows[q][p] = x, -x
    omega = RatMat(rows)
    if det(omega) == 0:
        raise DegenerateForm("the invariant alternating form is degenerate")
    if normalization is Normalization.UNIT12:
        if omega[0, 1] == 0:
            raise DegenerateForm("Omega(e1, e2) = 0, the unit12 normalization is undefined")
        omega = omega.scale(Fraction(1, 1) / omega[0, 1])
    return omega


def _integer_rows_raw(rows) -> tuple[list[list[int]], list[int]]:
    out, scales = [], []
    for r in rows:
        den = 1
        for x in r:
            den = _lcm(den, _denominator(x))
        out.append([int(x * den) for x in r])
        scales.append(den)
    return out, scales


@dataclass(frozen=True)
class MonodromyData:
    f: IntPoly
    g: IntPoly
    n: int
    A: RatMat
    B: RatMat
    C: RatMat
    v: RatVec
    omega: RatMat
    normalization: Normalization

    @property
    def A_inv(self) -> RatMat:
        return mat_inv(self.A)

    @property
    def B_inv(self) -> RatMat:
        return mat_inv(self.B)

    def env(self) -> dict[str, RatMat]:
        return {"A": self.A, "B": self.B}


def monodromy_pair(
    f: IntPoly, g: IntPoly, normalization: Normalization = Normalization.UNIT12, check: bool = True
) -> MonodromyData:
    if check:
        from .criterion import check_hypotheses

        report = check_hypotheses(f, g)
        if not report.admissible:
            raise HypothesisViolation(
                "pair is not admissible: " + ", ".join(report.failures()), report.failures()
            )
    a, b = companion(f), companion(g)
    c = mat_inv(a) @ b
    n = a.rows
    v = RatVec(list(c.column(n - 1).entries[: n - 1]) + [0])
    omega = invariant_form(a, b, normalization)
    return MonodromyData(f=f, g=g, n=n, A=a, B=b, C=c, v=v, omega=omega, normalization=normalization)


def invariant_report(md: MonodromyData) -> dict[str, bool]:
    """Evaluate every structural invariant of the monodromy bundle."""
    n, omega = md.n, md.omega
    ident = RatMat.identity(n)
    block = all(md.C[i, j] == ident[i, j] for i in range(n) for j in range(n - 1)) and md.C[n - 1, n - 1] == 1
    e = [RatVec.basis(n, i) for i in range(n)]
    orbit = [md.v]
    for _ in range(n - 1):
        orbit.append(md.A @ orbit[-1])
    return {
        "C_block_form": block and md.C.column(n - 1) == md.v + e[n - 1],
        "omega_antisymmetric": omega.T == -omega,
        "omega_nondegenerate": det(omega) != 0,
        "A_preserves_omega": is_symplectic(md.A, omega),
        "B_preserves_omega": is_symplectic(md.B, omega),
        "v_orthogonal": all(pairing(omega, md.v, e[i]) == 0 for i in range(n - 1)),
        "v_cyclic": vectors_rank(orbit) == n,
        "cayley_hamilton_f": _poly_at_matrix(md.f, md.A).is_zero(),
        "cayley_hamilton_g": _poly_at_matrix(md.g, md.B).is_zero(),
    }


def _poly_at_matrix(p: IntPoly, m: RatMat) -> RatMat:
    n = m.rows
    acc = RatMat.zeros(n)
    for coeff in reversed(p.coeffs):
        acc = acc @ m + RatMat.identity(n).scale(coeff)
    return acc


def algebra_spans_everything(a: RatMat, b: RatMat) -> bool:
    """Whether the unital algebra generated by a and b is the full matrix algebra."""
    n = a.rows
    span = _SpanBasis()
    frontier = [RatMat.identity(n)]
    span.add(frontier[0].flat())
    while frontier and len(span) < n * n:
        x = frontier.pop()
        for g in (a, b):
            y = x @ g
            if span.add(y.flat()):
                frontier.append(y)
    return len(span) == n * n


@dataclass(frozen=True)
class TransvectionData:
    matrix: RatMat
    w: RatVec  # primitive integer direction
    mu: Rat  # (matrix - I) x = mu * Omega(x, w) * w


def as_transvection(t: RatMat, omega: RatMat) -> TransvectionData:
    n = t.rows
    nil = t - RatMat.identity(n)
    r = rank(nil)
    if r != 1:
        raise NotTransvection(f"rank(T - I) = {r}, expected 1")
    if not (nil @ nil).is_zero():
        raise NotTransvection("(T - I)^2 != 0")
    if not is_symplectic(t, omega):
        raise NotTransvection("T does not preserve the form")
    col = next(c for c in nil.columns() if not c.is_zero())
    w = col.primitive()
    basis = [RatVec.basis(n, j) for j in range(n)]
    j = next(j for j in range(n) if pairing(omega, basis[j], w) != 0)
    i = next(i for i in range(n) if w[i] != 0)
    mu = rat(Fraction((nil @ basis[j])[i]) / (pairing(omega, basis[j], w) * w[i]))
    for x in basis:
        if nil @ x != w * (mu * pairing(omega, x, w)):
            raise NotTransvection("T - I is not of the form x -> mu Omega(x, w) w")
    return TransvectionData(matrix=t, w=w, mu=mu)
