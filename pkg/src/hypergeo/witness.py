"""Words in the generators, flag bases, unipotent-radical tests and witness search."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence, Union

from .errors import DegenerateFlag, InsufficientClosure, ParseError, ShapeMismatch, UnboundSymbol
from .monodromy import pairing
from .ratlinalg import (
    Rat,
    RatMat,
    RatVec,
    in_span,
    kernel,
    lie_closure_dim,
    mat_inv,
    mat_mul,
    nilpotent_log,
    rat,
    vectors_rank,
)

# ---------------------------------------------------------------------------
# words


@dataclass(frozen=True)
class Sym:
    name: str
    exp: int = 1


@dataclass(frozen=True)
class Group:
    body: "Word"
    exp: int = 1


@dataclass(frozen=True)
class Comm:
    """Commutator [left, right] = left right left^-1 right^-1, raised to exp."""

    left: "Word"
    right: "Word"
    exp: int = 1


Atom = Union[Sym, Group, Comm]


@dataclass(frozen=True)
class Word:
    atoms: tuple = ()

    @classmethod
    def sym(cls, name: str, exp: int = 1) -> Word:
        return cls((Sym(name, exp),))

    @classmethod
    def letters(cls, letters: Sequence[tuple[str, int]]) -> Word:
        return cls(tuple(Sym(n, e) for n, e in letters)).reduced()

    def __add__(self, other: Word) -> Word:
        return Word(self.atoms + other.atoms)

    def __len__(self):
        return len(self.atoms)

    def __bool__(self):
        return bool(self.atoms)

    def __pow__(self, e: int) -> Word:
        if e == 0:
            return Word()
        if e == 1:
            return self
        if len(self.atoms) == 1 and isinstance(self.atoms[0], (Sym, Group)):
            a = self.atoms[0]
            return Word((type(a)(a.name if isinstance(a, Sym) else a.body, a.exp * e),))
        return Word((Group(self, e),))

    def inverse(self) -> Word:
        out = []
        for a in reversed(self.atoms):
            if isinstance(a, Sym):
                out.append(Sym(a.name, -a.exp))
            elif isinstance(a, Group):
                out.append(Group(a.body, -a.exp))
            else:
                out.append(Comm(a.left, a.right, -a.exp))
        return Word(tuple(out))

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for a in self.atoms:
            if isinstance(a, Sym):
                out.add(a.name)
            elif isinstance(a, Group):
                out |= a.body.symbols()
            else:
                out |= a.left.symbols() | a.right.symbols()
        return out

    def is_flat(self) -> bool:
        return all(isinstance(a, Sym) for a in self.atoms)

    def reduced(self) -> Word:
        """Free reduction: merge adjacent powers of a symbol, drop trivial atoms."""
        out: list[Atom] = []
        for a in self.atoms:
            if isinstance(a, Group):
                body = a.body.reduced()
                if not body or a.exp == 0:
                    continue
                if a.exp == 1:
                    for b in body.atoms:
                        _push(out, b)
                    continue
                if len(body.atoms) == 1 and isinstance(body.atoms[0], Sym):
                    s = body.atoms[0]
                    a = Sym(s.name, s.exp * a.exp)
                else:
                    a = Group(body, a.exp)
            elif isinstance(a, Comm):
                left, right = a.left.reduced(), a.right.reduced()
                if not left or not right or a.exp == 0:
                    continue
                a = Comm(left, right, a.exp)
            _push(out, a)
        return Word(tuple(out))

    def substitute(self, bindings: Mapping[str, Word], _stack: tuple = ()) -> Word:
        """Replace bound symbols by their definitions, recursively."""
        out: list[Atom] = []
        for a in self.atoms:
            if isinstance(a, Sym):
                if a.name in bindings:
                    if a.name in _stack:
                        raise UnboundSymbol(f"cyclic binding involving {a.name}")
                    body = bindings[a.name].substitute(bindings, _stack + (a.name,))
                    out.append(Group(body, a.exp))
                else:
                    out.append(a)
            elif isinstance(a, Group):
                out.append(Group(a.body.substitute(bindings, _stack), a.exp))
            else:
                out.append(Comm(a.left.substitute(bindings, _stack), a.right.substitute(bindings, _stack), a.exp))
        return Word(tuple(out)).reduced()

    def __str__(self):
        return render_word(self)


def _push(out: list, a: Atom):
    if isinstance(a, Sym):
        if a.exp == 0:
            return
        if out and isinstance(out[-1], Sym) and out[-1].name == a.name:
            e = out[-1].exp + a.exp
            out.pop()
            if e:
                out.append(Sym(a.name, e))
            return
    out.append(a)


def _render_exp(e: int) -> str:
    return "" if e == 1 else f"^{e}"


def render_word(w: Word) -> str:
    parts = []
    for a in w.atoms:
        if isinstance(a, Sym):
            parts.append(a.name + _render_exp(a.exp))
        elif isinstance(a, Group):
            parts.append(f"({render_word(a.body)})" + _render_exp(a.exp))
        else:
            parts.append(f"[{render_word(a.left)},{render_word(a.right)}]" + _render_exp(a.exp))
    return " ".join(parts) if parts else "1"


_WORD_TOKEN = re.compile(r"\s*(?:([A-Za-z][a-z0-9_']*)|(\^)\s*(-?\d+)|([()\[\],*])|(1)(?![0-9]))")


class _WordParser:
    """word := atom+ ; atom := sym('^' int)? | '[' word ',' word ']'('^' int)? | '(' word ')'('^' int)?

    Atoms may be separated by whitespace or '*'.  A new symbol starts at each
    uppercase letter, so ``C2C1`` reads as ``C2 C1``.  The literal ``1``
    denotes the empty word.
    """

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise ParseError(msg, self.text, self.pos)

    def skip(self):
        while self.pos < len(self.text) and (self.text[self.pos].isspace() or self.text[self.pos] == "*"):
            self.pos += 1

    def peek_char(self) -> str:
        self.skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse(self) -> Word:
        w = self.word()
        if self.peek_char():
            self.error(f"unexpected {self.text[self.pos]!r}")
        return w

    def word(self) -> Word:
        atoms = []
        while True:
            ch = self.peek_char()
            if not ch or ch in ")],":
                break
            if ch == "1" and not self.text[self.pos + 1 : self.pos + 2].isdigit():
                self.pos += 1
                continue
            atoms.append(self.atom())
        return Word(tuple(atoms))

    def exponent(self) -> int:
        if self.peek_char() == "^":
            self.pos += 1
            self.skip()
            m = re.compile(r"-?\d+").match(self.text, self.pos)
            if not m:
                self.error("expected integer exponent")
            self.pos = m.end()
            return int(m.group(0))
        return 1

    def atom(self) -> Atom:
        ch = self.peek_char()
        if ch == "(":
            self.pos += 1
            body = self.word()
            if self.peek_char() != ")":
                self.error("expected ')'")
            self.pos += 1
            return Group(body, self.exponent())
        if ch == "[":
            self.pos += 1
            left = self.word()
            if self.peek_char() != ",":
                self.error("expected ','")
            self.pos += 1
            right = self.word()
            if self.peek_char() != "]":
                self.error("expected ']'")
            self.pos += 1
            return Comm(left, right, self.exponent())
        m = re.compile(r"[A-Za-z][a-z0-9_']*").match(self.text, self.pos)
        if not m:
            self.error(f"unexpected {ch!r}")
        self.pos = m.end()
        return Sym(m.group(0), self.exponent())


def parse_word(text: str) -> Word:
    return _WordParser(text).parse()


def as_word(w: Union[str, Word]) -> Word:
    return parse_word(w) if isinstance(w, str) else w


class Evaluator:
    """Evaluates words over an environment of matrices and named word bindings."""

    def __init__(self, env: Mapping[str, RatMat], bindings: Mapping[str, Union[str, Word]] | None = None):
        self.env = dict(env)
        self.bindings = {k: as_word(v) for k, v in (bindings or {}).items()}
        sizes = {m.shape for m in self.env.values()}
        if len(sizes) > 1 or any(r != c for r, c in sizes):
            raise ValueError("environment matrices must be square and of one size")
        self.n = next(iter(sizes))[0] if sizes else None
        self._values: dict[str, RatMat] = {}
        self._inverses: dict[str, RatMat] = {}
        self._resolving: set[str] = set()

    def symbol(self, name: str) -> RatMat:
        if name in self.env:
            return self.env[name]
        if name in self._values:
            return self._values[name]
        if name not in self.bindings:
            raise UnboundSymbol(f"symbol {name!r} is not bound")
        if name in self._resolving:
            raise UnboundSymbol(f"cyclic binding involving {name!r}")
        self._resolving.add(name)
        try:
            value = self.eval(self.bindings[name])
        finally:
            self._resolving.discard(name)
        self._values[name] = value
        return value

    def symbol_inverse(self, name: str) -> RatMat:
        if name not in self._inverses:
            self._inverses[name] = mat_inv(self.symbol(name))
        return self._inverses[name]

    def _power(self, m: RatMat, inv: RatMat, e: int) -> RatMat:
        base = m if e > 0 else inv
        result = None
        for _ in range(abs(e)):
            result = base if result is None else mat_mul(result, base)
        return result if result is not None else self.identity()

    def identity(self) -> RatMat:
        if self.n is None:
            raise UnboundSymbol("empty environment: matrix size unknown")
        return RatMat.identity(self.n)

    def eval(self, w: Union[str, Word]) -> RatMat:
        w = as_word(w)
        result = None
        for a in w.atoms:
            if isinstance(a, Sym):
                if a.exp == 0:
                    continue
                m = self._power(self.symbol(a.name), self.symbol_inverse(a.name) if a.exp < 0 else None, a.exp)
            elif isinstance(a, Group):
                body = self.eval(a.body)
                m = self._power(body, mat_inv(body) if a.exp < 0 else None, a.exp)
            else:
                x, y = self.eval(a.left), self.eval(a.right)
                c = mat_mul(mat_mul(x, y), mat_mul(mat_inv(x), mat_inv(y)))
                m = self._power(c, mat_inv(c) if a.exp < 0 else None, a.exp)
            result = m if result is None else mat_mul(result, m)
        return result if result is not None else self.identity()


def eval_word(w: Union[str, Word], env: Mapping[str, RatMat], bindings: Mapping | None = None) -> RatMat:
    """Exact product of the word over the environment; [a, b] = a b a^-1 b^-1."""
    return Evaluator(env, bindings).eval(w)


def verify_relation(w: Union[str, Word], env: Mapping[str, RatMat], bindings: Mapping | None = None) -> bool:
    """True iff the word evaluates to the identity."""
    return eval_word(w, env, bindings).is_identity()


# ---------------------------------------------------------------------------
# flag bases


@dataclass(frozen=True)
class FlagBasis:
    """Ordered basis e_1, e_2, ..., e_{n/2}, e*_{n/2}, ..., e*_2, e*_1.

    e_1 spans the null space of the form on W = span(w1, w2, w3), e_2 = w1,
    e*_2 = w2 and e*_1 pairs with e_1 while being orthogonal to w1 and w2.
    """

    vectors: tuple  # of RatVec, in the order above
    lambda1: Rat  # Omega(e, e*)
    lambda2: Rat  # Omega(w1, w2)
    change_of_basis: RatMat  # columns are the basis vectors
    omega: RatMat
    w: tuple  # (w1, w2, w3)

    @classmethod
    def from_basis(cls, vectors: Sequence[RatVec], omega: RatMat) -> FlagBasis:
        """Wrap an explicit ordered basis e_1, e_2, ..., e*_2, e*_1 (no normalization applied)."""
        vectors = tuple(vectors)
        if vectors_rank(list(vectors)) != len(vectors):
            raise DegenerateFlag("vectors do not form a basis")
        lam1 = pairing(omega, vectors[0], vectors[-1])
        lam2 = pairing(omega, vectors[1], vectors[-2])
        if lam1 == 0 or lam2 == 0:
            raise DegenerateFlag("basis is not adapted to the form")
        return cls(
            vectors=vectors,
            lambda1=lam1,
            lambda2=lam2,
            change_of_basis=RatMat.from_columns(list(vectors)),
            omega=omega,
            w=(vectors[1], vectors[-2], vectors[0]),
        )

    @property
    def n(self) -> int:
        return len(self.vectors)

    @property
    def e(self) -> RatVec:
        return self.vectors[0]

    @property
    def e_star(self) -> RatVec:
        return self.vectors[-1]

    @property
    def inverse_change(self) -> RatMat:
        return mat_inv(self.change_of_basis)

    def to_flag(self, m: RatMat) -> RatMat:
        """Matrix of m in the flag basis."""
        return self.inverse_change @ m @ self.change_of_basis

    def from_flag(self, m: RatMat) -> RatMat:
        return self.change_of_basis @ m @ self.inverse_change

    def gram(self) -> RatMat:
        p = self.change_of_basis
        return p.T @ self.omega @ p

    @property
    def block(self) -> tuple[int, int, int, int]:
        """Positions of e_1, e_2, e*_2, e*_1 in the ordered basis."""
        n = self.n
        return 0, 1, n - 2, n - 1


def flag_basis(triple, omega: RatMat) -> FlagBasis:
    """Flag-adapted basis for a transvection triple (anything with w1, w2, w3)."""
    w1, w2, w3 = triple.w1, triple.w2, triple.w3
    ws = [w1, w2, w3]
    n = len(w1)
    if vectors_rank(ws) != 3:
        raise DegenerateFlag("directions are linearly dependent")
    lam2 = pairing(omega, w1, w2)
    if lam2 == 0:
        raise DegenerateFlag("Omega(w1, w2) = 0; renumber the triple first")
    gram = RatMat([[pairing(omega, a, b) for b in ws] for a in ws])
    null = kernel(gram)
    if len(null) != 1:
        raise DegenerateFlag(f"null space of the form on W has dimension {len(null)}")
    kappa = null[0]
    e = (w1 * kappa[0] + w2 * kappa[1] + w3 * kappa[2]).primitive()
    std = [RatVec.basis(n, j) for j in range(n)]
    j = next((j for j in range(n) if pairing(omega, e, std[j]) != 0), None)
    if j is None:
        raise DegenerateFlag("the form is degenerate")
    ej = std[j]
    a = Fraction(-pairing(omega, ej, w2)) / lam2
    b = Fraction(pairing(omega, ej, w1)) / lam2
    e_star = (ej + w1 * a + w2 * b).primitive()
    lam1 = pairing(omega, e, e_star)
    x_basis = [e, w1, w2, e_star]
    # symplectic complement of X = span(e, w1, w2, e*)
    perp = kernel(RatMat([(omega.T @ x).entries for x in x_basis])) if n > 4 else []
    # note Omega(x, y) = x^T Omega y, so y is orthogonal to x iff (Omega^T x) . y = 0
    lower, upper = _symplectic_gram_schmidt(perp, omega)
    ordered = [e, w1] + lower + list(reversed(upper)) + [w2, e_star]
    p = RatMat.from_columns(ordered)
    if vectors_rank(ordered) != n:
        raise DegenerateFlag("flag basis is not a basis")
    return FlagBasis(
        vectors=tuple(ordered), lambda1=lam1, lambda2=lam2, change_of_basis=p, omega=omega, w=(w1, w2, w3)
    )


def _symplectic_gram_schmidt(vectors: list[RatVec], omega: RatMat) -> tuple[list[RatVec], list[RatVec]]:
    """Split a basis of a nondegenerate subspace into e_i, f_i with Omega(e_i, f_j) = delta_ij."""
    remaining = list(vectors)
    es, fs = [], []
    while remaining:
        x = remaining.pop(0)
        k = next((i for i, y in enumerate(remaining) if pairing(omega, x, y) != 0), None)
        if k is None:
            raise DegenerateFlag("complement is degenerate")
        y = remaining.pop(k)
        y = y * (Fraction(1) / pairing(omega, x, y))
        es.append(x)
        fs.append(y)
        # project the rest onto the complement of span(x, y)
        projected = []
        for z in remaining:
            z = z - y * pairing(omega, x, z) + x * pairing(omega, y, z)
            projected.append(z)
        remaining = projected
    return es, fs


# ---------------------------------------------------------------------------
# unipotent radicals


def _in_line(u: RatVec, e: RatVec) -> bool:
    return u.is_zero() or (vectors_rank([u, e]) == 1)


def in_unipotent_radical(m: RatMat, flag: FlagBasis, level: str = "parabolic") -> bool:
    """Membership in the unipotent radical attached to the flag.

    ``level="parabolic"``: the radical U_X of the stabilizer of Qe in W in X,
    i.e. m fixes e, (m - 1)W lies in Qe, (m - 1)X lies in W and m is the
    identity on the complement of X.  ``level="borel"``: upper unitriangular
    in the ordered flag basis.
    """
    if level == "borel":
        fm = flag.to_flag(m)
        n = fm.rows
        return all(fm[i, j] == (1 if i == j else 0) for i in range(n) for j in range(i + 1))
    if level != "parabolic":
        raise ValueError(f"unknown level {level!r}")
    n = m.rows
    ident = RatMat.identity(n)
    nil = m - ident
    e = flag.e
    if not (nil @ e).is_zero():
        return False
    w_span = [flag.e, flag.vectors[1], flag.vectors[-2]]
    for x in w_span[1:]:
        if not _in_line(nil @ x, e):
            return False
    if not in_span(nil @ flag.e_star, w_span):
        return False
    for x in flag.vectors[2:-2]:
        if not (nil @ x).is_zero():
            return False
    return True


def acts_nontrivially_on_w(m: RatMat, flag: FlagBasis) -> bool:
    return any(not (m @ x - x).is_zero() for x in flag.w)


class CertificateKind(enum.Enum):
    UNIPOTENT_RADICAL = "UnipotentRadical"
    ROOT_GROUP_PAIR = "RootGroupPair"
    LIE_CLOSURE = "LieClosure"


@dataclass(frozen=True)
class Certificate:
    """Words whose values witness membership in a prescribed unipotent subgroup.

    ``words`` are over the symbols of ``bindings`` (which in turn resolve to
    words over A and B); ``matrices`` are their values in standard coordinates.
    """

    kind: CertificateKind
    words: tuple
    matrices: tuple
    flag: FlagBasis
    bindings: Mapping[str, str] = field(default_factory=dict)
    dim: int | None = None  # Lie closure dimension, for LieClosure certificates

    @property
    def witness_word(self) -> Word:
        return self.words[0]

    @property
    def witness_matrix(self) -> RatMat:
        return self.matrices[0]

    def recheck(self, env: Mapping[str, RatMat]) -> bool:
        """Re-evaluate every stored word and re-run the kind-specific predicate."""
        ev = Evaluator(env, self.bindings)
        values = [ev.eval(w) for w in self.words]
        if tuple(values) != tuple(self.matrices):
            return False
        return certificate_predicate(self.kind, values, self.flag)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "words": [str(w) for w in self.words],
            "matrices": [m.to_json() for m in self.matrices],
            "bindings": dict(self.bindings),
            "flag": [v.to_json() for v in self.flag.vectors],
            "lambda1": str(self.flag.lambda1),
            "lambda2": str(self.flag.lambda2),
            **({"dim": self.dim} if self.dim is not None else {}),
        }


def certificate_predicate(kind: CertificateKind, matrices: Sequence[RatMat], flag: FlagBasis) -> bool:
    if kind is CertificateKind.UNIPOTENT_RADICAL:
        m = matrices[0]
        return in_unipotent_radical(m, flag) and acts_nontrivially_on_w(m, flag)
    if kind is CertificateKind.ROOT_GROUP_PAIR:
        return all(_rootgroup_shape(flag.to_flag(m), flag) is not None for m in matrices)
    if kind is CertificateKind.LIE_CLOSURE:
        try:
            _closure_check([flag.to_flag(m) for m in matrices], flag.n)
        except (InsufficientClosure, ValueError):
            return False
        return True
    raise ValueError(kind)


def _rootgroup_shape(fm: RatMat, flag: FlagBasis) -> tuple[Rat, Rat] | None:
    """(y2, z) if fm (flag coordinates) has the highest/second-highest root shape."""
    n = fm.rows
    i1, i2, j2, j1 = flag.block
    y2, z = fm[i1, j2], fm[i1, j1]
    if (y2, z) == (0, 0):
        return None
    if not (isinstance(y2, int) and isinstance(z, int)):
        return None
    expected = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    expected[i1][j2] = y2
    expected[i1][j1] = z
    expected[i2][j1] = rat(Fraction(flag.lambda1) / Fraction(flag.lambda2) * y2)
    return (y2, z) if fm == RatMat(expected) else None


def rootgroup_witnesses(
    candidates: Sequence[tuple], flag: FlagBasis, in_flag_coords: bool = False, bindings: Mapping | None = None
) -> Certificate:
    """Pick candidates (word, matrix) of the shape

        [[1, 0, y2, z], [0, 1, 0, (lambda1/lambda2) y2], [0, 0, 1, 0], [0, 0, 0, 1]]

    on the (e_1, e_2, e*_2, e*_1) block with (y2, z) != (0, 0).  Commutators of
    pairs of candidates are tried when no candidate has the shape itself.
    """
    conv = (lambda m: m) if in_flag_coords else flag.to_flag
    back = flag.from_flag if in_flag_coords else (lambda m: m)
    hits = [(as_word(w), m) for w, m in candidates if _rootgroup_shape(conv(m), flag) is not None]
    if not hits:
        for i, (wa, ma) in enumerate(candidates):
            for wb, mb in candidates[i + 1 :]:
                c = ma @ mb @ mat_inv(ma) @ mat_inv(mb)
                if _rootgroup_shape(conv(c), flag) is not None:
                    hits.append((Word((Comm(as_word(wa), as_word(wb)),)), c))
    if not hits:
        raise ShapeMismatch("no candidate lies in the highest or second highest root groups")
    return Certificate(
        kind=CertificateKind.ROOT_GROUP_PAIR,
        words=tuple(w for w, _ in hits),
        matrices=tuple(back(m) for _, m in hits),
        flag=flag,
        bindings=dict(bindings or {}),
    )


def rootgroup_coordinates(m: RatMat, flag: FlagBasis, in_flag_coords: bool = False) -> tuple[Rat, Rat]:
    fm = m if in_flag_coords else flag.to_flag(m)
    coords = _rootgroup_shape(fm, flag)
    if coords is None:
        raise ShapeMismatch("matrix does not have the root group shape")
    return coords


def _closure_check(flag_mats: Sequence[RatMat], n: int) -> int:
    for fm in flag_mats:
        if not all(fm[i, j] == (1 if i == j else 0) for i in range(n) for j in range(i + 1)):
            raise ValueError("generators must be upper unitriangular in flag coordinates")
    dim = lie_closure_dim([nilpotent_log(fm) for fm in flag_mats])
    expected = (n // 2) ** 2
    if dim != expected:
        raise InsufficientClosure(dim, expected)
    return dim


def finite_index_in_borel_unipotent(
    gens: Sequence[tuple], flag: FlagBasis, in_flag_coords: bool = False, bindings: Mapping | None = None
) -> Certificate:
    """Certify that (word, matrix) generators span the full Borel nilradical (dimension (n/2)^2)."""
    flag_mats = [m if in_flag_coords else flag.to_flag(m) for _, m in gens]
    dim = _closure_check(flag_mats, flag.n)
    return Certificate(
        kind=CertificateKind.LIE_CLOSURE,
        words=tuple(as_word(w) for w, _ in gens),
        matrices=tuple(flag.from_flag(m) if in_flag_coords else m for _, m in gens),
        flag=flag,
        bindings=dict(bindings or {}),
        dim=dim,
    )


# ---------------------------------------------------------------------------
# bounded search

# letter order for lexicographic tie-breaking: X1, X1^-1, X2, X2^-1, ...


def _letters(names: Sequence[str]) -> list[tuple[str, int]]:
    out = []
    for name in names:
        out.append((name, 1))
        out.append((name, -1))
    return out


def reduced_words(names: Sequence[str], max_len: int):
    """Freely reduced letter sequences, by length then lexicographically."""
    letters = _letters(names)
    level = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in level:
            for i, (name, e) in enumerate(letters):
                if w and w[-1][0] == name and w[-1][1] == -e:
                    continue
                nxt.append(w + ((name, e),))
        for w in nxt:
            yield w
        level = nxt


def word_from_letters(letters: Sequence[tuple[str, int]]) -> Word:
    return Word.letters(letters)


def _imul(a: tuple, b: tuple) -> tuple:
    bt = tuple(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in bt) for r in a)


def _apply(a: tuple, v: tuple) -> tuple:
    return tuple(sum(x * y for x, y in zip(r, v)) for r in a)


def _bfs_raw(gens: Mapping[str, RatMat], depth: int, inverses: bool = False):
    """Yield (letters, rows, inverse rows) for distinct elements reached by reduced words.

    Words are visited by length then lexicographically, and an element is
    reported only for its first (shortest, lexicographically least) word.
    Rows are plain tuples; Fraction and int entries hash alike, so
    deduplication is exact.
    """
    table = {}
    for name, m in gens.items():
        inv = mat_inv(m)
        table[(name, 1)] = (m.entries, inv.entries)
        table[(name, -1)] = (inv.entries, m.entries)
    letters = _letters(list(gens))
    start = RatMat.identity(next(iter(gens.values())).rows).entries
    seen = {start}
    level = [((), start, start)]
    for _ in range(depth):
        nxt = []
        for w, m, minv in level:
            for letter in letters:
                if w and w[-1][0] == letter[0] and w[-1][1] == -letter[1]:
                    continue
                x, xinv = table[letter]
                prod = _imul(m, x)
                if prod in seen:
                    continue
                seen.add(prod)
                nxt.append((w + (letter,), prod, _imul(xinv, minv) if inverses else None))
        yield from nxt
        level = nxt


def _as_mat(rows: tuple) -> RatMat:
    return RatMat(rows)


def bfs_elements(gens: Mapping[str, RatMat], depth: int):
    """(Word, RatMat) for every distinct element reached by a reduced word of length <= depth."""
    for letters, rows, _ in _bfs_raw(gens, depth):
        yield word_from_letters(letters), _as_mat(rows)


def find_unipotent_witness(
    env: Mapping[str, RatMat], flag: FlagBasis, depth: int, bindings: Mapping | None = None
) -> Certificate | None:
    """Shortest word in C1, C2, C3 (and inverses) giving a nontrivial element of the radical.

    Plain words come first (by length, then lexicographically), then
    commutators [u, v] of distinct elements with words of length <= depth // 2.
    Returns None when the search is exhausted; that is never evidence of thinness.
    """
    if depth <= 0:
        return None
    gens = {name: env[name] for name in ("C1", "C2", "C3")}
    w_vecs = [x.entries for x in flag.w]
    e = flag.e.entries
    n = len(e)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    def quick(rows: tuple) -> bool:
        # words in C1, C2, C3 map V into W and fix e; only (M - 1)W in Qe is left to test
        moved = False
        for x in w_vecs:
            d = [a - b for a, b in zip(_apply(rows, x), x)]
            if any(d):
                moved = True
                if any(d[i] * e[j] != d[j] * e[i] for i, j in pairs):
                    return False
        return moved

    def certify(word: Word, rows: tuple) -> Certificate | None:
        m = _as_mat(rows)
        if in_unipotent_radical(m, flag) and acts_nontrivially_on_w(m, flag):
            return Certificate(
                kind=CertificateKind.UNIPOTENT_RADICAL,
                words=(word,),
                matrices=(m,),
                flag=flag,
                bindings=dict(bindings or {}),
            )
        return None

    for letters, rows, _ in _bfs_raw(gens, depth):
        if quick(rows):
            cert = certify(word_from_letters(letters), rows)
            if cert:
                return cert
    # [b, a] is the inverse of [a, b], so unordered pairs suffice
    pool = list(_bfs_raw(gens, max(depth // 2, 1), inverses=True))
    binv_w = [[_apply(ib, x) for x in w_vecs] for _, _, ib in pool]
    for i, (wa, ma, ia) in enumerate(pool):
        for j in range(i + 1, len(pool)):
            wb, mb, ib = pool[j]
            moved = False
            ok = True
            for x, y in zip(w_vecs, binv_w[j]):
                z = _apply(ma, _apply(mb, _apply(ia, y)))
                d = [a - b for a, b in zip(z, x)]
                if any(d):
                    moved = True
                    if any(d[p] * e[q] != d[q] * e[p] for p, q in pairs):
                        ok = False
                        break
            if ok and moved:
                rows = _imul(_imul(ma, mb), _imul(ia, ib))
                word = Word((Comm(word_from_letters(wa), word_from_letters(wb)),))
                cert = certify(word, rows)
                if cert:
                    return cert
    return None
