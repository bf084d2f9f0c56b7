"""Admissibility checks, the |c| <= 2 fast path, transvection triples and certificates."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

from .errors import (
    DegenerateForm,
    HypothesisViolation,
    InternalInconsistency,
    TripleDegenerate,
    UnsupportedC,
)
from .monodromy import (
    MonodromyData,
    Normalization,
    TransvectionData,
    as_transvection,
    companion,
    monodromy_pair,
    pairing,
)
from .polycore import DifferenceProfile, IntPoly, difference_profile, imprimitivity_set, is_self_reciprocal, poly_gcd, render
from .ratlinalg import RatMat, RatVec, mat_inv, mat_pow, solve, vectors_rank
from .witness import (
    Certificate,
    CertificateKind,
    Evaluator,
    FlagBasis,
    Word,
    acts_nontrivially_on_w,
    find_unipotent_witness,
    flag_basis,
    in_unipotent_radical,
    parse_word,
    reduced_words,
    word_from_letters,
)

# ---------------------------------------------------------------------------
# hypotheses


@dataclass(frozen=True)
class HypothesisReport:
    monic_f: bool
    monic_g: bool
    even_degree: bool
    unit_constant: bool
    reciprocal_f: bool
    reciprocal_g: bool
    coprime: bool
    primitive_pair: bool
    n: int

    FLAGS = (
        "monic_f",
        "monic_g",
        "even_degree",
        "unit_constant",
        "reciprocal_f",
        "reciprocal_g",
        "coprime",
        "primitive_pair",
    )

    @property
    def admissible(self) -> bool:
        return not self.failures()

    def failures(self) -> list[str]:
        return [name for name in self.FLAGS if not getattr(self, name)]

    def to_json(self) -> dict:
        out = {name: getattr(self, name) for name in self.FLAGS}
        out["n"] = self.n
        return out


def check_hypotheses(f: IntPoly, g: IntPoly) -> HypothesisReport:
    n = f.degree
    same_degree = f.degree == g.degree
    coprime = not (f.is_zero() and g.is_zero()) and poly_gcd(f, g).degree == 0
    return HypothesisReport(
        monic_f=f.is_monic(),
        monic_g=g.is_monic(),
        even_degree=same_degree and n >= 2 and n % 2 == 0,
        unit_constant=f[0] == 1 and g[0] == 1,
        reciprocal_f=is_self_reciprocal(f),
        reciprocal_g=is_self_reciprocal(g),
        coprime=coprime,
        primitive_pair=not imprimitivity_set(f, g),
        n=n,
    )


def require_admissible(f: IntPoly, g: IntPoly) -> HypothesisReport:
    report = check_hypotheses(f, g)
    if not report.admissible:
        failing = report.failures()
        raise HypothesisViolation("pair is not admissible: " + ", ".join(failing), failing)
    return report


# ---------------------------------------------------------------------------
# verdicts


class Verdict(enum.Enum):
    ARITHMETIC_THM1 = "ArithmeticThm1"
    ARITHMETIC_CERTIFICATE = "ArithmeticCertificate"
    KNOWN_THIN = "KnownThin"
    UNDETERMINED = "Undetermined"

    @property
    def rank(self) -> int:
        # higher is stronger
        return {"ArithmeticThm1": 3, "ArithmeticCertificate": 2, "KnownThin": 1, "Undetermined": 0}[self.value]

    @property
    def arithmetic(self) -> bool:
        return self in (Verdict.ARITHMETIC_THM1, Verdict.ARITHMETIC_CERTIFICATE)


@dataclass(frozen=True)
class Limits:
    power_bound: int = 48
    depth: int = 6

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.power_bound < 1:
            raise ValueError("power_bound must be >= 1")


@dataclass(frozen=True)
class Classification:
    verdict: Verdict
    method: str
    certificate: Optional["ArithmeticityCertificate"] = None
    citation: str = ""
    notes: tuple = ()

    def __post_init__(self):
        if self.verdict is Verdict.ARITHMETIC_CERTIFICATE and self.certificate is None:
            raise ValueError("a certificate verdict needs a certificate")
        if self.verdict is Verdict.KNOWN_THIN and not self.citation:
            raise ValueError("a known-thin verdict needs a citation")


LEADING_COEFFICIENT_CITATION = "leading coefficient criterion: |c| <= 2 implies arithmetic"
CRITERION_CITATION = "three transvections with a nontrivial unipotent radical element imply arithmetic"


def classify_thm1(f: IntPoly, g: IntPoly) -> Classification:
    require_admissible(f, g)
    profile = difference_profile(f, g)
    if abs(profile.c) <= 2:
        return Classification(Verdict.ARITHMETIC_THM1, f"|c| = {abs(profile.c)} <= 2", citation=LEADING_COEFFICIENT_CITATION)
    return Classification(Verdict.UNDETERMINED, f"|c| = {abs(profile.c)} > 2, fast path inapplicable")


# ---------------------------------------------------------------------------
# transvection triples


class OriginKind(enum.Enum):
    POWER_OF_A = "PowerOfA"
    POWER_OF_B = "PowerOfB"
    CONJUGATOR = "Conjugator"


@dataclass(frozen=True)
class TripleOrigin:
    kind: OriginKind
    word: Word  # the conjugator gamma, over A and B

    def __str__(self):
        return f"{self.kind.value}({self.word})"


@dataclass(frozen=True)
class TransvectionTriple:
    """C1 = C, C2 = gamma C gamma^-1, C3 = gamma^-1 C gamma, possibly renumbered.

    ``words`` holds the three defining words over A and B; ``w1, w2, w3`` are
    the exact images (C_i - 1)(Z^n) generators, i.e. v, gamma v, gamma^-1 v.
    """

    C1: TransvectionData
    C2: TransvectionData
    C3: TransvectionData
    w1: RatVec
    w2: RatVec
    w3: RatVec
    lambda2: object
    origin: TripleOrigin
    words: tuple  # (Word, Word, Word) over A, B

    def env(self) -> dict[str, RatMat]:
        return {"C1": self.C1.matrix, "C2": self.C2.matrix, "C3": self.C3.matrix}

    def bindings(self) -> dict[str, str]:
        return {f"C{i + 1}": str(w) for i, w in enumerate(self.words)}


def _conjugate_word(gamma: Word, c_word: Word) -> Word:
    return (gamma + c_word + gamma.inverse()).reduced()


C_WORD = parse_word("A^-1 B")


def triple_from_conjugator(md: MonodromyData, gamma: Word, kind: OriginKind = OriginKind.CONJUGATOR) -> TransvectionTriple:
    """Triple (C, gamma C gamma^-1, gamma^-1 C gamma), renumbered so Omega(w1, w2) != 0."""
    ev = Evaluator(md.env())
    g = ev.eval(gamma)
    g_inv = mat_inv(g)
    mats = [md.C, g @ md.C @ g_inv, g_inv @ md.C @ g]
    dirs = [md.v, g @ md.v, g_inv @ md.v]
    words = [C_WORD, _conjugate_word(gamma, C_WORD), _conjugate_word(gamma.inverse(), C_WORD)]
    if vectors_rank(dirs) != 3:
        raise TripleDegenerate(f"directions for conjugator {gamma} are dependent")
    order = next(
        (p for p in ((0, 1, 2), (0, 2, 1), (1, 2, 0)) if pairing(md.omega, dirs[p[0]], dirs[p[1]]) != 0), None
    )
    if order is None:
        raise TripleDegenerate("the form vanishes on all pairs of directions")
    mats = [mats[i] for i in order]
    dirs = [dirs[i] for i in order]
    words = [words[i] for i in order]
    data = [as_transvection(m, md.omega) for m in mats]
    triple = TransvectionTriple(
        C1=data[0],
        C2=data[1],
        C3=data[2],
        w1=dirs[0],
        w2=dirs[1],
        w3=dirs[2],
        lambda2=pairing(md.omega, dirs[0], dirs[1]),
        origin=TripleOrigin(kind, gamma),
        words=tuple(words),
    )
    _check_triple(triple)
    return triple


def _check_triple(t: TransvectionTriple):
    n = len(t.w1)
    for data, w in ((t.C1, t.w1), (t.C2, t.w2), (t.C3, t.w3)):
        if not w.is_integral():
            raise InternalInconsistency("transvection direction is not integral")
        nil = data.matrix - RatMat.identity(n)
        # (C_i - 1)(Z^n) = Z w_i: every column is an integer multiple of w_i, with coprime multiples
        from math import gcd

        mults = []
        for col in nil.columns():
            x = solve(RatMat.from_columns([w]), col)
            if x is None or not isinstance(x[0], int):
                raise InternalInconsistency("(C_i - 1) does not map Z^n into Z w_i")
            mults.append(x[0])
        acc = 0
        for m in mults:
            acc = gcd(acc, m)
        if acc != 1:
            raise InternalInconsistency("(C_i - 1)(Z^n) is a proper sublattice of Z w_i")


def build_triple(md: MonodromyData, profile: DifferenceProfile) -> TransvectionTriple:
    """Triple from C and its conjugates by A^-k and A^k, falling back to B."""
    k = profile.k
    for name, kind in (("A", OriginKind.POWER_OF_A), ("B", OriginKind.POWER_OF_B)):
        try:
            return triple_from_conjugator(md, Word.sym(name, -k), kind)
        except TripleDegenerate:
            continue
    raise TripleDegenerate("neither powers of A nor of B give independent directions")


def levi_matrices(triple: TransvectionTriple, c: int | None = None) -> tuple[RatMat, RatMat]:
    """Matrices of C1 and C2 on span(w1, w2) in the basis (w1, w2).

    These are [[1, -c], [0, 1]] and [[1, 0], [c, 1]] for the scalar c = -(gamma v)_n;
    passing ``c`` asserts that value.
    """
    basis = RatMat.from_columns([triple.w1, triple.w2])
    mats = []
    for data in (triple.C1, triple.C2):
        cols = []
        for w in (triple.w1, triple.w2):
            x = solve(basis, data.matrix @ w)
            if x is None:
                raise InternalInconsistency("span(w1, w2) is not invariant")
            cols.append(x)
        mats.append(RatMat.from_columns(cols))
    m1, m2 = mats
    t = m1[0, 1]
    expected_c = -t
    if c is not None and c != expected_c:
        raise InternalInconsistency(f"Levi matrices give c = {expected_c}, expected {c}")
    if m1 != RatMat([[1, -expected_c], [0, 1]]) or m2 != RatMat([[1, 0], [expected_c, 1]]):
        raise InternalInconsistency("Levi matrices do not have the unipotent pair shape")
    return m1, m2


# ---------------------------------------------------------------------------
# SL2 membership


def _sign(x: int) -> int:
    return 1 if x > 0 else -1


def sl2_membership(m: RatMat, c: int) -> Optional[Word]:
    """Word in M1 = [[1, -c], [0, 1]] and M2 = [[1, 0], [c, 1]] equal to m, or None.

    For |c| = 1 the pair generates SL2(Z) and Euclidean reduction always
    succeeds; for |c| = 2 it generates the free subgroup of matrices that are
    congruent to I mod 2 and ping-pong reduction decides membership.
    """
    if abs(c) not in (1, 2):
        raise UnsupportedC(f"membership is implemented for |c| in {{1, 2}}, got {c}")
    if m.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    if not m.is_integral() or m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0] != 1:
        return None
    q = abs(c)
    # T = [[1, q], [0, 1]] = M1^(-sign c); S = [[1, 0], [q, 1]] = M2^(sign c)
    t_sym, t_exp = "M1", -_sign(c)
    s_sym, s_exp = "M2", _sign(c)
    a, b = m[0, 0], m[0, 1]
    cc, d = m[1, 0], m[1, 1]
    if q == 2 and (a % 2 != 1 or d % 2 != 1 or b % 2 or cc % 2):
        return None
    ops = []  # left multiplications applied, as (symbol, exponent)
    # reduce the first column (a, cc) until cc = 0
    while cc != 0:
        if a == 0:
            # only for q = 1, where det = 1 forces cc = +-1; make a = 1
            k = -cc
            a, b = a - k * q * cc, b - k * q * d
            ops.append((t_sym, -k * t_exp))
        elif abs(a) > abs(cc):
            k = _nearest_multiple(a, q * cc)
            # T^-k M
            a, b = a - k * q * cc, b - k * q * d
            ops.append((t_sym, -k * t_exp))
        else:
            k = _nearest_multiple(cc, q * a)
            cc, d = cc - k * q * a, d - k * q * b
            ops.append((s_sym, -k * s_exp))
    # now m reduced = [[a, b], [0, d]] with a d = 1
    letters = [(s, -e) for s, e in ops]
    if a == 1:
        if b % q:
            return None
        letters.append((t_sym, t_exp * (b // q)))
        return Word.letters(letters)
    # a = d = -1: the reduced matrix is -T^(-b/q)
    if q == 2:
        return None
    # -I = (T S^-1 T)^2 in SL2(Z)
    minus_one = [(t_sym, t_exp), (s_sym, -s_exp), (t_sym, t_exp)] * 2
    letters.extend(minus_one)
    letters.append((t_sym, t_exp * (-b)))
    return Word.letters(letters)


def _nearest_multiple(x: int, y: int) -> int:
    """k minimizing |x - k y| (y != 0), ties toward zero."""
    k, r = divmod(x, y)
    # x = k y + r with r having the sign of y
    if 2 * abs(r) > abs(y) or (2 * abs(r) == abs(y) and abs(k + 1) < abs(k)):
        k += 1
    return k


def levi_env(c: int) -> dict[str, RatMat]:
    return {"M1": RatMat([[1, -c], [0, 1]]), "M2": RatMat([[1, 0], [c, 1]])}


# ---------------------------------------------------------------------------
# certificates


@dataclass(frozen=True)
class ArithmeticityCertificate:
    """Self-contained evidence: a word over A and B landing in the unipotent radical."""

    f: IntPoly
    g: IntPoly
    triple_origin: TripleOrigin
    m: Optional[int]
    sl2_word: Optional[Word]
    witness_word: Word  # over C1, C2, C3
    witness: Certificate  # carries matrix, flag and C_i bindings
    method: str

    @property
    def expanded_word(self) -> Word:
        """The witness as a word over A and B only."""
        return self.witness_word.substitute({k: parse_word(v) for k, v in self.witness.bindings.items()})

    def recheck(self) -> bool:
        """Re-derive A, B from f, g, evaluate the stored word over them and re-run the predicate."""
        env = {"A": companion(self.f), "B": companion(self.g)}
        value = Evaluator(env).eval(self.expanded_word)
        if value != self.witness.witness_matrix:
            return False
        return in_unipotent_radical(value, self.witness.flag) and acts_nontrivially_on_w(value, self.witness.flag)

    def to_json(self, verdict: Verdict = Verdict.ARITHMETIC_CERTIFICATE, citation: str = CRITERION_CITATION) -> dict:
        return {
            "pair": [render(self.f), render(self.g)],
            "triple_origin": self.triple_origin.kind.value,
            "conjugator_word": str(self.triple_origin.word),
            "m": self.m,
            "sl2_word": None if self.sl2_word is None else str(self.sl2_word),
            "witness_word": str(self.expanded_word),
            "witness_word_in_triple": str(self.witness_word),
            "triple_words": dict(self.witness.bindings),
            "witness_matrix": self.witness.witness_matrix.to_json(),
            "method": self.method,
            "verdict": verdict.value,
            "citation": citation,
        }


# ---------------------------------------------------------------------------
# the criterion


def _restrict(m: RatMat, basis: list[RatVec]) -> RatMat:
    """Matrix of m on span(basis), which must be m-invariant."""
    p = RatMat.from_columns(basis)
    cols = []
    for x in basis:
        y = solve(p, m @ x)
        if y is None:
            raise InternalInconsistency("subspace is not invariant")
        cols.append(y)
    return RatMat.from_columns(cols)


def _levi_construction(
    triple: TransvectionTriple, flag: FlagBasis, c: int, limits: Limits
) -> Optional[tuple[int, Word, Word, RatMat]]:
    """Smallest m with (C3'')^m in <C1'', C2''>, and the radical element C3^m h^-1.

    C_i'' is the action of C_i on W / Qe in the basis (w1, w2).  Returns
    (m, sl2_word, witness_word, witness_matrix) or None within the power bound.
    """
    basis = [flag.e, triple.w1, triple.w2]
    c3 = _restrict(triple.C3.matrix, basis)
    if [c3[i, 0] for i in range(3)] != [1, 0, 0]:
        raise InternalInconsistency("C3 does not fix e")
    g = c3.submatrix([1, 2], [1, 2])
    env = triple.env()
    ev = Evaluator(env)
    for m in range(1, limits.power_bound + 1):
        gm = mat_pow(g, m)
        if not gm.is_integral():
            continue
        word = sl2_membership(gm, c)
        if word is None:
            continue
        h_word = word.substitute({"M1": Word.sym("C1"), "M2": Word.sym("C2")})
        witness_word = (Word.sym("C3", m) + h_word.inverse()).reduced()
        value = ev.eval(witness_word)
        if in_unipotent_radical(value, flag) and acts_nontrivially_on_w(value, flag):
            return m, word, witness_word, value
    return None


def check_thm2(md: MonodromyData, triple: TransvectionTriple, limits: Limits = Limits()) -> Classification:
    """Verify the three-transvection criterion and produce a re-checkable certificate.

    Exhausting the limits gives Undetermined; it never means the group is thin.
    """
    require_admissible(md.f, md.g)
    ws = [triple.w1, triple.w2, triple.w3]
    if vectors_rank(ws) != 3:
        raise HypothesisViolation("transvection directions are not independent", ["independent directions"])
    if all(pairing(md.omega, ws[i], ws[j]) == 0 for i in range(3) for j in range(i + 1, 3)):
        raise HypothesisViolation("the form vanishes on W", ["Omega nonzero on W"])
    flag = flag_basis(triple, md.omega)
    m1, _ = levi_matrices(triple)
    c = -m1[0, 1]
    found = None
    m = sl2 = None
    if abs(c) in (1, 2):
        found = _levi_construction(triple, flag, c, limits)
        if found:
            m, sl2, word, value = found
            method = f"Levi quotient: (C3'')^{m} lies in <C1'', C2''> (|c| = {abs(c)})"
    if found is None:
        cert = find_unipotent_witness(triple.env(), flag, limits.depth, bindings=triple.bindings())
        if cert is None:
            return Classification(
                Verdict.UNDETERMINED,
                f"no unipotent radical element among words of length <= {limits.depth} in C1, C2, C3",
                notes=(f"search exhausted for triple {triple.origin}",),
            )
        word, value = cert.witness_word, cert.witness_matrix
        method = f"word search in C1, C2, C3 (depth {limits.depth})"
    witness = Certificate(
        kind=CertificateKind.UNIPOTENT_RADICAL,
        words=(word,),
        matrices=(value,),
        flag=flag,
        bindings=triple.bindings(),
    )
    cert = ArithmeticityCertificate(
        f=md.f,
        g=md.g,
        triple_origin=triple.origin,
        m=m,
        sl2_word=sl2,
        witness_word=word,
        witness=witness,
        method=method,
    )
    return Classification(Verdict.ARITHMETIC_CERTIFICATE, method, certificate=cert, citation=CRITERION_CITATION)


def extended_triple_search(md: MonodromyData, depth: int) -> Optional[TransvectionTriple]:
    """First conjugator gamma (by length, then lexicographically) with |(gamma v)_n| in {1, 2}.

    The triple is (C, gamma C gamma^-1, gamma^-1 C gamma); None when nothing
    qualifies within the depth.
    """
    n = md.n
    step = {("A", 1): md.A, ("A", -1): md.A_inv, ("B", 1): md.B, ("B", -1): md.B_inv}
    for letters in reduced_words(["A", "B"], depth):
        if not letters:
            continue
        gv = md.v
        for letter in reversed(letters):
            gv = step[letter] @ gv
        t = gv[n - 1]
        if abs(t) not in (1, 2):
            continue
        ginv_v = md.v
        for name, e in letters:
            ginv_v = step[(name, -e)] @ ginv_v
        if vectors_rank([md.v, gv, ginv_v]) != 3:
            continue
        return triple_from_conjugator(md, word_from_letters(letters))
    return None


@dataclass
class PairAnalysis:
    """Everything computed for one pair along the classification pipeline."""

    report: HypothesisReport
    profile: DifferenceProfile
    md: MonodromyData
    classification: Classification
    triple: Optional[TransvectionTriple] = None
    transcript: list = field(default_factory=list)


def analyze_pair(
    f: IntPoly,
    g: IntPoly,
    limits: Limits = Limits(),
    normalization: Normalization = Normalization.UNIT12,
    certify: bool = True,
) -> PairAnalysis:
    """Fast path, then the criterion with the standard triple, then conjugator search."""
    report = require_admissible(f, g)
    profile = difference_profile(f, g)
    transcript = []
    try:
        md = monodromy_pair(f, g, normalization, check=False)
    except DegenerateForm:
        # Omega(e1, e2) = 0; every test below is invariant under rescaling Omega
        md = monodromy_pair(f, g, Normalization.PRIMITIVE, check=False)
        transcript.append("Omega(e1, e2) = 0: using the primitive integer normalization")
    fast = classify_thm1(f, g)
    transcript.append(f"fast path: {fast.method}")
    if not certify and fast.verdict is Verdict.ARITHMETIC_THM1:
        return PairAnalysis(report, profile, md, fast, None, transcript)
    triple = build_triple(md, profile)
    result = None
    if abs(profile.c) <= 2:
        result = check_thm2(md, triple, limits)
        transcript.append(f"criterion with {triple.origin}: {result.verdict.value}")
    else:
        found = extended_triple_search(md, limits.depth)
        if found is not None:
            transcript.append(f"conjugator search (depth {limits.depth}): {found.origin.word}")
            triple = found
            result = check_thm2(md, found, limits)
            transcript.append(f"criterion with {found.origin}: {result.verdict.value}")
        else:
            transcript.append(f"conjugator search (depth {limits.depth}): none")
        if result is None or result.certificate is None:
            result = check_thm2(md, triple, limits)
            transcript.append(f"criterion with {triple.origin}: {result.verdict.value}")
    cert = result.certificate
    if fast.verdict is Verdict.ARITHMETIC_THM1:
        final = Classification(Verdict.ARITHMETIC_THM1, fast.method, certificate=cert, citation=fast.citation)
    elif cert is not None:
        final = result
    else:
        final = Classification(Verdict.UNDETERMINED, result.method, notes=tuple(transcript))
    return PairAnalysis(report, profile, md, final, triple, transcript)
