import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import mat, vec
from hypergeo.criterion import triple_from_conjugator
from hypergeo.errors import InsufficientClosure, ParseError, ShapeMismatch, Singular, UnboundSymbol
from hypergeo.monodromy import is_symplectic, monodromy_pair, pairing
from hypergeo.polycore import parse_poly
from hypergeo.ratlinalg import RatMat, mat_inv, rank
from hypergeo.witness import (
    CertificateKind,
    Evaluator,
    FlagBasis,
    Word,
    acts_nontrivially_on_w,
    eval_word,
    finite_index_in_borel_unipotent,
    find_unipotent_witness,
    flag_basis,
    in_unipotent_radical,
    parse_word,
    reduced_words,
    render_word,
    rootgroup_coordinates,
    rootgroup_witnesses,
    verify_relation,
    word_from_letters,
)

P = parse_poly


def _example(worked, key):
    ex = worked[key]
    md = monodromy_pair(P(ex["f"]), P(ex["g"]))
    return ex, md


def _printed_flag(worked, key):
    """Flag basis in which the example's matrices are printed."""
    ex, md = _example(worked, key)
    if "basis" in ex:
        return ex, md, FlagBasis.from_basis([vec(v) for v in ex["basis"]], md.omega)
    triple = triple_from_conjugator(md, parse_word(ex["conjugator"]))
    return ex, md, flag_basis(triple, md.omega)


class TestWords:
    @pytest.mark.parametrize(
        "text, rendered",
        [
            ("A^-1 B", "A^-1 B"),
            ("A^-1*B", "A^-1 B"),
            ("C2C1^2", "C2 C1^2"),
            ("[E,[E,F]]", "[E,[E,F]]"),
            ("(C2^2 C1 C3^2 C1^-1)^2 C1", "(C2^2 C1 C3^2 C1^-1)^2 C1"),
            ("1", "1"),
            ("w^-1 C3", "w^-1 C3"),
        ],
    )
    def test_parse_render(self, text, rendered):
        assert render_word(parse_word(text)) == rendered
        assert parse_word(rendered) == parse_word(text)

    @pytest.mark.parametrize("text", ["(A B", "[A,B", "A^", "A^x", "A,B", "A $"])
    def test_parse_errors(self, text):
        with pytest.raises(ParseError):
            parse_word(text)

    def test_free_reduction(self):
        assert parse_word("A A^-1 B B").reduced() == parse_word("B^2")
        assert parse_word("(A B)^1 B^-1").reduced() == parse_word("A")

    def test_inverse(self):
        assert render_word(parse_word("A B^2 [A,B]").inverse()) == "[A,B]^-1 B^-2 A^-1"

    def test_substitute(self):
        w = parse_word("C1^2").substitute({"C1": parse_word("A^-1 B")})
        assert render_word(w) == "(A^-1 B)^2"


class TestEvaluation:
    def test_empty_word(self):
        env = {"A": RatMat.identity(3)}
        assert eval_word(Word(), env) == RatMat.identity(3)

    def test_commutator_convention(self):
        a, b = mat([[1, 1], [0, 1]]), mat([[1, 0], [1, 1]])
        assert eval_word("[A,B]", {"A": a, "B": b}) == a @ b @ mat_inv(a) @ mat_inv(b)

    def test_errors(self):
        with pytest.raises(UnboundSymbol):
            eval_word("A Z", {"A": RatMat.identity(2)})
        with pytest.raises(UnboundSymbol):
            eval_word("X", {"A": RatMat.identity(2)}, {"X": "Y", "Y": "X"})
        with pytest.raises(Singular):
            eval_word("N^-1", {"N": mat([[0, 1], [0, 0]])})

    def test_quartic_x4p1_d(self, worked):
        ex, md, flag = _printed_flag(worked, "quartic_x4p1")
        ev = Evaluator(md.env(), ex["bindings"])
        assert flag.to_flag(ev.eval("C2 C1^2")) == mat([[1, 0, 0, 0], [0, 0, 1, 0], [0, -1, 0, 0], [0, 0, 0, 1]])

    def test_phi10_e(self, worked):
        ex, md, flag = _printed_flag(worked, "phi10")
        ev = Evaluator(md.env(), ex["bindings"])
        assert flag.to_flag(ev.eval("(C2^2 C1 C3^2 C1^-1)^2 C1")) == mat(ex["matrices"]["E"])

    @pytest.mark.parametrize("key", ["quartic_x4p1", "phi10", "phi4phi6"])
    def test_printed_matrices(self, worked, key):
        ex, md, flag = _printed_flag(worked, key)
        ev = Evaluator(md.env(), ex["bindings"])
        for name, rows in ex["matrices"].items():
            assert flag.to_flag(ev.eval(name)) == mat(rows), name

    @pytest.mark.parametrize("key", ["quartic_x4p1", "phi10", "phi4phi6"])
    def test_defining_equations(self, worked, key):
        ex, md, flag = _printed_flag(worked, key)
        env = {name: flag.from_flag(mat(rows)) for name, rows in ex["matrices"].items()}
        assert env["x"] == eval_word("[E,F]", env)
        assert env["y"] == eval_word(ex["bindings"]["y"], env)
        assert env["z"] == eval_word(ex["bindings"]["z"], env)

    def test_relations(self, worked):
        for key in ("phi10", "phi4phi6", "phi6sq"):
            ex, md = _example(worked, key)
            assert verify_relation("[E,[E,F]]", md.env(), ex["bindings"])
        md = monodromy_pair(P("(X-1)^4"), P("Phi10"))
        assert not verify_relation("A B A^-1 B^-1", md.env())


class TestFlag:
    @pytest.mark.parametrize("key", ["phi10", "phi4phi6"])
    def test_invariants(self, worked, key):
        ex, md, flag = _printed_flag(worked, key)
        gram = flag.gram()
        n = md.n
        assert gram[1, n - 1] == 0 and gram[n - 2, n - 1] == 0
        assert flag.lambda1 == pairing(md.omega, flag.e, flag.e_star) != 0
        assert flag.lambda2 == pairing(md.omega, flag.vectors[1], flag.vectors[-2])
        assert [str(gram[i, n - 1 - i]) for i in range(n)] == ex["flag_antidiagonal"]

    def test_higher_rank(self):
        f, g = parse_poly("Phi7"), parse_poly("(X^3-1)^2")
        md = monodromy_pair(f, g)
        triple = triple_from_conjugator(md, parse_word("A^-1"))
        flag = flag_basis(triple, md.omega)
        gram = flag.gram()
        n = md.n
        assert n == 6
        assert all(gram[i, j] == 0 for i in range(n) for j in range(n) if i + j != n - 1)
        # the middle block is a standard symplectic pair
        assert gram[2, 3] == 1


class TestRadical:
    def test_identity(self, worked):
        _, md, flag = _printed_flag(worked, "phi10")
        assert in_unipotent_radical(RatMat.identity(4), flag)
        assert not acts_nontrivially_on_w(RatMat.identity(4), flag)

    def test_quartic_x4p1(self, worked):
        ex, md, flag = _printed_flag(worked, "quartic_x4p1")
        ev = Evaluator(md.env(), ex["bindings"])
        c1, c3 = ev.eval("C1"), ev.eval("C3")
        # C1 is upper unitriangular in the flag basis, but moves w2 off the line Qe
        assert in_unipotent_radical(c1, flag, level="borel")
        assert not in_unipotent_radical(c1, flag)
        assert not in_unipotent_radical(c3, flag)
        assert not in_unipotent_radical(c3, flag, level="borel")
        for name in ("E", "x", "y", "z"):
            assert in_unipotent_radical(ev.eval(name), flag)

    def test_printed_radical_elements(self, worked):
        for key in ("phi10", "phi4phi6"):
            ex, md, flag = _printed_flag(worked, key)
            ev = Evaluator(md.env(), ex["bindings"])
            for name in ("E", "F", "x", "y", "z"):
                m = ev.eval(name)
                assert in_unipotent_radical(m, flag), (key, name)
                assert is_symplectic(m, md.omega)

    def test_unknown_level(self, worked):
        _, _, flag = _printed_flag(worked, "phi10")
        with pytest.raises(ValueError):
            in_unipotent_radical(RatMat.identity(4), flag, level="other")


class TestRootGroups:
    def test_highest_root(self, worked):
        for key, z in (("phi10", 16), ("quartic_x4p1", -4)):
            ex, md, flag = _printed_flag(worked, key)
            x = flag.from_flag(mat(ex["matrices"]["x"]))
            assert rootgroup_coordinates(x, flag) == (0, z)
            cert = rootgroup_witnesses([("x", x)], flag, bindings=ex["bindings"])
            assert cert.kind is CertificateKind.ROOT_GROUP_PAIR
            assert cert.recheck(md.env())

    def test_second_highest_root(self, worked):
        for key, y2 in (("phi10", 16), ("phi4phi6", 8), ("quartic_x4p1", -4)):
            ex, md, flag = _printed_flag(worked, key)
            name = "z" if key == "quartic_x4p1" else "y"
            m = flag.from_flag(mat(ex["matrices"][name]))
            got = rootgroup_coordinates(m, flag)
            assert got[0] == y2

    def test_commutators_tried(self, worked):
        ex, md, flag = _printed_flag(worked, "phi10")
        ev = Evaluator(md.env(), ex["bindings"])
        cert = rootgroup_witnesses([("E", ev.eval("E")), ("F", ev.eval("F"))], flag, bindings=ex["bindings"])
        # E already has root-group shape here, so it is found before any commutator
        assert [str(w) for w in cert.words] == ["E"]
        assert cert.recheck(md.env())

    def test_levi_element_rejected(self, worked):
        _, _, flag = _printed_flag(worked, "phi10")
        levi = flag.from_flag(mat([[1, 0, 0, 0], [0, 1, 1, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
        with pytest.raises(ShapeMismatch):
            rootgroup_witnesses([("L", levi)], flag)


class TestClosure:
    @pytest.mark.parametrize("key", ["quartic_x4p1", "phi10", "phi4phi6"])
    def test_full_nilradical(self, worked, key):
        ex, md, flag = _printed_flag(worked, key)
        gens = [(name, flag.from_flag(mat(ex["matrices"][name]))) for name in ("C1", "x", "y", "z")]
        cert = finite_index_in_borel_unipotent(gens, flag, bindings=ex["bindings"])
        assert cert.dim == 4
        assert cert.recheck(md.env())

    def test_flag_coordinates(self, worked):
        ex, md, flag = _printed_flag(worked, "phi10")
        gens = [(name, mat(ex["matrices"][name])) for name in ("C1", "x", "y", "z")]
        cert = finite_index_in_borel_unipotent(gens, flag, in_flag_coords=True, bindings=ex["bindings"])
        assert cert.recheck(md.env())

    def test_insufficient(self, worked):
        ex, _, flag = _printed_flag(worked, "phi10")
        with pytest.raises(InsufficientClosure) as info:
            finite_index_in_borel_unipotent([("x", mat(ex["matrices"]["x"]))], flag, in_flag_coords=True)
        assert info.value.dim == 1

    def test_not_triangular(self, worked):
        ex, _, flag = _printed_flag(worked, "phi10")
        with pytest.raises(ValueError):
            finite_index_in_borel_unipotent([("C3", mat(ex["matrices"]["C3"]))], flag, in_flag_coords=True)


class TestSearch:
    def test_phi4phi6(self, worked):
        ex, md, flag = _printed_flag(worked, "phi4phi6")
        triple = triple_from_conjugator(md, parse_word(ex["conjugator"]))
        cert = find_unipotent_witness(triple.env(), flag, 4, bindings=triple.bindings())
        assert cert is not None and len(cert.witness_word) <= 4
        assert cert.recheck(md.env())
        assert in_unipotent_radical(cert.witness_matrix, flag)

    def test_quartic_x4p1(self, worked):
        ex, md = _example(worked, "quartic_x4p1")
        triple = triple_from_conjugator(md, parse_word("A^-1"))
        flag = flag_basis(triple, md.omega)
        cert = find_unipotent_witness(triple.env(), flag, 6, bindings=triple.bindings())
        m = cert.witness_matrix
        assert in_unipotent_radical(m, flag) and acts_nontrivially_on_w(m, flag)
        assert rank(m - RatMat.identity(4)) >= 1
        # the printed E lies in the radical of the printed flag instead
        printed = FlagBasis.from_basis([vec(v) for v in ex["basis"]], md.omega)
        ev = Evaluator(md.env(), ex["bindings"])
        assert in_unipotent_radical(ev.eval("E"), printed)
        assert not in_unipotent_radical(ev.eval("E"), flag)

    def test_depth_zero(self, worked):
        ex, md, flag = _printed_flag(worked, "phi4phi6")
        triple = triple_from_conjugator(md, parse_word(ex["conjugator"]))
        assert find_unipotent_witness(triple.env(), flag, 0) is None

    def test_deterministic(self, worked):
        ex, md, flag = _printed_flag(worked, "phi4phi6")
        triple = triple_from_conjugator(md, parse_word(ex["conjugator"]))
        a = find_unipotent_witness(triple.env(), flag, 5)
        b = find_unipotent_witness(triple.env(), flag, 5)
        assert a.witness_word == b.witness_word

    def test_reduced_words(self):
        words = list(reduced_words(["A", "B"], 3))
        assert len(words) == 1 + 4 + 12 + 36
        assert all(
            not any(x[0] == y[0] and x[1] == -y[1] for x, y in zip(w, w[1:])) for w in words
        )


_letters = st.lists(st.tuples(st.sampled_from(["A", "B"]), st.sampled_from([-3, -1, 1, 2])), max_size=8)


@settings(max_examples=200, deadline=None)
@given(_letters, _letters)
def test_eval_homomorphism(u, v):
    env = monodromy_pair(P("(X-1)^4"), P("Phi4 Phi6")).env()
    wu, wv = word_from_letters(u), word_from_letters(v)
    mu, mv = eval_word(wu, env), eval_word(wv, env)
    assert eval_word(wu + wv, env) == mu @ mv
    assert eval_word(wu.inverse(), env) == mat_inv(mu)
    assert eval_word(Word(((wu ** 2).atoms)), env) == mu @ mu


@settings(max_examples=200, deadline=None)
@given(_letters)
def test_radical_elements_are_unipotent_and_symplectic(u):
    md = monodromy_pair(P("(X-1)^4"), P("Phi10"))
    triple = triple_from_conjugator(md, parse_word("B^-2"))
    flag = flag_basis(triple, md.omega)
    ev = Evaluator(md.env(), triple.bindings() | {"E": "(C2^2 C1 C3^2 C1^-1)^2 C1"})
    g = ev.eval(word_from_letters(u))
    conj = g @ ev.eval("E") @ mat_inv(g)
    nil = conj - RatMat.identity(4)
    assert is_symplectic(conj, md.omega)
    assert (nil @ nil @ nil @ nil).is_zero()
    if in_unipotent_radical(conj, flag):
        assert (nil @ nil @ nil).is_zero()
