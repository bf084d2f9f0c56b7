import csv
import io
import json

import pytest

from conftest import load_fixture
from hypergeo.catalog import (
    COLUMNS,
    KNOWN_RESULTS,
    KnownVerdict,
    TableTag,
    apply_known_results,
    emit_tables,
    enumerate_pairs,
    format_tables,
    known_result,
    pair_key,
    select,
)
from hypergeo.criterion import Classification, Verdict
from hypergeo.polycore import IntPoly, difference_profile, is_self_reciprocal, parse_poly

P = parse_poly


class TestEnumeration:
    def test_matches_oracle(self):
        oracle = load_fixture("catalog_oracle.json")
        pairs = enumerate_pairs(4)
        assert len(pairs) == oracle["pairs"] == 111
        expected = {tuple(sorted((tuple(p["f"]), tuple(p["g"])))) for p in oracle["pair_list"]}
        assert {pair_key(f, g) for f, g in pairs} == expected
        small = sum(abs(difference_profile(f, g).c) <= 2 for f, g in pairs)
        assert small == oracle["abs_c_le_2"]

    def test_membership(self):
        keys = {pair_key(f, g) for f, g in enumerate_pairs(4)}
        assert pair_key(P("(X-1)^4"), P("Phi6^2")) in keys
        # imprimitive: both are polynomials in X^2
        assert pair_key(P("X^4-2X^2+1"), P("X^4+1")) not in keys
        # common root
        assert pair_key(P("(X-1)^4"), P("(X-1)(X^3-1)")) not in keys

    def test_shape(self):
        pairs = enumerate_pairs(4)
        for f, g in pairs:
            for p in (f, g):
                assert p.degree == 4 and p.is_monic() and p.coeffs[0] == 1
                assert is_self_reciprocal(p)
        assert pairs == enumerate_pairs(4)
        assert sum(P("(X-1)^4") in fg for fg in pairs) == 14

    def test_odd_degree(self):
        with pytest.raises(ValueError):
            enumerate_pairs(3)


class TestKnownResults:
    def test_counts(self):
        kinds = [r.verdict for r in KNOWN_RESULTS]
        assert kinds.count(KnownVerdict.THIN_BT) == 7
        assert kinds.count(KnownVerdict.ARITHMETIC_PAPER) == 3

    def test_lookup_is_order_free(self):
        f, g = P("(X-1)^4"), P("Phi5")
        assert known_result(f, g) is known_result(g, f) is not None
        assert known_result(f, P("Phi3^2")) is None

    def test_thin_overlay(self):
        f, g = P("(X-1)^4"), P("Phi8")
        cls = apply_known_results(f, g, Classification(Verdict.UNDETERMINED, "search exhausted"))
        assert cls.verdict is Verdict.KNOWN_THIN
        assert "Brav" in cls.citation

    def test_never_downgrades(self):
        f, g = P("(X-1)^4"), P("Phi8")
        original = Classification(Verdict.ARITHMETIC_THM1, "unit leading coefficient", citation="x")
        cls = apply_known_results(f, g, original)
        assert cls.verdict is Verdict.ARITHMETIC_THM1
        assert cls.notes

    def test_arithmetic_entries_untouched(self):
        f, g = P("(X-1)^4"), P("Phi10")
        original = Classification(Verdict.UNDETERMINED, "limits reached")
        assert apply_known_results(f, g, original) is original


class TestCatalogRows:
    def test_table_sizes(self, catalog_rows):
        assert len(select(catalog_rows, "T1")) == 60
        assert len(select(catalog_rows, "T2")) == 51
        assert len(select(catalog_rows, "T3")) == 14
        assert select(catalog_rows, "all") == list(catalog_rows)
        with pytest.raises(ValueError):
            select(catalog_rows, "T4")

    def test_tags_follow_c(self, catalog_rows):
        for row in catalog_rows:
            assert (row.table_tag is TableTag.T1) == (abs(row.c) <= 2)
            assert row.diff == row.f - row.g

    def test_small_c_all_arithmetic(self, catalog_rows):
        assert all(r.verdict.arithmetic for r in select(catalog_rows, "T1"))

    def test_known_thin_rows(self, catalog_rows):
        thin = [r for r in catalog_rows if r.verdict is Verdict.KNOWN_THIN]
        assert len(thin) == 7
        assert all(r.t3 for r in thin)

    def test_numbering(self, catalog_rows):
        assert [r.no for r in catalog_rows] == list(range(1, len(catalog_rows) + 1))


class TestFormats:
    def test_markdown(self, catalog_rows):
        text = format_tables(select(catalog_rows, "T3"), "markdown")
        lines = text.strip().splitlines()
        assert len(lines) == 2 + 14
        assert lines[0].count("|") == len(COLUMNS) + 1

    def test_csv_roundtrip(self, catalog_rows):
        text = format_tables(catalog_rows, "csv")
        rows = list(csv.reader(io.StringIO(text)))
        assert rows[0] == COLUMNS
        assert len(rows) == 112
        assert {r[6].split("+")[0] for r in rows[1:]} == {"T1", "T2"}
        assert sum(r[6].endswith("+T3") for r in rows[1:]) == 14

    def test_json(self, catalog_rows):
        data = json.loads(format_tables(select(catalog_rows, "T3"), "json"))
        assert len(data) == 14
        keys = {"no", "f", "g", "alpha", "beta", "diff", "c", "tag", "t3", "verdict", "method", "citation", "certificate"}
        assert all(set(d) == keys for d in data)
        certified = [d for d in data if d["certificate"] is not None]
        assert certified and all("witness_word" in d["certificate"] for d in certified)

    def test_unknown_format(self, catalog_rows):
        with pytest.raises(ValueError):
            format_tables(catalog_rows, "xml")

    def test_emit(self, catalog_rows, tmp_path):
        path = emit_tables(catalog_rows[:3], "csv", tmp_path / "t.csv")
        assert path.read_text() == format_tables(catalog_rows[:3], "csv")
        with pytest.raises(ValueError):
            emit_tables([], "csv", tmp_path / "empty.csv")

    def test_deterministic(self, catalog_rows):
        assert format_tables(catalog_rows, "json") == format_tables(catalog_rows, "json")


def test_identity_polynomial_not_enumerated():
    one = IntPoly([1])
    assert all(one not in fg for fg in enumerate_pairs(4))
