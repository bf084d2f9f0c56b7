"""Enumeration and classification of cyclotomic-product pairs, with table emission."""

from __future__ import annotations

import csv
import enum
import io
import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, combinations_with_replacement
from pathlib import Path
from typing import Iterable, Sequence

from .criterion import Classification, Limits, Verdict, analyze_pair
from .polycore import IntPoly, cyclotomic, euler_phi, imprimitivity_set, parse_poly, render, root_angles
from .ratlinalg import rat_to_str


def _products(degree: int) -> list[tuple[int, ...]]:
    """Multisets of cyclotomic indices with total degree ``degree`` and even multiplicity of 1."""
    indices = [m for m in range(1, 8 * degree * degree + 2) if euler_phi(m) <= degree]
    out = []

    def extend(start: int, remaining: int, acc: list[int]):
        if remaining == 0:
            if acc.count(1) % 2 == 0:
                out.append(tuple(acc))
            return
        for i in range(start, len(indices)):
            m = indices[i]
            d = euler_phi(m)
            if d <= remaining:
                acc.append(m)
                extend(i, remaining - d, acc)
                acc.pop()

    extend(0, degree, [])
    return out


def product_poly(indices: Sequence[int]) -> IntPoly:
    p = IntPoly([1])
    for m in indices:
        p = p * cyclotomic(m)
    return p


def enumerate_pairs(degree: int = 4) -> list[tuple[IntPoly, IntPoly]]:
    """All admissible unordered pairs of degree-``degree`` cyclotomic products.

    Each pair is ordered so that f precedes g lexicographically on ascending
    coefficient lists; the list is sorted the same way.
    """
    if degree < 2 or degree % 2:
        raise ValueError("degree must be even and positive")
    polys = [(set(ix), product_poly(ix)) for ix in _products(degree)]
    pairs = []
    for (sf, f), (sg, g) in combinations(polys, 2):
        if sf & sg:
            continue
        if imprimitivity_set(f, g):
            continue
        f, g = sorted((f, g), key=lambda p: p.coeffs)
        pairs.append((f, g))
    pairs.sort(key=lambda fg: (fg[0].coeffs, fg[1].coeffs))
    return pairs


# ---------------------------------------------------------------------------
# curated results


class KnownVerdict(enum.Enum):
    THIN_BT = "ThinBT"
    ARITHMETIC_PAPER = "ArithmeticPaper"


@dataclass(frozen=True)
class KnownResult:
    f: IntPoly
    g: IntPoly
    verdict: KnownVerdict
    citation: str

    @property
    def key(self) -> tuple:
        return pair_key(self.f, self.g)


def pair_key(f: IntPoly, g: IntPoly) -> tuple:
    return tuple(sorted((f.coeffs, g.coeffs)))


THIN_CITATION = (
    "Brav, Thomas: Thin monodromy in Sp(4), Compositio Math. 150 (2014); "
    "infinite index via a ping-pong argument"
)
ARITHMETIC_CITATION = "certified arithmetic by the three-transvection criterion"

_QUARTIC = "(X-1)^4"
_KNOWN = [
    ("Phi2^4", KnownVerdict.THIN_BT),
    ("Phi2^2 Phi3", KnownVerdict.THIN_BT),
    ("Phi2^2 Phi4", KnownVerdict.THIN_BT),
    ("Phi5", KnownVerdict.THIN_BT),
    ("Phi2^2 Phi6", KnownVerdict.THIN_BT),
    ("Phi8", KnownVerdict.THIN_BT),
    ("Phi12", KnownVerdict.THIN_BT),
    ("Phi6^2", KnownVerdict.ARITHMETIC_PAPER),
    ("Phi4 Phi6", KnownVerdict.ARITHMETIC_PAPER),
    ("Phi10", KnownVerdict.ARITHMETIC_PAPER),
]

KNOWN_RESULTS: tuple[KnownResult, ...] = tuple(
    KnownResult(
        parse_poly(_QUARTIC),
        parse_poly(g),
        verdict,
        THIN_CITATION if verdict is KnownVerdict.THIN_BT else ARITHMETIC_CITATION,
    )
    for g, verdict in _KNOWN
)
_KNOWN_BY_KEY = {r.key: r for r in KNOWN_RESULTS}


def known_result(f: IntPoly, g: IntPoly) -> KnownResult | None:
    return _KNOWN_BY_KEY.get(pair_key(f, g))


def apply_known_results(f: IntPoly, g: IntPoly, cls: Classification) -> Classification:
    """Overlay curated thinness results; computed arithmetic verdicts are never downgraded."""
    known = known_result(f, g)
    if known is None or known.verdict is not KnownVerdict.THIN_BT:
        return cls
    if cls.verdict.arithmetic:
        # a re-checkable certificate contradicting the curated table would be a bug somewhere
        return Classification(
            cls.verdict,
            cls.method,
            cls.certificate,
            cls.citation,
            cls.notes + (f"conflicts with curated thinness result: {known.citation}",),
        )
    return Classification(
        Verdict.KNOWN_THIN,
        "curated result (no computation decides thinness)",
        citation=known.citation,
        notes=cls.notes + (f"computed: {cls.verdict.value}: {cls.method}",),
    )


# ---------------------------------------------------------------------------
# the catalog


class TableTag(enum.Enum):
    T1 = "T1"
    T2 = "T2"


@dataclass(frozen=True)
class CatalogRow:
    no: int
    f: IntPoly
    g: IntPoly
    alpha: tuple
    beta: tuple
    diff: IntPoly
    c: int
    classification: Classification
    table_tag: TableTag
    t3: bool  # one of the polynomials is (X - 1)^n

    @property
    def verdict(self) -> Verdict:
        return self.classification.verdict


def _unipotent_power(n: int) -> IntPoly:
    return IntPoly([-1, 1]) ** n


def classify_catalog(
    limits: Limits = Limits(),
    degree: int = 4,
    pairs: Iterable[tuple[IntPoly, IntPoly]] | None = None,
    certify: bool = True,
) -> list[CatalogRow]:
    rows = []
    quartic = _unipotent_power(degree)
    for no, (f, g) in enumerate(pairs if pairs is not None else enumerate_pairs(degree), 1):
        analysis = analyze_pair(f, g, limits, certify=certify)
        cls = apply_known_results(f, g, analysis.classification)
        c = analysis.profile.c
        rows.append(
            CatalogRow(
                no=no,
                f=f,
                g=g,
                alpha=root_angles(f),
                beta=root_angles(g),
                diff=f - g,
                c=c,
                classification=cls,
                table_tag=TableTag.T1 if abs(c) <= 2 else TableTag.T2,
                t3=quartic in (f, g),
            )
        )
    return rows


# ---------------------------------------------------------------------------
# emission

COLUMNS = ["No.", "f", "g", "alpha", "beta", "f-g", "tag", "verdict", "method"]


def _angles(xs: Sequence[Fraction]) -> str:
    return ",".join(rat_to_str(x) for x in xs)


def row_cells(row: CatalogRow) -> list[str]:
    tag = row.table_tag.value + ("+T3" if row.t3 else "")
    return [
        str(row.no),
        render(row.f),
        render(row.g),
        _angles(row.alpha),
        _angles(row.beta),
        render(row.diff),
        tag,
        row.verdict.value,
        row.classification.method,
    ]


def row_json(row: CatalogRow) -> dict:
    cert = row.classification.certificate
    return {
        "no": row.no,
        "f": render(row.f),
        "g": render(row.g),
        "alpha": [rat_to_str(x) for x in row.alpha],
        "beta": [rat_to_str(x) for x in row.beta],
        "diff": render(row.diff),
        "c": row.c,
        "tag": row.table_tag.value,
        "t3": row.t3,
        "verdict": row.verdict.value,
        "method": row.classification.method,
        "citation": row.classification.citation,
        "certificate": None if cert is None else cert.to_json(row.verdict, row.classification.citation),
    }


def format_tables(rows: Sequence[CatalogRow], fmt: str) -> str:
    if not rows:
        raise ValueError("no rows to emit")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(COLUMNS)
        for row in rows:
            writer.writerow(row_cells(row))
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([row_json(r) for r in rows], indent=2) + "\n"
    if fmt == "markdown":
        lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
        for row in rows:
            cells = [c.replace("|", "\\|") for c in row_cells(row)]
            lines.append("| " + " | ".join(cells) + " |")
        return "\n".join(lines) + "\n"
    raise ValueError(f"unknown format {fmt!r}")


def emit_tables(rows: Sequence[CatalogRow], fmt: str, path: str | Path) -> Path:
    path = Path(path)
    path.write_text(format_tables(rows, fmt))
    return path


def select(rows: Sequence[CatalogRow], table: str) -> list[CatalogRow]:
    """Rows of T1 (|c| <= 2), T2 (|c| >= 3) or T3 (one polynomial is (X - 1)^n)."""
    if table == "T1":
        return [r for r in rows if r.table_tag is TableTag.T1]
    if table == "T2":
        return [r for r in rows if r.table_tag is TableTag.T2]
    if table == "T3":
        return [r for r in rows if r.t3]
    if table == "all":
        return list(rows)
    raise ValueError(f"unknown table {table!r}")
