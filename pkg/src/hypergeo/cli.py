"""Command-line front end.

Exit codes: 0 success, 1 ``verify`` found a non-identity, 2 hypothesis
violation, 3 parse error, 4 any other library error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog
from .criterion import Limits, analyze_pair, build_triple, check_hypotheses, levi_matrices, triple_from_conjugator
from .errors import HypergeoError, HypothesisViolation, ParseError
from .monodromy import Normalization, invariant_report, monodromy_pair
from .polycore import difference_profile, parse_poly, render, root_angles
from .ratlinalg import rat_to_str
from .witness import Evaluator, find_unipotent_witness, flag_basis, parse_word

EXIT_OK = 0
EXIT_NOT_IDENTITY = 1
EXIT_HYPOTHESIS = 2
EXIT_PARSE = 3
EXIT_ERROR = 4

DEPTH_ENV = "HYPERGEO_MAX_DEPTH"


@dataclass
class RunConfig:
    command: str
    f: str | None = None
    g: str | None = None
    normalization: Normalization = Normalization.UNIT12
    depth: int = 6
    power_bound: int = 48
    fmt: str = "text"
    output: str | None = None
    lets: list = field(default_factory=list)
    word: str | None = None
    conjugator: str | None = None
    degree: int = 4
    table: str = "all"

    @property
    def limits(self) -> Limits:
        return Limits(power_bound=self.power_bound, depth=self.depth)


def _parse_let(text: str) -> tuple[str, str]:
    name, sep, body = text.partition("=")
    if not sep or not name.strip():
        raise ParseError("expected NAME=word", text, 0)
    parse_word(body)
    return name.strip(), body.strip()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hypergeo", description="Arithmeticity certificates for hypergeometric groups.")
    sub = parser.add_subparsers(dest="command", required=True)

    def pair_args(p):
        p.add_argument("--f", required=True, help='first polynomial, e.g. "(X-1)^4"')
        p.add_argument("--g", required=True, help='second polynomial, e.g. "Phi6^2"')
        p.add_argument("--normalize", default="unit12", help="unit12 (Omega(e1,e2)=1) or primitive")

    def output_args(p, formats=("text", "json")):
        p.add_argument("--format", dest="fmt", default=formats[0], choices=formats)
        p.add_argument("--output", help="write the report to this file instead of stdout")

    def limit_args(p):
        p.add_argument("--depth", type=int, default=6, help=f"word search depth (overridden by ${DEPTH_ENV})")
        p.add_argument("--power-bound", type=int, default=48)

    p = sub.add_parser("classify", help="run the full classification pipeline")
    pair_args(p)
    limit_args(p)
    output_args(p)

    p = sub.add_parser("form", help="print the invariant symplectic form")
    pair_args(p)
    output_args(p)

    p = sub.add_parser("triple", help="print the transvection triple and its Levi matrices")
    pair_args(p)
    p.add_argument("--conjugator", help="word gamma over A, B (default A^-k)")
    output_args(p)

    p = sub.add_parser("witness", help="search for a unipotent radical element")
    pair_args(p)
    limit_args(p)
    p.add_argument("--conjugator", help="word gamma over A, B (default A^-k)")
    output_args(p)

    p = sub.add_parser("verify", help="evaluate a word and report whether it is the identity")
    pair_args(p)
    p.add_argument("--let", dest="lets", action="append", default=[], metavar="NAME=word")
    p.add_argument("--word", required=True)
    output_args(p)

    p = sub.add_parser("enumerate", help="classify the cyclotomic catalog and write tables")
    p.add_argument("--degree", type=int, default=4)
    p.add_argument("--table", default="all", choices=["all", "T1", "T2", "T3"])
    limit_args(p)
    output_args(p, formats=("csv", "json", "markdown"))
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=args.command, fmt=args.fmt, output=args.output)
    if hasattr(args, "f"):
        cfg.f, cfg.g = args.f, args.g
        try:
            cfg.normalization = Normalization.parse(args.normalize)
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    if hasattr(args, "depth"):
        cfg.depth = args.depth
        cfg.power_bound = args.power_bound
        override = os.environ.get(DEPTH_ENV)
        if override:
            try:
                cfg.depth = int(override)
            except ValueError:
                raise ParseError(f"{DEPTH_ENV} must be an integer", override, 0) from None
        cfg.limits  # validates ranges
    cfg.lets = [_parse_let(x) for x in getattr(args, "lets", [])]
    cfg.word = getattr(args, "word", None)
    cfg.conjugator = getattr(args, "conjugator", None)
    cfg.degree = getattr(args, "degree", 4)
    cfg.table = getattr(args, "table", "all")
    return cfg


def _emit(cfg: RunConfig, report: dict, text: str):
    out = json.dumps(report, indent=2, sort_keys=False) + "\n" if cfg.fmt == "json" else text
    if cfg.output:
        Path(cfg.output).write_text(out)
    else:
        sys.stdout.write(out)


def _pair(cfg: RunConfig):
    return parse_poly(cfg.f), parse_poly(cfg.g)


def _matrix_text(m) -> str:
    return str(m)


def cmd_classify(cfg: RunConfig) -> int:
    f, g = _pair(cfg)
    report = check_hypotheses(f, g)
    if not report.admissible:
        raise HypothesisViolation("pair is not admissible: " + ", ".join(report.failures()), report.failures())
    analysis = analyze_pair(f, g, cfg.limits, cfg.normalization)
    cls = catalog.apply_known_results(f, g, analysis.classification)
    prof = analysis.profile
    omega = analysis.md.omega
    citations = [c for c in (cls.citation,) if c]
    known = catalog.known_result(f, g)
    if known and known.citation not in citations:
        citations.append(known.citation)
    data = {
        "f": render(f),
        "g": render(g),
        "n": report.n,
        "hypotheses": report.to_json(),
        "h": render(prof.h),
        "c": prof.c,
        "k": prof.k,
        "alpha": [rat_to_str(x) for x in root_angles(f)] if _is_cyclo(f) else None,
        "beta": [rat_to_str(x) for x in root_angles(g)] if _is_cyclo(g) else None,
        "omega": {"normalization": analysis.md.normalization.value, "entries": omega.to_json()},
        "verdict": cls.verdict.value,
        "method": cls.method,
        "citations": citations,
        "transcript": analysis.transcript,
        "notes": list(cls.notes),
    }
    if cls.certificate is not None:
        data["certificate"] = cls.certificate.to_json(cls.verdict, cls.citation)
    lines = [
        f"f = {data['f']}",
        f"g = {data['g']}",
        f"n = {report.n}",
        "hypotheses: " + ", ".join(f"{k}={'yes' if v else 'no'}" for k, v in report.to_json().items() if k != "n"),
        f"f - g = {data['h']}  (c = {prof.c}, d = {prof.d}, r = {prof.r}, k = {prof.k})",
        f"Omega ({data['omega']['normalization']}):",
        _matrix_text(omega),
        f"verdict: {cls.verdict.value}",
        f"method: {cls.method}",
    ]
    for c in citations:
        lines.append(f"citation: {c}")
    for note in cls.notes:
        lines.append(f"note: {note}")
    if cls.certificate is not None:
        cert = cls.certificate
        lines.append(f"certificate: triple {cert.triple_origin}, m = {cert.m}, sl2 word = {cert.sl2_word}")
        for name, w in cert.witness.bindings.items():
            lines.append(f"  {name} = {w}")
        lines.append(f"  witness = {cert.witness_word}")
        lines.append(_matrix_text(cert.witness.witness_matrix))
    _emit(cfg, data, "\n".join(lines) + "\n")
    return EXIT_OK


def _is_cyclo(p) -> bool:
    from .polycore import is_cyclotomic_product

    return is_cyclotomic_product(p)


def cmd_form(cfg: RunConfig) -> int:
    f, g = _pair(cfg)
    md = monodromy_pair(f, g, cfg.normalization)
    data = {
        "f": render(f),
        "g": render(g),
        "normalization": cfg.normalization.value,
        "omega": md.omega.to_json(),
        "v": md.v.to_json(),
        "invariants": invariant_report(md),
    }
    _emit(cfg, data, _matrix_text(md.omega) + "\n")
    return EXIT_OK


def _triple(cfg: RunConfig, md):
    if cfg.conjugator:
        return triple_from_conjugator(md, parse_word(cfg.conjugator))
    return build_triple(md, difference_profile(md.f, md.g))


def cmd_triple(cfg: RunConfig) -> int:
    f, g = _pair(cfg)
    md = monodromy_pair(f, g, cfg.normalization)
    t = _triple(cfg, md)
    m1, m2 = levi_matrices(t)
    flag = flag_basis(t, md.omega)
    data = {
        "origin": t.origin.kind.value,
        "conjugator": str(t.origin.word),
        "words": t.bindings(),
        "w": [t.w1.to_json(), t.w2.to_json(), t.w3.to_json()],
        "lambda2": rat_to_str(t.lambda2),
        "levi": [m1.to_json(), m2.to_json()],
        "flag": [v.to_json() for v in flag.vectors],
        "flag_gram": flag.gram().to_json(),
    }
    lines = [f"origin: {t.origin}"]
    lines += [f"{k} = {w}" for k, w in t.bindings().items()]
    lines += [f"w{i + 1} = {' '.join(w)}" for i, w in enumerate(data["w"])]
    lines.append(f"lambda2 = {data['lambda2']}")
    lines += ["M1:", _matrix_text(m1), "M2:", _matrix_text(m2)]
    lines.append("flag basis: " + "; ".join(" ".join(v) for v in data["flag"]))
    lines += ["Omega in the flag basis:", _matrix_text(flag.gram())]
    _emit(cfg, data, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_witness(cfg: RunConfig) -> int:
    f, g = _pair(cfg)
    md = monodromy_pair(f, g, cfg.normalization)
    t = _triple(cfg, md)
    flag = flag_basis(t, md.omega)
    cert = find_unipotent_witness(t.env(), flag, cfg.depth, bindings=t.bindings())
    if cert is None:
        data = {"found": False, "depth": cfg.depth}
        text = f"no witness among words of length <= {cfg.depth} (not evidence of thinness)\n"
    else:
        data = {"found": True, "depth": cfg.depth, **cert.to_json()}
        text = "\n".join(
            [f"{k} = {w}" for k, w in t.bindings().items()]
            + [f"witness = {cert.witness_word}", _matrix_text(cert.witness_matrix)]
        ) + "\n"
    _emit(cfg, data, text)
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    f, g = _pair(cfg)
    md = monodromy_pair(f, g, cfg.normalization, check=False)
    ev = Evaluator(md.env(), dict(cfg.lets))
    value = ev.eval(parse_word(cfg.word))
    ident = value.is_identity()
    data = {"word": cfg.word, "identity": ident, "matrix": value.to_json()}
    text = "identity\n" if ident else "not identity\n" + _matrix_text(value) + "\n"
    _emit(cfg, data, text)
    return EXIT_OK if ident else EXIT_NOT_IDENTITY


def cmd_enumerate(cfg: RunConfig) -> int:
    rows = catalog.classify_catalog(cfg.limits, degree=cfg.degree)
    rows = catalog.select(rows, cfg.table)
    text = catalog.format_tables(rows, cfg.fmt)
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "form": cmd_form,
    "triple": cmd_triple,
    "witness": cmd_witness,
    "verify": cmd_verify,
    "enumerate": cmd_enumerate,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except HypothesisViolation as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (HypergeoError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
