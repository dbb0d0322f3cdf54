"""Command-line front end: word parsing, dispatch, pretty/JSON output.

Exit codes: 0 success, 1 a verification-style check failed, 2 input error.
Words are displayed 1-based (l1, m1, n1, ...); internally everything is the
library's own convention.  The eigenvalue/holonomy flags take "c,e" meaning
the unit c * lam^e with c rational.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import convert, freegroup, mfcore, modres, strips, t32
from .ring import NotAUnit, Poly, PolyMatrix
from .words import (
    BandDatum, CyclicWord, LoopDatum, NotEssential, NotNormal, UnitMonomial,
    normalize,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INPUT = 2


class InputError(ValueError):
    pass


def _parse_word(text: str, kind: str) -> CyclicWord:
    try:
        word = CyclicWord.parse(text, kind)
    except ValueError as exc:
        raise InputError(f"bad word {text!r}: {exc}") from None
    return word


def _parse_unit(text: str | None) -> UnitMonomial:
    if text is None:
        return UnitMonomial()
    try:
        parts = text.split(",")
        coeff = Fraction(parts[0])
        exp = int(parts[1]) if len(parts) > 1 else 0
        return UnitMonomial(coeff, exp)
    except (ValueError, ZeroDivisionError, IndexError) as exc:
        raise InputError(f"bad unit {text!r}; expected 'c,e'") from None


def _emit(args, pretty: str, payload: dict) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, indent=2))
    else:
        print(pretty)


def _default_trunc() -> int:
    try:
        return int(os.environ.get("CUSPMF_TRUNC", "12"))
    except ValueError:
        return 12


# ---------------------------------------------------------------------------
# subcommand handlers
# ---------------------------------------------------------------------------

def _cmd_convert(args) -> int:
    if args.direction == "band-to-loop":
        datum = BandDatum(_parse_word(args.word, "band"), _parse_unit(args.lam))
        loop, delta, eps = convert.band_to_loop(datum)
        payload = {
            "loop_word": list(loop.word.entries),
            "holonomy": loop.holonomy.to_json(),
            "sign_word": list(delta.bits),
            "correction_word": list(eps.values),
            "sign_exponent": convert.sign_exponent(datum.word),
        }
        pretty = (f"w'     = {loop.word}\n"
                  f"delta  = {','.join(map(str, delta.bits))}\n"
                  f"eps    = {','.join(map(str, eps.values))}\n"
                  f"lam'   = {loop.holonomy}")
        _emit(args, pretty, payload)
        return EXIT_OK
    datum = LoopDatum(_parse_word(args.word, "loop"), _parse_unit(args.holonomy))
    band = convert.band_from_loop(datum)
    delta = convert.sign_word_of_loop(datum.word)
    eps = convert.correction_word(delta)
    payload = {
        "band_word": list(band.word.entries),
        "eigenvalue": band.eigenvalue.to_json(),
        "sign_word": list(delta.bits),
        "correction_word": list(eps.values),
        "sign_exponent": convert.sign_exponent(band.word),
    }
    pretty = (f"w      = {band.word}\n"
              f"delta' = {','.join(map(str, delta.bits))}\n"
              f"eps'   = {','.join(map(str, eps.values))}\n"
              f"lam    = {band.eigenvalue}")
    _emit(args, pretty, payload)
    return EXIT_OK


def _cmd_normalize(args) -> int:
    word = _parse_word(args.word, "loop")
    result = normalize(word)
    _emit(args, str(result), {"normal_word": list(result.entries)})
    return EXIT_OK


def _cmd_equiv(args) -> int:
    w1 = _parse_word(args.word, "loop")
    w2 = _parse_word(args.word2, "loop")
    same = freegroup.conjugate_equal(freegroup.from_loop_word(w1),
                                     freegroup.from_loop_word(w2))
    _emit(args, "equivalent" if same else "not equivalent", {"equivalent": same})
    return EXIT_OK if same or not args.expect_equal else EXIT_CHECK_FAILED


def _cmd_mf(args) -> int:
    if args.mf_command == "canonical":
        word = _parse_word(args.word, "loop")
        lam = _parse_unit(args.lam)
        phi = mfcore.canonical_phi(word, lam)
        payload = {"phi": phi.to_json()}
        lines = [phi.pretty()]
        code = EXIT_OK
        if args.check:
            ok = mfcore.det_check(word, lam)
            u = mfcore.unit_u(word, lam)
            lines.append(f"det = x^t y^t z^t * ({u}): {'OK' if ok else 'FAILED'}")
            payload["det_check"] = ok
            payload["unit_u"] = u.to_json()
            if not ok:
                code = EXIT_CHECK_FAILED
        _emit(args, "\n".join(lines), payload)
        return code
    if args.mf_command == "geometric":
        datum = LoopDatum(_parse_word(args.word, "loop"),
                          _parse_unit(args.holonomy))
        geo = mfcore.geometric_matrix(datum)
        payload = {"matrix": geo.to_json()}
        lines = [geo.pretty()]
        code = EXIT_OK
        if args.match:
            try:
                conj = mfcore.match_geometric_to_canonical(datum)
                payload["match"] = {"left": list(conj.left), "right": list(conj.right)}
                lines.append(f"sign match: left={list(conj.left)} "
                             f"right={list(conj.right)}")
            except mfcore.MatchInconsistent as exc:
                payload["match"] = None
                lines.append(f"sign match FAILED: {exc}")
                code = EXIT_CHECK_FAILED
        _emit(args, "\n".join(lines), payload)
        return code
    if args.mf_command == "reduce":
        with open(args.infile) as fh:
            data = json.load(fh)
        mf = mfcore.MatrixFactorization(
            PolyMatrix.from_json(data["phi"]), PolyMatrix.from_json(data["psi"]),
            Poly.from_json(data["potential"]),
            Poly.from_json(data.get("scale", Poly.one().to_json())))
        trunc = args.trunc if args.trunc is not None else _default_trunc()
        red = mfcore.unit_pivot_reduce(mf, (args.row, args.col), args.side, trunc)
        ok = red.verify() if not red.truncated else None
        payload = {"phi": red.phi.to_json() if _all_poly(red.phi) else None,
                   "truncated": red.truncated, "verified": ok}
        lines = [red.phi.pretty(), f"truncated: {red.truncated}"]
        if ok is not None:
            lines.append(f"verify: {'OK' if ok else 'FAILED'}")
        _emit(args, "\n".join(lines), payload)
        return EXIT_OK if ok in (True, None) else EXIT_CHECK_FAILED
    if args.mf_command == "theta":
        params = tuple(int(t) for t in args.params.split(","))
        theta = mfcore.theta_catalogue(args.index, params, _parse_unit(args.lam),
                                       tuple(args.variables))
        _emit(args, theta.pretty(), {"theta": theta.to_json()})
        return EXIT_OK
    raise InputError(f"unknown mf subcommand {args.mf_command!r}")


def _all_poly(m: PolyMatrix) -> bool:
    return all(isinstance(e, Poly) for row in m.entries for e in row)


def _cmd_resolve(args) -> int:
    datum = BandDatum(_parse_word(args.word, "band"), _parse_unit(args.lam))
    try:
        trace = modres.resolution_pipeline(datum)
    except modres.StageCheckFailed as exc:
        _emit(args, f"pipeline FAILED: {exc}", {"ok": False, "stage": exc.stage})
        return EXIT_CHECK_FAILED
    payload = {
        "path": trace.path,
        "stages": [{"name": s.name, "pi_cols": s.pi_cols,
                    "phi_shape": list(s.phi_shape), "ok": s.ok, "note": s.note}
                   for s in trace.stages],
        "endpoint_matches_canonical": trace.endpoint_matches_canonical,
        "loop_word": list(trace.wprime.entries),
    }
    lines = [f"path: {trace.path}"]
    if args.trace:
        lines.extend(str(s) for s in trace.stages)
    lines.append("endpoint = canonical phi: "
                 + ("OK" if trace.endpoint_matches_canonical else "FAILED"))
    if args.dump:
        payload["endpoint_phi"] = trace.endpoint_phi.to_json()
        payload["stage_matrices"] = {
            s.name: s.phi_snapshot.to_json()
            for s in trace.stages if s.phi_snapshot is not None}
    _emit(args, "\n".join(lines), payload)
    return EXIT_OK if trace.all_ok() else EXIT_CHECK_FAILED


def _cmd_strips(args) -> int:
    word = _parse_word(args.word, "loop")
    try:
        hits = strips.enumerate_strips(word, args.start, args.max_len)
    except strips.Incomplete as exc:
        _emit(args, f"incomplete: {exc}", {"incomplete": str(exc)})
        return EXIT_CHECK_FAILED
    payload = {"hits": [{"end": h.end, "monomial": h.monomial.to_json(),
                         "length": h.length} for h in hits]}
    pretty = "\n".join(f"({args.start}, {h.end}): {h.monomial}   "
                       f"[{h.length} letters]" for h in hits) or "no strips"
    _emit(args, pretty, payload)
    return EXIT_OK


def _cmd_t32(args) -> int:
    lam = _parse_unit(args.lam)
    fact = t32.build_t32(args.m, lam)
    payload: dict = {"m": args.m}
    lines = [f"P1 (denominators 1 - r with r = {fact.r}):"]
    lines.append("\n".join("[ " + "  ".join(str(e) for e in row) + " ]"
                           for row in fact.P1.entries))
    code = EXIT_OK
    if args.presentation == "J":
        ok, cof = t32.check_presentation(t32.ideal_row(args.m, lam), fact.P1,
                                         t32.W_PLUS)
        payload["presentation"] = {"family": "J", "ok": ok,
                                   "cofactor": str(cof) if ok else None}
        lines.append(f"J-row presentation: {'OK, cofactor ' + str(cof) if ok else 'FAILED'}")
        if not ok:
            code = EXIT_CHECK_FAILED
    elif args.presentation == "I":
        if args.m != 1:
            raise InputError("the I-family swap display is written out for m = 1")
        ok = t32.ar_swap_check(lam)
        payload["presentation"] = {"family": "I", "ok": ok}
        lines.append(f"I-row via swapped pair: {'OK' if ok else 'FAILED'}")
        if not ok:
            code = EXIT_CHECK_FAILED
    if args.check:
        res = t32.verify_t32(args.m, lam)
        payload.update(res)
        lines.append(f"product convention: {res['product_convention']}")
        lines.append(f"presentation: "
                     f"{'OK' if res['cofactor_matches'] else 'FAILED'}")
        if "ar_swap_ok" in res:
            lines.append(f"AR swap: {'OK' if res['ar_swap_ok'] else 'FAILED'}")
        if res["product_convention"] is None or not res["cofactor_matches"]:
            code = EXIT_CHECK_FAILED
    _emit(args, "\n".join(lines), payload)
    return code


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cuspmf",
        description="Exact band/loop word combinatorics and matrix "
                    "factorizations of the degenerate cusps xyz and "
                    "x^3+y^2+xyz.")
    parser.add_argument("--json", action="store_true",
                        help="emit machine-readable JSON instead of text")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="band <-> loop conversion")
    p.add_argument("direction", choices=["band-to-loop", "loop-to-band"])
    p.add_argument("--word", required=True)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--holonomy")
    p.set_defaults(func=_cmd_convert)

    p = sub.add_parser("normalize", help="normal form of a loop word")
    p.add_argument("--word", required=True)
    p.set_defaults(func=_cmd_normalize)

    p = sub.add_parser("equiv", help="free-group conjugacy of two loop words")
    p.add_argument("--word", required=True)
    p.add_argument("--word2", required=True)
    p.add_argument("--expect-equal", action="store_true")
    p.set_defaults(func=_cmd_equiv)

    p = sub.add_parser("mf", help="matrix factorizations")
    mf_sub = p.add_subparsers(dest="mf_command", required=True)
    q = mf_sub.add_parser("canonical")
    q.add_argument("--word", required=True)
    q.add_argument("--lambda", dest="lam")
    q.add_argument("--check", action="store_true")
    q.set_defaults(func=_cmd_mf)
    q = mf_sub.add_parser("geometric")
    q.add_argument("--word", required=True)
    q.add_argument("--holonomy")
    q.add_argument("--match", action="store_true")
    q.set_defaults(func=_cmd_mf)
    q = mf_sub.add_parser("reduce")
    q.add_argument("--in", dest="infile", required=True)
    q.add_argument("--row", type=int, required=True)
    q.add_argument("--col", type=int, required=True)
    q.add_argument("--side", choices=["phi", "psi"], default="phi")
    q.add_argument("--trunc", type=int)
    q.set_defaults(func=_cmd_mf)
    q = mf_sub.add_parser("theta")
    q.add_argument("--index", type=int, required=True)
    q.add_argument("--params", required=True)
    q.add_argument("--lambda", dest="lam")
    q.add_argument("--variables", default="xyz",
                   help="bijection (u,v,w) -> variables, e.g. xyz or zxy")
    q.set_defaults(func=_cmd_mf)

    p = sub.add_parser("resolve", help="run the resolution pipeline")
    p.add_argument("--word", required=True)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--dump", action="store_true")
    p.set_defaults(func=_cmd_resolve)

    p = sub.add_parser("strips", help="strip-counting oracle (tau = 1)")
    p.add_argument("--word", required=True)
    p.add_argument("--start", choices=["p", "q", "r"], default="p")
    p.add_argument("--max-len", type=int, default=40)
    p.set_defaults(func=_cmd_strips)

    p = sub.add_parser("t32", help="the x^3+y^2+xyz family")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--check", action="store_true")
    p.add_argument("--presentation", choices=["J", "I"])
    p.set_defaults(func=_cmd_t32)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NotNormal, NotEssential, NotAUnit, modres.UniformSignWord,
            mfcore.Unsupported) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (FileNotFoundError, json.JSONDecodeError, KeyError, ValueError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


def main() -> None:  # pragma: no cover - thin wrapper
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
