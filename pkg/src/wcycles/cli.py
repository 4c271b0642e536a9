"""``wcycles`` command line.

Exit codes: 0 pass, 1 theorem violation (a bug), 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import serialize
from .graphs import GraphMorphism, euler_characteristic, fold, identity, rose
from .harness import run_harness
from .pullback import pullback
from .render import stacking_svg, to_dot
from .stacking import construct_stacking
from .theorems import HypothesisError, OneRelatorComplex, npi_check, verify_main_theorem, wcycles_check
from .words import cyclic_reduce, loop_from_word

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _base(spec: dict):
    if "base" in spec:
        data = spec["base"]
        if isinstance(data, str):
            data = json.loads(Path(data).read_text(encoding="utf-8"))
        g = serialize.graph_from_json(data)
        g.check()
        return g
    return rose(int(spec.get("rank", 2)))


def _word(base, word, strict: bool):
    if isinstance(word, list):
        return serialize.loop_from_json(base, word)
    return loop_from_word(base, word if strict else cyclic_reduce(word))


def _rho(base, spec: dict) -> GraphMorphism:
    gens = spec.get("gens")
    if gens is None:
        return identity(base)
    return fold(base, gens, absolute=True)


def _instances(args) -> list[dict]:
    if getattr(args, "instances", None):
        data = json.loads(Path(args.instances).read_text(encoding="utf-8"))
        return data if isinstance(data, list) else [data]
    spec = {"rank": args.rank, "word": args.word}
    if args.base:
        spec["base"] = args.base
    if args.gens is not None:
        spec["gens"] = args.gens
    return [spec]


def _emit(obj, args) -> None:
    print(serialize.dumps(obj))


# ---------------------------------------------------------------------------


def cmd_fold(args) -> int:
    base = _base({"rank": args.rank, **({"base": args.base} if args.base else {})})
    m = fold(base, args.words, absolute=args.absolute)
    out = serialize.morphism_to_json(m)
    out["euler_characteristic"] = euler_characteristic(m.domain)
    _emit(out, args)
    return EXIT_OK


def cmd_stack(args) -> int:
    base = _base({"rank": args.rank, **({"base": args.base} if args.base else {})})
    loop = _word(base, args.word, args.strict)
    try:
        s, trace = construct_stacking(loop)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    out = serialize.stacking_to_json(s)
    out["word"] = loop.word()
    out["trace"] = trace.to_dict()
    if args.svg:
        Path(args.svg).write_text(stacking_svg(s), encoding="utf-8")
    _emit(out, args)
    return EXIT_OK


def cmd_pullback(args) -> int:
    spec = _instances(args)[0]
    base = _base(spec)
    p = pullback(_rho(base, spec), _word(base, spec["word"], args.strict))
    _emit(p.report(), args)
    return EXIT_OK


def _run_verdicts(args, checks) -> int:
    code = EXIT_OK
    for n, spec in enumerate(_instances(args)):
        try:
            base = _base(spec)
            rho, loop = _rho(base, spec), _word(base, spec["word"], args.strict)
            verdicts = [check(rho, loop) for check in checks]
        except (ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
            print(json.dumps({"instance": n, "error": str(exc)}, ensure_ascii=False))
            if code == EXIT_OK:
                code = EXIT_INPUT
            continue
        for name, v in zip((c.__name__ for c in checks), verdicts):
            print(json.dumps({"instance": n, "check": name, **v.to_dict()}, ensure_ascii=False, sort_keys=True))
            if not v.passed:
                code = EXIT_VIOLATION
    return code


def cmd_verify(args) -> int:
    return _run_verdicts(args, [verify_main_theorem, wcycles_check])


def cmd_wcycles(args) -> int:
    return _run_verdicts(args, [wcycles_check])


def cmd_npi(args) -> int:
    spec = _instances(args)[0]
    base = _base(spec)
    y = OneRelatorComplex.from_lifts(_rho(base, spec), _word(base, spec["word"], args.strict))
    v = npi_check(y)
    _emit(v.to_dict(), args)
    return EXIT_OK if v.passed else EXIT_VIOLATION


def cmd_harness(args) -> int:
    start = time.perf_counter()
    text, ok = run_harness(args.seed, args.count, args.max_word_len, args.max_gen_len, args.max_gens)
    sys.stdout.write(text)
    # timing goes to stderr so stdout stays a pure function of the arguments
    print(f"elapsed {time.perf_counter() - start:.2f}s", file=sys.stderr)
    return EXIT_OK if ok else EXIT_VIOLATION


def cmd_export_dot(args) -> int:
    if args.graph:
        g = serialize.graph_from_json(json.loads(Path(args.graph).read_text(encoding="utf-8")))
        g.check()
        sys.stdout.write(to_dot(g))
    else:
        base = _base({"rank": args.rank, **({"base": args.base} if args.base else {})})
        sys.stdout.write(to_dot(fold(base, args.words, absolute=args.absolute)))
    return EXIT_OK


# ---------------------------------------------------------------------------


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wcycles", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    def base_opts(p):
        p.add_argument("--rank", type=int, default=2, help="rank of the rose base graph")
        p.add_argument("--base", help="JSON file with an explicit base graph")
        p.add_argument("--strict", action="store_true", help="reject words that need reduction")
        p.add_argument("--json", action="store_true", help="JSON output (the default)")

    p = sub.add_parser("fold", help="Stallings graph of a subgroup")
    base_opts(p)
    p.add_argument("words", nargs="*")
    p.add_argument("--absolute", action="store_true", help="also trim the basepoint tail")
    p.set_defaults(func=cmd_fold)

    p = sub.add_parser("stack", help="stack a primitive word")
    base_opts(p)
    p.add_argument("word")
    p.add_argument("--svg", metavar="PATH")
    p.set_defaults(func=cmd_stack)

    for name, func, text in (
        ("pullback", cmd_pullback, "circular components of a pullback"),
        ("verify", cmd_verify, "check the degree bound and the W-cycles bound"),
        ("wcycles", cmd_wcycles, "check the W-cycles bound"),
        ("npi", cmd_npi, "nonpositive-immersion certificate for the complex of relator lifts"),
    ):
        p = sub.add_parser(name, help=text)
        base_opts(p)
        p.add_argument("--word", help="relator / loop word")
        p.add_argument("--gens", nargs="*", help="subgroup generators (default: identity map)")
        p.add_argument("--instances", help="JSON file with a list of instance specs")
        p.set_defaults(func=func)

    p = sub.add_parser("harness", help="seeded randomized property harness")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--count", type=_positive, default=1000)
    p.add_argument("--max-word-len", type=_positive, default=20)
    p.add_argument("--max-gen-len", type=_positive, default=12)
    p.add_argument("--max-gens", type=_positive, default=4)
    p.set_defaults(func=cmd_harness)

    p = sub.add_parser("export-dot", help="DOT of a folded graph or a graph JSON file")
    base_opts(p)
    p.add_argument("words", nargs="*")
    p.add_argument("--graph", help="graph JSON file")
    p.add_argument("--absolute", action="store_true")
    p.set_defaults(func=cmd_export_dot)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command in ("pullback", "verify", "wcycles", "npi") and not args.instances and not args.word:
        parser.error("--word or --instances is required")
    try:
        return args.func(args)
    except (InputError, HypothesisError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
