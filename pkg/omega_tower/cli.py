"""``omega-tower`` command line.

Results go to standard output (or ``-o FILE``); diagnostics go to standard
error through ``logging``. Exit codes: 0 success or ACCEPT, 1 REJECT or
nothing found, 2 usage and parse errors.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import belief, corpus, lang, ordinal, proof, tower
from .config import ProgressionConfig, load_config
from .errors import NotTrustedError, OmegaTowerError

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_NO = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


class Output:
    """Collects result lines so ``-o`` can redirect them in one write."""

    def __init__(self) -> None:
        self.lines: List[str] = []

    def __call__(self, line: str) -> None:
        self.lines.append(line)

    def flush(self, target: Optional[str]) -> None:
        text = "".join(line + "\n" for line in self.lines)
        if target:
            Path(target).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------- argument helpers


def _read_choice(args: argparse.Namespace, name: str, required: bool = True) -> Optional[str]:
    inline = getattr(args, name, None)
    path = getattr(args, f"{name}_file", None)
    if inline is not None and path is not None:
        raise UsageError(f"give either --{name} or --{name}-file, not both")
    if path is not None:
        try:
            return Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    if inline is None and required:
        raise UsageError(f"--{name} or --{name}-file is required")
    return inline


def _program(args: argparse.Namespace) -> lang.Program:
    return lang.parse_program(_read_choice(args, "program"))


def _certificate(args: argparse.Namespace, required: bool = True) -> Optional[proof.Certificate]:
    text = _read_choice(args, "proof", required)
    return None if text is None else proof.parse_certificate(text)


def _verifier(args: argparse.Namespace) -> tower.VerifierDesc:
    if args.verifier is None:
        raise UsageError("--verifier is required")
    return tower.parse_verifier(args.verifier)


def _ordinal_arg(text: Optional[str], flag: str) -> ordinal.Ordinal:
    if text is None:
        raise UsageError(f"{flag} is required")
    return ordinal.parse_ordinal(text)


def _fuel(args: argparse.Namespace, cfg: ProgressionConfig) -> int:
    return args.fuel if args.fuel is not None else cfg.fuel


def _budget(args: argparse.Namespace, cfg: ProgressionConfig) -> int:
    return args.budget if args.budget is not None else cfg.search_budget


# ---------------------------------------------------------------- commands


def cmd_fmt(args, cfg, out) -> int:
    given = [
        (name, text)
        for name in ("program", "proof")
        if (text := _read_choice(args, name, required=False)) is not None
    ]
    given += [(name, getattr(args, name)) for name in ("verifier", "input", "ord") if getattr(args, name) is not None]
    if len(given) != 1:
        raise UsageError("fmt takes exactly one of --program, --proof, --verifier, --input, --ord")
    name, text = given[0]
    printers: Dict[str, Callable[[str], str]] = {
        "program": lambda t: lang.print_program(lang.parse_program(t)),
        "proof": lambda t: proof.print_certificate(proof.parse_certificate(t)),
        "verifier": lambda t: tower.print_verifier(tower.parse_verifier(t)),
        "input": lambda t: lang.print_value(lang.parse_value(t)),
        "ord": lambda t: ordinal.print_ordinal(ordinal.parse_ordinal(t)),
    }
    out(printers[name](text))
    return EXIT_OK


def cmd_run(args, cfg, out) -> int:
    program = _program(args)
    value = lang.parse_value(args.input) if args.input is not None else lang.Nat(0)
    result = tower.run_with_tower(program, value, _fuel(args, cfg))
    out(lang.print_result(result))
    return EXIT_OK if result.halted else EXIT_NO


def cmd_check(args, cfg, out) -> int:
    v = _verifier(args)
    program = _program(args)
    cert = _certificate(args, required=False)
    if cert is None:
        found = tower.accepts_via_search(v, program, _budget(args, cfg), cfg.frontier_width)
        if found is None:
            out("REJECT none")
            return EXIT_NO
        out("ACCEPT")
        out(proof.print_certificate(found))
        return EXIT_OK
    result = tower.verify(v, cert, program)
    out(str(result))
    return EXIT_OK if result.accepted else EXIT_NO


def cmd_diag(args, cfg, out) -> int:
    out(lang.print_program(tower.diag(_verifier(args))))
    return EXIT_OK


def cmd_strengthen(args, cfg, out) -> int:
    out(tower.print_verifier(tower.strengthen(_verifier(args))))
    return EXIT_OK


def cmd_tower_enum(args, cfg, out) -> int:
    limit = _ordinal_arg(args.ord, "--ord")
    for level in tower.enumerate_tower(limit, args.n if args.n is not None else 4):
        out(ordinal.print_ordinal(level))
    return EXIT_OK


def cmd_ord(args, cfg, out) -> int:
    a = ordinal.parse_ordinal(args.a)
    if args.op == "cmp":
        if args.b is None:
            raise UsageError("ord cmp takes two ordinals")
        out(ordinal.compare(a, ordinal.parse_ordinal(args.b)).value)
    elif args.op == "fs":
        if args.n is None:
            raise UsageError("ord fs needs --n")
        out(ordinal.print_ordinal(ordinal.fundamental_sequence(a, args.n)))
    else:
        shape = ordinal.classify(a)
        if isinstance(shape, ordinal.Successor):
            out(f"SUCCESSOR {ordinal.print_ordinal(shape.predecessor)}")
        else:
            out("LIMIT" if isinstance(shape, ordinal.Limit) else "ZERO")
    return EXIT_OK


def _base(args) -> belief.BeliefBase:
    if args.base is None:
        raise UsageError("--base is required")
    try:
        return belief.load_base(args.base)
    except OSError as exc:
        raise UsageError(f"cannot read {args.base}: {exc.strerror}") from exc


def cmd_belief(args, cfg, out) -> int:
    base = _base(args)
    if args.op == "close":
        closed = belief.close(base, args.depth if args.depth is not None else 3)
        for stmt in closed:
            out(belief.print_statement(stmt))
        return EXIT_OK
    rounds = belief.iterate_stronger_trusted(base, _verifier(args), args.n if args.n is not None else 1)
    for w, trace in rounds:
        out(tower.print_verifier(w))
        for line in trace.render().splitlines():
            out(f"  {line}")
    return EXIT_OK


def _selftest_diagonal(args, cfg, out) -> int:
    v = _verifier(args)
    cert = _certificate(args)
    witness = tower.diagonal_witness(v, cert, _program(args), _fuel(args, cfg))
    out(f"check: {witness.subject_check}")
    out(f"subject: {lang.print_result(witness.subject_result)}")
    out(f"diagonal: {lang.print_result(witness.diagonal_result)}")
    out("DIFFERS" if witness.differs else "SAME")
    return EXIT_OK if witness.holds else EXIT_NO


def _selftest_hierarchy(args, cfg, out) -> int:
    top = tower.Tower(ordinal.parse_ordinal(cfg.top_level))
    failures = 0
    for text in cfg.strictness_chain:
        alpha = ordinal.parse_ordinal(text)
        witness = tower.strictness_witness(alpha, _budget(args, cfg), cfg.frontier_width)
        at_top = tower.verify(top, proof.Diagonal(f"tower {ordinal.print_ordinal(alpha)}"), tower.diag(tower.Tower(alpha)))
        ok = witness.holds and at_top.accepted
        failures += not ok
        out(f"{ordinal.print_ordinal(alpha)}: {'OK' if ok else 'FAIL'} ({witness.candidates_tried} candidates)")
    return EXIT_OK if not failures else EXIT_NO


def _selftest_corpus(args, cfg, out) -> int:
    items = corpus.load_manifest(cfg.corpus)
    fuel = _fuel(args, cfg)
    failures = 0
    for item, witness in corpus.diagonal_report(items, fuel):
        failures += not witness.holds
        out(f"diagonal {item.id}: {'OK' if witness.holds else 'FAIL'}")
    for row in corpus.soundness_report(items, cfg.soundness_inputs, fuel, cfg.seed):
        failures += bool(row.divergent)
        out(f"soundness {row.item.id}: {row.runs - len(row.divergent)}/{row.runs}")
    return EXIT_OK if not failures else EXIT_NO


def cmd_selftest(args, cfg, out) -> int:
    handlers = {"diagonal": _selftest_diagonal, "hierarchy": _selftest_hierarchy, "corpus": _selftest_corpus}
    return handlers[args.what](args, cfg, out)


# ---------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config (default: configs/progression.yaml)")
    common.add_argument("-o", "--output", help="write results to FILE instead of stdout")
    common.add_argument("-v", "--verbose", action="store_true")
    common.add_argument("--fuel", type=int)
    common.add_argument("--budget", type=int)
    common.add_argument("--verifier")
    common.add_argument("--program")
    common.add_argument("--program-file")
    common.add_argument("--proof")
    common.add_argument("--proof-file")
    common.add_argument("--input")
    common.add_argument("--ord")
    common.add_argument("--n", type=int)
    common.add_argument("--base")
    common.add_argument("--depth", type=int)
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="omega-tower", description="Verifier towers and diagonal programs.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler in (
        ("fmt", cmd_fmt),
        ("run", cmd_run),
        ("check", cmd_check),
        ("diag", cmd_diag),
        ("strengthen", cmd_strengthen),
        ("tower-enum", cmd_tower_enum),
    ):
        sub.add_parser(name, parents=[common]).set_defaults(handler=handler)
    ord_parser = sub.add_parser("ord", parents=[common])
    ord_parser.add_argument("op", choices=("cmp", "fs", "classify"))
    ord_parser.add_argument("a")
    ord_parser.add_argument("b", nargs="?")
    ord_parser.set_defaults(handler=cmd_ord)
    belief_parser = sub.add_parser("belief", parents=[common])
    belief_parser.add_argument("op", choices=("close", "strengthen"))
    belief_parser.set_defaults(handler=cmd_belief)
    selftest = sub.add_parser("selftest", parents=[common])
    selftest.add_argument("what", choices=("diagonal", "hierarchy", "corpus"))
    selftest.set_defaults(handler=cmd_selftest)
    return parser


def dispatch(argv: Sequence[str]) -> int:
    try:
        args = build_parser().parse_args(list(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="[%(name)s] %(message)s",
        stream=sys.stderr,
    )
    out = Output()
    try:
        cfg = load_config(args.config)
        code = args.handler(args, cfg, out)
    except NotTrustedError as exc:
        print(f"omega-tower {args.command}: {exc}", file=sys.stderr)
        return EXIT_NO
    except (UsageError, OmegaTowerError, ValueError) as exc:
        print(f"omega-tower {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        out.flush(args.output)
    except OSError as exc:
        print(f"omega-tower: cannot write {args.output}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    return code


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(dispatch(sys.argv[1:] if argv is None else argv))


if __name__ == "__main__":
    main()
