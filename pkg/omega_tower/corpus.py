"""The shipped corpus of accepted (verifier, certificate, program) items."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple

from . import lang, tower
from .config import load_yaml, validate_against
from .errors import CorpusError, ParseError
from .lang import Program, Value
from .proof import Certificate, CheckResult, parse_certificate

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CorpusItem:
    id: str
    verifier: tower.VerifierDesc
    proof: Certificate
    program: Program
    note: str = ""


def _load_item(entry: dict, base_dir: Path) -> CorpusItem:
    item_id = entry["id"]
    try:
        verifier = tower.parse_verifier(entry["verifier"])
        proof = parse_certificate(entry["proof"])
        if "program_file" in entry:
            text = (base_dir / entry["program_file"]).read_text(encoding="utf-8")
            program = lang.parse_program(text)
        else:
            program = tower.diag(tower.parse_verifier(entry["diagonal_of"]))
    except ParseError as exc:
        raise CorpusError(f"item {item_id}: {exc}") from exc
    except OSError as exc:
        raise CorpusError(f"item {item_id}: {exc}") from exc
    return CorpusItem(item_id, verifier, proof, program, entry.get("note", ""))


def load_manifest(path: str | Path) -> List[CorpusItem]:
    path = Path(path)
    data = load_yaml(path)
    validate_against(data, "corpus.schema.json", path)
    items = [_load_item(entry, path.parent) for entry in data["items"]]
    ids = [item.id for item in items]
    if len(set(ids)) != len(ids):
        raise CorpusError(f"{path}: duplicate item ids")
    log.debug("loaded %d corpus item(s) from %s", len(items), path)
    return items


def validate_corpus(items: List[CorpusItem]) -> List[Tuple[CorpusItem, CheckResult]]:
    """Items whose certificate is not accepted by their verifier."""
    failures = []
    for item in items:
        result = tower.verify(item.verifier, item.proof, item.program)
        if not result.accepted:
            log.warning("item %s rejected: %s", item.id, result)
            failures.append((item, result))
    return failures


def diagonal_report(items: List[CorpusItem], fuel: int) -> List[Tuple[CorpusItem, tower.DiagonalWitness]]:
    return [(item, tower.diagonal_witness(item.verifier, item.proof, item.program, fuel)) for item in items]


def random_value(rng: random.Random, depth: int = 2) -> Value:
    kind = rng.randrange(4 if depth > 0 else 3)
    if kind == 0:
        return lang.Nat(rng.randrange(40))
    if kind == 1:
        return lang.Bool(rng.random() < 0.5)
    if kind == 2:
        return lang.Str("".join(rng.choice("abc()\" \\") for _ in range(rng.randrange(6))))
    return lang.PairV(random_value(rng, depth - 1), random_value(rng, depth - 1))


@dataclass(frozen=True)
class SoundnessRow:
    item: CorpusItem
    runs: int
    divergent: Tuple[Value, ...]


def soundness_report(items: List[CorpusItem], inputs: int, fuel: int, seed: int) -> List[SoundnessRow]:
    """Run every accepted program on ``inputs`` random values; collect inputs that ran out of fuel."""
    rng = random.Random(seed)
    rows = []
    for item in items:
        values = [random_value(rng) for _ in range(inputs)]
        divergent = tuple(v for v in values if not tower.run_with_tower(item.program, v, fuel).halted)
        if divergent:
            log.warning("item %s ran out of fuel on %d input(s)", item.id, len(divergent))
        rows.append(SoundnessRow(item, len(values), divergent))
    return rows
