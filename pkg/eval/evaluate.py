#!/usr/bin/env python3
"""
Evaluation harness over the shipped corpus:
- Re-checks every (verifier, certificate, program) item
- Diagonal property: diag(verifier) halts on (certificate, program) and disagrees with the program
- Soundness sampling: every accepted program halts on random inputs within the fuel budget
- Strictness over the configured chain of tower levels (optional, slower)

Usage:
  python eval/evaluate.py --config configs/progression.yaml --out results.csv [--hierarchy]
"""
from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from omega_tower import corpus, lang, ordinal, tower  # noqa: E402
from omega_tower.config import ProgressionConfig, load_config  # noqa: E402

FIELDS = ["item", "verifier", "check", "subject", "diagonal", "differs", "runs", "divergent"]


def corpus_rows(items: list[corpus.CorpusItem], cfg: ProgressionConfig) -> list[dict]:
    soundness = {row.item.id: row for row in corpus.soundness_report(items, cfg.soundness_inputs, cfg.fuel, cfg.seed)}
    rows = []
    for item, witness in corpus.diagonal_report(items, cfg.fuel):
        sampled = soundness[item.id]
        rows.append({
            "item": item.id,
            "verifier": tower.print_verifier(item.verifier),
            "check": str(witness.subject_check),
            "subject": lang.print_result(witness.subject_result),
            "diagonal": lang.print_result(witness.diagonal_result),
            "differs": int(witness.holds),
            "runs": sampled.runs,
            "divergent": len(sampled.divergent),
        })
    return rows


def hierarchy_rows(cfg: ProgressionConfig) -> list[dict]:
    rows = []
    for text in cfg.strictness_chain:
        alpha = ordinal.parse_ordinal(text)
        witness = tower.strictness_witness(alpha, cfg.search_budget, cfg.frontier_width)
        rows.append({
            "item": f"strictness@{ordinal.print_ordinal(alpha)}",
            "verifier": f"tower {ordinal.print_ordinal(ordinal.successor(alpha))}",
            "check": str(witness.accepted_above),
            "subject": "",
            "diagonal": "",
            "differs": int(witness.holds),
            "runs": witness.candidates_tried,
            "divergent": "",
        })
    return rows


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--config", default=None)
    ap.add_argument("--out", required=True)
    ap.add_argument("--hierarchy", action="store_true", help="also run the strictness chain")
    args = ap.parse_args()
    logging.basicConfig(level=logging.WARNING, format="[%(name)s] %(message)s")

    cfg = load_config(args.config)
    items = corpus.load_manifest(cfg.corpus)
    rows = corpus_rows(items, cfg)
    if args.hierarchy:
        rows += hierarchy_rows(cfg)

    outp = Path(args.out)
    outp.parent.mkdir(parents=True, exist_ok=True)
    with open(outp, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    failed = sum(1 for r in rows if not r["differs"] or r["divergent"])
    print(f"[evaluate] wrote {outp} ({len(rows)} rows, {failed} failing)")


if __name__ == "__main__":
    main()
