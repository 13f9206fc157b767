#!/usr/bin/env python3
"""Fail-fast validator for the certificate corpus.

Checks performed:

* ``corpus/manifest.yaml`` validates against ``schema/corpus.schema.json``.
* Every verifier, certificate and program parses.
* Every program file is in canonical form (formatting it is a no-op).
* Every certificate is accepted by its verifier.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from omega_tower import corpus, lang  # noqa: E402
from omega_tower.config import load_yaml  # noqa: E402


def check_canonical(manifest: Path) -> None:
    for entry in load_yaml(manifest)["items"]:
        if "program_file" not in entry:
            continue
        text = (manifest.parent / entry["program_file"]).read_text(encoding="utf-8").strip()
        if lang.print_program(lang.parse_program(text)) != text:
            raise AssertionError(f"Program for {entry['id']} is not in canonical form")


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--manifest", default=str(ROOT / "corpus" / "manifest.yaml"))
    args = parser.parse_args()
    logging.basicConfig(level=logging.WARNING, format="[%(name)s] %(message)s")

    manifest = Path(args.manifest)
    print(f"[validate] {manifest}")
    items = corpus.load_manifest(manifest)
    check_canonical(manifest)
    failures = corpus.validate_corpus(items)
    if failures:
        raise AssertionError(
            "Rejected items: " + ", ".join(f"{item.id} ({result})" for item, result in failures)
        )
    print(f"[validate] OK ({len(items)} items)")


if __name__ == "__main__":
    main()
