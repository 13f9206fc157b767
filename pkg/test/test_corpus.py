import json
import pathlib

import jsonschema
import pytest
import yaml

from omega_tower import corpus, lang
from omega_tower.errors import CorpusError

ROOT = pathlib.Path(__file__).resolve().parents[1]
MANIFEST = ROOT / "corpus" / "manifest.yaml"
LEVELS = {"tower 0", "tower 1", "tower w", "tower w + 1", "tower w*2", "tower w^2", "tower w^w"}


@pytest.fixture(scope="module")
def items():
    return corpus.load_manifest(MANIFEST)


def test_manifest_validates():
    manifest = yaml.safe_load(MANIFEST.read_text(encoding="utf-8"))
    schema = json.loads((ROOT / "schema" / "corpus.schema.json").read_text(encoding="utf-8"))
    jsonschema.validate(manifest, schema)


def test_corpus_spans_the_levels(items):
    from omega_tower.tower import print_verifier

    assert len(items) >= 20
    assert {print_verifier(item.verifier) for item in items} >= LEVELS


def test_every_item_is_accepted(items):
    assert corpus.validate_corpus(items) == []


def test_program_files_are_canonical():
    for path in sorted((ROOT / "corpus" / "programs").glob("*.prog")):
        text = path.read_text(encoding="utf-8").strip()
        assert lang.print_program(lang.parse_program(text)) == text, path.name


def test_diagonal_property_over_the_corpus(items):
    for item, witness in corpus.diagonal_report(items, 10**6):
        assert witness.diagonal_result.halted, item.id
        assert witness.holds, item.id


def test_soundness_sampling(items):
    rows = corpus.soundness_report(items, 100, 10**6, seed=1937)
    assert [row.item.id for row in rows if row.divergent] == []
    assert all(row.runs == 100 for row in rows)


def test_bad_manifests_are_reported(tmp_path):
    bad = tmp_path / "manifest.yaml"
    bad.write_text('version: "0.1"\nitems:\n  - id: a\n    verifier: tower 0\n    proof: (loopfree)\n', encoding="utf-8")
    with pytest.raises(CorpusError):
        corpus.load_manifest(bad)
    bad.write_text(
        'version: "0.1"\nitems:\n  - id: a\n    verifier: tower 0\n    proof: (loopfree)\n'
        "    program_file: missing.prog\n",
        encoding="utf-8",
    )
    with pytest.raises(CorpusError, match="item a"):
        corpus.load_manifest(bad)
    bad.write_text(
        'version: "0.1"\nitems:\n  - id: a\n    verifier: tower 1 + w\n    proof: (loopfree)\n'
        "    diagonal_of: tower 0\n",
        encoding="utf-8",
    )
    with pytest.raises(CorpusError, match="item a"):
        corpus.load_manifest(bad)


def test_rejected_items_are_listed(tmp_path):
    (tmp_path / "loop.prog").write_text((ROOT / "corpus" / "programs" / "countdown.prog").read_text(), encoding="utf-8")
    manifest = tmp_path / "manifest.yaml"
    manifest.write_text(
        'version: "0.1"\nitems:\n  - id: wrong\n    verifier: tower 0\n    proof: (loopfree)\n'
        "    program_file: loop.prog\n",
        encoding="utf-8",
    )
    [(item, result)] = corpus.validate_corpus(corpus.load_manifest(manifest))
    assert item.id == "wrong"
    assert str(result) == "REJECT contains-while"
