import json
from pathlib import Path

import pytest

from tokenbridge.bridge import BridgeConfig, CorpusError, count_corpus
from tokenbridge.cli import main
from tokenbridge.registry import UnknownTokenizerError, load_lock, resolve

FIXTURE_TOKENIZER = Path(__file__).parent / "fixtures" / "tiny_wordlevel.json"


@pytest.fixture
def corpus(tmp_path):
    d = tmp_path / "corpus"
    d.mkdir()
    (d / "a.html").write_text("hello world")
    (d / "b.html").write_text("web agent energy cost")
    (d / "c.html").write_text("")
    return d


def run(tmp_path, corpus, tokenizer, *extra):
    out = tmp_path / "counts.json"
    code = main(["--tokenizer", str(tokenizer), "--corpus", str(corpus),
                 "--out", str(out), *extra])
    return code, out


class TestCounting:
    def test_three_document_fixture(self, tmp_path, corpus):
        code, out = run(tmp_path, corpus, "whitespace")
        assert code == 0
        doc = json.loads(out.read_text())
        counts = {d["doc_id"]: d["token_count"] for d in doc["documents"]}
        assert counts == {"a.html": 2, "b.html": 4, "c.html": 0}
        assert doc["total"] == 6

    def test_total_is_sum_of_documents(self, tmp_path, corpus):
        _, out = run(tmp_path, corpus, "whitespace")
        doc = json.loads(out.read_text())
        assert doc["total"] == sum(d["token_count"] for d in doc["documents"])

    def test_empty_document_counts_zero_without_specials(self, tmp_path, corpus):
        _, out = run(tmp_path, corpus, str(FIXTURE_TOKENIZER))
        doc = json.loads(out.read_text())
        counts = {d["doc_id"]: d["token_count"] for d in doc["documents"]}
        assert counts["c.html"] == 0

    def test_include_specials_adds_framing_tokens(self, tmp_path, corpus):
        _, plain_out = run(tmp_path, corpus, str(FIXTURE_TOKENIZER))
        plain = json.loads(plain_out.read_text())
        code = main(["--tokenizer", str(FIXTURE_TOKENIZER), "--corpus", str(corpus),
                     "--out", str(tmp_path / "specials.json"), "--include-specials"])
        assert code == 0
        framed = json.loads((tmp_path / "specials.json").read_text())
        for p, f in zip(plain["documents"], framed["documents"]):
            assert f["token_count"] == p["token_count"] + 2  # [CLS] ... [SEP]

    def test_determinism_across_runs(self, tmp_path, corpus):
        _, first = run(tmp_path, corpus, str(FIXTURE_TOKENIZER))
        second = tmp_path / "again.json"
        main(["--tokenizer", str(FIXTURE_TOKENIZER), "--corpus", str(corpus),
              "--out", str(second)])
        assert first.read_bytes() == second.read_bytes()

    def test_unreadable_document_is_skipped_and_footnoted(self, tmp_path, corpus, capsys):
        (corpus / "binary.html").write_bytes(b"\xff\xfe\x00\x01")
        code, out = run(tmp_path, corpus, "whitespace")
        assert code == 0
        doc = json.loads(out.read_text())
        assert any("binary.html" in note for note in doc["footnotes"])
        assert "warning" in capsys.readouterr().err
        assert all(d["doc_id"] != "binary.html" for d in doc["documents"])

    def test_tokenizer_version_recorded(self, tmp_path, corpus):
        _, out = run(tmp_path, corpus, str(FIXTURE_TOKENIZER))
        doc = json.loads(out.read_text())
        assert "@tokenizers-" in doc["tokenizer_id"]


class TestErrors:
    def test_unknown_tokenizer_exits_nonzero(self, tmp_path, corpus, capsys):
        code, _ = run(tmp_path, corpus, "made-up-model")
        assert code == 2
        assert "unknown tokenizer" in capsys.readouterr().err

    def test_empty_corpus_rejected(self, tmp_path):
        empty = tmp_path / "empty"
        empty.mkdir()
        code, _ = run(tmp_path, empty, "whitespace")
        assert code == 2

    def test_missing_corpus_rejected(self, tmp_path):
        code, _ = run(tmp_path, tmp_path / "nope", "whitespace")
        assert code == 2

    def test_resolve_error_names_known_ids(self):
        with pytest.raises(UnknownTokenizerError, match="deberta-v3-base"):
            resolve("nope")


class TestInterchangeContract:
    def test_round_trip_through_the_consumer(self, tmp_path, corpus):
        wattbench_tokens = pytest.importorskip(
            "wattbench.tokens", reason="consumer package not installed")
        _, out = run(tmp_path, corpus, str(FIXTURE_TOKENIZER))
        loaded = wattbench_tokens.load_token_counts(out)
        assert loaded.total == sum(d.token_count for d in loaded.documents)
        assert wattbench_tokens.mean_tokens(loaded) == loaded.total / 3

    def test_summary_matches_file_totals(self, tmp_path, corpus, capsys):
        code, out = run(tmp_path, corpus, "whitespace")
        stdout = capsys.readouterr().out
        doc = json.loads(out.read_text())
        assert f"total tokens: {doc['total']}" in stdout
        assert f"documents: {len(doc['documents'])}" in stdout

    def test_lock_file_covers_every_registry_id(self):
        from tokenbridge.registry import HF_HUB_IDS, TIKTOKEN_IDS
        lock = load_lock()
        for tid in list(HF_HUB_IDS) + list(TIKTOKEN_IDS) + ["whitespace"]:
            assert tid in lock["tokenizers"], tid
