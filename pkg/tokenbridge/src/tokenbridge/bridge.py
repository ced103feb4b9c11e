"""Count tokens over a document corpus and emit the interchange file.

The output schema is the consumer's contract, bit for bit:
``{tokenizer_id, documents: [{doc_id, token_count}], total}`` with an
optional ``footnotes`` list carrying skip warnings. Documents are processed
in sorted filename order and the file is written once at the end, so output
is deterministic for a fixed tokenizer version.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

from .registry import ResolvedTokenizer, resolve


class CorpusError(ValueError):
    """The corpus directory is unusable (missing or empty)."""


@dataclass(frozen=True)
class BridgeConfig:
    tokenizer_id: str
    corpus_dir: Path
    output_path: Path
    include_specials: bool = False


@dataclass(frozen=True)
class BridgeResult:
    tokenizer_id: str
    documents: list[tuple[str, int]]
    total: int
    footnotes: list[str]

    @property
    def mean(self) -> float:
        return self.total / len(self.documents) if self.documents else 0.0

    def to_interchange(self) -> dict:
        doc = {
            "tokenizer_id": self.tokenizer_id,
            "documents": [{"doc_id": d, "token_count": c} for d, c in self.documents],
            "total": self.total,
        }
        if self.footnotes:
            doc["footnotes"] = list(self.footnotes)
        return doc


def count_corpus(config: BridgeConfig) -> BridgeResult:
    """Tokenize every file under ``corpus_dir`` and write the interchange file."""
    corpus = Path(config.corpus_dir)
    if not corpus.is_dir():
        raise CorpusError(f"corpus directory not found: {corpus}")
    files = sorted(p for p in corpus.iterdir() if p.is_file())
    if not files:
        raise CorpusError(f"corpus directory is empty: {corpus}")

    tok: ResolvedTokenizer = resolve(config.tokenizer_id)
    documents: list[tuple[str, int]] = []
    footnotes: list[str] = []
    for path in files:
        try:
            text = path.read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            note = f"skipped {path.name}: {exc.__class__.__name__}"
            footnotes.append(note)
            print(f"warning: {note}", file=sys.stderr)
            continue
        documents.append((path.name, tok.count(text, config.include_specials)))

    result = BridgeResult(tokenizer_id=tok.tokenizer_id, documents=documents,
                          total=sum(c for _, c in documents), footnotes=footnotes)
    payload = json.dumps(result.to_interchange(), indent=1, ensure_ascii=False) + "\n"
    config.output_path.parent.mkdir(parents=True, exist_ok=True)
    config.output_path.write_text(payload, encoding="utf-8")
    return result
