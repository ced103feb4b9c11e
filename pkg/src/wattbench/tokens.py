"""Token counts for corpora.

Exact per-model token counts are produced by the external tokenizer bridge
and cross the boundary as a JSON interchange file; this module only loads
and validates them. Real tokenizers never run here, keeping the package
dependency-free. For desk-scale testing without the bridge there are two
approximate counters: whitespace runs, and bytes-per-token.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from .errors import SchemaError
from .quantities import TokenCount

__all__ = [
    "DocumentCount",
    "TokenCountFile",
    "ApproxScheme",
    "load_token_counts",
    "parse_token_counts",
    "count_tokens_approx",
    "mean_tokens",
]

_FILE_KEYS_REQUIRED = {"tokenizer_id", "documents", "total"}
_FILE_KEYS_OPTIONAL = {"footnotes"}
_DOC_KEYS = {"doc_id", "token_count"}


@dataclass(frozen=True)
class DocumentCount:
    doc_id: str
    token_count: TokenCount

    def __post_init__(self):
        object.__setattr__(self, "token_count", TokenCount(self.token_count))


@dataclass(frozen=True)
class TokenCountFile:
    """Validated contents of a bridge interchange file.

    The total always equals the sum of the per-document counts; files where
    it does not are rejected at load. ``footnotes`` carries bridge warnings
    (e.g. documents skipped as unreadable).
    """

    tokenizer_id: str
    documents: tuple[DocumentCount, ...]
    total: TokenCount
    footnotes: tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        object.__setattr__(self, "footnotes", tuple(self.footnotes))
        object.__setattr__(self, "total", TokenCount(self.total))
        computed = sum(d.token_count for d in self.documents)
        if computed != self.total:
            raise SchemaError(f"total {int(self.total)} does not match the sum of "
                              f"document counts ({computed})")


def parse_token_counts(data: str | bytes) -> TokenCountFile:
    """Validate interchange JSON. The schema is strict: exactly
    ``{tokenizer_id, documents: [{doc_id, token_count}], total}`` plus an
    optional ``footnotes`` list; anything else is rejected."""
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"token-count file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise SchemaError("token-count file must be a JSON object")
    missing = _FILE_KEYS_REQUIRED - set(doc)
    if missing:
        raise SchemaError(f"token-count file missing keys {sorted(missing)}")
    unknown = set(doc) - _FILE_KEYS_REQUIRED - _FILE_KEYS_OPTIONAL
    if unknown:
        raise SchemaError(f"token-count file has unknown keys {sorted(unknown)}")
    documents = []
    for i, entry in enumerate(doc["documents"]):
        if not isinstance(entry, dict) or set(entry) != _DOC_KEYS:
            raise SchemaError(f"document {i}: must have exactly doc_id and token_count")
        count = entry["token_count"]
        if not isinstance(count, int) or isinstance(count, bool):
            raise SchemaError(f"document {i}: token_count must be an integer, got {count!r}")
        if count < 0:
            raise SchemaError(f"document {i}: negative token_count {count}")
        documents.append(DocumentCount(doc_id=str(entry["doc_id"]), token_count=TokenCount(count)))
    total = doc["total"]
    if not isinstance(total, int) or isinstance(total, bool):
        raise SchemaError(f"total must be an integer, got {total!r}")
    footnotes = doc.get("footnotes", [])
    if not isinstance(footnotes, list) or not all(isinstance(f, str) for f in footnotes):
        raise SchemaError("footnotes must be a list of strings")
    return TokenCountFile(tokenizer_id=str(doc["tokenizer_id"]), documents=tuple(documents),
                          total=TokenCount(total), footnotes=tuple(footnotes))


def load_token_counts(path: str | Path) -> TokenCountFile:
    """Load and validate a bridge interchange file from disk."""
    path = Path(path)
    try:
        return parse_token_counts(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"token-count file not found: {path}") from None


@dataclass(frozen=True)
class ApproxScheme:
    """A cheap deterministic token estimate for testing without the bridge.

    ``whitespace`` counts maximal non-whitespace runs; ``bytes_per_token``
    divides the UTF-8 byte length by a constant (4.0 by default) and rounds
    up.
    """

    kind: str = "whitespace"
    bytes_per_token: float = 4.0

    def __post_init__(self):
        if self.kind not in ("whitespace", "bytes_per_token"):
            raise SchemaError(f"unknown scheme kind {self.kind!r}")
        if self.bytes_per_token <= 0:
            raise SchemaError(f"bytes_per_token must be > 0, got {self.bytes_per_token}")


def count_tokens_approx(text: str, scheme: ApproxScheme = ApproxScheme()) -> TokenCount:
    """Approximate token count of ``text`` under ``scheme``."""
    if scheme.kind == "whitespace":
        return TokenCount(len(text.split()))
    n_bytes = len(text.encode("utf-8"))
    return TokenCount(math.ceil(n_bytes / scheme.bytes_per_token))


def mean_tokens(counts: TokenCountFile) -> float:
    """Arithmetic mean token count per document."""
    if not counts.documents:
        raise SchemaError("mean token count is undefined for a file with no documents")
    return sum(d.token_count for d in counts.documents) / len(counts.documents)
