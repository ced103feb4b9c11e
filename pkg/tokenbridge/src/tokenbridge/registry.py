"""Tokenizer registry: id -> a callable that counts tokens in a string.

Known ids cover the model families of the reference agents plus two
always-available fallbacks:

* huggingface-backed ids (need the ``tokenizers``/``transformers`` extras
  and either network access or a local cache),
* ``gpt-4`` via tiktoken's cl100k_base (needs the ``openai`` extra),
* any path to a ``tokenizer.json`` file (fully offline),
* ``whitespace``, a built-in maximal-run splitter for plumbing tests.

Counts exclude tokenizer special tokens (BOS/EOS/CLS/SEP) unless
``include_specials`` is set: the corpus quantity of interest is the content
of the documents, not framing tokens. Versions are pinned in
``tokenizers.lock.json``; counts are only comparable at fixed versions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable


class UnknownTokenizerError(ValueError):
    """The id does not resolve to any known tokenizer or local file."""


@dataclass(frozen=True)
class ResolvedTokenizer:
    """A ready-to-use counting function plus its identity for the output."""

    tokenizer_id: str      # includes the backing package version, id@pkg-x.y.z
    count: Callable[[str, bool], int]  # (text, include_specials) -> token count


HF_HUB_IDS = {
    "deberta-v3-base": "microsoft/deberta-v3-base",
    "flan-t5-xl": "google/flan-t5-xl",
    "chatglm3-6b": "THUDM/chatglm3-6b",
    "codellama-7b": "codellama/CodeLlama-7b-hf",
    "codellama-7b-instruct": "codellama/CodeLlama-7b-Instruct-hf",
    "uix-qwen2": "neulab/UIX-Qwen2",
}

TIKTOKEN_IDS = {"gpt-4": "cl100k_base"}


def known_ids() -> list[str]:
    return sorted(HF_HUB_IDS) + sorted(TIKTOKEN_IDS) + ["whitespace", "<path to tokenizer.json>"]


def load_lock() -> dict:
    path = resources.files("tokenbridge").joinpath("tokenizers.lock.json")
    return json.loads(path.read_text(encoding="utf-8"))


def resolve(tokenizer_id: str) -> ResolvedTokenizer:
    """Resolve an id (or tokenizer-file path) to a counting function."""
    if tokenizer_id == "whitespace":
        return ResolvedTokenizer(tokenizer_id="whitespace@builtin",
                                 count=lambda text, specials: len(text.split()))

    path = Path(tokenizer_id)
    if path.suffix == ".json" and path.exists():
        return _from_tokenizer_file(path)

    if tokenizer_id in HF_HUB_IDS:
        return _from_hub(tokenizer_id, HF_HUB_IDS[tokenizer_id])

    if tokenizer_id in TIKTOKEN_IDS:
        return _from_tiktoken(tokenizer_id, TIKTOKEN_IDS[tokenizer_id])

    raise UnknownTokenizerError(
        f"unknown tokenizer {tokenizer_id!r}; known ids: {', '.join(known_ids())}")


def _from_tokenizer_file(path: Path) -> ResolvedTokenizer:
    try:
        import tokenizers
    except ImportError:
        raise UnknownTokenizerError(
            f"loading {path} requires the 'tokenizers' package (hf extra)") from None
    tok = tokenizers.Tokenizer.from_file(str(path))

    def count(text: str, include_specials: bool) -> int:
        return len(tok.encode(text, add_special_tokens=include_specials).ids)

    return ResolvedTokenizer(
        tokenizer_id=f"{path.name}@tokenizers-{tokenizers.__version__}", count=count)


def _from_hub(tokenizer_id: str, repo: str) -> ResolvedTokenizer:
    try:
        import tokenizers
    except ImportError:
        raise UnknownTokenizerError(
            f"{tokenizer_id!r} requires the 'tokenizers' package (hf extra)") from None
    try:
        tok = tokenizers.Tokenizer.from_pretrained(repo)
    except Exception:
        # slow/sentencepiece tokenizers (e.g. chatglm3) only load via transformers
        tok = _from_transformers(tokenizer_id, repo)
        return tok

    def count(text: str, include_specials: bool) -> int:
        return len(tok.encode(text, add_special_tokens=include_specials).ids)

    return ResolvedTokenizer(
        tokenizer_id=f"{tokenizer_id}@tokenizers-{tokenizers.__version__}", count=count)


def _from_transformers(tokenizer_id: str, repo: str) -> ResolvedTokenizer:
    try:
        import transformers
    except ImportError:
        raise UnknownTokenizerError(
            f"{tokenizer_id!r} requires the 'transformers' package (hf extra)") from None
    tok = transformers.AutoTokenizer.from_pretrained(repo, trust_remote_code=True)

    def count(text: str, include_specials: bool) -> int:
        return len(tok.encode(text, add_special_tokens=include_specials))

    return ResolvedTokenizer(
        tokenizer_id=f"{tokenizer_id}@transformers-{transformers.__version__}", count=count)


def _from_tiktoken(tokenizer_id: str, encoding_name: str) -> ResolvedTokenizer:
    try:
        import tiktoken
    except ImportError:
        raise UnknownTokenizerError(
            f"{tokenizer_id!r} requires the 'tiktoken' package (openai extra)") from None
    enc = tiktoken.get_encoding(encoding_name)

    def count(text: str, include_specials: bool) -> int:
        # cl100k_base adds no framing tokens; the flag is a no-op here
        return len(enc.encode(text))

    return ResolvedTokenizer(
        tokenizer_id=f"{tokenizer_id}@tiktoken-{tiktoken.__version__}", count=count)
