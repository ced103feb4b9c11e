"""tokenbridge command line: tokenize a corpus, emit the interchange file."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .bridge import BridgeConfig, CorpusError, count_corpus
from .registry import UnknownTokenizerError, known_ids


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="tokenbridge",
        description="Tokenize a document corpus with a real model tokenizer and "
                    "write per-document token counts as a JSON interchange file")
    parser.add_argument("--tokenizer", required=True, metavar="ID",
                        help=f"tokenizer id or tokenizer.json path; known: {', '.join(known_ids())}")
    parser.add_argument("--corpus", required=True, metavar="DIR", help="corpus directory")
    parser.add_argument("--out", required=True, metavar="FILE", help="output interchange file")
    parser.add_argument("--include-specials", action="store_true",
                        help="count tokenizer special tokens (BOS/EOS/CLS/SEP) too; "
                             "by default only document content is counted")
    args = parser.parse_args(argv)

    try:
        result = count_corpus(BridgeConfig(
            tokenizer_id=args.tokenizer, corpus_dir=Path(args.corpus),
            output_path=Path(args.out), include_specials=args.include_specials))
    except UnknownTokenizerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CorpusError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    print(f"tokenizer: {result.tokenizer_id}")
    print(f"documents: {len(result.documents)}")
    print(f"mean tokens/document: {result.mean:.2f}")
    print(f"total tokens: {result.total}")
    if result.footnotes:
        print(f"skipped: {len(result.footnotes)} (see footnotes in {args.out})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
