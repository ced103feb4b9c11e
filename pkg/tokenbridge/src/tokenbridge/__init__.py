"""tokenbridge: real-tokenizer token counting for document corpora.

Produces the JSON interchange format consumed by the wattbench toolkit's
token-count loader. The two packages share only that file format.
"""

from . import cli, registry
from .bridge import BridgeConfig, BridgeResult, CorpusError, count_corpus
from .registry import UnknownTokenizerError, resolve

__version__ = "0.1.0"
