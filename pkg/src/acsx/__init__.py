"""Entropy-compressed multiple-pattern matching.

The package builds a compressed automaton over a fixed pattern dictionary
and streams texts through it, reporting every occurrence of every pattern.
The automaton is numbered so that a vertex's number orders the reversed
root path, which lets one bitvector per letter answer both forward steps
and parent steps through rank/select.
"""

from .succinct_bits import (CompressedBitvector, build_compressed,
                            build_from_ones)
from .trie_builder import Dictionary, Trie, build_full_trie
from .index import (CompressedIndex, encode_index, choose_dense_subset,
                    SuccinctParentTree, BlockedNextEncoding,
                    MonolithicNextEncoding, PatternTable)
from .storage import (save_index, load_index, index_to_bytes,
                      index_from_bytes, IndexFormatError)
from .matcher import Occurrence, ScanState, scan, scan_reference
from .kernel import compiled_available
from .analysis import (naive_ac_scan, smp_scan, trie_entropy, leaf_terminated_entropy,
                       lower_bound_L, entropy_report, entropy_bound_check,
                       space_report)

__version__ = "0.1.0"

__all__ = [
    "CompressedBitvector",
    "build_compressed",
    "build_from_ones",
    "Dictionary",
    "Trie",
    "build_full_trie",
    "CompressedIndex",
    "encode_index",
    "choose_dense_subset",
    "SuccinctParentTree",
    "BlockedNextEncoding",
    "MonolithicNextEncoding",
    "PatternTable",
    "save_index",
    "load_index",
    "index_to_bytes",
    "index_from_bytes",
    "IndexFormatError",
    "Occurrence",
    "ScanState",
    "scan",
    "scan_reference",
    "compiled_available",
    "naive_ac_scan",
    "smp_scan",
    "trie_entropy",
    "leaf_terminated_entropy",
    "lower_bound_L",
    "entropy_report",
    "entropy_bound_check",
    "space_report",
    "__version__",
]
