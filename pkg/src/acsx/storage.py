"""Index container file format.

A file is the magic "ACSX", a little-endian u32 format version, then tagged
sections, each {4-byte tag, u64 payload byte length, payload}.  Sections:

  META  m, sigma, d, d_distinct, t, b, flags, alphabet map (byte mode)
  NEXT  transition vector encoding (blocked or monolithic)
  MARK  marked-vertex bitvector
  FAIL  dense-subset membership plus transformed failure tree
  REPT  report tree
  PTAB  pattern ids and lengths

All six are required exactly once.  Errors carry a kind so the CLI can map
them to exit codes: "magic" and "version" for unrecognizable files,
"truncated" when a declared length runs past the end, "malformed" for
everything structurally wrong inside the payloads.
"""

import struct

import numpy as np

from .index import (CompressedIndex, PatternTable, SparsifiedFailure,
                    SuccinctParentTree, decode_next_encoding)
from .succinct_bits import CompressedBitvector

MAGIC = b"ACSX"
VERSION = 1
SECTION_TAGS = (b"META", b"NEXT", b"MARK", b"FAIL", b"REPT", b"PTAB")

_META = struct.Struct("<QQQQQQB")


class IndexFormatError(Exception):
    """Raised for unusable index files; kind picks the CLI exit code."""

    def __init__(self, kind, message):
        super(IndexFormatError, self).__init__(message)
        self.kind = kind


def _meta_bytes(index):
    flags = 0 if index.alphabet_map is not None else 1
    out = _META.pack(index.m, index.sigma, index.pattern_table.d,
                     index.pattern_table.d_distinct, index.t,
                     getattr(index.next_enc, "b", 0), flags)
    if index.alphabet_map is not None:
        out += np.asarray(index.alphabet_map, dtype=np.int16).tobytes()
    return out


def _parse_meta(buf):
    if len(buf) < _META.size:
        raise IndexFormatError("malformed", "META section too short")
    m, sigma, d, dd, t, b, flags = _META.unpack_from(buf, 0)
    amap = None
    tail = buf[_META.size:]
    if not flags & 1:
        if len(tail) != 512:
            raise IndexFormatError("malformed", "META alphabet map missing")
        amap = np.frombuffer(tail, dtype=np.int16).astype(np.int32)
    elif tail:
        raise IndexFormatError("malformed", "META has trailing bytes")
    return m, sigma, d, dd, t, b, amap


def index_to_bytes(index):
    """Serialize a CompressedIndex to the container format."""
    sections = [
        (b"META", _meta_bytes(index)),
        (b"NEXT", index.next_enc.to_bytes()),
        (b"MARK", index.mark_enc.to_bytes()),
        (b"FAIL", index.fail_enc.to_bytes()),
        (b"REPT", index.report_enc.to_bytes()),
        (b"PTAB", index.pattern_table.to_bytes()),
    ]
    out = bytearray()
    out += MAGIC
    out += struct.pack("<L", VERSION)
    for tag, payload in sections:
        out += tag
        out += struct.pack("<Q", len(payload))
        out += payload
    return bytes(out)


def index_from_bytes(buf):
    """Parse the container format back into a CompressedIndex."""
    if len(buf) < 8 or buf[:4] != MAGIC:
        raise IndexFormatError("magic", "not an index file (bad magic)")
    (version,) = struct.unpack_from("<L", buf, 4)
    if version != VERSION:
        raise IndexFormatError("version",
                               "unsupported format version %d" % version)
    off = 8
    sections = {}
    while off < len(buf):
        if off + 12 > len(buf):
            raise IndexFormatError("truncated", "section header cut short")
        tag = bytes(buf[off:off + 4])
        (length,) = struct.unpack_from("<Q", buf, off + 4)
        off += 12
        if off + length > len(buf):
            raise IndexFormatError("truncated",
                                   "section %r runs past end of file"
                                   % tag.decode("ascii", "replace"))
        if tag not in SECTION_TAGS:
            raise IndexFormatError("malformed", "unknown section tag %r" % tag)
        if tag in sections:
            raise IndexFormatError("malformed", "duplicate section %r" % tag)
        sections[tag] = buf[off:off + length]
        off += length
    missing = [t for t in SECTION_TAGS if t not in sections]
    if missing:
        raise IndexFormatError("malformed",
                               "missing sections: %s"
                               % b",".join(missing).decode())
    m, sigma, d, dd, t, b, amap = _parse_meta(sections[b"META"])
    try:
        next_enc = decode_next_encoding(sections[b"NEXT"])
        mark_enc, used = CompressedBitvector.from_bytes(sections[b"MARK"], 0)
        if used != len(sections[b"MARK"]):
            raise ValueError("trailing bytes in mark section")
        fail_enc = SparsifiedFailure.from_bytes(sections[b"FAIL"], t)
        report_enc = SuccinctParentTree.from_bytes(sections[b"REPT"])
        table = PatternTable.from_bytes(sections[b"PTAB"])
    except IndexFormatError:
        raise
    except (ValueError, struct.error, IndexError) as exc:
        raise IndexFormatError("malformed", "bad section payload: %s" % exc)
    if next_enc.m != m or next_enc.sigma != sigma:
        raise IndexFormatError("malformed",
                               "META disagrees with transition encoding")
    if table.d != d or table.d_distinct != dd:
        raise IndexFormatError("malformed",
                               "META disagrees with pattern table")
    if mark_enc.length != m + 1:
        raise IndexFormatError("malformed", "mark vector has wrong length")
    return CompressedIndex(m, sigma, t, next_enc, mark_enc, fail_enc,
                           report_enc, table, amap)


def save_index(index, path):
    data = index_to_bytes(index)
    with open(path, "wb") as fh:
        fh.write(data)
    return len(data)


def load_index(path):
    with open(path, "rb") as fh:
        return index_from_bytes(fh.read())


def section_byte_sizes(index):
    """Per-section payload bytes, plus the fixed framing size."""
    sizes = {
        "META": len(_meta_bytes(index)),
        "NEXT": len(index.next_enc.to_bytes()),
        "MARK": len(index.mark_enc.to_bytes()),
        "FAIL": len(index.fail_enc.to_bytes()),
        "REPT": len(index.report_enc.to_bytes()),
        "PTAB": len(index.pattern_table.to_bytes()),
    }
    sizes["framing"] = 8 + 12 * len(SECTION_TAGS)
    return sizes
