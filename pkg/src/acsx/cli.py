"""Command line front-end: build, scan, stats, bench.

Exit codes: 2 unreadable input file, 3 malformed dictionary, 4 wrong index
magic or version, 5 truncated or damaged index, 6 engine disagreement in
bench.  Diagnostics go to stderr; data (occurrence lines, reports, CSV)
goes to stdout so commands compose in pipelines.
"""

import argparse
import statistics
import struct
import sys
import time

from .trie_builder import Dictionary, build_full_trie
from .index import encode_index
from .storage import IndexFormatError, load_index, save_index
from .matcher import scan
from .analysis import (entropy_report, entropy_bound_check, lower_bound_L,
                       naive_ac_scan, smp_scan, space_report)
from .index import BlockedNextEncoding


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _read_file(path, what):
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as exc:
        raise CliError(2, "cannot read %s %r: %s" % (what, path, exc))


def read_dictionary(path, mode):
    """Parse a dictionary file into a list of byte patterns."""
    data = _read_file(path, "dictionary")
    if mode == "newline":
        if data.endswith(b"\n"):
            data = data[:-1]
        pats = data.split(b"\n") if data else []
        if any(not p for p in pats):
            raise CliError(3, "blank line in newline-delimited dictionary")
    else:
        pats = []
        off = 0
        while off < len(data):
            if off + 4 > len(data):
                raise CliError(3, "truncated length prefix at byte %d" % off)
            (ln,) = struct.unpack_from("<I", data, off)
            off += 4
            if ln == 0:
                raise CliError(3, "zero-length pattern at byte %d" % off)
            if off + ln > len(data):
                raise CliError(3, "truncated pattern at byte %d" % off)
            pats.append(data[off:off + ln])
            off += ln
    if not pats:
        raise CliError(3, "dictionary contains no patterns")
    if len(set(pats)) < len(pats):
        sys.stderr.write("warning: dictionary contains duplicate patterns\n")
    return pats


def _load(path):
    try:
        return load_index(path)
    except OSError as exc:
        raise CliError(2, "cannot read index %r: %s" % (path, exc))
    except IndexFormatError as exc:
        code = 4 if exc.kind in ("magic", "version") else 5
        raise CliError(code, "bad index file: %s" % exc)


def cmd_build(args):
    pats = read_dictionary(args.dictionary, args.mode)
    trie = build_full_trie(Dictionary(pats))
    index = encode_index(trie, t=args.t, block_size_override=args.block_size)
    try:
        save_index(index, args.index)
    except OSError as exc:
        raise CliError(2, "cannot write index %r: %s" % (args.index, exc))
    w_size = len(index.fail_enc.membership.one_positions())
    out = sys.stdout
    out.write("m=%d\n" % index.m)
    out.write("sigma=%d\n" % index.sigma)
    out.write("d=%d\n" % index.pattern_table.d)
    out.write("W_size=%d\n" % w_size)
    out.write("total_bits=%d\n" % index.total_section_bits())
    return 0


def _sorted_occurrence_rows(index, text_source, engine):
    """Yield (end, pid, start) strictly sorted by (end, pid)."""
    if engine == "cblz":
        pending = []

        def rows():
            last = [-1]
            buf = []

            def push(occ):
                if occ.end_pos != last[0] and buf:
                    buf.sort()
                    pending.extend(buf)
                    del buf[:]
                last[0] = occ.end_pos
                buf.append((occ.end_pos, occ.pattern_id, occ.start_pos))

            scan(index, text_source, sink=push)
            buf.sort()
            pending.extend(buf)

        rows()
        return pending
    text = text_source.read() if hasattr(text_source, "read") else text_source
    if engine == "smp":
        pairs = smp_scan(index, text)
    else:
        pairs = naive_ac_scan(index.decode_patterns(), text)
    lengths = index.pattern_table.lengths
    return [(end, pid, end - int(lengths[pid]) + 1) for end, pid in pairs]


def cmd_scan(args):
    index = _load(args.index)
    try:
        fh = open(args.text, "rb")
    except OSError as exc:
        raise CliError(2, "cannot read text %r: %s" % (args.text, exc))
    with fh:
        rows = _sorted_occurrence_rows(index, fh, args.engine)
    out = sys.stdout
    if args.format == "tsv":
        for end, pid, start in rows:
            if args.starts:
                out.write("%d\t%d\t%d\n" % (end, pid, start))
            else:
                out.write("%d\t%d\n" % (end, pid))
    else:
        pack = struct.Struct("<QQQ" if args.starts else "<QQ").pack
        w = out.buffer.write
        for end, pid, start in rows:
            w(pack(end, pid, start) if args.starts else pack(end, pid))
        out.buffer.flush()
    sys.stderr.write("occurrences=%d\n" % len(rows))
    return 0


def cmd_stats(args):
    index = _load(args.index)
    out = sys.stdout
    rep = space_report(index)
    for line in rep.to_lines():
        out.write(line + "\n")
    for name in sorted(rep.components):
        out.write("bits_%s_per_edge=%.4f\n"
                  % (name, rep.components[name] / max(1, rep.m)))
    lb = lower_bound_L(index.m, index.sigma) if index.m >= 1 else 0.0
    gap = rep.component_total() - lb
    out.write("optimality_gap_bits=%.3f\n" % gap)
    out.write("optimality_gap_per_edge=%.4f\n" % (gap / max(1, index.m)))
    if args.dictionary:
        pats = read_dictionary(args.dictionary, args.mode)
        if pats != index.decode_patterns():
            sys.stderr.write("warning: dictionary file does not match the "
                             "index contents\n")
        trie = build_full_trie(Dictionary(pats))
        out.write("patterns=%d\n" % len(pats))
        out.write("avg_length=%.6f\n"
                  % (sum(len(p) for p in pats) / len(pats)))
        for line in entropy_report(trie).to_lines():
            out.write(line + "\n")
        if isinstance(index.next_enc, BlockedNextEncoding):
            for line in entropy_bound_check(index, trie).to_lines():
                if line.startswith(("bound_", "block_binomial",
                                    "rounding", "next_payload")):
                    out.write(line + "\n")
    return 0


def _parse_engine(token):
    if token == "smp" or token == "naive":
        return token, 0
    if token == "cblz":
        return "cblz", 1
    if token.startswith("cblz") and token[4:].isdigit():
        return "cblz", int(token[4:])
    raise CliError(2, "unknown engine %r" % token)


def cmd_bench(args):
    pats = read_dictionary(args.dictionary, args.mode)
    text = _read_file(args.text, "text")
    engines = [_parse_engine(tok) for tok in args.engines.split(",")]
    out = sys.stdout
    out.write("engine,t,median_ns,occ,index_bits\n")
    counts = {}
    for kind, t in engines:
        if kind == "cblz":
            index = encode_index(build_full_trie(Dictionary(pats)), t=t)
            bits = index.total_section_bits()
            runner = lambda: scan(index, text)
            label = "cblz%d" % t
        elif kind == "smp":
            index = encode_index(build_full_trie(Dictionary(pats)), t=8)
            bits = index.total_section_bits()
            runner = lambda: len(smp_scan(index, text))
            label, t = "smp", 8
        else:
            bits = 0
            runner = lambda: len(naive_ac_scan(pats, text))
            label = "naive"
        times = []
        occ = None
        for _ in range(args.repetitions):
            t0 = time.perf_counter_ns()
            n = runner()
            times.append(time.perf_counter_ns() - t0)
            if occ is not None and n != occ:
                raise CliError(6, "engine %s is nondeterministic" % label)
            occ = n
        counts[label] = occ
        out.write("%s,%d,%d,%d,%d\n"
                  % (label, t, int(statistics.median(times)), occ, bits))
    if len(set(counts.values())) > 1:
        raise CliError(6, "engines disagree on occurrence count: %s"
                       % sorted(counts.items()))
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="acsx",
        description="entropy-compressed multiple-pattern matching")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build an index from a dictionary")
    p.add_argument("dictionary")
    p.add_argument("index")
    p.add_argument("--mode", choices=("newline", "binary"), default="newline",
                   help="dictionary file layout (binary = u32 length prefix "
                        "per pattern)")
    p.add_argument("--t", type=int, default=8,
                   help="failure-link sparsification stride")
    p.add_argument("--block-size", type=int, default=None,
                   help="override the transition coder block size")
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("scan", help="stream a text through an index")
    p.add_argument("index")
    p.add_argument("text")
    p.add_argument("--starts", action="store_true",
                   help="append the start position column")
    p.add_argument("--format", choices=("tsv", "binary"), default="tsv")
    p.add_argument("--engine", choices=("cblz", "smp", "naive"),
                   default="cblz")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("stats", help="report index space accounting")
    p.add_argument("index")
    p.add_argument("--dictionary", default=None,
                   help="companion dictionary for the entropy report")
    p.add_argument("--mode", choices=("newline", "binary"), default="newline")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="time engines over one dictionary/text")
    p.add_argument("dictionary")
    p.add_argument("text")
    p.add_argument("--engines", default="cblz1,cblz8,smp",
                   help="comma list: cblzN (stride N), smp, naive")
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--mode", choices=("newline", "binary"), default="newline")
    p.set_defaults(func=cmd_bench)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
