#!/usr/bin/env python3
"""Report linearization fidelity and label-vocabulary size on a treebank.

For each dependency encoding, counts the sentences whose decode(encode(t))
round trip is exact, and how large the resulting tag inventory would be.
Useful for judging how much of a treebank each encoding can represent.
"""

from __future__ import annotations

import argparse
import sys
from collections import Counter
from pathlib import Path

from synprobe import depcodec
from synprobe.depcodec import DEP_ENCODINGS
from synprobe.treebank import read_conllu


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("treebank", help="CoNLL-U file")
    args = parser.parse_args()

    trees = read_conllu(Path(args.treebank).read_text(encoding="utf-8"), skip_errors=True)
    if not trees:
        print("no parseable sentences found", file=sys.stderr)
        return 2
    print(f"{len(trees)} sentences, {sum(len(t) for t in trees)} tokens")

    for encoding in DEP_ENCODINGS:
        exact = 0
        atoms = Counter()
        for tree in trees:
            labels = depcodec.encode_dep_tree(tree, encoding)
            atoms.update(f"{l.arc_part}@{l.rel_part}" for l in labels)
            back = depcodec.decode_dep_labels(labels, encoding, forms=tree.forms, upos=tree.upos)
            exact += back.heads == tree.heads and back.deprels == tree.deprels
        share = 100.0 * exact / len(trees)
        print(f"{encoding:>9}: exact round trip {exact}/{len(trees)} ({share:.1f}%), "
              f"{len(atoms)} distinct labels")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
