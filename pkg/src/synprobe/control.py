"""Synthetic corpora for probe calibration.

The control experiment needs two embedding sources over the same sentences:
a "frozen" analog whose vectors linearly encode the gold labels (one-hot
plus Gaussian noise) and a control drawing vectors independently of the
labels.  A linear probe must separate the two by a wide error-reduction
margin, otherwise the harness itself is broken.
"""

from __future__ import annotations

import numpy as np

from synprobe import depcodec, probe
from synprobe.treebank import DepTree

__all__ = ["random_dep_tree", "make_control_corpus", "make_control_embeddings"]

_RELS = ("nsubj", "obj", "det", "amod", "advmod", "punct")


def random_dep_tree(rng: np.random.Generator, n: int, rels=_RELS, sent_id: str | None = None) -> DepTree:
    """A uniform-ish random single-rooted tree via random attachment order.

    Relations are a deterministic function of the arc geometry, mirroring
    how real treebank relations correlate with configuration; this keeps the
    label inventory compact so every class is actually trainable at control
    scale.
    """
    order = rng.permutation(n) + 1
    heads = [0] * n
    for pos in range(1, n):
        parent = order[rng.integers(0, pos)]
        heads[order[pos] - 1] = int(parent)
    deprels = [rels[abs(heads[i] - (i + 1)) % len(rels)] for i in range(n)]
    deprels[order[0] - 1] = "root"
    return DepTree.from_heads(heads, deprels, sent_id=sent_id)


def make_control_corpus(
    n_sentences: int,
    seed: int,
    min_len: int = 3,
    max_len: int = 8,
    id_prefix: str = "s",
) -> list[DepTree]:
    rng = np.random.default_rng(seed)
    return [
        random_dep_tree(
            rng, int(rng.integers(min_len, max_len + 1)), sent_id=f"{id_prefix}{i}"
        )
        for i in range(n_sentences)
    ]


def make_control_embeddings(
    splits: dict[str, list[DepTree]],
    encoding: str,
    seed: int,
    noise_sigma: float = 0.1,
) -> dict[str, dict[str, probe.EmbeddingTable]]:
    """Build frz (one-hot + noise) and rnd (pure noise) tables per split.

    The one-hot dimension indexes the atom vocabulary of the whole corpus;
    atoms are the same joint targets the probe is trained on.
    """
    atoms_by_split = {
        name: [probe.dep_atoms(depcodec.encode_dep_tree(t, encoding)) for t in trees]
        for name, trees in splits.items()
    }
    vocab = probe.build_label_vocab(
        [seq for seqs in atoms_by_split.values() for seq in seqs]
    )
    dim = len(vocab)
    rng = np.random.default_rng(seed)

    out: dict[str, dict[str, probe.EmbeddingTable]] = {"frz": {}, "rnd": {}}
    for name, trees in splits.items():
        frz = probe.EmbeddingTable(dim=dim)
        rnd = probe.EmbeddingTable(dim=dim)
        for tree, atom_seq in zip(trees, atoms_by_split[name]):
            n = len(tree)
            one_hot = np.zeros((n, dim), dtype=np.float32)
            for row, atom in enumerate(atom_seq):
                one_hot[row, vocab.index[atom]] = 1.0
            noisy = one_hot + rng.normal(0.0, noise_sigma, size=(n, dim))
            pure = rng.normal(0.0, 1.0, size=(n, dim))
            sent_id = tree.sent_id if tree.sent_id is not None else ""
            frz.append(sent_id, noisy.astype(np.float32))
            rnd.append(sent_id, pure.astype(np.float32))
        out["frz"][name] = frz
        out["rnd"][name] = rnd
    return out
