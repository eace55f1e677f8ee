"""Linear probes from per-word embedding vectors to syntax labels.

The probe is a single linear layer trained as multinomial logistic
regression with plain mini-batch gradient descent (defaults: lr 2e-3,
20 epochs, batch 128).  Weights and bias start at zero, every run is
deterministic for a fixed seed, and the final-epoch model is returned --
there is no early stopping.

Embedding files use a fixed binary layout ("EMB1"): magic bytes, a 32-bit
little-endian dimension, then per sentence a 32-bit word count (0
terminates), a 16-byte sentence-id hash (MD5 of the UTF-8 id) and the
row-major float32 vectors.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import BinaryIO, Sequence

import numpy as np

from synprobe import constcodec, depcodec, metrics
from synprobe.constcodec import ConstLabel
from synprobe.depcodec import DepLabel
from synprobe.treebank import ConstTree, DepTree

__all__ = [
    "EMB_MAGIC",
    "EmbeddingFormatError",
    "AlignmentError",
    "EmbeddingTable",
    "sentence_id_hash",
    "read_embeddings",
    "write_embeddings",
    "LabelVocab",
    "build_label_vocab",
    "ProbeConfig",
    "ProbeModel",
    "train_linear_probe",
    "predict",
    "save_probe",
    "load_probe",
    "dep_atoms",
    "dep_tree_from_atoms",
    "const_atoms",
    "const_tree_from_atoms",
    "most_frequent_rel",
    "evaluate_setup_pair",
]

EMB_MAGIC = b"EMB1"
MODEL_MAGIC = b"PRB1"
MODEL_VERSION = 1


class EmbeddingFormatError(ValueError):
    """Malformed embedding stream; carries the byte offset of the problem."""

    def __init__(self, message: str, *, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte {offset})")


class AlignmentError(ValueError):
    """Embeddings and treebank disagree on sentences or word counts."""


def sentence_id_hash(sent_id: str) -> bytes:
    return hashlib.md5(sent_id.encode("utf-8")).digest()


@dataclass
class EmbeddingTable:
    """Fixed-dimension vectors, one row per word, grouped by sentence."""

    dim: int
    sentences: list[tuple[bytes, np.ndarray]] = field(default_factory=list)

    def append(self, sent_id: str, vectors: np.ndarray) -> None:
        vectors = np.asarray(vectors, dtype=np.float32)
        if vectors.ndim != 2 or vectors.shape[1] != self.dim:
            raise ValueError(f"expected shape (n, {self.dim}), got {vectors.shape}")
        self.sentences.append((sentence_id_hash(sent_id), vectors))

    @property
    def total_words(self) -> int:
        return sum(v.shape[0] for _, v in self.sentences)


def read_embeddings(data: bytes | BinaryIO) -> EmbeddingTable:
    """Parse an EMB1 stream; clean EOF at a record boundary also terminates."""
    if not isinstance(data, bytes):
        data = data.read()
    offset = 0

    def take(count: int, what: str) -> bytes:
        nonlocal offset
        if offset + count > len(data):
            raise EmbeddingFormatError(f"truncated {what}", offset=offset)
        chunk = data[offset : offset + count]
        offset += count
        return chunk

    magic = take(4, "magic")
    if magic != EMB_MAGIC:
        raise EmbeddingFormatError(f"bad magic {magic!r}", offset=0)
    (dim,) = struct.unpack("<I", take(4, "dimension"))
    if dim == 0:
        raise EmbeddingFormatError("dimension must be positive", offset=4)

    table = EmbeddingTable(dim=int(dim))
    while offset < len(data):
        (count,) = struct.unpack("<I", take(4, "word count"))
        if count == 0:
            break
        id_hash = take(16, "sentence-id hash")
        payload = take(4 * count * dim, "vector payload")
        vectors = np.frombuffer(payload, dtype="<f4").reshape(count, dim)
        table.sentences.append((id_hash, vectors.copy()))
    return table


def write_embeddings(table: EmbeddingTable) -> bytes:
    parts = [EMB_MAGIC, struct.pack("<I", table.dim)]
    for id_hash, vectors in table.sentences:
        if len(id_hash) != 16:
            raise ValueError("sentence-id hash must be 16 bytes")
        vectors = np.ascontiguousarray(vectors, dtype="<f4")
        if vectors.ndim != 2 or vectors.shape[1] != table.dim:
            raise ValueError(f"expected shape (n, {table.dim}), got {vectors.shape}")
        parts.append(struct.pack("<I", vectors.shape[0]))
        parts.append(id_hash)
        parts.append(vectors.tobytes())
    parts.append(struct.pack("<I", 0))
    return b"".join(parts)


# ---------------------------------------------------------------------------
# label atoms and vocabularies

def dep_atoms(labels: Sequence[DepLabel]) -> list[str]:
    """Joint classification targets: arc part and relation fused with ``@``."""
    return [f"{l.arc_part}@{l.rel_part}" for l in labels]


def _split_dep_atom(atom: str) -> DepLabel:
    arc, _, rel = atom.partition("@")
    return DepLabel(arc, rel)


def dep_tree_from_atoms(
    atoms: Sequence[str],
    encoding: str,
    forms: Sequence[str] | None = None,
    upos: Sequence[str] | None = None,
    default_rel: str = "dep",
) -> DepTree:
    labels = [_split_dep_atom(a) for a in atoms]
    return depcodec.decode_dep_labels(
        labels, encoding, forms=forms, upos=upos, default_rel=default_rel
    )


def const_atoms(labels: Sequence[ConstLabel]) -> list[str]:
    return [constcodec.render_const_label(l) for l in labels]


def const_tree_from_atoms(
    atoms: Sequence[str], words: Sequence[tuple[str, str]]
) -> ConstTree:
    labels = [constcodec.parse_const_label(a) for a in atoms]
    return constcodec.decode_levels(labels, words)


@dataclass(frozen=True)
class LabelVocab:
    """Closed label set: atom <-> class index, plus the modal atom."""

    atoms: tuple[str, ...]
    index: dict[str, int]
    most_frequent: int

    def __len__(self) -> int:
        return len(self.atoms)


def build_label_vocab(sequences: Sequence[Sequence[str]]) -> LabelVocab:
    """One class per distinct atom; ties for the modal atom break lexically."""
    counts: dict[str, int] = {}
    for seq in sequences:
        for atom in seq:
            counts[atom] = counts.get(atom, 0) + 1
    if not counts:
        raise ValueError("cannot build a vocabulary from an empty training set")
    atoms = tuple(sorted(counts))
    index = {a: i for i, a in enumerate(atoms)}
    modal = min(counts, key=lambda a: (-counts[a], a))
    return LabelVocab(atoms=atoms, index=index, most_frequent=index[modal])


def most_frequent_rel(sequences: Sequence[Sequence[str]]) -> str:
    """Modal relation across dependency atoms, for repair defaults."""
    counts: dict[str, int] = {}
    for seq in sequences:
        for atom in seq:
            rel = _split_dep_atom(atom).rel_part
            counts[rel] = counts.get(rel, 0) + 1
    if not counts:
        return "dep"
    return min(counts, key=lambda r: (-counts[r], r))


# ---------------------------------------------------------------------------
# training and prediction

@dataclass(frozen=True)
class ProbeConfig:
    learning_rate: float = 2e-3
    epochs: int = 20
    batch_size: int = 128
    seed: int = 0

    def __post_init__(self) -> None:
        if self.learning_rate <= 0:
            raise ValueError("learning rate must be positive")
        if self.epochs < 1:
            raise ValueError("need at least one epoch")
        if self.batch_size < 1:
            raise ValueError("batch size must be positive")


@dataclass
class ProbeModel:
    weights: np.ndarray  # (dim, |vocab|) float32
    bias: np.ndarray  # (|vocab|,) float32
    vocab: LabelVocab
    config: ProbeConfig
    loss_history: list[float] = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.weights.shape[0]


def _check_alignment(table: EmbeddingTable, sequences: Sequence[Sequence[str]]) -> None:
    if len(table.sentences) != len(sequences):
        raise AlignmentError(
            f"{len(table.sentences)} embedded sentences vs {len(sequences)} label sequences"
        )
    for i, ((_, vectors), seq) in enumerate(zip(table.sentences, sequences)):
        if vectors.shape[0] != len(seq):
            raise AlignmentError(
                f"sentence {i}: {vectors.shape[0]} vectors vs {len(seq)} labels"
            )


def _flatten(table: EmbeddingTable) -> np.ndarray:
    if not table.sentences:
        return np.zeros((0, table.dim), dtype=np.float64)
    return np.concatenate([v for _, v in table.sentences]).astype(np.float64)


def _mean_cross_entropy(x: np.ndarray, y: np.ndarray, w: np.ndarray, b: np.ndarray) -> float:
    logits = x @ w + b
    logits -= logits.max(axis=1, keepdims=True)
    logsumexp = np.log(np.exp(logits).sum(axis=1))
    return float(np.mean(logsumexp - logits[np.arange(len(y)), y]))


def train_linear_probe(
    embeddings: EmbeddingTable,
    labels: Sequence[Sequence[str]],
    config: ProbeConfig,
) -> ProbeModel:
    """Fit the linear layer on (vector, atom) pairs pooled over sentences.

    Zero initialization keeps the convex objective free of init variance;
    the per-epoch shuffle is the only randomness and is driven by the seed.
    """
    _check_alignment(embeddings, labels)
    vocab = build_label_vocab(labels)
    x = _flatten(embeddings)
    y = np.array([vocab.index[a] for seq in labels for a in seq], dtype=np.int64)
    n, dim = x.shape
    if n == 0:
        raise ValueError("training set has no tokens")

    w = np.zeros((dim, len(vocab)), dtype=np.float64)
    b = np.zeros(len(vocab), dtype=np.float64)
    rng = np.random.default_rng(config.seed)
    history = [_mean_cross_entropy(x, y, w, b)]

    for _ in range(config.epochs):
        order = rng.permutation(n)
        for start in range(0, n, config.batch_size):
            batch = order[start : start + config.batch_size]
            xb = x[batch]
            logits = xb @ w + b
            logits -= logits.max(axis=1, keepdims=True)
            exp = np.exp(logits)
            probs = exp / exp.sum(axis=1, keepdims=True)
            probs[np.arange(len(batch)), y[batch]] -= 1.0
            # Per-example gradients accumulate over the batch (sum reduction),
            # so one pass over the data applies one SGD step per example.
            w -= config.learning_rate * (xb.T @ probs)
            b -= config.learning_rate * probs.sum(axis=0)
        history.append(_mean_cross_entropy(x, y, w, b))

    return ProbeModel(
        weights=w.astype(np.float32),
        bias=b.astype(np.float32),
        vocab=vocab,
        config=config,
        loss_history=history,
    )


def predict(model: ProbeModel, embeddings: EmbeddingTable) -> list[list[str]]:
    """Per-token argmax atoms; ties resolve to the lowest class index."""
    if embeddings.dim != model.dim:
        raise ValueError(f"embedding dim {embeddings.dim} vs model dim {model.dim}")
    out: list[list[str]] = []
    for _, vectors in embeddings.sentences:
        logits = vectors.astype(np.float32) @ model.weights + model.bias
        classes = np.argmax(logits, axis=1)
        out.append([model.vocab.atoms[c] for c in classes])
    return out


def tag_accuracy(predicted: Sequence[Sequence[str]], gold: Sequence[Sequence[str]]) -> float:
    total = correct = 0
    for p_seq, g_seq in zip(predicted, gold):
        for p, g in zip(p_seq, g_seq):
            total += 1
            correct += p == g
    return 100.0 * correct / total if total else 0.0


# ---------------------------------------------------------------------------
# model persistence

def save_probe(model: ProbeModel) -> bytes:
    parts = [
        MODEL_MAGIC,
        struct.pack("<III", MODEL_VERSION, model.dim, len(model.vocab)),
        struct.pack("<I", model.vocab.most_frequent),
    ]
    for atom in model.vocab.atoms:
        raw = atom.encode("utf-8")
        parts.append(struct.pack("<I", len(raw)))
        parts.append(raw)
    parts.append(struct.pack("<dIi", model.config.learning_rate, model.config.epochs, model.config.seed))
    parts.append(struct.pack("<I", model.config.batch_size))
    parts.append(np.ascontiguousarray(model.bias, dtype="<f4").tobytes())
    parts.append(np.ascontiguousarray(model.weights, dtype="<f4").tobytes())
    return b"".join(parts)


def load_probe(data: bytes) -> ProbeModel:
    offset = 0

    def take(count: int, what: str) -> bytes:
        nonlocal offset
        if offset + count > len(data):
            raise EmbeddingFormatError(f"truncated {what}", offset=offset)
        chunk = data[offset : offset + count]
        offset += count
        return chunk

    if take(4, "magic") != MODEL_MAGIC:
        raise EmbeddingFormatError("bad model magic", offset=0)
    version, dim, vocab_size = struct.unpack("<III", take(12, "header"))
    if version != MODEL_VERSION:
        raise EmbeddingFormatError(f"unsupported model version {version}", offset=4)
    (most_frequent,) = struct.unpack("<I", take(4, "modal class"))
    atoms = []
    for _ in range(vocab_size):
        (length,) = struct.unpack("<I", take(4, "atom length"))
        atoms.append(take(length, "atom").decode("utf-8"))
    lr, epochs, seed = struct.unpack("<dIi", take(16, "config"))
    (batch_size,) = struct.unpack("<I", take(4, "config"))
    bias = np.frombuffer(take(4 * vocab_size, "bias"), dtype="<f4").copy()
    weights = (
        np.frombuffer(take(4 * dim * vocab_size, "weights"), dtype="<f4")
        .reshape(dim, vocab_size)
        .copy()
    )
    vocab = LabelVocab(
        atoms=tuple(atoms),
        index={a: i for i, a in enumerate(atoms)},
        most_frequent=int(most_frequent),
    )
    config = ProbeConfig(learning_rate=lr, epochs=int(epochs), batch_size=int(batch_size), seed=int(seed))
    return ProbeModel(weights=weights, bias=bias, vocab=vocab, config=config)


# ---------------------------------------------------------------------------
# the frozen-vs-control pipeline

def _gold_atoms_dep(trees: Sequence[DepTree], encoding: str) -> list[list[str]]:
    return [dep_atoms(depcodec.encode_dep_tree(t, encoding)) for t in trees]


def _gold_atoms_const(trees: Sequence[ConstTree]) -> list[list[str]]:
    return [const_atoms(constcodec.encode_levels(t)) for t in trees]


def _score_dep(
    gold: Sequence[DepTree],
    atom_seqs: Sequence[Sequence[str]],
    encoding: str,
    default_rel: str,
    min_support: int,
) -> tuple[float, list[DepTree], metrics.BreakdownTable]:
    decoded = [
        dep_tree_from_atoms(atoms, encoding, forms=t.forms, upos=t.upos, default_rel=default_rel)
        for atoms, t in zip(atom_seqs, gold)
    ]
    score = metrics.las(gold, decoded)
    table = metrics.f1_by_displacement(gold, decoded, min_support=min_support)
    return score.las, decoded, table


def _score_const(
    gold: Sequence[ConstTree],
    atom_seqs: Sequence[Sequence[str]],
    min_support: int,
) -> tuple[float, list[ConstTree], metrics.BreakdownTable]:
    decoded = [
        const_tree_from_atoms(atoms, [(l.form, l.pos) for l in t.leaves()])
        for atoms, t in zip(atom_seqs, gold)
    ]
    score = metrics.bracket_f1(gold, decoded)
    table = metrics.f1_by_span_length(gold, decoded, min_support=min_support)
    return score.f1, decoded, table


def _breakdown_json(table: metrics.BreakdownTable) -> dict:
    return {
        "kind": table.kind,
        "min_support": table.min_support,
        "entries": [
            {"key": e.key, "f1": e.f1, "support": e.support} for e in table.entries
        ],
    }


def evaluate_setup_pair(
    train_trees: Sequence[DepTree] | Sequence[ConstTree],
    test_trees: Sequence[DepTree] | Sequence[ConstTree],
    embeddings: dict[str, dict[str, EmbeddingTable]],
    encoding: str,
    config: ProbeConfig,
    dev_trees: Sequence[DepTree] | Sequence[ConstTree] | None = None,
    min_support: int = 10,
    setups: Sequence[str] = ("frz", "rnd"),
) -> dict:
    """Train one probe per setup and report scores plus error reduction.

    ``embeddings`` maps setup name -> {"train": table, "test": table}.  The
    report also carries the repair-baseline score (modal training atom
    predicted everywhere), so control setups have a floor to compare against.
    Dev data is accepted for interface symmetry but the final-epoch model is
    always used.
    """
    del dev_trees  # no early stopping: the final epoch is evaluated
    is_const = encoding == "constlevels"
    if is_const:
        train_atoms = _gold_atoms_const(train_trees)  # type: ignore[arg-type]
        test_atoms = _gold_atoms_const(test_trees)  # type: ignore[arg-type]
        default_rel = "dep"
    else:
        train_atoms = _gold_atoms_dep(train_trees, encoding)  # type: ignore[arg-type]
        test_atoms = _gold_atoms_dep(test_trees, encoding)  # type: ignore[arg-type]
        default_rel = most_frequent_rel(train_atoms)

    def score(atom_seqs: Sequence[Sequence[str]]):
        if is_const:
            return _score_const(test_trees, atom_seqs, min_support)  # type: ignore[arg-type]
        return _score_dep(test_trees, atom_seqs, encoding, default_rel, min_support)  # type: ignore[arg-type]

    vocab = build_label_vocab(train_atoms)
    modal_atom = vocab.atoms[vocab.most_frequent]
    baseline_atoms = [[modal_atom] * len(seq) for seq in test_atoms]
    baseline_score, _, _ = score(baseline_atoms)

    report: dict = {
        "formalism": "constituency" if is_const else "dependency",
        "encoding": encoding,
        "metric": "bracket_f1" if is_const else "las",
        "config": {
            "learning_rate": config.learning_rate,
            "epochs": config.epochs,
            "batch_size": config.batch_size,
            "seed": config.seed,
        },
        "baseline_score": baseline_score,
        "setups": {},
        "error_reduction": {},
    }

    scores: dict[str, float] = {}
    for setup in setups:
        tables = embeddings[setup]
        _check_alignment(tables["train"], train_atoms)
        _check_alignment(tables["test"], test_atoms)
        model = train_linear_probe(tables["train"], train_atoms, config)
        predicted = predict(model, tables["test"])
        setup_score, _, table = score(predicted)
        scores[setup] = setup_score
        report["setups"][setup] = {
            "score": setup_score,
            "tag_accuracy": tag_accuracy(predicted, test_atoms),
            "breakdown": _breakdown_json(table),
        }

    if "frz" in scores and "rnd" in scores and scores["rnd"] < 100.0:
        report["error_reduction"]["rnd_frz"] = error_reduction_safe(
            scores["rnd"], scores["frz"]
        )
    return report


def error_reduction_safe(a: float, b: float) -> float:
    """Error reduction with scores clamped into the valid domain."""
    a = min(max(a, 0.0), 99.999999)
    b = min(max(b, 0.0), 100.0)
    return metrics.error_reduction(a, b)
