"""Syntax-as-sequence-labeling codecs and linear probes over word embeddings."""

from synprobe.constcodec import (
    ConstLabel,
    collapse_unaries,
    decode_levels,
    encode_levels,
    repair_levels,
    restore_unaries,
)
from synprobe.depcodec import (
    BracketArc,
    DepLabel,
    PlaneAssignment,
    assign_planes,
    decode_2planar,
    decode_arc_hybrid,
    decode_rel_head,
    encode_2planar,
    encode_arc_hybrid,
    encode_rel_head,
    oracle_arc_hybrid,
    projectivize,
    repair_tree,
)
from synprobe.metrics import (
    BracketScore,
    BreakdownTable,
    DepScore,
    bracket_f1,
    error_reduction,
    f1_by_displacement,
    f1_by_span_length,
    las,
)
from synprobe.probe import (
    EmbeddingTable,
    LabelVocab,
    ProbeConfig,
    ProbeModel,
    build_label_vocab,
    evaluate_setup_pair,
    predict,
    read_embeddings,
    train_linear_probe,
    write_embeddings,
)
from synprobe.treebank import (
    ConstTree,
    DepTree,
    Internal,
    Leaf,
    Sentence,
    Token,
    read_brackets,
    read_conllu,
    write_brackets,
    write_conllu,
)

__version__ = "0.1.0"
