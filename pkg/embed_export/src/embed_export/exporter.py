"""Extract one vector per treebank word from a pretrained encoder.

A word is represented by the hidden state of its first sub-element (subword
or character position, whatever the model's tokenizer produces).  The
``frozen`` setup runs the pretrained weights as-is; the ``random`` setup
builds a fresh model of the same architecture from the seeded initializer,
the control for how much of the probe signal is mere architecture.

Sentences whose tokenization exceeds the model's position limit (and the
rare word that yields no sub-element at all) are skipped and reported with
their sentence ids rather than truncated silently.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import torch
from transformers import AutoConfig, AutoModel, AutoTokenizer

from embed_export.wire import EmbeddingWriter
from embed_export.words import read_words

SETUPS = ("frozen", "random")


@dataclass
class ExportSpec:
    model: str
    treebank: str
    out: str
    fmt: str = "conllu"
    setup: str = "frozen"
    layer: int = -1  # index into the hidden-state stack; -1 = last layer
    seed: int | None = None
    batch_size: int = 16

    def __post_init__(self) -> None:
        if self.setup not in SETUPS:
            raise ValueError(f"setup must be one of {SETUPS}, got {self.setup!r}")
        if self.setup == "random" and self.seed is None:
            raise ValueError("the random setup needs a seed")
        if self.batch_size < 1:
            raise ValueError("batch size must be positive")


@dataclass
class ExportResult:
    written: int
    dim: int
    skipped: list[tuple[str, str]] = field(default_factory=list)


def _load_model(spec: ExportSpec):
    tokenizer = AutoTokenizer.from_pretrained(spec.model)
    if not tokenizer.is_fast:
        raise ValueError("a fast tokenizer is required for word alignment")
    if spec.setup == "frozen":
        model = AutoModel.from_pretrained(spec.model)
    else:
        torch.manual_seed(spec.seed)
        model = AutoModel.from_config(AutoConfig.from_pretrained(spec.model))
    model.eval()
    return tokenizer, model


def _position_limit(tokenizer, model) -> int | None:
    limit = getattr(model.config, "max_position_embeddings", None)
    if limit is None:
        limit = getattr(tokenizer, "model_max_length", None)
    if limit is None or limit > 1_000_000:  # the "unbounded" sentinel
        return None
    return int(limit)


def export(spec: ExportSpec) -> ExportResult:
    text = Path(spec.treebank).read_text(encoding="utf-8")
    sentences = read_words(text, spec.fmt)
    tokenizer, model = _load_model(spec)
    dim = int(model.config.hidden_size)
    limit = _position_limit(tokenizer, model)

    n_layers = model.config.num_hidden_layers + 1  # embeddings + each layer
    if not -n_layers <= spec.layer < n_layers:
        raise ValueError(f"layer {spec.layer} out of range for {n_layers} hidden states")

    accepted: list[tuple[str, list[str]]] = []
    skipped: list[tuple[str, str]] = []
    for sent_id, words in sentences:
        enc = tokenizer(words, is_split_into_words=True)
        if limit is not None and len(enc["input_ids"]) > limit:
            skipped.append((sent_id, f"{len(enc['input_ids'])} sub-elements exceed the limit {limit}"))
            continue
        covered = {w for w in enc.word_ids() if w is not None}
        if len(covered) != len(words):
            skipped.append((sent_id, "a word produced no sub-element"))
            continue
        accepted.append((sent_id, words))

    path = Path(spec.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "wb") as stream, EmbeddingWriter(stream, dim) as writer:
        for start in range(0, len(accepted), spec.batch_size):
            batch = accepted[start : start + spec.batch_size]
            _export_batch(batch, tokenizer, model, spec.layer, writer)
    return ExportResult(written=len(accepted), dim=dim, skipped=skipped)


def _export_batch(batch, tokenizer, model, layer: int, writer: EmbeddingWriter) -> None:
    enc = tokenizer(
        [words for _, words in batch],
        is_split_into_words=True,
        padding=True,
        return_tensors="pt",
    )
    with torch.no_grad():
        out = model(**enc, output_hidden_states=True)
    states = out.hidden_states[layer]
    for row, (sent_id, words) in enumerate(batch):
        word_ids = enc.word_ids(row)
        first_position: dict[int, int] = {}
        for pos, w in enumerate(word_ids):
            if w is not None and w not in first_position:
                first_position[w] = pos
        indices = [first_position[w] for w in range(len(words))]
        vectors = states[row, indices, :].cpu().numpy().astype("<f4")
        writer.write_sentence(sent_id, vectors)
