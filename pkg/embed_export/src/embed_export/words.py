"""Word and sentence-id extraction from treebank files.

Only the surface words matter for embedding export, so the readers here are
deliberately minimal: CoNLL-U multiword ranges and empty nodes are skipped,
bracket files yield the leaf words.  Sentence ids follow the canonical rule
of the embedding format: the ``# sent_id`` comment when present, else the
0-based position as a decimal string.
"""

from __future__ import annotations

import re

_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_ID = re.compile(r"^\d+\.\d+$")
_SENT_ID = re.compile(r"^#\s*sent_id\s*=\s*(.+?)\s*$")


def conllu_words(text: str) -> list[tuple[str, list[str]]]:
    sentences: list[tuple[str, list[str]]] = []
    words: list[str] = []
    sent_id: str | None = None

    def flush() -> None:
        nonlocal words, sent_id
        if words:
            sentences.append((sent_id if sent_id is not None else str(len(sentences)), words))
        words = []
        sent_id = None

    for raw in text.splitlines():
        line = raw.rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            m = _SENT_ID.match(line)
            if m:
                sent_id = m.group(1)
            continue
        cols = line.split("\t")
        if len(cols) < 2:
            raise ValueError(f"not a CoNLL-U token line: {line!r}")
        if _RANGE_ID.match(cols[0]) or _EMPTY_ID.match(cols[0]):
            continue
        words.append(cols[1])
    flush()
    return sentences


def bracket_words(text: str) -> list[tuple[str, list[str]]]:
    sentences: list[tuple[str, list[str]]] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        sentences.append((str(len(sentences)), _leaf_words(line)))
    return sentences


def _leaf_words(line: str) -> list[str]:
    # a leaf is "(POS word)": an atom pair inside one paren group
    tokens = re.findall(r"\(|\)|[^\s()]+", line)
    words: list[str] = []
    i = 0
    while i < len(tokens):
        if (
            tokens[i] == "("
            and i + 3 < len(tokens)
            and tokens[i + 1] not in "()"
            and tokens[i + 2] not in "()"
            and tokens[i + 3] == ")"
        ):
            words.append(tokens[i + 2])
            i += 4
        else:
            i += 1
    if not words:
        raise ValueError(f"no leaves found in tree line: {line!r}")
    return words


def read_words(text: str, fmt: str) -> list[tuple[str, list[str]]]:
    if fmt == "conllu":
        return conllu_words(text)
    if fmt == "brackets":
        return bracket_words(text)
    raise ValueError(f"unknown treebank format {fmt!r}")
