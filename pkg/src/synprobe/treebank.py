"""Treebank I/O: CoNLL-U dependency files and one-tree-per-line bracketed files.

Dependency trees keep only the columns the rest of the toolkit consumes
(ID, FORM, UPOS, HEAD, DEPREL); everything else is written back as ``_``.
Multiword-token ranges (``3-4``) and empty nodes (``5.1``) are dropped so
that token indices always denote syntactic words.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

__all__ = [
    "Token",
    "DepTree",
    "Leaf",
    "Internal",
    "Node",
    "ConstTree",
    "Sentence",
    "ConlluParseError",
    "BracketParseError",
    "read_conllu",
    "write_conllu",
    "read_brackets",
    "write_brackets",
    "dep_sentences",
    "const_sentences",
]

_RANGE_ID = re.compile(r"^\d+-\d+$")
_EMPTY_ID = re.compile(r"^\d+\.\d+$")


class ConlluParseError(ValueError):
    """Malformed CoNLL-U input; carries the offending line number."""

    def __init__(self, message: str, *, line: int | None = None, sentence: int | None = None):
        self.line = line
        self.sentence = sentence
        loc = f" (line {line})" if line is not None else ""
        super().__init__(f"{message}{loc}")


class BracketParseError(ValueError):
    """Malformed bracketed-tree input; carries line and column."""

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", column {column})" if column is not None else ")")
        super().__init__(f"{message}{loc}")


@dataclass(frozen=True)
class Token:
    """One syntactic word: 1-based index, head 0 meaning the artificial root."""

    index: int
    form: str
    upos: str
    head: int
    deprel: str

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"token index must be >= 1, got {self.index}")
        if self.head < 0:
            raise ValueError(f"head must be >= 0, got {self.head}")
        if self.head == self.index:
            raise ValueError(f"token {self.index} cannot head itself")
        if not self.form:
            raise ValueError("token form must be non-empty")


@dataclass
class DepTree:
    """A single-rooted labeled dependency tree over one sentence."""

    tokens: list[Token]
    sent_id: str | None = field(default=None, compare=False)

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def heads(self) -> list[int]:
        return [t.head for t in self.tokens]

    @property
    def deprels(self) -> list[str]:
        return [t.deprel for t in self.tokens]

    @property
    def forms(self) -> list[str]:
        return [t.form for t in self.tokens]

    @property
    def upos(self) -> list[str]:
        return [t.upos for t in self.tokens]

    @classmethod
    def from_heads(
        cls,
        heads: list[int],
        deprels: list[str] | None = None,
        forms: list[str] | None = None,
        upos: list[str] | None = None,
        sent_id: str | None = None,
    ) -> "DepTree":
        n = len(heads)
        deprels = deprels if deprels is not None else ["dep"] * n
        forms = forms if forms is not None else [f"w{i}" for i in range(1, n + 1)]
        upos = upos if upos is not None else ["_"] * n
        tokens = [
            Token(i + 1, forms[i], upos[i], heads[i], deprels[i]) for i in range(n)
        ]
        return cls(tokens, sent_id=sent_id)

    def validate(self) -> None:
        """Raise ValueError unless heads form a single-rooted acyclic tree."""
        n = len(self.tokens)
        if n == 0:
            raise ValueError("tree has no tokens")
        roots = [t.index for t in self.tokens if t.head == 0]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root, found {len(roots)}")
        for t in self.tokens:
            if t.head > n:
                raise ValueError(f"token {t.index} head {t.head} out of range 1..{n}")
        if _cycle_node(self.heads) is not None:
            raise ValueError("head references contain a cycle")


def _cycle_node(heads: list[int]) -> int | None:
    """Return the 1-based index of some node on a head cycle, or None."""
    n = len(heads)
    state = [0] * (n + 1)  # 0 unseen, 1 on path, 2 done
    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        node = start
        while node != 0 and state[node] == 0:
            state[node] = 1
            path.append(node)
            node = heads[node - 1]
        if node != 0 and state[node] == 1:
            return node
        for p in path:
            state[p] = 2
    return None


@dataclass(frozen=True)
class Leaf:
    """A word together with its part-of-speech tag."""

    form: str
    pos: str


@dataclass(frozen=True)
class Internal:
    """A phrase node with an ordered, non-empty tuple of children."""

    label: str
    children: tuple["Node", ...]

    def __post_init__(self) -> None:
        if not self.children:
            raise ValueError(f"internal node {self.label!r} must have children")


Node = Union[Internal, Leaf]


@dataclass
class ConstTree:
    """A constituent tree whose frontier is the sentence, left to right."""

    root: Internal
    sent_id: str | None = field(default=None, compare=False)

    def leaves(self) -> list[Leaf]:
        out: list[Leaf] = []
        _collect_leaves(self.root, out)
        return out

    @property
    def forms(self) -> list[str]:
        return [leaf.form for leaf in self.leaves()]

    def __len__(self) -> int:
        return len(self.leaves())


def _collect_leaves(node: Node, out: list[Leaf]) -> None:
    if isinstance(node, Leaf):
        out.append(node)
    else:
        for child in node.children:
            _collect_leaves(child, out)


@dataclass
class Sentence:
    """A sentence id plus its words and whichever gold trees are available.

    The id is the ``# sent_id`` comment for CoNLL-U input or the 0-based
    position rendered as a decimal string otherwise; embedding files use the
    same rule, so positional data stays alignable by id hash.
    """

    id: str
    words: list[str]
    dep: DepTree | None = None
    const: ConstTree | None = None


def dep_sentences(trees: list[DepTree]) -> list[Sentence]:
    return [
        Sentence(t.sent_id if t.sent_id is not None else str(i), t.forms, dep=t)
        for i, t in enumerate(trees)
    ]


def const_sentences(trees: list[ConstTree]) -> list[Sentence]:
    return [
        Sentence(t.sent_id if t.sent_id is not None else str(i), t.forms, const=t)
        for i, t in enumerate(trees)
    ]


_SENT_ID = re.compile(r"^#\s*sent_id\s*=\s*(.+?)\s*$")


def read_conllu(text: str, *, skip_errors: bool = False) -> list[DepTree]:
    """Parse CoNLL-U text into dependency trees.

    Comment lines, multiword ranges and empty nodes are skipped.  Structural
    problems (bad ID/HEAD fields, heads out of range, zero or several roots)
    raise :class:`ConlluParseError` naming the line, or drop the offending
    sentence when ``skip_errors`` is true.
    """
    trees: list[DepTree] = []
    rows: list[tuple[int, list[str]]] = []
    sent_id: str | None = None
    sent_start: int | None = None

    def flush(end_line: int) -> None:
        nonlocal rows, sent_id, sent_start
        if not rows:
            sent_id = None
            sent_start = None
            return
        try:
            trees.append(_build_sentence(rows, sent_id, len(trees)))
        except ConlluParseError:
            if not skip_errors:
                raise
        rows = []
        sent_id = None
        sent_start = None

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            flush(line_no)
            continue
        if line.startswith("#"):
            m = _SENT_ID.match(line)
            if m:
                sent_id = m.group(1)
            continue
        if sent_start is None:
            sent_start = line_no
        rows.append((line_no, line.split("\t")))
    flush(-1)
    return trees


def _build_sentence(
    rows: list[tuple[int, list[str]]], sent_id: str | None, index: int
) -> DepTree:
    raw_tokens: list[tuple[int, str, str, int, str]] = []
    for line_no, cols in rows:
        if len(cols) != 10:
            raise ConlluParseError(
                f"expected 10 tab-separated columns, got {len(cols)}",
                line=line_no,
                sentence=index,
            )
        tid, form, _lemma, upos, _xpos, _feats, head, deprel, _deps, _misc = cols
        if _RANGE_ID.match(tid) or _EMPTY_ID.match(tid):
            continue
        try:
            tid_val = int(tid)
        except ValueError:
            raise ConlluParseError(f"malformed token ID {tid!r}", line=line_no, sentence=index)
        if tid_val != len(raw_tokens) + 1:
            raise ConlluParseError(
                f"token ID {tid_val} out of sequence (expected {len(raw_tokens) + 1})",
                line=line_no,
                sentence=index,
            )
        try:
            head_val = int(head)
        except ValueError:
            raise ConlluParseError(f"malformed HEAD {head!r}", line=line_no, sentence=index)
        if head_val < 0:
            raise ConlluParseError(f"negative HEAD {head_val}", line=line_no, sentence=index)
        if head_val == tid_val:
            raise ConlluParseError(
                f"token {tid_val} heads itself", line=line_no, sentence=index
            )
        if not form:
            raise ConlluParseError("empty FORM", line=line_no, sentence=index)
        raw_tokens.append((tid_val, form, upos, head_val, deprel))

    first_line = rows[0][0]
    if not raw_tokens:
        raise ConlluParseError("sentence has no syntactic words", line=first_line, sentence=index)
    n = len(raw_tokens)
    heads = [h for (_, _, _, h, _) in raw_tokens]
    roots = [i for i, h in enumerate(heads) if h == 0]
    if len(roots) == 0:
        raise ConlluParseError("sentence has no root", line=first_line, sentence=index)
    if len(roots) > 1:
        raise ConlluParseError(
            f"sentence has {len(roots)} roots", line=first_line, sentence=index
        )
    for (tid_val, _, _, h, _), (line_no, _) in zip(raw_tokens, rows):
        if h > n:
            raise ConlluParseError(
                f"HEAD {h} out of range 1..{n}", line=line_no, sentence=index
            )
    if _cycle_node(heads) is not None:
        raise ConlluParseError("head references contain a cycle", line=first_line, sentence=index)
    tokens = [Token(i, form, upos, head, rel) for (i, form, upos, head, rel) in raw_tokens]
    return DepTree(tokens, sent_id=sent_id)


def write_conllu(trees: list[DepTree]) -> str:
    """Serialize trees to CoNLL-U; unmodeled columns are emitted as ``_``."""
    chunks: list[str] = []
    for tree in trees:
        lines: list[str] = []
        if tree.sent_id is not None:
            lines.append(f"# sent_id = {tree.sent_id}")
        for t in tree.tokens:
            lines.append(
                f"{t.index}\t{t.form}\t_\t{t.upos}\t_\t_\t{t.head}\t{t.deprel}\t_\t_"
            )
        chunks.append("\n".join(lines) + "\n\n")
    return "".join(chunks)


def read_brackets(text: str) -> list[ConstTree]:
    """Parse one parenthesized tree per non-blank line.

    Leaves are ``(POS word)`` groups; escaped bracket forms such as ``-LRB-``
    are kept verbatim.  ``+`` is reserved as the unary-chain joiner, so phrase
    labels containing it are rejected.
    """
    trees: list[ConstTree] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        root = _parse_tree_line(line, line_no)
        trees.append(ConstTree(root))
    return trees


def _parse_tree_line(line: str, line_no: int) -> Internal:
    pos = 0
    n = len(line)

    def err(message: str, at: int) -> BracketParseError:
        return BracketParseError(message, line=line_no, column=at + 1)

    def skip_space() -> None:
        nonlocal pos
        while pos < n and line[pos].isspace():
            pos += 1

    def read_atom() -> str:
        nonlocal pos
        start = pos
        while pos < n and not line[pos].isspace() and line[pos] not in "()":
            pos += 1
        return line[start:pos]

    def parse_node() -> Node:
        nonlocal pos
        if line[pos] != "(":
            raise err("expected '('", pos)
        open_at = pos
        pos += 1
        skip_space()
        label = read_atom()
        if not label:
            raise err("empty node label", pos)
        children: list[Node] = []
        atoms: list[str] = []
        while True:
            skip_space()
            if pos >= n:
                raise err("unbalanced parentheses", open_at)
            if line[pos] == ")":
                pos += 1
                break
            if line[pos] == "(":
                children.append(parse_node())
            else:
                atoms.append(read_atom())
        if atoms and children:
            raise err(f"node {label!r} mixes bare words with subtrees", open_at)
        if atoms:
            if len(atoms) > 1:
                raise err(f"pre-terminal {label!r} covers several words", open_at)
            return Leaf(form=atoms[0], pos=label)
        if not children:
            raise err(f"node {label!r} has no children", open_at)
        if "+" in label:
            raise err(f"phrase label {label!r} contains the reserved joiner '+'", open_at)
        return Internal(label, tuple(children))

    skip_space()
    if pos >= n or line[pos] != "(":
        raise err("expected '(' at start of tree", pos if pos < n else n - 1)
    node = parse_node()
    skip_space()
    if pos < n:
        raise err("trailing content after tree", pos)
    if isinstance(node, Leaf):
        raise err("tree must contain at least one phrase node", 0)
    return node


def write_brackets(trees: list[ConstTree]) -> str:
    """Serialize trees, one per line; inverse of :func:`read_brackets`."""
    return "".join(_render_node(t.root) + "\n" for t in trees)


def _render_node(node: Node) -> str:
    if isinstance(node, Leaf):
        return f"({node.pos} {node.form})"
    inner = " ".join(_render_node(c) for c in node.children)
    return f"({node.label} {inner})"
