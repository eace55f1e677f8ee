"""Constituent tree <-> per-token label codec based on shared spine depths.

A token's label is ``(delta, common, unary)``: the change in the number of
tree levels shared with the next word, the label of the lowest shared node,
and the token's private unary chain if it has one.  Unary chains of phrase
nodes elsewhere in the tree are collapsed into single ``+``-joined nodes
before encoding, which is what makes the code lossless; ``+`` is therefore
reserved and rejected in input phrase labels.

The decoder is total: any integer sequence is clamped into a feasible level
profile first, so fuzzed labels still produce a well-formed tree over all
words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from synprobe.treebank import ConstTree, Internal, Leaf, Node

__all__ = [
    "ConstLabel",
    "collapse_unaries",
    "restore_unaries",
    "encode_levels",
    "decode_levels",
    "repair_levels",
    "render_const_label",
    "parse_const_label",
    "write_const_labels",
    "read_const_labels",
    "FALLBACK_LABEL",
]

# Spine nodes a fuzzed label sequence never names still need some label.
FALLBACK_LABEL = "X"


@dataclass(frozen=True)
class ConstLabel:
    """Per-token constituent label.

    ``delta`` is relative to the previous token's absolute level; ``common``
    may be a ``+``-joined collapsed chain; ``unary`` is the token's leaf
    unary chain (pre-terminal excluded) or None.
    """

    delta: int
    common: str
    unary: str | None = None


def collapse_unaries(tree: ConstTree) -> ConstTree:
    """Merge unary chains of phrase nodes into single ``+``-joined nodes.

    A node with a single phrase child absorbs it repeatedly, so chains end
    either at a branching node (absorbed as the last chain element) or at a
    leaf (kept as the child).  A lone node directly over a leaf is left
    intact; it is the token's unary chain and travels in the ``u`` field.
    """
    return ConstTree(_collapse(tree.root), sent_id=tree.sent_id)


def _collapse(node: Node) -> Node:
    if isinstance(node, Leaf):
        return node
    label = node.label
    children = node.children
    while len(children) == 1 and isinstance(children[0], Internal):
        label = f"{label}+{children[0].label}"
        children = children[0].children
    return Internal(label, tuple(_collapse(c) for c in children))


def restore_unaries(tree: ConstTree) -> ConstTree:
    """Expand every ``+``-joined label back into a unary chain, top-down."""
    return ConstTree(_restore(tree.root), sent_id=tree.sent_id)


def _restore(node: Node) -> Node:
    if isinstance(node, Leaf):
        return node
    children = tuple(_restore(c) for c in node.children)
    parts = node.label.split("+")
    out: Node = Internal(parts[-1], children)
    for label in reversed(parts[:-1]):
        out = Internal(label, (out,))
    return out


def _leaf_paths(root: Internal) -> list[list[Internal]]:
    """Ancestor chains (root first, pre-terminals excluded) per leaf."""
    paths: list[list[Internal]] = []
    stack: list[Internal] = []

    def walk(node: Node) -> None:
        if isinstance(node, Leaf):
            paths.append(list(stack))
            return
        stack.append(node)
        for child in node.children:
            walk(child)
        stack.pop()

    walk(root)
    return paths


def encode_levels(tree: ConstTree) -> list[ConstLabel]:
    """Encode one label per word; requires phrase labels without ``+``."""
    if _has_reserved_joiner(tree.root):
        raise ValueError("phrase labels may not contain the reserved joiner '+'")
    collapsed = collapse_unaries(tree)
    paths = _leaf_paths(collapsed.root)
    n = len(paths)

    absolute: list[int] = []
    common: list[str] = []
    for i in range(n - 1):
        shared = 0
        for a, b in zip(paths[i], paths[i + 1]):
            if a is not b:
                break
            shared += 1
        absolute.append(shared)
        common.append(paths[i][shared - 1].label)
    absolute.append(1)
    common.append(collapsed.root.label)

    labels = []
    prev = 0
    for i in range(n):
        path = paths[i]
        unary: str | None = None
        # The node straight above the leaf is private to it when it covers
        # nothing else; the root only qualifies in one-word sentences, where
        # it is already carried by the common field.
        if len(path) > 1 and len(path[-1].children) == 1:
            unary = path[-1].label
        labels.append(ConstLabel(absolute[i] - prev, common[i], unary))
        prev = absolute[i]
    return labels


def _has_reserved_joiner(node: Node) -> bool:
    if isinstance(node, Leaf):
        return False
    return "+" in node.label or any(_has_reserved_joiner(c) for c in node.children)


def repair_levels(absolute: Sequence[int]) -> list[int]:
    """Clamp every level to >= 1 and force the final level to 1."""
    if len(absolute) < 1:
        raise ValueError("cannot repair an empty level profile")
    fixed = [max(1, a) for a in absolute]
    fixed[-1] = 1
    return fixed


class _Open:
    """A still-growing phrase node on the spine."""

    __slots__ = ("label", "children")

    def __init__(self) -> None:
        self.label: str | None = None
        self.children: list[Node] = []


def decode_levels(
    labels: Sequence[ConstLabel],
    words: Sequence[tuple[str, str]] | None = None,
) -> ConstTree:
    """Rebuild a tree from labels and the (form, pos) pairs of the sentence.

    Absolute levels come from the running sum of deltas, repaired to a
    feasible profile.  The spine of open nodes is grown or closed so that
    consecutive leaves share exactly the required number of ancestors; the
    node at the shared depth takes the label of the fencepost that first
    names it.
    """
    n = len(labels)
    if n == 0:
        raise ValueError("cannot decode an empty label sequence")
    if words is None:
        words = [(f"w{i}", "_") for i in range(1, n + 1)]
    if len(words) != n:
        raise ValueError(f"{n} labels but {len(words)} words")

    absolute = []
    total = 0
    for label in labels:
        total += label.delta
        absolute.append(total)
    absolute = repair_levels(absolute)

    spine: list[_Open] = []

    def close_down_to(depth: int) -> None:
        while len(spine) > depth + 1:
            done = spine.pop()
            node = Internal(done.label or FALLBACK_LABEL, tuple(done.children))
            parent = spine[-1]
            parent.children.append(node)

    root_holder = _Open()
    spine.append(root_holder)  # depth-0 sentinel collecting the root

    prev = 0
    for i in range(n):
        cur = absolute[i]
        attach_depth = max(prev, cur)
        while len(spine) - 1 < attach_depth:
            spine.append(_Open())
        leaf: Node = Leaf(words[i][0], words[i][1])
        if labels[i].unary:
            leaf = Internal(labels[i].unary, (leaf,))
        spine[attach_depth].children.append(leaf)
        if spine[cur].label is None:
            spine[cur].label = labels[i].common
        close_down_to(cur)
        prev = cur

    close_down_to(0)
    root = root_holder.children[0]
    assert isinstance(root, Internal)
    return restore_unaries(ConstTree(root))


# ---------------------------------------------------------------------------
# label text format

def render_const_label(label: ConstLabel) -> str:
    return f"{label.delta},{label.common},{label.unary or ''}"


def parse_const_label(text: str) -> ConstLabel:
    parts = text.split(",", 2)
    if len(parts) != 3:
        raise ValueError(f"bad constituent label {text!r}")
    delta_text, common, unary = parts
    try:
        delta = int(delta_text)
    except ValueError:
        raise ValueError(f"bad level delta in {text!r}") from None
    if not common:
        raise ValueError(f"empty common label in {text!r}")
    return ConstLabel(delta, common, unary or None)


def write_const_labels(sentences: Iterable[tuple[Sequence[str], Sequence[ConstLabel]]]) -> str:
    """``form<TAB>delta,common,unary`` lines, blank line between sentences."""
    chunks = []
    for forms, labels in sentences:
        lines = [
            f"{form}\t{render_const_label(label)}"
            for form, label in zip(forms, labels)
        ]
        chunks.append("\n".join(lines) + "\n\n")
    return "".join(chunks)


def read_const_labels(text: str) -> list[tuple[list[str], list[ConstLabel]]]:
    sentences: list[tuple[list[str], list[ConstLabel]]] = []
    forms: list[str] = []
    labels: list[ConstLabel] = []
    for raw in text.splitlines():
        line = raw.rstrip("\r")
        if not line.strip():
            if forms:
                sentences.append((forms, labels))
                forms, labels = [], []
            continue
        cols = line.split("\t")
        if len(cols) != 2:
            raise ValueError(f"expected 2 tab-separated columns, got {len(cols)}")
        forms.append(cols[0])
        labels.append(parse_const_label(cols[1]))
    if forms:
        sentences.append((forms, labels))
    return sentences
