"""Dependency tree <-> per-token label codecs, with total decoders.

Three label families are supported:

* ``relhead`` -- the arc part is the signed offset from a token to its head
  (``+2`` = two words to the right); the root token stores ``-i``.
* ``2planar`` -- the arc part is a bracket string over two independent,
  internally non-crossing planes; second-plane symbol groups carry a
  trailing ``*``.
* ``archybrid`` -- the arc part is the chunk of shift-reduce transitions
  (arc-hybrid system) triggered while reading the token, e.g. ``SH_LA``.

Every decoder accepts any well-formed label sequence and always returns a
valid single-rooted tree: impossible arcs are dropped and
:func:`repair_tree` fills the gaps deterministically.
"""

from __future__ import annotations

import re
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from synprobe.treebank import DepTree

__all__ = [
    "DepLabel",
    "BracketArc",
    "PlaneAssignment",
    "LabelFormatError",
    "DEP_ENCODINGS",
    "encode_rel_head",
    "decode_rel_head",
    "assign_planes",
    "encode_2planar",
    "decode_2planar",
    "projectivize",
    "is_projective",
    "oracle_arc_hybrid",
    "encode_arc_hybrid",
    "decode_arc_hybrid",
    "repair_tree",
    "encode_dep_tree",
    "decode_dep_labels",
    "write_dep_labels",
    "read_dep_labels",
]

DEP_ENCODINGS = ("relhead", "2planar", "archybrid")

SHIFT = "SH"
LEFT_ARC = "LA"
RIGHT_ARC = "RA"


class LabelFormatError(ValueError):
    """An arc part does not conform to the grammar of its encoding."""


@dataclass(frozen=True)
class DepLabel:
    """One token's label: the encoding-specific arc part plus the relation."""

    arc_part: str
    rel_part: str


@dataclass(frozen=True)
class BracketArc:
    """Per-plane bracket strings, each matching ``(<)? (\\)* (/)* (>)?``."""

    plane1: str = ""
    plane2: str = ""


@dataclass
class PlaneAssignment:
    """Plane id (1 or 2) per arc, plus arcs not representable in two planes."""

    plane: dict[tuple[int, int], int]
    dropped: set[tuple[int, int]]


# ---------------------------------------------------------------------------
# arcs and crossings

def tree_arcs(tree: DepTree, *, include_root: bool = True) -> list[tuple[int, int]]:
    """All (head, dependent) pairs; the root arc has head 0."""
    return [
        (t.head, t.index)
        for t in tree.tokens
        if include_root or t.head != 0
    ]


def arcs_cross(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """True when the spans interleave strictly; shared endpoints never cross."""
    (a1, a2), (b1, b2) = sorted(a), sorted(b)
    return a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2


# ---------------------------------------------------------------------------
# head-selection encoding

def _format_offset(offset: int) -> str:
    return f"+{offset}" if offset > 0 else str(offset)


def _parse_offset(text: str) -> int:
    if not re.fullmatch(r"[+-]?\d+", text):
        raise LabelFormatError(f"bad relative-head offset {text!r}")
    value = int(text)
    if value == 0:
        raise LabelFormatError("relative-head offset must be non-zero")
    return value


def encode_rel_head(tree: DepTree) -> list[DepLabel]:
    """Offset labels: head minus token index, so a root token stores ``-i``."""
    return [
        DepLabel(_format_offset(t.head - t.index), t.deprel) for t in tree.tokens
    ]


def decode_rel_head(
    labels: Sequence[DepLabel],
    forms: Sequence[str] | None = None,
    upos: Sequence[str] | None = None,
    default_rel: str = "dep",
) -> DepTree:
    n = len(labels)
    heads: list[int | None] = []
    for i, label in enumerate(labels, start=1):
        target = i + _parse_offset(label.arc_part)
        heads.append(target if 1 <= target <= n and target != i else None)
    rels = [label.rel_part or None for label in labels]
    return repair_tree(heads, rels, forms=forms, upos=upos, default_rel=default_rel)


# ---------------------------------------------------------------------------
# two-planar bracket encoding

def assign_planes(tree: DepTree) -> PlaneAssignment:
    """Greedy 2-coloring of the arc crossing graph.

    Arcs are visited by (left endpoint, length); each uncolored component is
    seeded on plane 1 and neighbors are forced breadth-first onto the other
    plane.  An arc receiving contradictory forces is dropped.  The root arc
    takes part in the coloring (it occupies a plane even though it emits no
    brackets), so arcs crossing it land on plane 2.
    """
    arcs = sorted(tree_arcs(tree), key=lambda a: (min(a), abs(a[0] - a[1]), a))
    neighbors: dict[tuple[int, int], list[tuple[int, int]]] = {a: [] for a in arcs}
    for i, a in enumerate(arcs):
        for b in arcs[i + 1 :]:
            if arcs_cross(a, b):
                neighbors[a].append(b)
                neighbors[b].append(a)

    plane: dict[tuple[int, int], int] = {}
    dropped: set[tuple[int, int]] = set()
    for seed in arcs:
        if seed in plane or seed in dropped:
            continue
        plane[seed] = 1
        queue = deque([seed])
        while queue:
            current = queue.popleft()
            if current in dropped:
                continue
            forced = 3 - plane[current]
            for other in neighbors[current]:
                if other in dropped:
                    continue
                if other not in plane:
                    plane[other] = forced
                    queue.append(other)
                elif plane[other] != forced:
                    dropped.add(other)
                    del plane[other]
    return PlaneAssignment(plane=plane, dropped=dropped)


def encode_2planar(tree: DepTree) -> list[DepLabel]:
    """Bracket labels: each label describes arc endpoints around one token.

    For an arc (h, d): a left arc (d < h) writes ``<`` into label d+1 and one
    ``\\`` into label h; a right arc (h < d) writes ``/`` into label h+1 and
    ``>`` into label d.  The root arc and dropped arcs emit nothing.
    """
    n = len(tree)
    assignment = assign_planes(tree)
    parts: list[list[dict[str, int]]] = [
        [{"<": 0, "\\": 0, "/": 0, ">": 0} for _ in range(2)] for _ in range(n + 2)
    ]
    for arc, plane in assignment.plane.items():
        h, d = arc
        if h == 0:
            continue
        p = plane - 1
        if d < h:
            parts[d + 1][p]["<"] += 1
            parts[h][p]["\\"] += 1
        else:
            parts[h + 1][p]["/"] += 1
            parts[d][p][">"] += 1

    labels = []
    for t in tree.tokens:
        planes = []
        for p in range(2):
            c = parts[t.index][p]
            planes.append("<" * c["<"] + "\\" * c["\\"] + "/" * c["/"] + ">" * c[">"])
        labels.append(DepLabel(_render_bracket_arc(BracketArc(*planes)), t.deprel))
    return labels


def _render_bracket_arc(arc: BracketArc) -> str:
    """Plane-1 symbols verbatim, then each plane-2 symbol with a ``*``.

    Per-symbol stars keep the flat rendering parseable even when plane 1
    ends and plane 2 begins with the same bracket symbol.
    """
    starred = "".join(ch + "*" for ch in arc.plane2)
    return arc.plane1 + starred


_PLANE_GRAMMAR = re.compile(r"<?\\*/*>?")


def parse_bracket_arc(text: str) -> BracketArc:
    planes = {1: [], 2: []}
    i = 0
    while i < len(text):
        ch = text[i]
        if ch not in "<\\/>":
            raise LabelFormatError(f"bad bracket symbol {ch!r} in {text!r}")
        if i + 1 < len(text) and text[i + 1] == "*":
            planes[2].append(ch)
            i += 2
        else:
            planes[1].append(ch)
            i += 1
    arc = BracketArc("".join(planes[1]), "".join(planes[2]))
    for plane in (arc.plane1, arc.plane2):
        if _PLANE_GRAMMAR.fullmatch(plane) is None:
            raise LabelFormatError(f"bracket string {text!r} violates the plane grammar")
    return arc


def decode_2planar(
    labels: Sequence[DepLabel],
    forms: Sequence[str] | None = None,
    upos: Sequence[str] | None = None,
    default_rel: str = "dep",
) -> DepTree:
    """Match brackets per plane and repair whatever is left unmatched.

    Both directions use most-recent-first matching: a ``\\`` in label i takes
    the newest pending ``<`` (an arc from i leftward), a ``>`` takes the
    newest pending ``/``.  Within a plane arcs may not cross, which makes the
    newest pending bracket the only choice consistent with decodability.
    """
    n = len(labels)
    arcs = [parse_bracket_arc(label.arc_part) for label in labels]
    heads: list[int | None] = [None] * n

    for p in range(2):
        waiting_head: list[int] = []  # tokens with a pending '<' (head to the right)
        waiting_dep: list[int] = []  # tokens with a pending '/' (dependent to the right)
        for i in range(1, n + 1):
            plane = arcs[i - 1].plane1 if p == 0 else arcs[i - 1].plane2
            for ch in plane:
                if ch == "<":
                    if i - 1 >= 1:
                        waiting_head.append(i - 1)
                elif ch == "\\":
                    if waiting_head:
                        dep = waiting_head.pop()
                        if heads[dep - 1] is None:
                            heads[dep - 1] = i
                elif ch == "/":
                    if i - 1 >= 1:
                        waiting_dep.append(i - 1)
                elif ch == ">":
                    if waiting_dep:
                        head = waiting_dep.pop()
                        if heads[i - 1] is None:
                            heads[i - 1] = head

    rels = [label.rel_part or None for label in labels]
    return repair_tree(heads, rels, forms=forms, upos=upos, default_rel=default_rel)


# ---------------------------------------------------------------------------
# projectivity and the arc-hybrid transition system

def is_projective(tree: DepTree) -> bool:
    """True when no two arcs cross, the root arc included."""
    arcs = tree_arcs(tree)
    return not any(
        arcs_cross(a, b) for i, a in enumerate(arcs) for b in arcs[i + 1 :]
    )


def projectivize(tree: DepTree) -> DepTree:
    """Lift crossing arcs onto grandparents until the tree is projective.

    The shortest crossing arc is lifted first (ties: leftmost dependent).
    Arcs hanging directly off the root token are never lifted -- their lift
    target would be a second root -- so their crossing partner moves instead.
    """
    heads = list(tree.heads)
    n = len(heads)
    while True:
        arcs = [(heads[d - 1], d) for d in range(1, n + 1)]
        crossing: set[tuple[int, int]] = set()
        for i, a in enumerate(arcs):
            for b in arcs[i + 1 :]:
                if arcs_cross(a, b):
                    crossing.add(a)
                    crossing.add(b)
        liftable = [
            (h, d)
            for (h, d) in crossing
            if h != 0 and heads[h - 1] != 0
        ]
        if not crossing:
            break
        if not liftable:
            break  # cannot happen for valid trees; guards fuzzed input
        h, d = min(liftable, key=lambda arc: (abs(arc[0] - arc[1]), arc[1]))
        heads[d - 1] = heads[h - 1]
    out = DepTree.from_heads(heads, list(tree.deprels), list(tree.forms), list(tree.upos))
    out.sent_id = tree.sent_id
    return out


def oracle_arc_hybrid(tree: DepTree) -> list[str]:
    """Static oracle: the transition sequence deriving a projective tree.

    LEFT_ARC attaches the stack top to the buffer front, RIGHT_ARC to the
    second stack item; either fires only once the top has collected all its
    dependents.  The root arc is implied by the terminal state (empty buffer,
    root token alone on the stack), not emitted as a transition.
    """
    n = len(tree)
    heads = tree.heads
    ndeps = [0] * (n + 1)
    for h in heads:
        if h != 0:
            ndeps[h] += 1
    attached = [0] * (n + 1)

    stack: list[int] = []
    buffer_pos = 1
    transitions: list[str] = []
    while True:
        top = stack[-1] if stack else None
        front = buffer_pos if buffer_pos <= n else None
        if (
            top is not None
            and front is not None
            and heads[top - 1] == front
            and attached[top] == ndeps[top]
        ):
            transitions.append(LEFT_ARC)
            attached[front] += 1
            stack.pop()
        elif (
            top is not None
            and len(stack) >= 2
            and heads[top - 1] == stack[-2]
            and attached[top] == ndeps[top]
        ):
            transitions.append(RIGHT_ARC)
            attached[stack[-2]] += 1
            stack.pop()
        elif front is not None:
            transitions.append(SHIFT)
            stack.append(front)
            buffer_pos += 1
        else:
            break
    if len(stack) != 1 or heads[stack[0] - 1] != 0:
        raise ValueError("tree is not projective; projectivize it first")
    return transitions


def encode_arc_hybrid(tree: DepTree) -> list[DepLabel]:
    """Transition-chunk labels; the tree is projectivized internally.

    The transition list is split at every SHIFT: chunk i runs from the i-th
    SHIFT up to (not including) the next one, with the last chunk absorbing
    the tail.  Relations come from the original, unprojectivized tree.
    """
    transitions = oracle_arc_hybrid(projectivize(tree))
    chunks: list[list[str]] = []
    for t in transitions:
        if t == SHIFT:
            chunks.append([t])
        else:
            chunks[-1].append(t)
    return [
        DepLabel("_".join(chunk), token.deprel)
        for chunk, token in zip(chunks, tree.tokens)
    ]


def _parse_transitions(text: str) -> list[str]:
    parts = text.split("_")
    if any(p not in (SHIFT, LEFT_ARC, RIGHT_ARC) for p in parts):
        raise LabelFormatError(f"bad transition chunk {text!r}")
    if parts[0] != SHIFT or parts.count(SHIFT) != 1:
        raise LabelFormatError(f"chunk {text!r} must contain exactly one leading SH")
    return parts


def decode_arc_hybrid(
    labels: Sequence[DepLabel],
    forms: Sequence[str] | None = None,
    upos: Sequence[str] | None = None,
    default_rel: str = "dep",
) -> DepTree:
    """Replay the concatenated chunks, skipping impossible transitions."""
    n = len(labels)
    transitions: list[str] = []
    for label in labels:
        transitions.extend(_parse_transitions(label.arc_part))

    heads: list[int | None] = [None] * n
    stack: list[int] = []
    buffer_pos = 1
    for t in transitions:
        if t == SHIFT:
            if buffer_pos <= n:
                stack.append(buffer_pos)
                buffer_pos += 1
        elif t == LEFT_ARC:
            if stack and buffer_pos <= n:
                dep = stack.pop()
                heads[dep - 1] = buffer_pos
        elif t == RIGHT_ARC:
            if len(stack) >= 2:
                dep = stack.pop()
                heads[dep - 1] = stack[-1]

    rels = [label.rel_part or None for label in labels]
    return repair_tree(heads, rels, forms=forms, upos=upos, default_rel=default_rel)


# ---------------------------------------------------------------------------
# repair

def repair_tree(
    heads: Sequence[int | None],
    rels: Sequence[str | None] | None = None,
    forms: Sequence[str] | None = None,
    upos: Sequence[str] | None = None,
    default_rel: str = "dep",
) -> DepTree:
    """Turn an arbitrary partial head map into a valid single-rooted tree.

    In order: out-of-range and self heads are discarded; a root is promoted
    if nobody claims it (leftmost headless token, else leftmost token);
    surplus root claims reattach to the kept root; remaining headless tokens
    attach to the root; each cycle is broken at its node positionally nearest
    the root.  Missing relations default to ``default_rel``.
    """
    n = len(heads)
    if n < 1:
        raise ValueError("cannot repair an empty sentence")
    fixed: list[int | None] = []
    for i, h in enumerate(heads, start=1):
        if h is None or h < 0 or h > n or h == i:
            fixed.append(None)
        else:
            fixed.append(h)

    claimants = [i for i in range(1, n + 1) if fixed[i - 1] == 0]
    if not claimants:
        headless = [i for i in range(1, n + 1) if fixed[i - 1] is None]
        root = headless[0] if headless else 1
        fixed[root - 1] = 0
    else:
        root = claimants[0]
        for other in claimants[1:]:
            fixed[other - 1] = root

    for i in range(1, n + 1):
        if fixed[i - 1] is None:
            fixed[i - 1] = root if i != root else 0

    final: list[int] = [h for h in fixed]  # type: ignore[misc]
    state = [0] * (n + 1)
    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        node = start
        while node != 0 and state[node] == 0:
            state[node] = 1
            path.append(node)
            node = final[node - 1]
        if node != 0 and state[node] == 1:
            cycle = path[path.index(node) :]
            cut = min(cycle, key=lambda u: (abs(u - root), u))
            final[cut - 1] = root
        for p in path:
            state[p] = 2

    rels = rels if rels is not None else [None] * n
    out_rels = [r if r else default_rel for r in rels]
    return DepTree.from_heads(
        final,
        out_rels,
        list(forms) if forms is not None else None,
        list(upos) if upos is not None else None,
    )


# ---------------------------------------------------------------------------
# one entry point per direction, plus the label text format

_DEP_ENCODERS = {
    "relhead": encode_rel_head,
    "2planar": encode_2planar,
    "archybrid": encode_arc_hybrid,
}

_DEP_DECODERS = {
    "relhead": decode_rel_head,
    "2planar": decode_2planar,
    "archybrid": decode_arc_hybrid,
}


def encode_dep_tree(tree: DepTree, encoding: str) -> list[DepLabel]:
    try:
        return _DEP_ENCODERS[encoding](tree)
    except KeyError:
        raise ValueError(f"unknown dependency encoding {encoding!r}") from None


def decode_dep_labels(
    labels: Sequence[DepLabel],
    encoding: str,
    forms: Sequence[str] | None = None,
    upos: Sequence[str] | None = None,
    default_rel: str = "dep",
) -> DepTree:
    try:
        decoder = _DEP_DECODERS[encoding]
    except KeyError:
        raise ValueError(f"unknown dependency encoding {encoding!r}") from None
    return decoder(labels, forms=forms, upos=upos, default_rel=default_rel)


def write_dep_labels(sentences: Iterable[tuple[Sequence[str], Sequence[DepLabel]]]) -> str:
    """``form<TAB>arc_part<TAB>rel_part`` lines, blank line between sentences."""
    chunks = []
    for forms, labels in sentences:
        lines = [
            f"{form}\t{label.arc_part}\t{label.rel_part}"
            for form, label in zip(forms, labels)
        ]
        chunks.append("\n".join(lines) + "\n\n")
    return "".join(chunks)


def read_dep_labels(text: str) -> list[tuple[list[str], list[DepLabel]]]:
    sentences: list[tuple[list[str], list[DepLabel]]] = []
    forms: list[str] = []
    labels: list[DepLabel] = []
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\r")
        if not line.strip():
            if forms:
                sentences.append((forms, labels))
                forms, labels = [], []
            continue
        cols = line.split("\t")
        if len(cols) != 3:
            raise LabelFormatError(
                f"expected 3 tab-separated columns at line {line_no}, got {len(cols)}"
            )
        forms.append(cols[0])
        labels.append(DepLabel(cols[1], cols[2]))
    if forms:
        sentences.append((forms, labels))
    return sentences
