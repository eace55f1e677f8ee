"""Evaluation: LAS, labeled bracketing F1, error reduction, and breakdowns.

All tokens count toward LAS (no punctuation filtering), matching evaluation
over syntactic words.  Bracket scoring works on labeled (label, start, end)
span multisets of the uncollapsed trees, pre-terminals excluded and the root
span excluded.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from synprobe.treebank import ConstTree, DepTree, Leaf, Node

__all__ = [
    "DepScore",
    "BracketScore",
    "BreakdownEntry",
    "BreakdownTable",
    "las",
    "bracket_f1",
    "error_reduction",
    "f1_by_displacement",
    "f1_by_span_length",
    "labeled_spans",
]


@dataclass(frozen=True)
class DepScore:
    las: float
    uas: float
    correct_both: int
    correct_head: int
    total: int

    @classmethod
    def from_counts(cls, correct_both: int, correct_head: int, total: int) -> "DepScore":
        return cls(
            las=100.0 * correct_both / total if total else 0.0,
            uas=100.0 * correct_head / total if total else 0.0,
            correct_both=correct_both,
            correct_head=correct_head,
            total=total,
        )


@dataclass(frozen=True)
class BracketScore:
    precision: float
    recall: float
    f1: float
    matched: int
    predicted: int
    gold: int

    @classmethod
    def from_counts(cls, matched: int, predicted: int, gold: int) -> "BracketScore":
        p = 100.0 * matched / predicted if predicted else 0.0
        r = 100.0 * matched / gold if gold else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        return cls(precision=p, recall=r, f1=f, matched=matched, predicted=predicted, gold=gold)


@dataclass(frozen=True)
class BreakdownEntry:
    key: int
    f1: float
    support: int


@dataclass(frozen=True)
class BreakdownTable:
    kind: str
    min_support: int
    entries: tuple[BreakdownEntry, ...]

    def keys(self) -> list[int]:
        return [e.key for e in self.entries]


def las(gold: Sequence[DepTree], pred: Sequence[DepTree]) -> DepScore:
    """Token-level attachment scores over aligned tree lists."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold sentences vs {len(pred)} predicted")
    both = head_only = total = 0
    for idx, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise ValueError(
                f"sentence {idx}: {len(g)} gold tokens vs {len(p)} predicted"
            )
        for gt, pt in zip(g.tokens, p.tokens):
            total += 1
            if gt.head == pt.head:
                head_only += 1
                if gt.deprel == pt.deprel:
                    both += 1
    return DepScore.from_counts(both, head_only, total)


def labeled_spans(tree: ConstTree) -> Counter:
    """Multiset of (label, start, end) over phrase nodes, root excluded."""
    spans: Counter = Counter()

    def walk(node: Node, start: int, is_root: bool) -> int:
        if isinstance(node, Leaf):
            return start + 1
        end = start
        for child in node.children:
            end = walk(child, end, False)
        if not is_root:
            spans[(node.label, start, end)] += 1
        return end

    walk(tree.root, 0, True)
    return spans


def bracket_f1(gold: Sequence[ConstTree], pred: Sequence[ConstTree]) -> BracketScore:
    """Labeled bracketing F1 over aligned tree lists with equal frontiers."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold sentences vs {len(pred)} predicted")
    matched = predicted = gold_total = 0
    for idx, (g, p) in enumerate(zip(gold, pred)):
        if g.forms != p.forms:
            raise ValueError(f"sentence {idx}: leaf sequences differ")
        gs = labeled_spans(g)
        ps = labeled_spans(p)
        gold_total += sum(gs.values())
        predicted += sum(ps.values())
        matched += sum((gs & ps).values())
    return BracketScore.from_counts(matched, predicted, gold_total)


def error_reduction(a: float, b: float) -> float:
    """Share of the error remaining at score ``a`` that is gone at ``b``.

    ``100 * (b - a) / (100 - a)``; negative when ``b`` is worse than ``a``.
    """
    if not 0.0 <= a < 100.0:
        raise ValueError(f"baseline score must be in [0, 100), got {a}")
    if not 0.0 <= b <= 100.0:
        raise ValueError(f"comparison score must be in [0, 100], got {b}")
    return 100.0 * (b - a) / (100.0 - a)


def f1_by_displacement(
    gold: Sequence[DepTree],
    pred: Sequence[DepTree],
    min_support: int = 10,
) -> BreakdownTable:
    """Per-displacement F1 over labeled arcs, keyed by head minus dependent.

    Every gold token contributes one arc (root arcs included).  For each
    displacement the gold arcs with it form the positive class; a predicted
    arc counts toward the same key when its head yields that displacement,
    and it is a true positive when head and relation both match gold.  Keys
    supported by fewer than ``min_support`` gold arcs are dropped.
    """
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold sentences vs {len(pred)} predicted")
    support: Counter = Counter()
    predicted: Counter = Counter()
    correct: Counter = Counter()
    for idx, (g, p) in enumerate(zip(gold, pred)):
        if len(g) != len(p):
            raise ValueError(
                f"sentence {idx}: {len(g)} gold tokens vs {len(p)} predicted"
            )
        for gt, pt in zip(g.tokens, p.tokens):
            g_disp = gt.head - gt.index
            p_disp = pt.head - pt.index
            support[g_disp] += 1
            predicted[p_disp] += 1
            if g_disp == p_disp and gt.deprel == pt.deprel:
                correct[g_disp] += 1
    return _breakdown("displacement", support, predicted, correct, min_support)


def f1_by_span_length(
    gold: Sequence[ConstTree],
    pred: Sequence[ConstTree],
    min_support: int = 10,
) -> BreakdownTable:
    """Per-length F1 over labeled spans (same span set as :func:`bracket_f1`)."""
    if len(gold) != len(pred):
        raise ValueError(f"{len(gold)} gold sentences vs {len(pred)} predicted")
    support: Counter = Counter()
    predicted: Counter = Counter()
    correct: Counter = Counter()
    for idx, (g, p) in enumerate(zip(gold, pred)):
        if g.forms != p.forms:
            raise ValueError(f"sentence {idx}: leaf sequences differ")
        gs = labeled_spans(g)
        ps = labeled_spans(p)
        for (_, start, end), count in gs.items():
            support[end - start] += count
        for (_, start, end), count in ps.items():
            predicted[end - start] += count
        for span, count in (gs & ps).items():
            correct[span[2] - span[1]] += count
    return _breakdown("span_length", support, predicted, correct, min_support)


def _breakdown(
    kind: str,
    support: Counter,
    predicted: Counter,
    correct: Counter,
    min_support: int,
) -> BreakdownTable:
    entries = []
    for key in sorted(support):
        if support[key] < min_support:
            continue
        tp = correct[key]
        p = 100.0 * tp / predicted[key] if predicted[key] else 0.0
        r = 100.0 * tp / support[key]
        f = 2 * p * r / (p + r) if p + r else 0.0
        entries.append(BreakdownEntry(key=key, f1=f, support=support[key]))
    return BreakdownTable(kind=kind, min_support=min_support, entries=tuple(entries))
