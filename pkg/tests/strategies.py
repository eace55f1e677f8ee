"""Shared random generators and independent oracles for the test suite.

The oracles here deliberately re-derive properties from first principles
(pairwise loops, exhaustive walks) instead of calling the library helpers
they are used to check.
"""

from __future__ import annotations

import random
from itertools import product

from hypothesis import strategies as st

from synprobe.treebank import ConstTree, DepTree, Internal, Leaf

RELS = ["nsubj", "obj", "det", "amod", "punct", "root"]
NONTERMINALS = ["S", "NP", "VP", "PP", "ADJP", "SBAR", "X"]
POS_TAGS = ["DT", "NN", "VBZ", "JJ", "IN", "RB"]


# ---------------------------------------------------------------------------
# independent oracles

def oracle_is_valid_tree(heads: list[int]) -> bool:
    """Single root, in-range heads, no self loops, every token reaches 0."""
    n = len(heads)
    if n == 0 or sum(1 for h in heads if h == 0) != 1:
        return False
    for i, h in enumerate(heads, start=1):
        if h < 0 or h > n or h == i:
            return False
    for i in range(1, n + 1):
        seen = set()
        node = i
        while node != 0:
            if node in seen:
                return False
            seen.add(node)
            node = heads[node - 1]
    return True


def oracle_crossings(heads: list[int]) -> list[tuple]:
    """All crossing arc pairs, the root arc included."""
    arcs = [(h, d) for d, h in enumerate(heads, start=1)]
    out = []
    for i, a in enumerate(arcs):
        for b in arcs[i + 1 :]:
            (a1, a2), (b1, b2) = sorted(a), sorted(b)
            if a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2:
                out.append((a, b))
    return out


def oracle_is_projective(heads: list[int]) -> bool:
    return not oracle_crossings(heads)


def oracle_is_two_colorable(heads: list[int]) -> bool:
    """Brute-force 2-coloring of the arc crossing graph (root arc included)."""
    arcs = [(h, d) for d, h in enumerate(heads, start=1)]
    edges = []
    for i, a in enumerate(arcs):
        for j in range(i + 1, len(arcs)):
            (a1, a2), (b1, b2) = sorted(a), sorted(arcs[j])
            if a1 < b1 < a2 < b2 or b1 < a1 < b2 < a2:
                edges.append((i, j))
    color: dict[int, int] = {}
    adj: dict[int, list[int]] = {}
    for i, j in edges:
        adj.setdefault(i, []).append(j)
        adj.setdefault(j, []).append(i)
    for start in adj:
        if start in color:
            continue
        color[start] = 0
        stack = [start]
        while stack:
            node = stack.pop()
            for other in adj[node]:
                if other not in color:
                    color[other] = 1 - color[node]
                    stack.append(other)
                elif color[other] == color[node]:
                    return False
    return True


def all_valid_head_vectors(n: int):
    """Every single-rooted acyclic head vector on n tokens (exhaustive)."""
    for heads in product(range(0, n + 1), repeat=n):
        if oracle_is_valid_tree(list(heads)):
            yield list(heads)


def enumerate_projective_trees(n: int):
    """All projective single-rooted head vectors on n tokens.

    Recursive interval construction: a projective subtree over [lo, hi]
    rooted at r splits each side of r into consecutive child subtrees.
    """

    def interval_trees(lo: int, hi: int, root: int):
        # yields dicts {dep: head} for tokens in [lo, hi] minus the root
        positions = [p for p in range(lo, hi + 1) if p != root]
        if not positions:
            yield {}
            return
        left = [p for p in positions if p < root]
        right = [p for p in positions if p > root]
        for left_map in _side(left, root):
            for right_map in _side(right, root):
                yield {**left_map, **right_map}

    def _side(span: list[int], head: int):
        if not span:
            yield {}
            return
        lo, hi = span[0], span[-1]
        # choose the split of span into consecutive child blocks: each block
        # has a root attached to `head`
        for block_end in range(lo, hi + 1):
            for block_root in range(lo, block_end + 1):
                for inner in interval_trees(lo, block_end, block_root):
                    rest_span = list(range(block_end + 1, hi + 1))
                    for rest in _side(rest_span, head):
                        yield {block_root: head, **inner, **rest}

    for root in range(1, n + 1):
        for mapping in interval_trees(1, n, root):
            heads = [0] * n
            for dep, head in mapping.items():
                heads[dep - 1] = head
            yield heads


def random_tree_heads(rng: random.Random, n: int) -> list[int]:
    """Random single-rooted tree by attaching each node to an earlier one."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    heads = [0] * n
    for pos in range(1, n):
        heads[order[pos] - 1] = order[rng.randrange(pos)]
    return heads


def random_dep_tree(rng: random.Random, n: int) -> DepTree:
    heads = random_tree_heads(rng, n)
    deprels = [rng.choice(RELS[:-1]) for _ in range(n)]
    deprels[heads.index(0)] = "root"
    return DepTree.from_heads(heads, deprels)


def random_projective_heads(rng: random.Random, n: int) -> list[int]:
    """Directly sample a projective tree by recursive interval splitting."""

    def build(lo: int, hi: int, head_of_root: int, heads: list[int]) -> None:
        if lo > hi:
            return
        root = rng.randint(lo, hi)
        heads[root - 1] = head_of_root
        side(lo, root - 1, root, heads)
        side(root + 1, hi, root, heads)

    def side(lo: int, hi: int, head: int, heads: list[int]) -> None:
        if lo > hi:
            return
        split = rng.randint(lo, hi)
        build(lo, split, head, heads)
        side(split + 1, hi, head, heads)

    heads = [0] * n
    build(1, n, 0, heads)
    return heads


# ---------------------------------------------------------------------------
# hypothesis strategies

@st.composite
def dep_trees(draw, max_n: int = 12) -> DepTree:
    n = draw(st.integers(min_value=1, max_value=max_n))
    seed = draw(st.integers(min_value=0, max_value=2**31 - 1))
    return random_dep_tree(random.Random(seed), n)


def random_const_tree(rng: random.Random, n_leaves: int) -> ConstTree:
    counter = [0]

    def leaf() -> Leaf:
        counter[0] += 1
        return Leaf(f"w{counter[0]}", rng.choice(POS_TAGS))

    def build(k: int, depth: int):
        # wrap in 0-2 unary levels, then either a leaf or a split
        if k == 1:
            node = leaf()
            if rng.random() < 0.4:
                node = Internal(rng.choice(NONTERMINALS), (node,))
        else:
            cut_count = rng.randint(2, min(4, k))
            sizes = _random_composition(rng, k, cut_count)
            children = tuple(build(s, depth + 1) for s in sizes)
            node = Internal(rng.choice(NONTERMINALS), children)
        for _ in range(rng.randint(0, 2) if depth > 0 else 0):
            node = Internal(rng.choice(NONTERMINALS), (node,))
        return node

    root = build(n_leaves, 0)
    if isinstance(root, Leaf):
        root = Internal(rng.choice(NONTERMINALS), (root,))
    return ConstTree(root)


@st.composite
def const_trees(draw, max_leaves: int = 8) -> ConstTree:
    n_leaves = draw(st.integers(min_value=1, max_value=max_leaves))
    rng = random.Random(draw(st.integers(min_value=0, max_value=2**31 - 1)))
    return random_const_tree(rng, n_leaves)


def _random_composition(rng: random.Random, total: int, parts: int) -> list[int]:
    cuts = sorted(rng.sample(range(1, total), parts - 1))
    sizes = []
    prev = 0
    for cut in cuts + [total]:
        sizes.append(cut - prev)
        prev = cut
    return sizes
