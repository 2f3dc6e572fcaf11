"""Binary decision trees over a symbol alphabet.

A tree with M leaves has M-1 internal nodes numbered 1..M-1. Child references
are plain integers: a positive value is an internal node, a negative value
``~s`` is the leaf for symbol ``s``. In a key-comparable ("ordered") tree the
node number is also its key: node ``m`` tests ``s < m`` and the in-order leaf
sequence is 0..M-1, so the tree can be searched by comparisons alone.
Huffman trees are generally not ordered; for those the root-to-leaf paths are
stored explicitly.
"""

from __future__ import annotations

import heapq
import struct
from fractions import Fraction
from typing import Sequence

__all__ = [
    "DecisionTree",
    "build_bisection_tree",
    "build_tree_from_depths",
    "build_optimal_tree",
    "build_alphabetic_tree",
    "expected_tests",
    "sequential_tests",
]


class DecisionTree:
    """Binary tree with M leaves, stored as child arrays indexed by node number.

    Parameters
    ----------
    M : int
        Number of leaves (symbols).
    root : int
        Root node number.
    left, right : list of int
        Child references, length M (index 0 unused).
    """

    def __init__(self, M: int, root: int, left: list[int], right: list[int]):
        if M < 2:
            raise ValueError("a decision tree needs at least two leaves")
        self.M = M
        self.root = root
        self.left = left
        self.right = right
        self.paths: list[tuple[tuple[int, int], ...]] = [()] * M
        self.depths = [0] * M
        # (node, bit) pairs from the root; bit 0 means "go left"
        stack = [(root, ())]
        seen = 0
        while stack:
            ref, path = stack.pop()
            if ref < 0:
                s = ~ref
                self.paths[s] = path
                self.depths[s] = len(path)
                seen += 1
                continue
            stack.append((right[ref], path + ((ref, 1),)))
            stack.append((left[ref], path + ((ref, 0),)))
        if seen != M:
            raise ValueError("tree does not have exactly M leaves")
        self.ordered = self._check_ordered()

    def _check_ordered(self) -> bool:
        # in-order leaves must be 0..M-1 and each node number the first
        # symbol of its right subtree
        def walk(ref, lo):
            if ref < 0:
                return (~ref == lo), lo + 1
            ok_l, mid = walk(self.left[ref], lo)
            ok_r, hi = walk(self.right[ref], mid)
            return ok_l and ok_r and ref == mid, hi

        ok, _ = walk(self.root, 0)
        return ok

    def leaf_counts(self, node_counts: Sequence[int]) -> list[int]:
        """Recover leaf occurrence counts from per-node left-branch counters.

        ``node_counts[0]`` is the total; ``node_counts[n]`` the count that went
        left at node ``n``.
        """
        out = [0] * self.M
        stack = [(self.root, node_counts[0])]
        while stack:
            ref, total = stack.pop()
            if ref < 0:
                out[~ref] = total
                continue
            c = node_counts[ref]
            stack.append((self.left[ref], c))
            stack.append((self.right[ref], total - c))
        return out

    def node_counts(self, leaf_counts: Sequence[int]) -> list[int]:
        """Inverse of :meth:`leaf_counts`: left-branch totals per node."""
        out = [0] * self.M

        def total(ref):
            if ref < 0:
                return leaf_counts[~ref]
            a = total(self.left[ref])
            out[ref] = a
            return a + total(self.right[ref])

        out[0] = total(self.root)
        return out

    def to_bytes(self) -> bytes:
        """Preorder serialization: tag byte (0 node, 1 leaf) then u16 LE value."""
        parts = []
        stack = [self.root]
        while stack:
            ref = stack.pop()
            if ref < 0:
                parts.append(struct.pack("<BH", 1, ~ref))
            else:
                parts.append(struct.pack("<BH", 0, ref))
                stack.append(self.right[ref])
                stack.append(self.left[ref])
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes, offset: int = 0) -> tuple["DecisionTree", int]:
        """Parse a preorder serialization; returns the tree and the end offset."""
        nodes = []  # (is_leaf, value) in preorder
        pending = 1
        pos = offset
        while pending:
            if pos + 3 > len(data):
                raise ValueError("truncated tree serialization")
            tag, value = struct.unpack_from("<BH", data, pos)
            pos += 3
            if tag not in (0, 1):
                raise ValueError(f"bad tree node tag {tag}")
            nodes.append((tag == 1, value))
            pending += -1 if tag == 1 else 1
        M = sum(1 for leaf, _ in nodes if leaf)
        if M < 2:
            raise ValueError("tree needs at least two leaves")
        left = [0] * M
        right = [0] * M
        it = iter(nodes)

        def build():
            leaf, value = next(it)
            if leaf:
                if value >= M:
                    raise ValueError("leaf symbol out of range")
                return ~value
            if not 1 <= value < M or left[value] or right[value]:
                raise ValueError("bad internal node number")
            a = build()
            b = build()
            left[value], right[value] = a, b
            return value

        root = build()
        return cls(M, root, left, right), pos

    def __repr__(self) -> str:
        kind = "ordered" if self.ordered else "path"
        return f"DecisionTree(M={self.M}, root={self.root}, {kind})"


def build_bisection_tree(M: int) -> DecisionTree:
    """Balanced tree with midpoint keys ``m = (u + n) // 2``.

    >>> t = build_bisection_tree(6)
    >>> t.root, t.left[3], t.right[3]
    (3, 1, 4)
    """
    left = [0] * M
    right = [0] * M

    def build(u, n):
        if n - u == 1:
            return ~u
        m = (u + n) // 2
        left[m] = build(u, m)
        right[m] = build(m, n)
        return m

    if M < 2:
        raise ValueError("M must be at least 2")
    return DecisionTree(M, build(0, M), left, right)


def build_tree_from_depths(depths: Sequence[int]) -> DecisionTree | None:
    """Ordered tree whose leaf ``s`` sits at ``depths[s]``, if one exists.

    Adjacent equal-depth items are merged level by level, deepest first.
    Returns None when the depth sequence has no order-preserving tree.
    """
    M = len(depths)
    left = [0] * M
    right = [0] * M
    items = [(d, ~s, s) for s, d in enumerate(depths)]  # (depth, ref, first symbol)
    for level in range(max(depths), 0, -1):
        merged = []
        i = 0
        while i < len(items):
            d, ref, first = items[i]
            if d != level:
                merged.append(items[i])
                i += 1
                continue
            if i + 1 >= len(items) or items[i + 1][0] != level:
                return None
            _, ref2, first2 = items[i + 1]
            left[first2], right[first2] = ref, ref2
            merged.append((level - 1, first2, first))
            i += 2
        items = merged
    if len(items) != 1 or items[0][0] != 0:
        return None
    return DecisionTree(M, items[0][1], left, right)


def _huffman_depths(counts: Sequence[int]):
    # heap entries: (weight, lowest symbol, ref); children kept for the
    # unordered layout
    heap = [(w, s, ~s) for s, w in enumerate(counts)]
    heapq.heapify(heap)
    children = {}
    nxt = 0
    while len(heap) > 1:
        wa, la, a = heapq.heappop(heap)
        wb, lb, b = heapq.heappop(heap)
        nxt += 1
        children[nxt] = (a, b)
        heapq.heappush(heap, (wa + wb, min(la, lb), nxt))
    root = heap[0][2]
    depths = [0] * len(counts)
    stack = [(root, 0)]
    while stack:
        ref, d = stack.pop()
        if ref < 0:
            depths[~ref] = d
        else:
            a, b = children[ref]
            stack.append((a, d + 1))
            stack.append((b, d + 1))
    return depths, root, children


def build_optimal_tree(counts: Sequence[int]) -> DecisionTree:
    """Huffman tree over the leaf weights.

    Ties are broken by (weight, lowest symbol index). When the Huffman depths
    admit an order-preserving arrangement (always the case for counts sorted
    by size) the ordered tree is returned; otherwise node numbers follow the
    preorder of the Huffman merge tree and paths must be used for coding.
    """
    if len(counts) < 2:
        raise ValueError("need at least two symbols")
    if any(c <= 0 for c in counts):
        raise ValueError("counts must be positive")
    depths, root, children = _huffman_depths(counts)
    tree = build_tree_from_depths(depths)
    if tree is not None:
        return tree
    M = len(counts)
    left = [0] * M
    right = [0] * M
    number = {}

    def renumber(ref):
        if ref < 0:
            return ref
        number[ref] = len(number) + 1
        me = number[ref]
        a, b = children[ref]
        left[me] = renumber(a)
        right[me] = renumber(b)
        return me

    return DecisionTree(M, renumber(root), left, right)


def build_alphabetic_tree(weights: Sequence[int]) -> DecisionTree:
    """Minimum expected-depth tree among ordered (searchable) trees.

    Dynamic programme over leaf ranges with Knuth's root monotonicity,
    O(M^2). Equal costs resolve to the smallest split key.
    """
    M = len(weights)
    if M < 2:
        raise ValueError("need at least two symbols")
    prefix = [0]
    for w in weights:
        prefix.append(prefix[-1] + w)
    cost = [[0] * (M + 1) for _ in range(M + 1)]
    split = [[0] * (M + 1) for _ in range(M + 1)]
    for i in range(M - 1):
        cost[i][i + 2] = prefix[i + 2] - prefix[i]
        split[i][i + 2] = i + 1
    for size in range(3, M + 1):
        for i in range(M - size + 1):
            j = i + size
            best = None
            best_k = 0
            ci = cost[i]
            for k in range(split[i][j - 1], split[i + 1][j] + 1):
                c = ci[k] + cost[k][j]
                if best is None or c < best:
                    best, best_k = c, k
            cost[i][j] = best + prefix[j] - prefix[i]
            split[i][j] = best_k
    left = [0] * M
    right = [0] * M

    def build(i, j):
        if j - i == 1:
            return ~i
        k = split[i][j]
        left[k] = build(i, k)
        right[k] = build(k, j)
        return k

    return DecisionTree(M, build(0, M), left, right)


def _probabilities(p) -> list:
    return list(getattr(p, "p", p))


def expected_tests(tree: DecisionTree, p) -> float:
    """Average number of binary decisions, ``sum p(s) * depth(s)``."""
    probs = _probabilities(p)
    if len(probs) != tree.M:
        raise ValueError("distribution size does not match tree")
    return float(sum(Fraction(x) * d for x, d in zip(probs, tree.depths)))


def sequential_tests(p) -> float:
    """Average comparisons of a downward sequential search, ``sum p(m)(M - m)``.

    The search starting at M-1 stops at symbol s after M - s comparisons,
    counting the final comparison against C(0) for s = 0.
    """
    probs = _probabilities(p)
    M = len(probs)
    return float(sum(Fraction(x) * (M - m) for m, x in enumerate(probs)))
