"""Equidistant trees, Newick text and ultrametric vectors."""
from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.cluster.hierarchy import cophenet, linkage
from scipy.spatial.distance import squareform

from .const import LOGGER, RECONSTRUCTION_TOL, ULTRAMETRIC_TOL
from .exceptions import (
    BadDimensionError,
    DuplicateLabelError,
    InvalidParameterError,
    NonFiniteError,
    NotUltrametricError,
    ParseError,
    TooFewLeavesError,
)
from .helpers import triangular_root

_DELIMITERS = "(),:;"


def default_labels(m: int) -> tuple[str, ...]:
    """Return zero-padded labels "1".."m" that sort in numeric order."""
    width = len(str(m))
    return tuple(str(i).zfill(width) for i in range(1, m + 1))


def pair_labels(labels: Sequence[str]) -> list[str]:
    """Return "a|b" for every pair of sorted labels, in vector order."""
    return [f"{a}|{b}" for a, b in combinations(sorted(labels), 2)]


def labels_from_pairs(pairs: Sequence[str]) -> tuple[str, ...]:
    """Recover the leaf labels from a pair-label header."""
    labels: list[str] = []
    for pair in pairs:
        for label in pair.split("|"):
            if label not in labels:
                labels.append(label)
    labels.sort()
    if pair_labels(labels) != list(pairs):
        raise ParseError("pair-label header is not in sorted pair order", 0)
    return tuple(labels)


def _format_length(x: float) -> str:
    short = f"{x:g}"
    return short if float(short) == x else repr(float(x))


@dataclass(eq=False)
class Node:
    """A tree node with the length of the edge to its parent."""

    label: str | None = None
    length: float = 0.0
    children: list[Node] = field(default_factory=list)
    parent: Node | None = field(default=None, repr=False)

    @property
    def is_leaf(self) -> bool:
        """Whether the node has no children."""
        return not self.children

    def add_child(self, child: Node) -> None:
        """Attach child below this node."""
        child.parent = self
        self.children.append(child)

    def walk(self) -> Iterator[Node]:
        """Yield the node and its descendants in preorder."""
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            stack.extend(reversed(node.children))

    def to_newick(self) -> str:
        """Return the Newick text of the subtree, without the terminator."""
        text = self.label or ""
        if self.children:
            text = "(" + ",".join(child.to_newick() for child in self.children) + ")" + text
        if self.parent is not None or self.length:
            text += ":" + _format_length(self.length)
        return text


@dataclass(eq=False)
class RootedTree:
    """A rooted tree with branch lengths and unique leaf labels."""

    root: Node

    def leaves(self) -> list[Node]:
        """Return the leaves in preorder."""
        return [node for node in self.root.walk() if node.is_leaf]

    @property
    def labels(self) -> list[str]:
        """Leaf labels in preorder."""
        return [leaf.label or "" for leaf in self.leaves()]

    def depths(self) -> dict[int, float]:
        """Return the root distance of every node, keyed by id."""
        depth = {id(self.root): 0.0}
        for node in self.root.walk():
            for child in node.children:
                depth[id(child)] = depth[id(node)] + child.length
        return depth

    def is_equidistant(self, tol: float = ULTRAMETRIC_TOL) -> bool:
        """Whether every leaf is at the same distance from the root."""
        depth = self.depths()
        values = [depth[id(leaf)] for leaf in self.leaves()]
        return max(values) - min(values) <= tol

    def to_newick(self) -> str:
        """Return the tree as a Newick string."""
        return self.root.to_newick() + ";"


def write_newick(tree: RootedTree) -> str:
    """Serialize a tree to Newick text."""
    return tree.to_newick()


class _NewickParser:
    """Recursive-descent parser over one Newick string."""

    def __init__(self, text: str) -> None:
        self.text = text
        self.pos = 0

    def offset(self, pos: int | None = None) -> int:
        """Byte offset of a character position."""
        return len(self.text[: self.pos if pos is None else pos].encode("utf-8"))

    def error(self, message: str, pos: int | None = None) -> ParseError:
        return ParseError(message, self.offset(pos))

    def skip_space(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_space()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_tree(self) -> RootedTree:
        root = self.parse_subtree()
        if self.peek() != ";":
            raise self.error("expected ';'")
        self.pos += 1
        return RootedTree(root)

    def parse_subtree(self) -> Node:
        node = Node()
        if self.peek() == "(":
            self.pos += 1
            node.add_child(self.parse_subtree())
            while self.peek() == ",":
                self.pos += 1
                node.add_child(self.parse_subtree())
            if self.peek() != ")":
                raise self.error("expected ',' or ')'")
            self.pos += 1
            node.label = self.parse_label() or None
        else:
            start = self.pos
            node.label = self.parse_label()
            if not node.label:
                raise self.error("empty leaf label", start)
        if self.peek() == ":":
            self.pos += 1
            node.length = self.parse_length()
        return node

    def parse_label(self) -> str:
        self.skip_space()
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos] not in _DELIMITERS:
            self.pos += 1
        return self.text[start:self.pos].strip()

    def parse_length(self) -> float:
        self.skip_space()
        start = self.pos
        token = self.parse_label()
        try:
            value = float(token)
        except ValueError:
            raise self.error(f"bad branch length {token!r}", start) from None
        if not np.isfinite(value):
            raise NonFiniteError(f"branch length {token!r} is not finite")
        if value < 0:
            raise self.error(f"negative branch length {token!r}", start)
        return value


def _check_labels(tree: RootedTree) -> RootedTree:
    seen: set[str] = set()
    for label in tree.labels:
        if label in seen:
            raise DuplicateLabelError(f"leaf label {label!r} appears twice")
        seen.add(label)
    return tree


def parse_newick(text: str) -> RootedTree:
    """Parse exactly one Newick tree.

    Raises:
        ParseError: Malformed text, with the byte offset of the problem.
        DuplicateLabelError: Two leaves share a label.

    """
    parser = _NewickParser(text)
    if not parser.peek():
        raise parser.error("empty Newick text")
    tree = parser.parse_tree()
    if parser.peek():
        raise parser.error("unexpected text after ';'")
    return _check_labels(tree)


def parse_newick_many(text: str) -> list[RootedTree]:
    """Parse every tree of a Newick file."""
    parser = _NewickParser(text)
    trees = []
    while parser.peek():
        trees.append(_check_labels(parser.parse_tree()))
    if not trees:
        raise parser.error("no tree found")
    return trees


@dataclass(frozen=True, eq=False)
class UltrametricVector:
    """Pairwise leaf distances in sorted-label pair order."""

    values: np.ndarray
    leaf_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).reshape(-1)
        labels = tuple(self.leaf_labels)
        m = len(labels)
        if values.size != m * (m - 1) // 2:
            raise BadDimensionError(
                f"{values.size} values do not match {m} leaves"
            )
        if list(labels) != sorted(labels):
            raise InvalidParameterError("leaf labels must be sorted")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "leaf_labels", labels)

    @classmethod
    def coerce(
        cls, u: UltrametricVector | Sequence[float] | np.ndarray, labels: Sequence[str] | None = None
    ) -> UltrametricVector:
        """Wrap raw values, inventing labels when none are given."""
        if isinstance(u, cls):
            return u
        values = np.asarray(u, dtype=float).reshape(-1)
        if not np.all(np.isfinite(values)):
            raise NonFiniteError("vector has NaN or infinite entries")
        m = triangular_root(values.size)
        if m is None or m < 2:
            raise BadDimensionError(f"{values.size} is not a pair count of 2 or more leaves")
        return cls(values, tuple(labels) if labels is not None else default_labels(m))

    @property
    def pair_labels(self) -> list[str]:
        """Header labels "a|b" in vector order."""
        return pair_labels(self.leaf_labels)

    def matrix(self) -> np.ndarray:
        """Return the symmetric m×m distance matrix."""
        return squareform(self.values, checks=False)


def tree_to_vector(t: RootedTree, normalize: bool = False) -> UltrametricVector:
    """Return the cophenetic distances of a tree in sorted-label pair order."""
    leaves = sorted(t.leaves(), key=lambda leaf: leaf.label or "")
    m = len(leaves)
    if m < 2:
        raise TooFewLeavesError(f"a tree needs at least 2 leaves, got {m}")
    index = {id(leaf): i for i, leaf in enumerate(leaves)}
    depth = t.depths()
    leaf_depth = np.array([depth[id(leaf)] for leaf in leaves])

    dist = np.zeros((m, m))
    below: dict[int, list[int]] = {}
    for node in reversed(list(t.root.walk())):
        if node.is_leaf:
            below[id(node)] = [index[id(node)]]
            continue
        groups = [below.pop(id(child)) for child in node.children]
        for a, b in combinations(range(len(groups)), 2):
            rows, cols = np.ix_(groups[a], groups[b])
            block = leaf_depth[rows] + leaf_depth[cols] - 2.0 * depth[id(node)]
            dist[rows, cols] = block
            dist[cols, rows] = block
        below[id(node)] = [i for group in groups for i in group]

    values = squareform(dist, checks=False)
    if normalize:
        values = values - values[0]
    return UltrametricVector(values, tuple(leaf.label or "" for leaf in leaves))


def is_ultrametric(
    u: UltrametricVector | Sequence[float] | np.ndarray, tol: float = ULTRAMETRIC_TOL
) -> bool:
    """Whether the largest of every triple of pairwise values is attained twice."""
    vector = UltrametricVector.coerce(u)
    m = len(vector.leaf_labels)
    if m < 3:
        return True
    D = vector.matrix()
    triples = np.array(list(combinations(range(m), 3)))
    i, j, k = triples.T
    sides = np.sort(np.stack([D[i, j], D[i, k], D[j, k]], axis=1), axis=1)
    return bool(np.all(sides[:, 2] - sides[:, 1] <= tol))


def subdominant_ultrametric(
    w: UltrametricVector | Sequence[float] | np.ndarray, labels: Sequence[str] | None = None
) -> UltrametricVector:
    """Return the largest ultrametric below w (minimax path distances).

    Computed as the cophenetic distances of single-linkage clustering.
    """
    vector = UltrametricVector.coerce(w, labels)
    shift = min(0.0, float(vector.values.min()))
    if vector.values.size == 1:
        return vector
    tree = linkage(vector.values - shift, method="single")
    return UltrametricVector(cophenet(tree) + shift, vector.leaf_labels)


def vector_to_tree(
    u: UltrametricVector | Sequence[float] | np.ndarray, tol: float = RECONSTRUCTION_TOL
) -> RootedTree:
    """Rebuild the equidistant tree of an ultrametric vector.

    Clusters merge at the minimum inter-cluster value, ties broken by the
    smallest labels, and each merge node sits at half that value.
    """
    vector = UltrametricVector.coerce(u)
    if not is_ultrametric(vector, tol):
        raise NotUltrametricError("vector is not an ultrametric")
    values = vector.values
    if values.min() < 0:
        LOGGER.warning("Shifting vector by %s to make it non-negative", -values.min())
        values = values - values.min()

    D = squareform(values, checks=False)
    clusters: dict[int, tuple[Node, float, str]] = {
        i: (Node(label=label), 0.0, label) for i, label in enumerate(vector.leaf_labels)
    }
    members = {i: [i] for i in clusters}
    next_id = len(clusters)
    while len(clusters) > 1:
        best = None
        for a, b in combinations(sorted(clusters), 2):
            value = D[np.ix_(members[a], members[b])].min()
            key = (value, *sorted((clusters[a][2], clusters[b][2])))
            if best is None or key < best[0]:
                best = (key, a, b)
        (value, _, _), a, b = best
        height = value / 2.0
        parent = Node()
        for child_id in sorted((a, b), key=lambda c: clusters[c][2]):
            child, child_height, _ = clusters[child_id]
            child.length = max(height - child_height, 0.0)
            parent.add_child(child)
        clusters[next_id] = (parent, height, min(clusters[a][2], clusters[b][2]))
        members[next_id] = members.pop(a) + members.pop(b)
        del clusters[a], clusters[b]
        next_id += 1
    root = next(iter(clusters.values()))[0]
    return RootedTree(root)
