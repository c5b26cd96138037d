"""
Planar rooted trees with colored edges and their string encodings.

    leaf    |c        an open input edge of color c
            |c@k      the same, carrying label k (symmetric operads)
    box     [c]       a boxed vertex of valency one sitting on an edge of color c
    vertex  c(t,...)  a vertex whose output edge has color c

A vertex's bouquet is <colors of its children ; its own color>. Slots of
a tree (the fiber of the operation it encodes) are its vertices and boxes
in preorder.
"""

import itertools
from functools import lru_cache

import attrs

from .exceptions import MalformedOperation

LEAF = "leaf"
VERTEX = "vertex"
BOX = "box"

RESERVED = set("()|[]@;<>{},#:")


def check_color_name(name):
    if not name or any(ch in RESERVED or ch.isspace() for ch in name):
        raise MalformedOperation(f"color name {name!r} is empty or uses a reserved character", code=name)
    return name


@attrs.frozen
class Tree:
    kind: str
    color: str
    children: tuple = ()
    label: int | None = None
    mark: object = attrs.field(default=None, eq=False, repr=False)

    @property
    def is_slot(self):
        return self.kind != LEAF

    def encode(self):
        if self.kind == LEAF:
            return f"|{self.color}" if self.label is None else f"|{self.color}@{self.label}"
        if self.kind == BOX:
            return f"[{self.color}]"
        return f"{self.color}(" + ",".join(ch.encode() for ch in self.children) + ")"

    def __str__(self):
        return self.encode()

    def bouquet(self):
        """Inputs and output of a vertex as a bouquet code"""
        return bouquet_code([ch.color for ch in self.children], self.color)

    def slot_color(self):
        return self.bouquet() if self.kind == VERTEX else self.color

    def preorder(self):
        yield self
        for ch in self.children:
            yield from ch.preorder()

    def slots(self):
        return [node for node in self.preorder() if node.is_slot]

    def leaves(self):
        return [node for node in self.preorder() if node.kind == LEAF]

    def vertex_count(self):
        return sum(1 for node in self.preorder() if node.kind == VERTEX)

    def box_count(self):
        return sum(1 for node in self.preorder() if node.kind == BOX)

    def max_valence(self):
        return max((len(node.children) for node in self.preorder() if node.kind == VERTEX), default=0)

    def leaves_by_label(self):
        """Leaves in label order; planar order when unlabeled"""
        leaves = self.leaves()
        if all(leaf.label is not None for leaf in leaves):
            return sorted(leaves, key=lambda leaf: leaf.label)
        return leaves

    def target_bouquet(self):
        return bouquet_code([leaf.color for leaf in self.leaves_by_label()], self.color)

    def unmarked(self):
        return attrs.evolve(self, children=tuple(ch.unmarked() for ch in self.children), mark=None)


def leaf(color, label=None):
    return Tree(LEAF, color, (), label)


def box(color):
    return Tree(BOX, color)


def vertex(color, children=()):
    return Tree(VERTEX, color, tuple(children))


def corolla(inputs, output, labeled=False):
    return vertex(output, [leaf(c, i + 1 if labeled else None) for i, c in enumerate(inputs)])


def bouquet_code(inputs, output):
    return "<" + ",".join(inputs) + ";" + output + ">"


def parse_bouquet(code):
    if not (code.startswith("<") and code.endswith(">") and ";" in code):
        raise MalformedOperation(f"not a bouquet: {code!r}", code=code)
    body = code[1:-1]
    inputs, output = body.rsplit(";", 1)
    return tuple(inputs.split(",")) if inputs else (), output


def is_bouquet(code):
    try:
        parse_bouquet(code)
    except MalformedOperation:
        return False
    return True


@lru_cache(maxsize=65536)
def parse(code):
    """Decode a tree encoding; raises MalformedOperation on bad input"""
    tree, end = _parse_at(code, 0)
    if end != len(code):
        raise MalformedOperation(f"trailing characters in tree {code!r} at {end}", code=code)
    return tree


def _read_name(code, i):
    j = i
    while j < len(code) and code[j] not in RESERVED:
        j += 1
    if j == i:
        raise MalformedOperation(f"expected a color at position {i} in {code!r}", code=code)
    return code[i:j], j


def _parse_at(code, i):
    if i >= len(code):
        raise MalformedOperation(f"unexpected end of tree {code!r}", code=code)
    if code[i] == "|":
        color, j = _read_name(code, i + 1)
        label = None
        if j < len(code) and code[j] == "@":
            k = j + 1
            while k < len(code) and code[k].isdigit():
                k += 1
            if k == j + 1:
                raise MalformedOperation(f"missing leaf label in {code!r}", code=code)
            label, j = int(code[j + 1:k]), k
        return leaf(color, label), j
    if code[i] == "[":
        color, j = _read_name(code, i + 1)
        if j >= len(code) or code[j] != "]":
            raise MalformedOperation(f"unclosed box in {code!r}", code=code)
        return box(color), j + 1
    color, j = _read_name(code, i)
    if j >= len(code) or code[j] != "(":
        raise MalformedOperation(f"expected '(' after vertex color in {code!r}", code=code)
    j += 1
    children = []
    if j < len(code) and code[j] == ")":
        return vertex(color), j + 1
    while True:
        child, j = _parse_at(code, j)
        children.append(child)
        if j < len(code) and code[j] == ",":
            j += 1
            continue
        if j < len(code) and code[j] == ")":
            return vertex(color, children), j + 1
        raise MalformedOperation(f"expected ',' or ')' at position {j} in {code!r}", code=code)


def _plug(inner, children, slot_index, labeled):
    """Copy of inner with marks (slot_index, f) on its slots and leaves replaced by children"""
    counter = itertools.count()
    planar = itertools.count()

    def walk(node):
        if node.kind == LEAF:
            position = node.label - 1 if labeled else next(planar)
            return children[position]
        mark = (slot_index, next(counter))
        return attrs.evolve(node, children=tuple(walk(ch) for ch in node.children), mark=mark)

    return walk(inner)


def compose(outer, inners, labeled=False):
    """
    Substitute inners[e] for the e-th slot of outer. The children of a
    replaced vertex are plugged into the inner tree's leaves: in planar
    order, or by leaf label when labeled. Returns the composite and, for
    each of its slots, the pair (e, f) naming the inner slot it came from.
    """
    slots = outer.slots()
    if len(slots) != len(inners):
        raise MalformedOperation(f"{outer.encode()} has {len(slots)} slots, got {len(inners)} trees")
    counter = itertools.count()

    def walk(node):
        if node.kind == LEAF:
            return node
        e = next(counter)
        children = [walk(ch) for ch in node.children]
        return _plug(inners[e], children, e, labeled)

    result = walk(outer)
    origin = tuple(node.mark for node in result.slots())
    return result.unmarked(), origin


def graft_at_leaf(tree, k, other):
    """
    Replace the leaf labeled k (planar k-th when unlabeled) by other. Labels
    of other's leaves become k..k+m-1 and later labels shift by m-1. Origin
    entries are (0, slot of tree) or (1, slot of other).
    """
    inner_leaves = len(other.leaves())
    labeled = all(leaf_.label is not None for leaf_ in tree.leaves())
    outer_counter = itertools.count()
    planar = itertools.count(1)

    def mark_inner(node):
        inner_counter = itertools.count()
        inner_planar = itertools.count(1)

        def walk(n):
            if n.kind == LEAF:
                position = n.label if n.label is not None else next(inner_planar)
                return attrs.evolve(n, label=(k + position - 1) if labeled else None)
            return attrs.evolve(n, children=tuple(walk(ch) for ch in n.children), mark=(1, next(inner_counter)))

        return walk(node)

    replaced = []

    def walk(node):
        if node.kind == LEAF:
            position = node.label if labeled else next(planar)
            if position == k:
                replaced.append(node)
                return mark_inner(other)
            if labeled and node.label > k:
                return attrs.evolve(node, label=node.label + inner_leaves - 1)
            return node
        mark = (0, next(outer_counter))
        return attrs.evolve(node, children=tuple(walk(ch) for ch in node.children), mark=mark)

    result = walk(tree)
    if not replaced:
        raise MalformedOperation(f"{tree.encode()} has no leaf {k}")
    if replaced[0].color != other.color:
        raise MalformedOperation(f"cannot graft {other.encode()} on a leaf of color {replaced[0].color}")
    origin = tuple(node.mark for node in result.slots())
    return result.unmarked(), origin


@lru_cache(maxsize=None)
def trees_exact(color, vertices, colors, max_valence, top=LEAF):
    """
    All planar trees with root edge color, exactly `vertices` vertices,
    vertex valences <= max_valence, edge colors from `colors`, and open
    edges ending in leaves (top=LEAF) or boxes (top=BOX).
    """
    if vertices == 0:
        return (leaf(color) if top == LEAF else box(color),)
    out = []
    for valence in range(max_valence + 1):
        for child_colors in itertools.product(colors, repeat=valence):
            for split in _compositions(vertices - 1, valence):
                choices = [trees_exact(c, n, colors, max_valence, top) for c, n in zip(child_colors, split)]
                for children in itertools.product(*choices):
                    out.append(vertex(color, children))
    return tuple(sorted(out, key=lambda t: t.encode()))


def _compositions(total, parts):
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def labelings(tree):
    """Every way to put labels 1..n on the n leaves of an unlabeled tree"""
    n = len(tree.leaves())
    for perm in itertools.permutations(range(1, n + 1)):
        labels = iter(perm)

        def walk(node):
            if node.kind == LEAF:
                return attrs.evolve(node, label=next(labels))
            return attrs.evolve(node, children=tuple(walk(ch) for ch in node.children))

        yield walk(tree)


def relabel_planar(tree):
    """Labels 1..n in planar order"""
    labels = itertools.count(1)

    def walk(node):
        if node.kind == LEAF:
            return attrs.evolve(node, label=next(labels))
        return attrs.evolve(node, children=tuple(walk(ch) for ch in node.children))

    return walk(tree)
