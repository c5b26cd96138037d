"""
Polynomial monads with finite fibers.

An operation is identified by its canonical code. Its fiber is the tuple
of input slot colors; composing an operation with one operation per slot
returns the composite together with the origin of each composite slot,
given as (outer slot, slot of the inner operation).
"""

import abc
import itertools
import logging
import re

import attrs

from . import trees
from .exceptions import DefinitionError, LawViolation, MalformedOperation, UnknownMonad

logger = logging.getLogger(__name__)


@attrs.frozen
class Operation:
    code: str
    target: str
    inputs: tuple = attrs.field(converter=tuple)

    @property
    def arity(self):
        return len(self.inputs)

    def __str__(self):
        return self.code


@attrs.frozen
class Composite:
    operation: Operation
    origin: tuple = attrs.field(converter=tuple)


def op_sort_key(op):
    return (op.arity, op.code)


class PolynomialMonad(abc.ABC):
    """
    Base class for polynomial monads.

    Subclasses decode operation codes, give units, compose, and list the
    operations with a given target. Everything else (substitution, bounded
    enumeration, law checking) is shared.
    """
    name = "monad"
    provenance = ""
    infinite_colors = False
    default_valence = 2

    def __init__(self):
        self._decoded = {}
        self._listed = {}

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"

    @abc.abstractmethod
    def colors(self, max_valence=None):
        """Colors, as a sorted tuple; bouquet colors limited to max_valence inputs"""

    @abc.abstractmethod
    def decode(self, code):
        """Operation for a code, raising MalformedOperation if it is not one"""

    @abc.abstractmethod
    def unit(self, color):
        """The identity operation at a color"""

    @abc.abstractmethod
    def _compose(self, op, subs):
        """Composite of op with subs, already checked to fit the slots"""

    @abc.abstractmethod
    def _operations(self, color, max_arity, max_valence, max_size):
        """Iterable of operations with the given target within bounds"""

    def has_color(self, color):
        return color in self.colors(self.default_valence)

    def valence(self, color):
        return len(trees.parse_bouquet(color)[0]) if trees.is_bouquet(color) else 0

    def operation(self, code):
        op = self._decoded.get(code)
        if op is None:
            op = self._decoded[code] = self.decode(code)
        return op

    def size(self, op):
        return op.arity

    def is_unit(self, op):
        return op == self.unit(op.target)

    def compose(self, op, subs):
        subs = tuple(subs)
        if len(subs) != op.arity:
            raise MalformedOperation(f"{op.code} has {op.arity} slots, got {len(subs)} operations", code=op.code)
        for e, (color, sub) in enumerate(zip(op.inputs, subs)):
            if sub.target != color:
                raise MalformedOperation(
                    f"slot {e} of {op.code} has color {color}, {sub.code} has target {sub.target}", code=op.code
                )
        return self._compose(op, subs)

    def substitute(self, op, slot, inner):
        subs = [self.unit(c) for c in op.inputs]
        subs[slot] = inner
        return self.compose(op, subs)

    def operations(self, color, max_arity, max_valence=None, max_size=None):
        max_valence = self.default_valence if max_valence is None else max_valence
        key = (color, max_arity, max_valence, max_size)
        listed = self._listed.get(key)
        if listed is None:
            found = {
                op for op in self._operations(color, max_arity, max_valence, max_size)
                if op.arity <= max_arity and (max_size is None or self.size(op) <= max_size)
            }
            listed = self._listed[key] = tuple(sorted(found, key=op_sort_key))
        return listed

    def all_operations(self, max_arity, max_valence=None, max_size=None):
        out = []
        for color in self.colors(self.default_valence if max_valence is None else max_valence):
            out.extend(self.operations(color, max_arity, max_valence, max_size))
        return tuple(sorted(set(out), key=op_sort_key))

    def describe(self):
        return {"name": self.name, "provenance": self.provenance or self.name}


class IdentityMonad(PolynomialMonad):
    name = "Id"
    provenance = "builtin:id"

    def colors(self, max_valence=None):
        return ("*",)

    def decode(self, code):
        if code != "id":
            raise MalformedOperation(f"Id has no operation {code!r}", code=code)
        return Operation("id", "*", ("*",))

    def unit(self, color):
        return self.operation("id")

    def _compose(self, op, subs):
        return Composite(op, ((0, 0),))

    def _operations(self, color, max_arity, max_valence, max_size):
        return [self.operation("id")] if color == "*" else []


class MonoidMonad(PolynomialMonad):
    """Operations m{n}: one linear graph per length n"""
    name = "Mon"
    provenance = "builtin:mon"
    pattern = re.compile(r"m(\d+)")

    def colors(self, max_valence=None):
        return ("*",)

    def decode(self, code):
        match = self.pattern.fullmatch(code)
        if not match:
            raise MalformedOperation(f"Mon has no operation {code!r}", code=code)
        return Operation(code, "*", ("*",) * int(match.group(1)))

    def unit(self, color):
        return self.operation("m1")

    def _compose(self, op, subs):
        origin = [(e, f) for e, sub in enumerate(subs) for f in range(sub.arity)]
        return Composite(self.operation(f"m{len(origin)}"), origin)

    def _operations(self, color, max_arity, max_valence, max_size):
        if color != "*":
            return []
        return [self.operation(f"m{n}") for n in range(max_arity + 1)]


class _TreeMonad(PolynomialMonad):
    """Shared machinery for monads whose operations are colored planar trees"""
    infinite_colors = True
    labeled = False

    def __init__(self, colors=("*",)):
        super().__init__()
        colors = tuple(colors)
        if not colors:
            raise DefinitionError(f"{type(self).__name__} needs a non-empty color set")
        for c in colors:
            trees.check_color_name(c)
        self.base_colors = tuple(sorted(set(colors)))

    def bouquets(self, max_valence):
        out = []
        for n in range(max_valence + 1):
            for inputs in itertools.product(self.base_colors, repeat=n):
                for output in self.base_colors:
                    out.append(trees.bouquet_code(inputs, output))
        return out

    def has_color(self, color):
        if trees.is_bouquet(color):
            inputs, output = trees.parse_bouquet(color)
            return all(c in self.base_colors for c in inputs + (output,))
        return False

    def size(self, op):
        return op.arity


class PlanarOperadMonad(_TreeMonad):
    """
    NOp(I): colors are I-bouquets, operations are planar I-trees, slots are
    the vertices in preorder and the target is the bouquet of the whole tree.
    """
    name = "NOp"

    def __init__(self, colors=("*",)):
        super().__init__(colors)
        self.provenance = f"builtin:nop({','.join(self.base_colors)})"

    def colors(self, max_valence=None):
        if max_valence is None:
            raise MalformedOperation("NOp has infinitely many colors; pass max_valence")
        return tuple(sorted(self.bouquets(max_valence)))

    def op_for_tree(self, tree):
        return Operation(tree.encode(), tree.target_bouquet(), tuple(v.bouquet() for v in tree.slots()))

    def decode(self, code):
        tree = trees.parse(code)
        for node in tree.preorder():
            if node.kind == trees.BOX or node.label is not None or node.color not in self.base_colors:
                raise MalformedOperation(f"{code!r} is not a planar tree over {self.base_colors}", code=code)
        return self.op_for_tree(tree)

    def unit(self, color):
        inputs, output = trees.parse_bouquet(color)
        return self.op_for_tree(trees.corolla(inputs, output))

    def _compose(self, op, subs):
        tree, origin = trees.compose(trees.parse(op.code), [trees.parse(s.code) for s in subs])
        return Composite(self.op_for_tree(tree), origin)

    def _operations(self, color, max_arity, max_valence, max_size):
        inputs, output = trees.parse_bouquet(color)
        limit = max_arity if max_size is None else min(max_arity, max_size)
        for n in range(limit + 1):
            for tree in trees.trees_exact(output, n, self.base_colors, max_valence):
                if tuple(leaf.color for leaf in tree.leaves()) == inputs:
                    yield self.op_for_tree(tree)

    def all_operations(self, max_arity, max_valence=None, max_size=None):
        max_valence = self.default_valence if max_valence is None else max_valence
        limit = max_arity if max_size is None else min(max_arity, max_size)
        out = [
            self.op_for_tree(tree)
            for output in self.base_colors
            for n in range(limit + 1)
            for tree in trees.trees_exact(output, n, self.base_colors, max_valence)
        ]
        return tuple(sorted(out, key=op_sort_key))


class SymmetricOperadMonad(PlanarOperadMonad):
    """
    SOp(J): planar J-trees whose leaves carry labels 1..n; the target
    bouquet lists leaf colors in label order.
    """
    name = "SOp"
    labeled = True

    def __init__(self, colors=("*",)):
        super().__init__(colors)
        self.provenance = f"builtin:sop({','.join(self.base_colors)})"

    def decode(self, code):
        tree = trees.parse(code)
        labels = sorted(leaf.label or 0 for leaf in tree.leaves())
        if labels != list(range(1, len(labels) + 1)):
            raise MalformedOperation(f"{code!r} needs leaf labels 1..n", code=code)
        for node in tree.preorder():
            if node.kind == trees.BOX or node.color not in self.base_colors:
                raise MalformedOperation(f"{code!r} is not a labeled tree over {self.base_colors}", code=code)
        return self.op_for_tree(tree)

    def unit(self, color):
        inputs, output = trees.parse_bouquet(color)
        return self.op_for_tree(trees.corolla(inputs, output, labeled=True))

    def _compose(self, op, subs):
        tree, origin = trees.compose(trees.parse(op.code), [trees.parse(s.code) for s in subs], labeled=True)
        return Composite(self.op_for_tree(tree), origin)

    def _operations(self, color, max_arity, max_valence, max_size):
        inputs, output = trees.parse_bouquet(color)
        limit = max_arity if max_size is None else min(max_arity, max_size)
        for n in range(limit + 1):
            for tree in trees.trees_exact(output, n, self.base_colors, max_valence):
                if len(tree.leaves()) != len(inputs):
                    continue
                for labeled in trees.labelings(tree):
                    if tuple(leaf.color for leaf in labeled.leaves_by_label()) == inputs:
                        yield self.op_for_tree(labeled)

    def all_operations(self, max_arity, max_valence=None, max_size=None):
        max_valence = self.default_valence if max_valence is None else max_valence
        limit = max_arity if max_size is None else min(max_arity, max_size)
        out = [
            self.op_for_tree(labeled)
            for output in self.base_colors
            for n in range(limit + 1)
            for tree in trees.trees_exact(output, n, self.base_colors, max_valence)
            for labeled in trees.labelings(tree)
        ]
        return tuple(sorted(out, key=op_sort_key))


class GrMonoidMonad(PolynomialMonad):
    """
    Gr(Mon) on colors {m, r}. Circled linear graphs (o^n) have n slots of
    color r and target r; boxed ones [o^n#] add a last slot of color m and
    have target m. Substituting into the box extends the chain.
    """
    name = "Gr(Mon)"
    provenance = "builtin:gr_mon"
    pattern = re.compile(r"\((o*)\)|\[(o*)#\]")

    def colors(self, max_valence=None):
        return ("m", "r")

    def decode(self, code):
        match = self.pattern.fullmatch(code)
        if not match:
            raise MalformedOperation(f"Gr(Mon) has no operation {code!r}", code=code)
        if match.group(1) is not None:
            return Operation(code, "r", ("r",) * len(match.group(1)))
        return Operation(code, "m", ("r",) * len(match.group(2)) + ("m",))

    def circled(self, n):
        return self.operation("(" + "o" * n + ")")

    def boxed(self, n):
        return self.operation("[" + "o" * n + "#]")

    def unit(self, color):
        return self.circled(1) if color == "r" else self.boxed(0)

    def size(self, op):
        return op.code.count("o")

    def _compose(self, op, subs):
        if op.target == "r":
            origin = [(e, f) for e, sub in enumerate(subs) for f in range(sub.arity)]
            return Composite(self.circled(len(origin)), origin)
        circles = [(e, f) for e, sub in enumerate(subs[:-1]) for f in range(sub.arity)]
        last = len(subs) - 1
        tail = [(last, f) for f in range(subs[-1].arity)]
        return Composite(self.boxed(len(circles) + len(tail) - 1), circles + tail)

    def _operations(self, color, max_arity, max_valence, max_size):
        if color == "r":
            return [self.circled(n) for n in range(max_arity + 1)]
        if color == "m":
            return [self.boxed(n) for n in range(max_arity)]
        return []


class GrPlanarOperadMonad(_TreeMonad):
    """
    Gr(NOp(I)) on colors PBq(I) + I. Operations "o:<tree>" are planar trees
    of circled vertices with target the tree's bouquet; operations
    "#:<tree>" have every open edge capped by a box and target the root
    color. Slots are vertices and boxes in preorder.
    """
    name = "Gr(NOp)"
    CIRCLED = "o:"
    BOXED = "#:"

    def __init__(self, colors=("*",)):
        super().__init__(colors)
        self.provenance = f"builtin:gr_nop({','.join(self.base_colors)})"

    def colors(self, max_valence=None):
        if max_valence is None:
            raise MalformedOperation("Gr(NOp) has infinitely many colors; pass max_valence")
        return tuple(sorted(self.bouquets(max_valence))) + self.base_colors

    def has_color(self, color):
        return color in self.base_colors or super().has_color(color)

    def op_for_tree(self, tree, boxed=None):
        # a tree without open edges (a stump) is both a unit-like circled
        # operation and a boxed constant, so callers that know the kind pass it
        if boxed is None:
            boxed = any(node.kind == trees.BOX for node in tree.preorder()) or not tree.leaves()
        slots = tuple(v.slot_color() for v in tree.slots())
        if boxed:
            return Operation(self.BOXED + tree.encode(), tree.color, slots)
        return Operation(self.CIRCLED + tree.encode(), tree.target_bouquet(), slots)

    def tree(self, op):
        return trees.parse(op.code[2:])

    def decode(self, code):
        prefix, body = code[:2], code[2:]
        if prefix not in (self.CIRCLED, self.BOXED):
            raise MalformedOperation(f"Gr(NOp) code must start with o: or #:, got {code!r}", code=code)
        tree = trees.parse(body)
        kinds = {node.kind for node in tree.preorder()}
        if prefix == self.CIRCLED and trees.BOX in kinds or prefix == self.BOXED and trees.LEAF in kinds:
            raise MalformedOperation(f"{code!r} mixes boxes and open leaves", code=code)
        if any(node.label is not None or node.color not in self.base_colors for node in tree.preorder()):
            raise MalformedOperation(f"{code!r} is not a tree over {self.base_colors}", code=code)
        op = self.op_for_tree(tree, boxed=prefix == self.BOXED)
        if op.code != code:
            raise MalformedOperation(f"{code!r} is not canonical", code=code)
        return op

    def unit(self, color):
        if color in self.base_colors:
            return self.op_for_tree(trees.box(color), boxed=True)
        inputs, output = trees.parse_bouquet(color)
        return self.op_for_tree(trees.corolla(inputs, output), boxed=False)

    def size(self, op):
        return self.tree(op).vertex_count()

    def _compose(self, op, subs):
        tree, origin = trees.compose(self.tree(op), [self.tree(s) for s in subs])
        return Composite(self.op_for_tree(tree, boxed=op.code.startswith(self.BOXED)), origin)

    def _trees(self, output, max_size, max_valence, top):
        for n in range(max_size + 1):
            yield from trees.trees_exact(output, n, self.base_colors, max_valence, top)

    def _operations(self, color, max_arity, max_valence, max_size):
        limit = max_arity if max_size is None else max_size
        if color in self.base_colors:
            for tree in self._trees(color, limit, max_valence, trees.BOX):
                yield self.op_for_tree(tree, boxed=True)
            return
        inputs, output = trees.parse_bouquet(color)
        for tree in self._trees(output, limit, max_valence, trees.LEAF):
            if tuple(leaf.color for leaf in tree.leaves()) == inputs:
                yield self.op_for_tree(tree, boxed=False)

    def all_operations(self, max_arity, max_valence=None, max_size=None):
        max_valence = self.default_valence if max_valence is None else max_valence
        limit = max_arity if max_size is None else max_size
        out = []
        for output in self.base_colors:
            for top in (trees.LEAF, trees.BOX):
                for tree in self._trees(output, limit, max_valence, top):
                    op = self.op_for_tree(tree, boxed=top == trees.BOX)
                    if op.arity <= max_arity:
                        out.append(op)
        return tuple(sorted(out, key=op_sort_key))


BUILTINS = {
    "id": lambda colors: IdentityMonad(),
    "mon": lambda colors: MonoidMonad(),
    "nop": PlanarOperadMonad,
    "sop": SymmetricOperadMonad,
    "gr_mon": lambda colors: GrMonoidMonad(),
    "gr_nop": GrPlanarOperadMonad,
}

ALIASES = {
    "identity": "id", "monoids": "mon", "gr(mon)": "gr_mon", "grmon": "gr_mon",
    "gr(nop)": "gr_nop", "grnop": "gr_nop",
}


def builtin(name, colors=("*",)):
    """Builtin monad by name: id, mon, nop, sop, gr_mon, gr_nop"""
    key = name.strip().lower()
    key = ALIASES.get(key, key)
    if key not in BUILTINS:
        raise UnknownMonad(f"unknown builtin monad {name!r}; choose from {', '.join(sorted(BUILTINS))}")
    return BUILTINS[key](tuple(colors))


@attrs.define
class LawReport:
    """Outcome of a bounded law check"""
    subject: str
    checked: int = 0
    counterexamples: list = attrs.field(factory=list)

    @property
    def ok(self):
        return not self.counterexamples

    def fail(self, law, **witness):
        self.counterexamples.append({"law": law, **witness})

    def raise_for_failure(self):
        if self.counterexamples:
            first = self.counterexamples[0]
            raise LawViolation(f"{self.subject}: {first['law']} fails", witness=first)
        return self

    def as_dict(self):
        return {"subject": self.subject, "checked": self.checked, "counterexamples": self.counterexamples}


def _pool(monad, color, bound, max_valence, breadth):
    ops = monad.operations(color, bound, max_valence)
    return ops[:breadth]


def validate_monad(monad, bound=3, max_valence=None, breadth=3, max_checks=20000):
    """
    Check the unit laws on every operation of arity <= bound and
    associativity, with consistent fiber origins, on composites built from
    the first `breadth` operations of each color.
    """
    report = LawReport(monad.name)
    ops = monad.all_operations(bound, max_valence)
    for op in ops:
        if report.checked >= max_checks:
            break
        right = monad.compose(op, [monad.unit(c) for c in op.inputs])
        report.checked += 1
        if right != Composite(op, [(e, 0) for e in range(op.arity)]):
            report.fail("right unit", operation=op.code, result=right.operation.code)
        left = monad.compose(monad.unit(op.target), [op])
        report.checked += 1
        if left != Composite(op, [(0, f) for f in range(op.arity)]):
            report.fail("left unit", operation=op.code, result=left.operation.code)

    for op in ops:
        pools = [_pool(monad, c, bound, max_valence, breadth) for c in op.inputs]
        for subs in itertools.product(*pools):
            if report.checked >= max_checks:
                break
            first = monad.compose(op, subs)
            if first.operation.arity > bound:
                continue
            inner_pools = [_pool(monad, c, bound, max_valence, breadth) for c in first.operation.inputs]
            for deeper in itertools.product(*inner_pools):
                if report.checked >= max_checks:
                    break
                report.checked += 1
                _check_associativity(monad, op, subs, first, deeper, report)
    logger.info("monad law check", extra={"monad": monad.name, "checked": report.checked,
                                         "failures": len(report.counterexamples)})
    return report


def _check_associativity(monad, op, subs, first, deeper, report):
    outer = monad.compose(first.operation, deeper)
    left_tracks = [first.origin[j] + (g,) for j, g in outer.origin]

    index = {pair: j for j, pair in enumerate(first.origin)}
    regrouped = []
    for e, sub in enumerate(subs):
        regrouped.append(monad.compose(sub, [deeper[index[(e, f)]] for f in range(sub.arity)]))
    nested = monad.compose(op, [r.operation for r in regrouped])
    right_tracks = [(e,) + regrouped[e].origin[h] for e, h in nested.origin]

    if outer.operation != nested.operation or left_tracks != right_tracks:
        report.fail(
            "associativity",
            operation=op.code,
            subs=[s.code for s in subs],
            inner=[d.code for d in deeper],
            left=outer.operation.code,
            right=nested.operation.code,
        )


def enumerate_ops(monad, color=None, max_arity=3, max_valence=None, max_size=None):
    if color is None:
        return monad.all_operations(max_arity, max_valence, max_size)
    return monad.operations(color, max_arity, max_valence, max_size)


def _element_key(element):
    op, args = element
    return (len(args), op, repr(args))


def free_apply(monad, generators, bound, max_valence=None):
    """
    Truncated free algebra: for each color, the pairs (operation code,
    tuple of generators filling its slots) with operation arity <= bound.
    """
    max_valence = monad.default_valence if max_valence is None else max_valence
    result = {}
    for color in monad.colors(max_valence):
        elements = []
        for op in monad.operations(color, bound, max_valence):
            choices = [tuple(generators.get(c, ())) for c in op.inputs]
            for args in itertools.product(*choices):
                elements.append((op.code, args))
        result[color] = tuple(sorted(elements, key=_element_key))
    return result


class AlgebraInstance:
    """
    A finite algebra: carrier(color) is a tuple of elements and
    evaluate(op, args) gives the element of color op.target.
    """

    def __init__(self, monad, carrier, evaluate, name=""):
        self.monad = monad
        self._carrier = carrier
        self._evaluate = evaluate
        self.name = name or f"{monad.name}-algebra"

    def carrier(self, color):
        value = self._carrier(color) if callable(self._carrier) else self._carrier.get(color, ())
        return tuple(value)

    def eval(self, op, args):
        return self._evaluate(op, tuple(args))

    def check(self, bound=3, max_valence=None, breadth=3, max_checks=20000):
        report = LawReport(self.name)
        for color in self.monad.colors(self.monad.default_valence if max_valence is None else max_valence):
            unit = self.monad.unit(color)
            for x in self.carrier(color):
                report.checked += 1
                if self.eval(unit, (x,)) != x:
                    report.fail("unit", color=color, element=repr(x))
        for op in self.monad.all_operations(bound, max_valence):
            pools = [_pool(self.monad, c, bound, max_valence, breadth) for c in op.inputs]
            for subs in itertools.product(*pools):
                composite = self.monad.compose(op, subs)
                if composite.operation.arity > bound:
                    continue
                slots = [self.carrier(c) for c in composite.operation.inputs]
                for args in itertools.product(*slots):
                    if report.checked >= max_checks:
                        return report
                    report.checked += 1
                    split = [[None] * sub.arity for sub in subs]
                    for (e, f), x in zip(composite.origin, args):
                        split[e][f] = x
                    nested = self.eval(op, [self.eval(sub, part) for sub, part in zip(subs, split)])
                    if self.eval(composite.operation, args) != nested:
                        report.fail("multiplication", operation=op.code,
                                    subs=[s.code for s in subs], args=repr(args))
        return report


@attrs.frozen
class FiniteMonoid:
    """A finite monoid given by its multiplication table"""
    elements: tuple = attrs.field(converter=tuple)
    table: dict
    unit: str
    name: str = "M"

    def multiply(self, a, b):
        return self.table[(a, b)]

    def product(self, items):
        result = self.unit
        for x in items:
            result = self.table[(result, x)]
        return result

    @property
    def is_commutative(self):
        return all(self.table[(a, b)] == self.table[(b, a)] for a in self.elements for b in self.elements)

    def check(self):
        report = LawReport(self.name)
        for a in self.elements:
            report.checked += 1
            if self.table[(self.unit, a)] != a or self.table[(a, self.unit)] != a:
                report.fail("unit", element=a)
            for b in self.elements:
                for c in self.elements:
                    report.checked += 1
                    if self.table[(self.table[(a, b)], c)] != self.table[(a, self.table[(b, c)])]:
                        report.fail("associativity", elements=[a, b, c])
        return report

    @classmethod
    def trivial(cls):
        return cls(("e",), {("e", "e"): "e"}, "e", "trivial")

    @classmethod
    def cyclic(cls, n):
        names = ["e"] + [f"a{i}" for i in range(1, n)]
        table = {(names[i], names[j]): names[(i + j) % n] for i in range(n) for j in range(n)}
        return cls(names, table, "e", f"Z/{n}")

    @classmethod
    def left_zero(cls, n=2):
        """Unit e plus n elements with x*y = x; not commutative for n >= 2"""
        names = ["e"] + [f"z{i}" for i in range(1, n + 1)]
        table = {}
        for a in names:
            for b in names:
                table[(a, b)] = b if a == "e" else a
        return cls(names, table, "e", f"left-zero({n})")

    @classmethod
    def boolean(cls):
        table = {(a, b): "t" if a == b == "t" else "f" for a in ("t", "f") for b in ("t", "f")}
        return cls(("f", "t"), table, "t", "bool")


def monoid_algebra(monad, monoid):
    """Mon- or Gr(Mon)-algebra multiplying slot values in slot order"""
    return AlgebraInstance(monad, lambda color: monoid.elements,
                           lambda op, args: monoid.product(args), name=f"{monad.name}/{monoid.name}")


class PolyMonadMorphism:
    """
    A morphism of polynomial monads. op_map(op) returns the image
    operation and the fiber bijection as a tuple: slot e of op goes to slot
    bijection[e] of the image.
    """

    def __init__(self, source, target, color_map, op_map, name=""):
        self.source = source
        self.target = target
        self._color_map = color_map
        self._op_map = op_map
        self.name = name or f"{source.name}->{target.name}"

    def map_color(self, color):
        return self._color_map(color)

    def __call__(self, op):
        image, bijection = self._op_map(op)
        return image, tuple(bijection)

    def then(self, other):
        def op_map(op):
            first, b1 = self(op)
            second, b2 = other(first)
            return second, tuple(b2[b1[e]] for e in range(op.arity))

        return PolyMonadMorphism(self.source, other.target,
                                 lambda c: other.map_color(self.map_color(c)), op_map,
                                 name=f"{self.name};{other.name}")

    def check(self, bound=3, max_valence=None, breadth=3, max_checks=20000):
        report = LawReport(self.name)
        ops = self.source.all_operations(bound, max_valence)
        for op in ops:
            report.checked += 1
            image, bijection = self(op)
            if image.target != self.map_color(op.target):
                report.fail("target", operation=op.code, image=image.code)
            if sorted(bijection) != list(range(image.arity)) or image.arity != op.arity:
                report.fail("fiber bijection", operation=op.code, image=image.code)
                continue
            if any(image.inputs[bijection[e]] != self.map_color(c) for e, c in enumerate(op.inputs)):
                report.fail("slot colors", operation=op.code, image=image.code)
        for color in {op.target for op in ops}:
            report.checked += 1
            image, _ = self(self.source.unit(color))
            if image != self.target.unit(self.map_color(color)):
                report.fail("unit", color=color, image=image.code)
        for op in ops:
            image, bijection = self(op)
            pools = [_pool(self.source, c, bound, max_valence, breadth) for c in op.inputs]
            for subs in itertools.product(*pools):
                if report.checked >= max_checks:
                    return report
                report.checked += 1
                self._check_square(op, image, bijection, subs, report)
        return report

    def _check_square(self, op, image, bijection, subs, report):
        source_comp = self.source.compose(op, subs)
        mapped, mapped_bij = self(source_comp.operation)
        images = [self(s) for s in subs]
        placed = [None] * image.arity
        for e, (img, _) in enumerate(images):
            placed[bijection[e]] = img
        target_comp = self.target.compose(image, placed)
        if target_comp.operation != mapped:
            report.fail("multiplication", operation=op.code, subs=[s.code for s in subs],
                        left=mapped.code, right=target_comp.operation.code)
            return
        where = {pair: k for k, pair in enumerate(target_comp.origin)}
        for j, (e, f) in enumerate(source_comp.origin):
            if where.get((bijection[e], images[e][1][f])) != mapped_bij[j]:
                report.fail("fiber square", operation=op.code, subs=[s.code for s in subs], slot=j)
                return


def restrict_algebra(algebra, morphism):
    """Pull an algebra of morphism.target back along the morphism"""

    def evaluate(op, args):
        image, bijection = morphism(op)
        placed = [None] * image.arity
        for e, x in enumerate(args):
            placed[bijection[e]] = x
        return algebra.eval(image, placed)

    return AlgebraInstance(morphism.source, lambda c: algebra.carrier(morphism.map_color(c)), evaluate,
                           name=f"{algebra.name}|{morphism.source.name}")
