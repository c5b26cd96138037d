"""
Monads built from other monads: constants (T+1, T+2), T_f, T_g, T_{f,g},
the Grothendieck construction of a morphism into symmetric operads, the
plus construction, and the module operad of a planar operad.
"""

import abc
import itertools
import logging

import attrs

from . import trees
from .exceptions import LawViolation, MalformedOperation
from .polymonad import (
    AlgebraInstance, Composite, IdentityMonad, LawReport, MonoidMonad, Operation, PlanarOperadMonad,
    PolyMonadMorphism, PolynomialMonad, SymmetricOperadMonad, _pool, op_sort_key,
)

logger = logging.getLogger(__name__)

BLOCK_LETTERS = "KLMNPQRSTUVW"


def split_block(color):
    """('c', 'K') for 'c@K', (color, None) otherwise"""
    head, sep, tail = color.rpartition("@")
    if sep and tail in BLOCK_LETTERS and len(tail) == 1:
        return head, tail
    return color, None


class ConstantsMonad(PolynomialMonad):
    """
    T + n: T on the original colors plus, for each block, a copy of every
    color carrying only its identity operation "id:c@B".
    """

    def __init__(self, base, blocks=("K",)):
        super().__init__()
        self.base = base
        self.blocks = tuple(blocks)
        self.infinite_colors = base.infinite_colors
        self.default_valence = base.default_valence
        self.name = f"{base.name}+{len(self.blocks)}"
        self.provenance = (base.provenance or base.name)
        for _ in self.blocks:
            self.provenance = f"with_constants({self.provenance})"

    def colors(self, max_valence=None):
        base_colors = self.base.colors(max_valence)
        return base_colors + tuple(f"{c}@{b}" for b in self.blocks for c in base_colors)

    def has_color(self, color):
        head, block = split_block(color)
        if block is not None:
            return block in self.blocks and self.base.has_color(head)
        return self.base.has_color(color)

    def decode(self, code):
        if code.startswith("id:"):
            color = code[3:]
            head, block = split_block(color)
            if block not in self.blocks:
                raise MalformedOperation(f"{code!r} names no constant color", code=code)
            return Operation(code, color, (color,))
        return self.base.operation(code)

    def unit(self, color):
        if split_block(color)[1] in self.blocks:
            return self.operation(f"id:{color}")
        return self.base.unit(color)

    def size(self, op):
        return 0 if op.code.startswith("id:") else self.base.size(op)

    def _compose(self, op, subs):
        if op.code.startswith("id:"):
            return Composite(op, ((0, 0),))
        return self.base.compose(op, subs)

    def _operations(self, color, max_arity, max_valence, max_size):
        if split_block(color)[1] in self.blocks:
            return [self.operation(f"id:{color}")] if max_arity >= 1 else []
        return self.base.operations(color, max_arity, max_valence, max_size)

    def all_operations(self, max_arity, max_valence=None, max_size=None):
        base_ops = self.base.all_operations(max_arity, max_valence, max_size)
        if max_arity < 1:
            return base_ops
        mv = self.default_valence if max_valence is None else max_valence
        ids = [self.operation(f"id:{c}") for c in self.colors(mv) if split_block(c)[1] in self.blocks]
        return tuple(sorted(base_ops + tuple(ids), key=op_sort_key))


def with_constants(monad):
    """T+1; applied to T+n it gives T+(n+1) over the same T"""
    if isinstance(monad, ConstantsMonad):
        return ConstantsMonad(monad.base, monad.blocks + (BLOCK_LETTERS[len(monad.blocks)],))
    return ConstantsMonad(monad)


TFG_VARIANTS = {"fg": ("f", "g"), "f": ("f",), "g": ("g",)}


class TfgMonad(PolynomialMonad):
    """
    The monad whose algebras are a T-algebra X, collections K and L, and
    maps g: K -> X, f: K -> L (T_f drops g, T_g drops f and L).

    X operations are "b|w" with w a word over {X, K}: slot e of b is fed
    from X or, through g, from K. L operations are "id:c@L" and "f:c".
    """

    def __init__(self, base, variant="fg"):
        super().__init__()
        if variant not in TFG_VARIANTS:
            raise MalformedOperation(f"unknown variant {variant!r}; choose fg, f or g")
        self.base = base
        self.variant = variant
        self.maps = TFG_VARIANTS[variant]
        self.infinite_colors = base.infinite_colors
        self.default_valence = base.default_valence
        self.name = f"{base.name}_{{{','.join(self.maps)}}}"
        self.provenance = f"t{variant}({base.provenance or base.name})"

    @property
    def blocks(self):
        return ("K", "L") if "f" in self.maps else ("K",)

    def colors(self, max_valence=None):
        base_colors = self.base.colors(max_valence)
        return base_colors + tuple(f"{c}@{b}" for b in self.blocks for c in base_colors)

    def has_color(self, color):
        head, block = split_block(color)
        if block is not None:
            return block in self.blocks and self.base.has_color(head)
        return self.base.has_color(color)

    def x_op(self, op, word):
        inputs = tuple(c if w == "X" else f"{c}@K" for c, w in zip(op.inputs, word))
        return Operation(f"{op.code}|{word}", op.target, inputs)

    def split(self, op):
        """(base operation, word) for an X operation"""
        code, _, word = op.code.rpartition("|")
        return self.base.operation(code), word

    def decode(self, code):
        if code.startswith("id:"):
            color = code[3:]
            if split_block(color)[1] not in self.blocks:
                raise MalformedOperation(f"{code!r} names no K or L color", code=code)
            return Operation(code, color, (color,))
        if code.startswith("f:"):
            if "f" not in self.maps:
                raise MalformedOperation(f"{self.name} has no f", code=code)
            color = code[2:]
            return Operation(code, f"{color}@L", (f"{color}@K",))
        base_code, sep, word = code.rpartition("|")
        if not sep or set(word) - {"X", "K"}:
            raise MalformedOperation(f"{code!r} is not an X operation", code=code)
        if "K" in word and "g" not in self.maps:
            raise MalformedOperation(f"{self.name} has no g; {code!r} reads from K", code=code)
        op = self.base.operation(base_code)
        if len(word) != op.arity:
            raise MalformedOperation(f"{code!r} colors {len(word)} of {op.arity} slots", code=code)
        return self.x_op(op, word)

    def unit(self, color):
        if split_block(color)[1] is not None:
            return self.operation(f"id:{color}")
        return self.x_op(self.base.unit(color), "X")

    def size(self, op):
        if op.code.startswith(("id:", "f:")):
            return 0
        return self.base.size(self.split(op)[0])

    def _compose(self, op, subs):
        if op.code.startswith(("id:", "f:")):
            inner = subs[0]
            if op.code.startswith("f:"):
                return Composite(op, ((0, 0),))
            return Composite(inner, ((0, 0),))
        base_op, word = self.split(op)
        base_subs, words = [], []
        for w, color, sub in zip(word, base_op.inputs, subs):
            if w == "X":
                sub_op, sub_word = self.split(sub)
                base_subs.append(sub_op)
                words.append(sub_word)
            else:
                base_subs.append(self.base.unit(color))
                words.append("K")
        composite = self.base.compose(base_op, base_subs)
        word = "".join(words[e][f] if word[e] == "X" else "K" for e, f in composite.origin)
        return Composite(self.x_op(composite.operation, word), composite.origin)

    def _operations(self, color, max_arity, max_valence, max_size):
        head, block = split_block(color)
        if block == "K":
            return [self.operation(f"id:{color}")]
        if block == "L":
            return [self.operation(f"id:{color}"), self.operation(f"f:{head}")]
        letters = "XK" if "g" in self.maps else "X"
        out = []
        for op in self.base.operations(color, max_arity, max_valence, max_size):
            for word in itertools.product(letters, repeat=op.arity):
                out.append(self.x_op(op, "".join(word)))
        return out

    def cartesian_morphism(self):
        """The projection to T: colors forget their block, L and K maps become units"""

        def op_map(op):
            if op.code.startswith(("id:", "f:")):
                return self.base.unit(split_block(op.inputs[0])[0]), (0,)
            base_op, _ = self.split(op)
            return base_op, tuple(range(op.arity))

        return PolyMonadMorphism(self, self.base, lambda c: split_block(c)[0], op_map,
                                 name=f"{self.name}->{self.base.name}")


def tfg_monad(monad, variant="fg"):
    return TfgMonad(monad, variant)


def tfg_algebra(tfg, algebra, k_sets, l_sets, f, g):
    """
    The T_{f,g}-algebra (X, K, L, g, f). k_sets/l_sets map base colors to
    tuples; f and g are dicts keyed by (color, element).
    """

    def carrier(color):
        head, block = split_block(color)
        if block == "K":
            return k_sets.get(head, ())
        if block == "L":
            return l_sets.get(head, ())
        return algebra.carrier(color)

    def evaluate(op, args):
        if op.code.startswith("id:"):
            return args[0]
        if op.code.startswith("f:"):
            return f[(op.code[2:], args[0])]
        base_op, word = tfg.split(op)
        values = [x if w == "X" else g[(c, x)] for w, c, x in zip(word, base_op.inputs, args)]
        return algebra.eval(base_op, values)

    return AlgebraInstance(tfg, carrier, evaluate, name=f"{tfg.name}/{algebra.name}")


class TreeMorphism(abc.ABC):
    """
    A morphism from T into symmetric operads, described by the tree each
    operation is sent to. gr_of needs the leaves of that tree, the way two
    trees are grafted (realised by an operation of T), and an operation
    whose tree is a bare edge, if there is one.
    """
    multi_choice = False

    def __init__(self, source, j_colors, name=""):
        self.source = source
        self.j_base = tuple(j_colors)
        self.name = name or f"{source.name}->SOp"

    @property
    def provenance(self):
        return f"{type(self).__name__}({self.source.provenance or self.source.name})"

    def j_colors(self, max_valence=None):
        return self.j_base

    @abc.abstractmethod
    def color(self, color):
        """The bouquet an operation color is sent to"""

    @abc.abstractmethod
    def tree(self, op):
        """The tree an operation is sent to"""

    def leaf_choices(self, op, max_valence=None):
        return [tuple(leaf.color for leaf in self.tree(op).leaves_by_label())]

    def root(self, op, leaves):
        return self.tree(op).color

    @abc.abstractmethod
    def graft(self, op, k, other):
        """The operation whose tree is other grafted at leaf k of op's tree, with its slot origin"""

    def leaf_unit(self, color):
        return None

    def as_polymonad_morphism(self):
        sop = SymmetricOperadMonad(self.j_base)

        def op_map(op):
            return sop.op_for_tree(self.tree(op)), tuple(range(op.arity))

        return PolyMonadMorphism(self.source, sop, self.color, op_map, name=self.name)

    def check(self, bound=2, max_valence=None, breadth=3):
        """Morphism squares, plus grafting agreeing with tree grafting"""
        report = self.as_polymonad_morphism().check(bound, max_valence, breadth)
        ops = self.source.all_operations(bound, max_valence)
        for op in ops:
            tree = self.tree(op)
            for leaf in tree.leaves_by_label():
                for other in ops:
                    if self.tree(other).color != leaf.color:
                        continue
                    report.checked += 1
                    grafted, origin = self.graft(op, leaf.label, other)
                    expected, expected_origin = trees.graft_at_leaf(tree, leaf.label, self.tree(other))
                    if self.tree(grafted).encode() != expected.encode() or tuple(origin) != expected_origin:
                        report.fail("graft", operation=op.code, leaf=leaf.label, other=other.code,
                                    result=grafted.code)
            for j in self.j_base:
                unit = self.leaf_unit(j)
                if unit is not None and self.tree(unit).encode() != trees.leaf(j, 1).encode():
                    report.fail("leaf unit", color=j, operation=unit.code)
        return report


class MonToSOp(TreeMorphism):
    """m_n goes to a chain of n unary vertices ending in one leaf"""

    def __init__(self, source=None):
        super().__init__(source or MonoidMonad(), ("*",), name="Mon->SOp")

    def color(self, color):
        return "<*;*>"

    def tree(self, op):
        t = trees.leaf("*", 1)
        for _ in range(op.arity):
            t = trees.vertex("*", [t])
        return t

    def graft(self, op, k, other):
        n, a = op.arity, other.arity
        return self.source.operation(f"m{n + a}"), [(0, i) for i in range(n)] + [(1, j) for j in range(a)]

    def leaf_unit(self, color):
        return self.source.operation("m0")


class NOpToSOp(TreeMorphism):
    """Planar trees viewed as symmetric ones with leaves labeled in planar order"""

    def __init__(self, source=None):
        source = source or PlanarOperadMonad()
        super().__init__(source, source.base_colors, name="NOp->SOp")

    def color(self, color):
        return color

    def tree(self, op):
        return trees.relabel_planar(trees.parse(op.code))

    def graft(self, op, k, other):
        tree, origin = trees.graft_at_leaf(trees.parse(op.code), k, trees.parse(other.code))
        return self.source.op_for_tree(tree), origin

    def leaf_unit(self, color):
        return self.source.op_for_tree(trees.leaf(color))


class IdToSOp(TreeMorphism):
    """The single operation goes to a stump; there is no bare-edge operation"""

    def __init__(self, source=None):
        super().__init__(source or IdentityMonad(), ("*",), name="Id->SOp")

    def color(self, color):
        return "<;*>"

    def tree(self, op):
        return trees.vertex("*")

    def graft(self, op, k, other):
        raise MalformedOperation(f"the stump of {op.code} has no leaf {k}", code=op.code)


class ModuleMorphism(TreeMorphism):
    """
    Left modules over a planar operad. A planar tree with leaf colors
    j_1..j_k acts on module elements whose bouquets have outputs j_1..j_k;
    the result lives in the concatenated bouquet.
    """
    multi_choice = True

    def __init__(self, source=None):
        source = source or PlanarOperadMonad()
        super().__init__(source, source.base_colors, name="NOp->modules")

    def j_colors(self, max_valence=None):
        mv = self.source.default_valence if max_valence is None else max_valence
        return tuple(sorted(self.source.bouquets(mv)))

    def color(self, color):
        return color

    def _bouquets_over(self, output, max_valence):
        return [b for b in self.j_colors(max_valence) if trees.parse_bouquet(b)[1] == output]

    def tree(self, op):
        return trees.parse(op.code)

    def leaf_choices(self, op, max_valence=None):
        options = [self._bouquets_over(leaf.color, max_valence) for leaf in self.tree(op).leaves()]
        return [tuple(choice) for choice in itertools.product(*options)]

    def root(self, op, leaves):
        inputs = tuple(c for b in leaves for c in trees.parse_bouquet(b)[0])
        return trees.bouquet_code(inputs, self.tree(op).color)

    def graft(self, op, k, other):
        tree, origin = trees.graft_at_leaf(self.tree(op), k, self.tree(other))
        return self.source.op_for_tree(tree), origin

    def leaf_unit(self, color):
        return self.source.op_for_tree(trees.leaf(trees.parse_bouquet(color)[1]))

    def prime_operations(self, inputs, target, operad=None):
        """
        Operations of the module operad from bouquets `inputs` to `target`:
        empty unless the inputs concatenate to the target's inputs; else the
        operad's elements at the bouquet formed by the outputs.
        """
        concatenated = tuple(c for b in inputs for c in trees.parse_bouquet(b)[0])
        target_inputs, target_output = trees.parse_bouquet(target)
        if concatenated != target_inputs:
            return ()
        shape = trees.bouquet_code([trees.parse_bouquet(b)[1] for b in inputs], target_output)
        if operad is None:
            return (self.source.unit(shape),)
        return operad.carrier(shape)

    def check(self, bound=2, max_valence=None, breadth=3):
        report = LawReport(self.name)
        for op in self.source.all_operations(bound, max_valence):
            for leaves in self.leaf_choices(op, max_valence):
                report.checked += 1
                root = self.root(op, leaves)
                if trees.parse_bouquet(root)[1] != self.tree(op).color:
                    report.fail("root", operation=op.code, leaves=list(leaves))
        return report


def module_morphism(monad=None):
    return ModuleMorphism(monad)


class GrothendieckMonad(PolynomialMonad):
    """
    Gr(T) for a morphism T -> SOp(J). Colors "I:c" for colors c of T and
    "J:j" for j in J. Operations:

        B:<b>            b itself, on I colors
        D:<b>            b acting on module elements at the leaves of its tree;
                         slots are the slots of b, then the leaves by label
        D:<b>|<leaves>   the same when leaf colors are a free choice
        U:<j>            formal identity on J:j when no operation of T has a
                         bare edge for tree
    """

    def __init__(self, morphism):
        super().__init__()
        self.morphism = morphism
        self.base = morphism.source
        self.infinite_colors = self.base.infinite_colors or morphism.multi_choice
        self.default_valence = self.base.default_valence
        self.name = f"Gr({self.base.name})"
        self.provenance = f"gr_of({morphism.provenance})"

    def colors(self, max_valence=None):
        return tuple(f"I:{c}" for c in self.base.colors(max_valence)) + tuple(
            f"J:{j}" for j in self.morphism.j_colors(max_valence)
        )

    def has_color(self, color):
        if color.startswith("I:"):
            return self.base.has_color(color[2:])
        return color.startswith("J:")

    def b_op(self, op):
        return Operation(f"B:{op.code}", f"I:{op.target}", tuple(f"I:{c}" for c in op.inputs))

    def d_op(self, op, leaves):
        code = f"D:{op.code}"
        if self.morphism.multi_choice and leaves:
            code += "|" + "".join(leaves)
        inputs = tuple(f"I:{c}" for c in op.inputs) + tuple(f"J:{j}" for j in leaves)
        return Operation(code, f"J:{self.morphism.root(op, leaves)}", inputs)

    def u_op(self, color):
        return Operation(f"U:{color}", f"J:{color}", (f"J:{color}",))

    def split_d(self, op):
        """(T operation, leaf colors) of a D operation"""
        body = op.code[2:]
        if self.morphism.multi_choice:
            cut = body.rfind("|<")
            if cut < 0:
                return self.base.operation(body), ()
            leaves = tuple("<" + part for part in body[cut + 2:].split("<") if part)
            return self.base.operation(body[:cut]), leaves
        base_op = self.base.operation(body)
        return base_op, self.morphism.leaf_choices(base_op)[0]

    def decode(self, code):
        kind, body = code[:2], code[2:]
        if kind == "B:":
            return self.b_op(self.base.operation(body))
        if kind == "U:":
            if self.morphism.leaf_unit(body) is not None:
                raise MalformedOperation(f"{code!r}: color {body} has a genuine unit", code=code)
            return self.u_op(body)
        if kind == "D:":
            base_op, leaves = self.split_d(Operation(code, "", ()))
            if self.morphism.multi_choice:
                widest = max([self.default_valence] + [len(trees.parse_bouquet(b)[0]) for b in leaves])
                if leaves not in self.morphism.leaf_choices(base_op, widest):
                    raise MalformedOperation(f"{code!r} has leaf colors its tree does not allow", code=code)
            return self.d_op(base_op, leaves)
        raise MalformedOperation(f"Gr code must start with B:, D: or U:, got {code!r}", code=code)

    def unit(self, color):
        if color.startswith("I:"):
            return self.b_op(self.base.unit(color[2:]))
        j = color[2:]
        op = self.morphism.leaf_unit(j)
        if op is None:
            return self.u_op(j)
        return self.d_op(op, (j,))

    def size(self, op):
        if op.code.startswith("U:"):
            return 0
        if op.code.startswith("B:"):
            return self.base.size(self.base.operation(op.code[2:]))
        return self.base.size(self.split_d(op)[0])

    def _compose(self, op, subs):
        if op.code.startswith("U:"):
            return Composite(subs[0], [(0, f) for f in range(subs[0].arity)])
        if op.code.startswith("B:"):
            base_op = self.base.operation(op.code[2:])
            composite = self.base.compose(base_op, [self.base.operation(s.code[2:]) for s in subs])
            return Composite(self.b_op(composite.operation), composite.origin)

        base_op, leaves = self.split_d(op)
        nb = base_op.arity
        first = self.base.compose(base_op, [self.base.operation(s.code[2:]) for s in subs[:nb]])
        current = first.operation
        provenance = list(first.origin)
        leaves = list(leaves)
        leaf_origin = []
        for k in range(len(leaves), 0, -1):
            sub = subs[nb + k - 1]
            position = nb + k - 1
            if sub == self.unit(f"J:{leaves[k - 1]}"):
                sub_arity = 0 if sub.code.startswith("U:") else self.split_d(sub)[0].arity
                leaf_origin[:0] = [(position, sub_arity)]
                continue
            sub_op, sub_leaves = self.split_d(sub)
            current, graft_origin = self.morphism.graft(current, k, sub_op)
            provenance = [
                provenance[idx] if which == 0 else (position, idx) for which, idx in graft_origin
            ]
            leaves[k - 1:k] = list(sub_leaves)
            leaf_origin[:0] = [(position, sub_op.arity + i) for i in range(len(sub_leaves))]
        result = self.d_op(current, tuple(leaves))
        return Composite(result, provenance + leaf_origin)

    def _operations(self, color, max_arity, max_valence, max_size):
        if color.startswith("I:"):
            return [self.b_op(op) for op in self.base.operations(color[2:], max_arity, max_valence, max_size)]
        j = color[2:]
        out = []
        if self.morphism.leaf_unit(j) is None:
            out.append(self.u_op(j))
        for op in self.base.all_operations(max_arity, max_valence, max_size):
            for leaves in self.morphism.leaf_choices(op, max_valence):
                if op.arity + len(leaves) <= max_arity and self.morphism.root(op, leaves) == j:
                    out.append(self.d_op(op, leaves))
        return out

    def all_operations(self, max_arity, max_valence=None, max_size=None):
        mv = self.default_valence if max_valence is None else max_valence
        out = [self.b_op(op) for op in self.base.all_operations(max_arity, mv, max_size)]
        for op in self.base.all_operations(max_arity, mv, max_size):
            for leaves in self.morphism.leaf_choices(op, mv):
                if op.arity + len(leaves) <= max_arity:
                    out.append(self.d_op(op, leaves))
        if max_arity >= 1:
            out.extend(self.u_op(j) for j in self.morphism.j_colors(mv) if self.morphism.leaf_unit(j) is None)
        return tuple(sorted(set(out), key=op_sort_key))

    def inclusion(self):
        """T -> Gr(T) onto the B summand"""
        return PolyMonadMorphism(self.base, self, lambda c: f"I:{c}",
                                 lambda op: (self.b_op(op), tuple(range(op.arity))),
                                 name=f"{self.base.name}->{self.name}")


def gr_of(morphism, bound=2, max_valence=None):
    """Gr(T) for a tree morphism, after checking it on bounded composites"""
    report = morphism.check(bound, max_valence)
    if not report.ok:
        logger.warning("morphism rejected", extra={"morphism": morphism.name,
                                                   "witness": report.counterexamples[0]})
        report.raise_for_failure()
    return GrothendieckMonad(morphism)


def pair_algebra(gr, operad, module, act):
    """
    Gr(T)-algebra from a T-algebra `operad`, module carriers keyed by J
    color, and act(op, o, leaf_values) giving the result of acting with the
    operad element o, produced by the T operation op.
    """

    def carrier(color):
        if color.startswith("I:"):
            return operad.carrier(color[2:])
        return module.get(color[2:], ())

    def evaluate(op, args):
        if op.code.startswith("U:"):
            return args[0]
        if op.code.startswith("B:"):
            return operad.eval(gr.base.operation(op.code[2:]), args)
        base_op, _ = gr.split_d(op)
        o = operad.eval(base_op, args[:base_op.arity])
        return act(base_op, o, args[base_op.arity:])

    return AlgebraInstance(gr, carrier, evaluate, name=f"{gr.name}/({operad.name})")


def encoding_isomorphism(left, right, color_map, op_map, bound=3, max_valence=None, breadth=3):
    """
    Check that op_map is a bijection of bounded operations commuting with
    targets, fibers and composition.
    """
    report = LawReport(f"{left.name}~{right.name}")
    ops = left.all_operations(bound, max_valence)
    images = {}
    for op in ops:
        report.checked += 1
        image = right.operation(op_map(op.code))
        if image.target != color_map(op.target) or image.inputs != tuple(color_map(c) for c in op.inputs):
            report.fail("shape", operation=op.code, image=image.code)
        images[op.code] = image.code
    right_ops = {op.code for op in right.all_operations(bound, max_valence)}
    if sorted(images.values()) != sorted(right_ops):
        report.fail("bijection", missing=sorted(right_ops - set(images.values())),
                    extra=sorted(set(images.values()) - right_ops))
    for op in ops:
        for subs in itertools.product(*[_pool(left, c, bound, max_valence, breadth) for c in op.inputs]):
            report.checked += 1
            composite = left.compose(op, subs)
            mapped = right.compose(right.operation(op_map(op.code)), [right.operation(op_map(s.code)) for s in subs])
            if op_map(composite.operation.code) != mapped.operation.code or composite.origin != mapped.origin:
                report.fail("composition", operation=op.code, subs=[s.code for s in subs])
    return report


def gr_mon_encoding(code):
    """Gr of the canonical Mon morphism to builtin Gr(Mon) codes"""
    kind, body = code[:2], code[2:]
    n = int(body[1:])
    return "(" + "o" * n + ")" if kind == "B:" else "[" + "o" * n + "#]"


GR_MON_COLORS = {"I:*": "r", "J:*": "m"}


@attrs.frozen
class PlusTree:
    """A tree whose vertices carry operation codes of T and edges colors of T"""
    color: str
    op: str | None = None
    children: tuple = ()
    mark: object = attrs.field(default=None, eq=False, repr=False)

    def encode(self):
        if self.op is None:
            return f"_{len(self.color)}:{self.color}"
        return "{" + f"{len(self.op)}:{self.op}" + "".join(ch.encode() for ch in self.children) + "}"

    def preorder(self):
        yield self
        for ch in self.children:
            yield from ch.preorder()

    def vertices(self):
        return [node for node in self.preorder() if node.op is not None]

    def leaves(self):
        return [node for node in self.preorder() if node.op is None]

    def unmarked(self):
        return attrs.evolve(self, children=tuple(ch.unmarked() for ch in self.children), mark=None)


def _read_sized(code, i):
    j = code.index(":", i)
    size = int(code[i:j])
    return code[j + 1:j + 1 + size], j + 1 + size


def parse_plus(code):
    tree, end = _parse_plus_at(code, 0)
    if end != len(code):
        raise MalformedOperation(f"trailing characters in {code!r}", code=code)
    return tree


def _parse_plus_at(code, i):
    try:
        if code[i] == "_":
            color, j = _read_sized(code, i + 1)
            return PlusTree(color), j
        if code[i] == "{":
            op, j = _read_sized(code, i + 1)
            children = []
            while code[j] != "}":
                child, j = _parse_plus_at(code, j)
                children.append(child)
            return PlusTree(None, op, tuple(children)), j + 1
    except (IndexError, ValueError) as exc:
        raise MalformedOperation(f"cannot read plus tree {code!r}", code=code) from exc
    raise MalformedOperation(f"unexpected {code[i]!r} at {i} in {code!r}", code=code)


class PlusMonad(PolynomialMonad):
    """
    T+: colors are operations of T, operations are trees decorated by
    operations of T, slots are the vertices in preorder, and the target of
    a tree is the composite it evaluates to.
    """

    def __init__(self, base):
        super().__init__()
        self.base = base
        self.infinite_colors = True
        self.default_valence = base.default_valence
        self.name = f"{base.name}+"
        self.provenance = f"plus({base.provenance or base.name})"
        self._evaluated = {}
        self._grown = {}

    def colors(self, max_valence=None):
        mv = self.default_valence if max_valence is None else max_valence
        return tuple(op.code for op in self.base.all_operations(mv, mv))

    def has_color(self, color):
        try:
            self.base.operation(color)
        except MalformedOperation:
            return False
        return True

    def _fill(self, tree):
        """Recolor edges from the decorations; checks slot colors"""
        if tree.op is None:
            return tree
        op = self.base.operation(tree.op)
        if len(tree.children) != op.arity:
            raise MalformedOperation(f"{op.code} needs {op.arity} children, got {len(tree.children)}", code=op.code)
        children = []
        for color, child in zip(op.inputs, tree.children):
            child = self._fill(child)
            if child.color != color:
                raise MalformedOperation(f"edge color {child.color} where {op.code} expects {color}", code=op.code)
            children.append(child)
        return PlusTree(op.target, op.code, tuple(children))

    def evaluate(self, tree):
        """(composite operation of T, for each leaf in planar order its slot in the composite)"""
        code = tree.encode()
        found = self._evaluated.get(code)
        if found is not None:
            return found
        if tree.op is None:
            result = (self.base.unit(tree.color), (0,))
        else:
            op = self.base.operation(tree.op)
            evaluated = [self.evaluate(ch) for ch in tree.children]
            composite = self.base.compose(op, [c for c, _ in evaluated])
            where = {pair: j for j, pair in enumerate(composite.origin)}
            leafmap = tuple(where[(e, slot)] for e, (_, lm) in enumerate(evaluated) for slot in lm)
            result = (composite.operation, leafmap)
        self._evaluated[code] = result
        return result

    def op_for_tree(self, tree):
        target, _ = self.evaluate(tree)
        return Operation(tree.encode(), target.code, tuple(v.op for v in tree.vertices()))

    def decode(self, code):
        tree = parse_plus(code)
        if tree.op is None:
            return self.op_for_tree(tree)
        filled = self._fill(tree)
        if filled.encode() != code:
            raise MalformedOperation(f"{code!r} has edge colors inconsistent with its vertices", code=code)
        return self.op_for_tree(filled)

    def corolla(self, op):
        return PlusTree(op.target, op.code, tuple(PlusTree(c) for c in op.inputs))

    def unit(self, color):
        return self.op_for_tree(self.corolla(self.base.operation(color)))

    def size(self, op):
        return op.arity

    def _compose(self, op, subs):
        outer = parse_plus(op.code)
        counter = itertools.count()

        def plug(inner, children, e):
            _, leafmap = self.evaluate(inner)
            inner_slots = itertools.count()
            leaves = iter(leafmap)

            def walk(node):
                if node.op is None:
                    return children[next(leaves)]
                mark = (e, next(inner_slots))
                return attrs.evolve(node, children=tuple(walk(ch) for ch in node.children), mark=mark)

            return walk(inner)

        def walk(node):
            if node.op is None:
                return node
            e = next(counter)
            children = [walk(ch) for ch in node.children]
            return plug(parse_plus(subs[e].code), children, e)

        result = walk(outer)
        origin = tuple(v.mark for v in result.vertices())
        return Composite(self.op_for_tree(result.unmarked()), origin)

    def grow(self, color, vertices, max_valence):
        """All trees with root edge color and exactly `vertices` vertices"""
        key = (color, vertices, max_valence)
        if key in self._grown:
            return self._grown[key]
        if vertices == 0:
            out = (PlusTree(color),)
        else:
            out = []
            for op in self.base.operations(color, max_valence, max_valence):
                for split in _compositions(vertices - 1, op.arity):
                    choices = [self.grow(c, n, max_valence) for c, n in zip(op.inputs, split)]
                    for children in itertools.product(*choices):
                        out.append(PlusTree(op.target, op.code, tuple(children)))
            out = tuple(out)
        self._grown[key] = out
        return out

    def _operations(self, color, max_arity, max_valence, max_size):
        target = self.base.operation(color)
        limit = max_arity if max_size is None else min(max_arity, max_size)
        for n in range(limit + 1):
            for tree in self.grow(target.target, n, max_valence):
                op = self.op_for_tree(tree)
                if op.target == color:
                    yield op

    def all_operations(self, max_arity, max_valence=None, max_size=None):
        mv = self.default_valence if max_valence is None else max_valence
        limit = max_arity if max_size is None else min(max_arity, max_size)
        edge_colors = sorted({op.target for op in self.base.all_operations(mv, mv)})
        out = [
            self.op_for_tree(tree)
            for c in edge_colors for n in range(limit + 1) for tree in self.grow(c, n, mv)
        ]
        return tuple(sorted(set(out), key=op_sort_key))


def _compositions(total, parts):
    return trees._compositions(total, parts)


def plus_construction(monad):
    return PlusMonad(monad)


class PlusToSOp(TreeMorphism):
    """
    T+ -> SOp(colors of T): a decorated tree, leaves labeled by the slot of
    the composite they feed.
    """

    def __init__(self, plus):
        j_colors = plus.base.colors(plus.default_valence)
        super().__init__(plus, j_colors, name=f"{plus.name}->SOp")
        self.plus = plus

    def color(self, color):
        op = self.plus.base.operation(color)
        return trees.bouquet_code(op.inputs, op.target)

    def tree(self, op):
        tree = parse_plus(op.code)
        _, leafmap = self.plus.evaluate(tree)
        labels = iter(leafmap)

        def walk(node):
            if node.op is None:
                return trees.leaf(node.color, next(labels) + 1)
            return trees.vertex(node.color, [walk(ch) for ch in node.children])

        return walk(tree)

    def graft(self, op, k, other):
        tree = parse_plus(op.code)
        _, leafmap = self.plus.evaluate(tree)
        target_leaf = leafmap.index(k - 1)
        planar = itertools.count()
        outer_slots = itertools.count()

        def inner_marked(node, counter):
            if node.op is None:
                return node
            return attrs.evolve(node, children=tuple(inner_marked(ch, counter) for ch in node.children),
                                mark=(1, next(counter)))

        def walk(node):
            if node.op is None:
                if next(planar) == target_leaf:
                    return inner_marked(parse_plus(other.code), itertools.count())
                return node
            mark = (0, next(outer_slots))
            return attrs.evolve(node, children=tuple(walk(ch) for ch in node.children), mark=mark)

        result = walk(tree)
        origin = [v.mark for v in result.vertices()]
        return self.plus.op_for_tree(result.unmarked()), origin

    def leaf_unit(self, color):
        return self.plus.op_for_tree(PlusTree(color))


def opetopic_sequence(monad, depth):
    """T, T+, T++, ... up to depth plus constructions"""
    sequence = [monad]
    for _ in range(depth):
        sequence.append(plus_construction(sequence[-1]))
    return sequence


def mon_plus_to_nop(plus, nop, code):
    """Mon+ tree to the planar tree with one vertex per decorated vertex"""

    def walk(node):
        if node.op is None:
            return trees.leaf("*")
        return trees.vertex("*", [walk(ch) for ch in node.children])

    return nop.op_for_tree(walk(parse_plus(code))).code


def nop_to_mon_plus(plus, nop, code):
    def walk(node):
        if node.kind == trees.LEAF:
            return PlusTree("*")
        return PlusTree("*", f"m{len(node.children)}", tuple(walk(ch) for ch in node.children))

    return plus.op_for_tree(walk(trees.parse(code))).code


def check_morphism_or_raise(morphism, bound=2):
    report = morphism.check(bound)
    if not report.ok:
        raise LawViolation(f"{morphism.name} is not a morphism", witness=report.counterexamples[0])
    return report
