"""
Pushouts of free algebra extensions X <- T K -> T L computed two ways: as
the colimit of a Set-valued diagram over the truncated T_{f,g} classifier
in one shot, and stage by stage as a sequence of pushouts

    Q_k --w_k--> L_k
     |            |
    S_{k-1} ----> S_k

with Q_k, L_k the colimits over q(k) and l(k).
"""

import itertools
import logging
import random

import attrs

from .classifier import (
    TruncationParams, build_classifier, localize, reflect, require_quasitame, take_slice,
)
from .exceptions import MalformedDiagram
from .polymonad import FiniteMonoid, GrMonoidMonad, MonoidMonad, PlanarOperadMonad, monoid_algebra
from .setcat import Cocone, SetValuedDiagram, colimit
from .unionfind import UnionFind

logger = logging.getLogger(__name__)

FIXED = "*"


@attrs.frozen(eq=False)
class ExtensionProblem:
    """
    A T-algebra X with color-indexed finite sets K and L and color
    preserving maps f: K -> L, g: K -> X, given as dicts keyed by
    (color, element).
    """
    monad: object
    algebra: object
    k_sets: dict = attrs.field(factory=dict)
    l_sets: dict = attrs.field(factory=dict)
    f: dict = attrs.field(factory=dict)
    g: dict = attrs.field(factory=dict)
    truncation: TruncationParams = attrs.field(factory=TruncationParams)
    name: str = "problem"

    def validate(self, check_algebra=False):
        for color, elements in self.k_sets.items():
            for x in elements:
                if self.f.get((color, x)) not in self.l_sets.get(color, ()):
                    raise MalformedDiagram(f"f is undefined or leaves color {color} at {x!r}", offender=(color, x))
                if self.g.get((color, x)) not in self.algebra.carrier(color):
                    raise MalformedDiagram(f"g is undefined or leaves color {color} at {x!r}", offender=(color, x))
        if check_algebra:
            self.algebra.check(bound=2).raise_for_failure()
        return self

    def slot_values(self, color, letter):
        if letter == "X":
            return self.algebra.carrier(color)
        if letter == "K":
            return tuple(self.k_sets.get(color, ()))
        return tuple(self.l_sets.get(color, ()))

    def with_truncation(self, truncation):
        return attrs.evolve(self, truncation=truncation)

    def describe(self):
        return {
            "name": self.name,
            "monad": self.monad.name,
            "algebra": self.algebra.name,
            "K": {c: list(v) for c, v in sorted(self.k_sets.items())},
            "L": {c: list(v) for c, v in sorted(self.l_sets.items())},
            "truncation": self.truncation.as_dict(),
        }


def _action_parts(classifier, gen):
    """(moving slot, sub-operations, source slots covering each target slot)"""
    monad = classifier.monad
    target_id, slots = classifier.data[gen.id]
    z = classifier.objects[target_id]
    subs = [monad.operation(code) for code, _ in slots]
    composite = monad.compose(z.operation, subs)
    covered = [[None] * sub.arity for sub in subs]
    for i, (j, f) in enumerate(composite.origin):
        covered[j][f] = i
    if gen.label == "X":
        moving = next(j for j, sub in enumerate(subs) if not monad.is_unit(sub))
    else:
        moving = next(j for j, (_, word) in enumerate(slots) if word == "K" and z.coloring[j] != "K")
    return moving, subs, covered, z


def _make_action(prob, classifier, gen):
    moving, subs, covered, z = _action_parts(classifier, gen)
    color = z.operation.inputs[moving]
    table = prob.f if gen.label == "F" else prob.g

    def act(v):
        out = []
        for j, sub in enumerate(subs):
            if j != moving:
                out.append(v[covered[j][0]])
            elif gen.label == "X":
                out.append(prob.algebra.eval(sub, [v[i] for i in covered[j]]))
            else:
                out.append(table[(color, v[covered[j][0]])])
        return tuple(out)

    return act


def object_value(prob, z):
    return tuple(itertools.product(*[prob.slot_values(c, letter)
                                     for c, letter in zip(z.operation.inputs, z.coloring)]))


def build_diagram(prob, classifier=None):
    """
    The Set-valued diagram on the T_{f,g} classifier: an object's value is
    the product over its slots, X generators evaluate in the algebra, F and
    G generators apply f and g.
    """
    classifier = classifier or build_classifier(prob.monad, "T_{f,g}", prob.truncation, relations=False)
    value = {obj_id: object_value(prob, z) for obj_id, z in classifier.objects.items()}
    action = {gen.id: _make_action(prob, classifier, gen) for gen in classifier.category.generators}
    return SetValuedDiagram(classifier.category, value, action)


def _key(classifier, element):
    obj, x = element
    return classifier.category.object_index[obj], repr(x)


def _by_color(classifier, elements):
    sizes = {}
    for obj, _ in elements:
        color = classifier.objects[obj].operation.target
        sizes[color] = sizes.get(color, 0) + 1
    return dict(sorted(sizes.items()))


@attrs.frozen(eq=False)
class Stage:
    k: int
    elements: tuple
    sizes: dict
    q_size: int = 0
    l_size: int = 0
    connecting: dict = attrs.field(factory=dict, repr=False)
    alpha: dict = attrs.field(factory=dict, repr=False)
    w: dict = attrs.field(factory=dict, repr=False)
    square_commutes: bool = True
    uncovered: int = 0

    def __len__(self):
        return len(self.elements)

    def as_dict(self, elements=False):
        out = {"k": self.k, "size": len(self.elements), "sizes": self.sizes,
               "Q": self.q_size, "L": self.l_size, "square_commutes": self.square_commutes, "uncovered": self.uncovered}
        if elements:
            out["elements"] = [[obj, repr(x)] for obj, x in self.elements]
        return out


@attrs.frozen(eq=False)
class FiltrationResult:
    problem: ExtensionProblem
    classifier: object
    diagram: SetValuedDiagram
    stages: tuple
    legs: dict = attrs.field(repr=False)
    stable: bool = True
    notes: tuple = ()

    @property
    def final(self):
        return self.stages[-1]

    def sizes(self):
        return [len(stage) for stage in self.stages]

    def cocone(self):
        return Cocone(self.final.elements, self.legs)

    def as_dict(self, elements=False):
        return {
            "problem": self.problem.describe(),
            "stages": [stage.as_dict(elements) for stage in self.stages],
            "sizes": self.sizes(),
            "stable": self.stable,
            "notes": list(self.notes),
        }


def _restricted_colimit(diagram, piece):
    return colimit(diagram.restrict(piece.category))


def _alpha(classifier, diagram, q_piece, q_cocone, previous_legs):
    """
    Q_k -> S_{k-1}: send (b, v) along a G generator on any K slot. Members
    of one Q_k class must agree. Classes with no member having a G
    generator inside the truncation come back as uncovered; the stage
    glues them on the L side only, as the truncated colimit does.
    """
    category = classifier.category
    alpha = {}
    for obj in q_piece.category.objects:
        for gen in category.out_edges[obj]:
            if gen.label != "G":
                continue
            for x in diagram.value[obj]:
                klass = q_cocone.legs[obj][x]
                image = previous_legs[gen.target][diagram.apply(gen.id, x)]
                if alpha.setdefault(klass, image) != image:
                    raise MalformedDiagram(f"two G generators disagree on the Q class of {obj!r}", offender=gen.id)
    uncovered = tuple(klass for klass in q_cocone.apex if klass not in alpha)
    return alpha, uncovered


def _w(classifier, diagram, q_piece, q_cocone, l_cocone):
    w = {}
    for obj in q_piece.category.objects:
        target, path = reflect(classifier, obj, "toL")
        for x in diagram.value[obj]:
            image = l_cocone.legs[target.id][diagram.apply_path(path, x)]
            klass = q_cocone.legs[obj][x]
            if w.setdefault(klass, image) != image:
                raise MalformedDiagram(f"reflection is not constant on the Q class of {obj!r}", offender=obj)
    return w


def run_filtration(prob, classifier=None, diagram=None, check_stability=True):
    """
    S_0 = colimit over p(0), then S_k as the pushout of S_{k-1} <- Q_k -> L_k
    for k up to the truncation degree. Legs to the final stage are built
    from the stage maps alone and checked to form a cocone.
    """
    classifier = classifier or build_classifier(prob.monad, "T_{f,g}", prob.truncation, relations=False)
    diagram = diagram or build_diagram(prob, classifier)
    base = take_slice(classifier, "p", 0)
    first = _restricted_colimit(diagram, base)
    stages = [Stage(0, first.apex, _by_color(classifier, first.apex))]
    legs = {obj: dict(first.legs[obj]) for obj in base.category.objects}

    for k in range(1, prob.truncation.max_degree + 1):
        q_piece = take_slice(classifier, "q", k)
        l_piece = take_slice(classifier, "l", k)
        q_cocone = _restricted_colimit(diagram, q_piece)
        l_cocone = _restricted_colimit(diagram, l_piece)
        alpha, uncovered = _alpha(classifier, diagram, q_piece, q_cocone, legs)
        w = _w(classifier, diagram, q_piece, q_cocone, l_cocone)

        uf = UnionFind()
        for element in stages[-1].elements:
            uf.add(("S", element))
        for element in l_cocone.apex:
            uf.add(("L", element))
        for klass in alpha:
            uf.union(("S", alpha[klass]), ("L", w[klass]))
        chosen = {}
        for root, members in uf.component_dict().items():
            chosen[root] = min(members, key=lambda m: (0 if m[0] == "S" else 1, _key(classifier, m[1])))[1]
        elements = tuple(sorted(chosen.values(), key=lambda e: _key(classifier, e)))
        connecting = {e: chosen[uf.find(("S", e))] for e in stages[-1].elements}
        from_l = {e: chosen[uf.find(("L", e))] for e in l_cocone.apex}
        commutes = all(connecting[alpha[c]] == from_l[w[c]] for c in alpha)

        legs = {obj: {x: connecting[y] for x, y in table.items()} for obj, table in legs.items()}
        for obj in l_piece.category.objects:
            legs[obj] = {x: from_l[l_cocone.legs[obj][x]] for x in diagram.value[obj]}
        for obj in q_piece.category.objects:
            legs[obj] = {x: from_l[w[q_cocone.legs[obj][x]]] for x in diagram.value[obj]}
        stages.append(Stage(k, elements, _by_color(classifier, elements), len(q_cocone), len(l_cocone),
                            connecting, alpha, w, commutes, len(uncovered)))
        logger.debug("filtration stage", extra={"k": k, "size": len(elements), "Q": len(q_cocone),
                                                 "L": len(l_cocone), "uncovered": len(uncovered)})

    top = take_slice(classifier, "p", prob.truncation.max_degree)
    cocone = Cocone(stages[-1].elements, legs)
    if not cocone.check(diagram.restrict(top.category)):
        raise MalformedDiagram("filtration legs do not form a cocone", offender=prob.name)

    stable, notes = True, [f"truncated at xdeg <= {prob.truncation.max_xdeg}"]
    uncovered = sum(stage.uncovered for stage in stages)
    if uncovered:
        stable = False
        notes.append(f"{uncovered} Q class(es) without a G generator inside the truncation")
        logger.warning("filtration truncated", extra={"problem": prob.name, "uncovered": uncovered})
    if check_stability:
        wider = run_filtration(prob.with_truncation(prob.truncation.bumped()), check_stability=False)
        if wider.sizes() != [len(s) for s in stages]:
            stable = False
            notes.append(f"stage sizes change at xdeg {prob.truncation.max_xdeg + 1}: {wider.sizes()}")
            logger.warning("filtration unstable", extra={"problem": prob.name, "sizes": wider.sizes()})
    logger.info("filtration", extra={"problem": prob.name, "sizes": [len(s) for s in stages], "stable": stable})
    return FiltrationResult(prob, classifier, diagram, tuple(stages), legs, stable, tuple(notes))


@attrs.frozen(eq=False)
class OracleResult:
    cocone: Cocone
    sizes: dict
    stable: bool = True

    def __len__(self):
        return len(self.cocone)


def direct_oracle(prob, classifier=None, diagram=None, check_stability=True):
    """Colimit over the whole truncated p(k) at once"""
    classifier = classifier or build_classifier(prob.monad, "T_{f,g}", prob.truncation, relations=False)
    diagram = diagram or build_diagram(prob, classifier)
    top = take_slice(classifier, "p", prob.truncation.max_degree)
    cocone = _restricted_colimit(diagram, top)
    stable = True
    if check_stability:
        wider = direct_oracle(prob.with_truncation(prob.truncation.bumped()), check_stability=False)
        stable = len(wider) == len(cocone)
    return OracleResult(cocone, _by_color(classifier, cocone.apex), stable)


@attrs.frozen
class Comparison:
    match: bool
    sizes: tuple
    witness: dict = attrs.field(factory=dict)

    @property
    def verdict(self):
        return "MATCH" if self.match else "MISMATCH"

    def as_dict(self):
        return {"verdict": self.verdict, "sizes": list(self.sizes), "witness": self.witness}


def match_cocones(left, right, pairs):
    """
    Whether x -> y for (x, y) in pairs is a well defined bijection between
    the apexes; pairs come from legs over the same diagram.
    """
    forward, backward = {}, {}
    for x, y in pairs:
        if forward.setdefault(x, y) != y:
            return Comparison(False, (len(left), len(right)), {"split": repr(x)})
        if backward.setdefault(y, x) != x:
            return Comparison(False, (len(left), len(right)), {"merged": repr(y)})
    if len(forward) != len(left) or len(backward) != len(right):
        return Comparison(False, (len(left), len(right)), {"unreached": len(left) - len(forward)})
    return Comparison(True, (len(left), len(right)))


def compare(result, oracle):
    """Filtration final stage against the oracle through their legs"""
    top = take_slice(result.classifier, "p", result.problem.truncation.max_degree)
    pairs = (
        (result.legs[obj][x], oracle.cocone.legs[obj][x])
        for obj in top.category.objects for x in result.diagram.value[obj]
    )
    return match_cocones(result.final.elements, oracle.cocone.apex, pairs)


def _slot_positions(classifier, obj, x_part):
    return [i for i, c in enumerate(classifier.objects[obj].coloring) if (c == "X") == x_part]


def _projected_action(prob, classifier, gen, source_positions, target_positions):
    """Action of gen on the slots listed, in the order listed"""
    moving, subs, covered, z = _action_parts(classifier, gen)
    color = z.operation.inputs[moving]
    table = prob.f if gen.label == "F" else prob.g
    index = {i: n for n, i in enumerate(source_positions)}

    def act(v):
        out = []
        for j in target_positions:
            if j != moving:
                out.append(v[index[covered[j][0]]])
            elif gen.label == "X":
                out.append(prob.algebra.eval(subs[j], [v[index[i]] for i in covered[j]]))
            else:
                out.append(table[(color, v[index[covered[j][0]]])])
        return tuple(out)

    return act


def decomposition_check(prob, component, k, certificate, classifier=None):
    """
    On the component of q(k) containing `component`, the colimit of the
    diagram against the product of the colimit of its X part over q_c[F^-1]
    and of its K/L part over q_c[X^-1]. The X part puts a point on every K
    and L slot, the K/L part a point on every X slot.
    """
    require_quasitame(certificate)
    classifier = classifier or build_classifier(prob.monad, "T_{f,g}", prob.truncation, relations=False)
    category = take_slice(classifier, "component", k, component).category
    full = build_diagram(prob, classifier).restrict(category)
    whole = colimit(full)

    positions = {part: {obj: _slot_positions(classifier, obj, part) for obj in category.objects}
                 for part in (True, False)}

    def values(part):
        out = {}
        for obj in category.objects:
            z = classifier.objects[obj]
            out[obj] = tuple(itertools.product(*[
                prob.slot_values(z.operation.inputs[i], z.coloring[i]) for i in positions[part][obj]
            ]))
        return out

    x_values, kl_values = values(True), values(False)
    x_action, kl_action = {}, {}
    for gen in category.generators:
        if gen.label == "X":
            x_action[gen.id] = _projected_action(prob, classifier, gen, positions[True][gen.source],
                                                 positions[True][gen.target])
            forward = _projected_action(prob, classifier, gen, positions[False][gen.source],
                                        positions[False][gen.target])
            table = {v: forward(v) for v in kl_values[gen.source]}
            kl_action[gen.id] = table
            kl_action[f"{gen.id}~"] = {y: x for x, y in table.items()}
        else:
            x_action[gen.id] = {v: v for v in x_values[gen.source]}
            x_action[f"{gen.id}~"] = {v: v for v in x_values[gen.target]}
            kl_action[gen.id] = _projected_action(prob, classifier, gen, positions[False][gen.source],
                                                  positions[False][gen.target])
    x_colimit = colimit(SetValuedDiagram(localize(category, "F"), x_values, x_action))
    kl_colimit = colimit(SetValuedDiagram(localize(category, "X"), kl_values, kl_action))
    product = tuple(itertools.product(x_colimit.apex, kl_colimit.apex))
    pairs = (
        (whole.legs[obj][v], (x_colimit.legs[obj][_project(v, positions[True][obj])],
                              kl_colimit.legs[obj][_project(v, positions[False][obj])]))
        for obj in category.objects for v in full.value[obj]
    )
    comparison = match_cocones(whole.apex, product, pairs)
    logger.info("decomposition check", extra={"component": component, "k": k, "match": comparison.match})
    return comparison


def _project(values, positions):
    return tuple(values[i] for i in positions)


def punctured_cube(f, k_set, l_set, n):
    """
    Colimit of the punctured n-cube of words in K, L (all-L word removed)
    with products of K and L as values and f on each K -> L edge.
    """
    uf = UnionFind()
    words = [w for w in itertools.product("KL", repeat=n) if "K" in w]
    for word in words:
        for values in itertools.product(*[k_set if c == "K" else l_set for c in word]):
            uf.add((word, values))
            for i, c in enumerate(word):
                if c == "K":
                    moved = word[:i] + ("L",) + word[i + 1:]
                    if "K" in moved:
                        image = values[:i] + (f[values[i]],) + values[i + 1:]
                        uf.union((word, values), (moved, image))
    return uf


def cube_check(result, k):
    """
    For a Mon problem with one color: Q_k restricted to objects without X
    slots against the punctured cube, and w_k on alternating objects
    against X^(k+1) x f applied slotwise.
    """
    prob, classifier, diagram = result.problem, result.classifier, result.diagram
    color = FIXED
    f = {x: prob.f[(color, x)] for x in prob.k_sets.get(color, ())}
    cube = punctured_cube(f, tuple(prob.k_sets.get(color, ())), tuple(prob.l_sets.get(color, ())), k)
    q_piece = take_slice(classifier, "q", k)
    zero = [obj for obj in q_piece.category.objects if classifier.objects[obj].xdeg == 0]
    q_zero = colimit(diagram.restrict(q_piece.category.full_subcategory(zero)))
    pairs = (
        (q_zero.legs[obj][v], cube.find((tuple(classifier.objects[obj].coloring), v)))
        for obj in zero for v in diagram.value[obj]
    )
    cube_roots = tuple(cube.component_dict())
    report = {"punctured_cube": match_cocones(q_zero.apex, cube_roots, pairs).match}

    stage = result.stages[k]
    l_piece = take_slice(classifier, "l", k)
    l_cocone = colimit(diagram.restrict(l_piece.category))
    q_cocone = colimit(diagram.restrict(q_piece.category))
    alternating = [
        obj for obj in q_piece.category.objects
        if classifier.objects[obj].coloring == "X" + "X".join(
            c for c in classifier.objects[obj].coloring if c != "X") + "X"
    ]
    agree = True
    for obj in alternating:
        z = classifier.objects[obj]
        target = classifier.objects[obj].operation.code + "|" + z.coloring.replace("K", "L")
        for v in diagram.value[obj]:
            image = tuple(f[x] if c == "K" else x for c, x in zip(z.coloring, v))
            if stage.w[q_cocone.legs[obj][v]] != l_cocone.legs[target][image]:
                agree = False
    report["pushout_product"] = agree
    report["alternating_objects"] = len(alternating)
    return report


def free_product_normal_forms(monoid, letters, k):
    """Words x0 l1 x1 ... lj xj with j <= k, xi in the monoid, li in letters"""
    out = []
    for j in range(k + 1):
        for xs in itertools.product(monoid.elements, repeat=j + 1):
            for ls in itertools.product(letters, repeat=j):
                word = [xs[0]]
                for letter, x in zip(ls, xs[1:]):
                    word.extend([letter, x])
                out.append(tuple(word))
    return out


MONOIDS = {
    "trivial": FiniteMonoid.trivial,
    "z2": lambda: FiniteMonoid.cyclic(2),
    "z3": lambda: FiniteMonoid.cyclic(3),
    "bool": FiniteMonoid.boolean,
    "left_zero": lambda: FiniteMonoid.left_zero(2),
}


def monoid_problem(monoid, k_elements=(), l_elements=("l",), f=None, g=None, degree=2, xdeg=None,
                   monad=None, color=FIXED, name=""):
    """A one-color Mon (or Gr(Mon) on a chosen color) extension problem"""
    monad = monad or MonoidMonad()
    algebra = monoid_algebra(monad, monoid)
    trunc = TruncationParams(max_degree=degree, max_xdeg=degree + 1 if xdeg is None else xdeg)
    return ExtensionProblem(
        monad, algebra,
        {color: tuple(k_elements)} if k_elements else {},
        {color: tuple(l_elements)},
        {(color, x): y for x, y in (f or {}).items()},
        {(color, x): y for x, y in (g or {}).items()},
        trunc, name or f"{monad.name}/{monoid.name}",
    ).validate()


def random_problem(seed, monad_name=None):
    """
    A reproducible small instance over Mon, Gr(Mon) or NOp(1): carriers of
    at most 3 elements, at most 2 K and L elements. NOp instances have
    degree 2 and vertices of valence up to 2.
    """
    rng = random.Random(seed)
    monad_name = monad_name or rng.choice(["mon", "gr_mon", "nop"])
    if monad_name == "nop":
        monad = PlanarOperadMonad()
        monoid = MONOIDS[rng.choice(["trivial", "z2", "bool"])]()
        colors = ["<*;*>"]
        degree, xdeg = 2, 2
    else:
        monad = MonoidMonad() if monad_name == "mon" else GrMonoidMonad()
        monoid = MONOIDS[rng.choice(sorted(MONOIDS))]()
        colors = list(monad.colors())
        degree = rng.choice([1, 2]) if monad_name == "gr_mon" else rng.choice([1, 2, 3])
        xdeg = degree + 1
    algebra = monoid_algebra(monad, monoid)
    k_sets, l_sets, f, g = {}, {}, {}, {}
    for color in colors:
        ks = tuple(f"k{i}" for i in range(rng.randint(0, 1 if degree > 2 else 2)))
        ls = tuple(f"l{i}" for i in range(rng.randint(1, 2)))
        l_sets[color] = ls
        if ks:
            k_sets[color] = ks
        for x in ks:
            f[(color, x)] = rng.choice(ls)
            g[(color, x)] = rng.choice(algebra.carrier(color))
    trunc = TruncationParams(max_degree=degree, max_xdeg=xdeg, max_valence=2 if monad_name == "nop" else None)
    return ExtensionProblem(monad, algebra, k_sets, l_sets, f, g, trunc, name=f"seed{seed}/{monad_name}").validate()
