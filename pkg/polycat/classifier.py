"""
Truncated classifiers of internal algebras.

An object is an operation b of the monad with each slot colored X, K or L.
Morphisms are generated by

    X   contracting an all-X corolla c plugged into an X slot of the target
    F   turning one K slot into an L slot
    G   turning one K slot into an X slot

Every generator carries a datum: for each slot of its target, the operation
plugged there and the colors of the source slots it covers. Composing data
is composing in the monad, and two paths are the same morphism exactly when
their data agree. Relations are the length-two paths with equal data.
"""

import itertools
import logging
from collections import defaultdict

import attrs

from .exceptions import BudgetExhausted, ClassifierKindError, ConsistencyViolation, HypothesisNotMet
from .setcat import (
    Certificate, ComponentVerdict, Generator, PresentedCategory, Verdict, TERMINAL_OBJECTS,
    groupoid_trivial, pi0, sink_classes, terminal_certificate,
)

logger = logging.getLogger(__name__)

KINDS = {
    "T+1": ("XK", ""),
    "T+2": ("XKL", ""),
    "T_f": ("XKL", "F"),
    "T_g": ("XK", "G"),
    "T_{f,g}": ("XKL", "FG"),
}

KIND_ALIASES = {"t+1": "T+1", "t+2": "T+2", "tf": "T_f", "t_f": "T_f", "tg": "T_g", "t_g": "T_g",
                "tfg": "T_{f,g}", "t_fg": "T_{f,g}", "t_{f,g}": "T_{f,g}"}

SLICE_KINDS = ("p", "q", "l", "w", "qbar", "xl", "component")


def normalize_kind(kind):
    key = KIND_ALIASES.get(kind.strip().lower(), kind.strip())
    if key not in KINDS:
        raise ClassifierKindError(f"unknown classifier kind {kind!r}; choose from {', '.join(KINDS)}")
    return key


@attrs.frozen
class ClassifierObject:
    operation: object
    coloring: str

    @property
    def id(self):
        return f"{self.operation.code}|{self.coloring}"

    @property
    def p(self):
        return self.coloring.count("K")

    @property
    def q(self):
        return self.coloring.count("L")

    @property
    def degree(self):
        return self.p + self.q

    @property
    def xdeg(self):
        return self.coloring.count("X")

    @property
    def arity(self):
        return len(self.coloring)

    @property
    def sort_key(self):
        return (self.xdeg, self.degree, self.arity, self.operation.code, self.coloring)

    def __str__(self):
        return f"{self.operation.code}[{self.coloring}]"


def _non_negative(instance, attribute, value):
    if value is not None and value < 0:
        raise ValueError(f"{attribute.name} must be >= 0, got {value}")


@attrs.frozen
class TruncationParams:
    """Bounds on degree (#K + #L), xdeg (#X), operation size and bouquet valence"""
    max_degree: int = attrs.field(default=2, validator=_non_negative)
    max_xdeg: int = attrs.field(default=3, validator=_non_negative)
    max_arity: int | None = attrs.field(default=None, validator=_non_negative)
    max_valence: int | None = attrs.field(default=None, validator=_non_negative)

    @property
    def valence(self):
        return self.max_degree + self.max_xdeg if self.max_valence is None else self.max_valence

    def bumped(self):
        """One more X, and one more vertex and input wherever those are bounded"""
        return attrs.evolve(
            self,
            max_xdeg=self.max_xdeg + 1,
            max_arity=None if self.max_arity is None else self.max_arity + 1,
            max_valence=None if self.max_valence is None else self.max_valence + 1,
        )

    def as_dict(self):
        return {
            "max_degree": self.max_degree,
            "max_xdeg": self.max_xdeg,
            "max_arity": self.max_arity,
            "max_valence": self.valence,
        }


class Classifier:
    """
    A built classifier: the presented category plus the objects and
    generator data behind it.
    """

    def __init__(self, monad, kind, truncation, objects, generators, data, relations):
        self.monad = monad
        self.kind = kind
        self.truncation = truncation
        self.objects = objects
        self.data = data
        self.category = PresentedCategory(
            objects=list(objects),
            generators=generators,
            relations=relations,
            decorations=dict(objects),
            name=f"{monad.name}^{kind}",
        )

    def __repr__(self):
        return f"<Classifier {self.category.name} objects={len(self.objects)}>"

    @property
    def letters(self):
        return KINDS[self.kind][0]

    @property
    def moves(self):
        return KINDS[self.kind][1]

    def obj(self, obj_id):
        return self.objects[obj_id]

    def identity_datum(self, obj_id):
        z = self.objects[obj_id]
        return obj_id, tuple(
            (self.monad.unit(c).code, letter) for c, letter in zip(z.operation.inputs, z.coloring)
        )

    def compose_data(self, first, second):
        """Datum of first followed by second"""
        monad = self.monad
        u = self.objects[second[0]]
        outer = [monad.operation(code) for code, _ in second[1]]
        middle = monad.compose(u.operation, outer)
        where = {pair: i for i, pair in enumerate(middle.origin)}
        slots = []
        for j, sub in enumerate(outer):
            covered = [where[(j, f)] for f in range(sub.arity)]
            inner = [monad.operation(first[1][i][0]) for i in covered]
            composite = monad.compose(sub, inner)
            word = "".join(first[1][covered[f]][1][g] for f, g in composite.origin)
            slots.append((composite.operation.code, word))
        return second[0], tuple(slots)

    def path_datum(self, source, path):
        datum = self.identity_datum(source)
        for gen_id in path:
            datum = self.compose_data(datum, self.data[gen_id])
        return datum

    def slice(self, kind, k, component=None):
        return take_slice(self, kind, k, component)


def _colorings(letters, arity, trunc):
    for word in itertools.product(letters, repeat=arity):
        word = "".join(word)
        xdeg = word.count("X")
        if xdeg <= trunc.max_xdeg and arity - xdeg <= trunc.max_degree:
            yield word


def build_classifier(monad, kind="T+1", truncation=None, relations=True):
    """
    The classifier of the given kind truncated at `truncation`. An empty
    object set is not an error.
    """
    kind = normalize_kind(kind)
    trunc = truncation or TruncationParams()
    letters, moves = KINDS[kind]
    valence = trunc.valence
    limit = trunc.max_degree + trunc.max_xdeg

    objects = {}
    for color in monad.colors(valence):
        for op in monad.operations(color, limit, valence, trunc.max_arity):
            for word in _colorings(letters, op.arity, trunc):
                z = ClassifierObject(op, word)
                objects[z.id] = z
    ordered = dict(sorted(objects.items(), key=lambda item: item[1].sort_key))

    generators, data = [], {}
    for z in ordered.values():
        generators.extend(_x_generators(monad, z, ordered, trunc, data))
    for z in ordered.values():
        for e, letter in enumerate(z.coloring):
            if letter != "K":
                continue
            for move, replacement in (("F", "L"), ("G", "X")):
                if move not in moves:
                    continue
                target = ClassifierObject(z.operation, z.coloring[:e] + replacement + z.coloring[e + 1:])
                if target.id not in ordered:
                    continue
                gen_id = f"{move}:{z.id}#{e}"
                generators.append(Generator(gen_id, z.id, target.id, move))
                data[gen_id] = (target.id, tuple(
                    (monad.unit(c).code, "K" if i == e else letter_)
                    for i, (c, letter_) in enumerate(zip(z.operation.inputs, target.coloring))
                ))

    classifier = Classifier(monad, kind, trunc, ordered, generators, data, ())
    if relations:
        classifier = Classifier(monad, kind, trunc, ordered, generators, data,
                                _relations(classifier))
    logger.info("classifier built", extra={
        "monad": monad.name, "kind": kind, "objects": len(ordered), "generators": len(generators),
        "relations": len(classifier.category.relations), "truncation": trunc.as_dict(),
    })
    return classifier


def _x_generators(monad, z, objects, trunc, data):
    """X generators into z: one per X slot and non-identity corolla fitting the bounds"""
    out = []
    for e, letter in enumerate(z.coloring):
        if letter != "X":
            continue
        room = trunc.max_xdeg - z.xdeg + 1
        for c in monad.operations(z.operation.inputs[e], room, trunc.valence):
            if monad.is_unit(c):
                continue
            composite = monad.substitute(z.operation, e, c)
            word = "".join("X" if e_ == e else z.coloring[e_] for e_, _ in composite.origin)
            source = ClassifierObject(composite.operation, word)
            if source.id not in objects:
                continue
            gen_id = f"X:{z.id}#{e}#{c.code}"
            out.append(Generator(gen_id, source.id, z.id, "X"))
            data[gen_id] = (z.id, tuple(
                (c.code, "X" * c.arity) if i == e else (monad.unit(color).code, letter_)
                for i, (color, letter_) in enumerate(zip(z.operation.inputs, z.coloring))
            ))
    return out


def _relations(classifier):
    """
    For every pair of composable generators, relate the path to the single
    generator or identity with the same datum, or else to the first path
    with that datum out of the same object.
    """
    category = classifier.category
    by_datum = {}
    for gen in category.generators:
        by_datum[(gen.source, classifier.data[gen.id])] = gen.id
    groups = defaultdict(list)
    for gen in category.generators:
        for nxt in category.out_edges[gen.target]:
            datum = classifier.compose_data(classifier.data[gen.id], classifier.data[nxt.id])
            groups[(gen.source, datum)].append((gen.id, nxt.id))
    relations = []
    for (source, datum), paths in groups.items():
        if datum == classifier.identity_datum(source):
            representative = ()
        elif (source, datum) in by_datum:
            representative = (by_datum[(source, datum)],)
        else:
            representative = paths[0]
        for path in paths:
            if path != representative:
                relations.append((path, representative))
    return relations


@attrs.frozen
class ClassifierSlice:
    classifier: Classifier
    kind: str
    k: int
    category: PresentedCategory
    component: str | None = None

    @property
    def objects(self):
        return self.category.objects


def _member(kind, z, k):
    if kind == "p":
        return z.degree <= k
    if kind == "w":
        return z.degree == k
    if kind in ("q", "component"):
        return z.degree == k and z.p != 0
    if kind == "l":
        return z.degree == k and z.p == 0
    if kind == "qbar":
        return z.degree <= k and not (z.degree == k and z.p == 0)
    if kind == "xl":
        return z.degree <= k and z.p == 0
    raise ClassifierKindError(f"unknown slice {kind!r}; choose from {', '.join(SLICE_KINDS)}")


def take_slice(classifier, kind, k, component=None):
    """
    Full subcategory by degree: p (<= k), w (= k), q (= k with a K edge),
    l (= k, L edges only), qbar (p minus l), xl (<= k without K edges), or
    the component of q containing the object `component`.
    """
    if kind not in SLICE_KINDS:
        raise ClassifierKindError(f"unknown slice {kind!r}; choose from {', '.join(SLICE_KINDS)}")
    members = [obj_id for obj_id, z in classifier.objects.items() if _member(kind, z, k)]
    category = classifier.category.full_subcategory(members, name=f"{classifier.category.name}/{kind}({k})")
    if kind == "component":
        if component not in members:
            raise ClassifierKindError(f"{component!r} is not an object of q({k})")
        piece = next(c for c in pi0(category) if component in c)
        category = category.full_subcategory(piece, name=f"{category.name}[{component}]")
    return ClassifierSlice(classifier, kind, k, category, component)


def reflect(classifier, obj_id, mode):
    """
    toL replaces every K edge by an L edge through F generators, toX by an
    X edge through G generators; returns the reflected object and the path.
    """
    move, replacement = {"toL": ("F", "L"), "toX": ("G", "X")}.get(mode, (None, None))
    if move is None:
        raise ClassifierKindError(f"reflect mode must be toL or toX, got {mode!r}")
    if move not in classifier.moves:
        raise ClassifierKindError(f"{classifier.kind} has no {move} generators")
    z = classifier.objects[obj_id]
    path = []
    current = z
    for e, letter in enumerate(z.coloring):
        if letter != "K":
            continue
        gen_id = f"{move}:{current.id}#{e}"
        if gen_id not in classifier.category.generator_index:
            raise BudgetExhausted("max_xdeg", classifier.truncation.max_xdeg)
        path.append(gen_id)
        current = classifier.objects[classifier.category.generator(gen_id).target]
    return current, tuple(path)


def localize(piece, at):
    """
    Add an inverse "g~" for every F generator (at="F") or X generator
    (at="X") of the slice, with both composites set to identities.
    """
    if at not in ("F", "X"):
        raise ClassifierKindError(f"localize at F or X, got {at!r}")
    category = piece.category if isinstance(piece, ClassifierSlice) else piece
    inverses, relations = [], []
    for gen in category.generators:
        if gen.label != at:
            continue
        inverse = Generator(f"{gen.id}~", gen.target, gen.source, f"{at}~")
        inverses.append(inverse)
        relations.append(((gen.id, inverse.id), ()))
        relations.append(((inverse.id, gen.id), ()))
    return category.extended(inverses, relations, name=f"{category.name}[{at}^-1]")


def _overall(certificate):
    return certificate.verdict


def _persistent_sinks(certificate, wider):
    """
    A refutation stands only if two of its sinks still lie in distinct sink
    classes at the wider bound. Sinks whose way out was cut off by the
    truncation are dropped from the evidence; with fewer than two left the
    component turns UNKNOWN.
    """
    components = []
    for component in certificate.components:
        if component.verdict != Verdict.REFUTED:
            components.append(component)
            continue
        evidence = component.evidence
        kept, transient, seen = [], [], set()
        for i, sink in enumerate(evidence["sinks"]):
            wider_class = wider.get(sink)
            if wider_class is None or wider_class in seen:
                transient.append(evidence["sink_labels"][i])
                continue
            seen.add(wider_class)
            kept.append(i)
        if not transient:
            components.append(component)
            continue
        narrowed = {key: [evidence[key][i] for i in kept] for key in ("sinks", "sink_classes", "sink_labels")}
        narrowed["transient_sinks"] = transient
        if len(kept) >= 2:
            components.append(attrs.evolve(component, evidence=narrowed))
        else:
            narrowed["reason"] = "sinks do not persist at the wider bound"
            components.append(attrs.evolve(component, verdict=Verdict.UNKNOWN, evidence=narrowed))
    return attrs.evolve(certificate, components=components)


def tameness_certificate(monad, truncation=None, budget=None):
    """
    Terminal objects per component of the T+1 classifier, at the given
    bound and at the bumped one. A verdict is reported only when both runs
    agree, and a refutation only when its sinks survive the wider bound.
    """
    trunc = truncation or TruncationParams()
    runs, categories = [], []
    for bound in (trunc, trunc.bumped()):
        classifier = build_classifier(monad, "T+1", bound)
        categories.append(classifier.category)
        runs.append(terminal_certificate(classifier.category, budget, bound.as_dict(),
                                         semantics=classifier.path_datum))
    first = _persistent_sinks(runs[0], sink_classes(categories[1]))
    second = runs[1]
    note = f"truncated at degree <= {trunc.max_degree}, xdeg <= {trunc.max_xdeg}"
    if _overall(first) == _overall(second):
        return attrs.evolve(first, notes=(note, f"stable at xdeg {trunc.max_xdeg + 1}"))
    logger.warning("tameness verdict unstable", extra={
        "monad": monad.name, "first": first.verdict.value, "second": second.verdict.value,
    })
    objects = [obj for component in first.components for obj in component.objects]
    unstable = ComponentVerdict(objects, Verdict.UNKNOWN, {
        "reason": "verdict changes between xdeg bounds",
        "verdicts": [first.verdict.value, second.verdict.value],
    })
    return Certificate(TERMINAL_OBJECTS, [unstable], trunc.as_dict(), (note, "unstable"), runs)


def quasitameness_certificate(monad, truncation=None, budget=None, tameness=None):
    """
    Triviality of the fundamental group of each component of the T+1
    classifier. With a tameness certificate, a component certified there
    and refuted here raises ConsistencyViolation.
    """
    trunc = truncation or TruncationParams()
    classifier = build_classifier(monad, "T+1", trunc)
    certificate = groupoid_trivial(classifier.category, budget, trunc.as_dict())
    certificate = attrs.evolve(certificate, notes=(
        f"truncated at degree <= {trunc.max_degree}, xdeg <= {trunc.max_xdeg}",
    ))
    if tameness is not None:
        for component in certificate.components:
            if component.verdict != Verdict.REFUTED:
                continue
            for obj in component.objects:
                tame = tameness.component_of(obj)
                if tame is not None and tame.verdict == Verdict.CERTIFIED:
                    raise ConsistencyViolation(
                        f"component of {obj} has a terminal object but a nontrivial fundamental group"
                    )
    return certificate


def require_quasitame(certificate):
    if certificate is None or certificate.verdict != Verdict.CERTIFIED:
        raise HypothesisNotMet("needs a CERTIFIED quasi-tameness certificate")
    return certificate
