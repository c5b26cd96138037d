"""
Finitely presented categories, Set-valued diagrams and their colimits,
together with the two certificate procedures used by the classifiers:
terminal objects per component, and triviality of the fundamental group.

Paths are tuples of generator ids in diagrammatic order: (g, h) means
first g, then h.
"""

import enum
import logging
from collections import deque
from functools import cached_property

import attrs
import networkx as nx

from .exceptions import BudgetExhausted, MalformedCategory, MalformedDiagram
from .groups import Presentation, find_alternating_quotient
from .rewriting import RewritingSystem
from .unionfind import UnionFind

logger = logging.getLogger(__name__)

TERMINAL_OBJECTS = "terminal-objects"
GROUPOID_TRIVIAL = "groupoid-trivial"


@attrs.frozen
class Generator:
    id: str
    source: str
    target: str
    label: str = ""


def _relations(value):
    return tuple((tuple(left), tuple(right)) for left, right in value)


@attrs.frozen(eq=False, slots=False)
class PresentedCategory:
    """
    A category given by objects, generating morphisms and relations.

    decorations maps object ids to whatever describes them (classifier
    objects, tuples); they drive ordering and labels but never identity.
    """
    objects: tuple = attrs.field(converter=tuple)
    generators: tuple = attrs.field(converter=tuple)
    relations: tuple = attrs.field(converter=_relations, default=())
    decorations: dict = attrs.field(factory=dict)
    name: str = ""

    def __attrs_post_init__(self):
        self.validate()

    def validate(self):
        seen = set()
        for obj in self.objects:
            if obj in seen:
                raise MalformedCategory(f"duplicate object {obj!r}", offender=obj)
            seen.add(obj)
        ids = set()
        for gen in self.generators:
            if gen.id in ids:
                raise MalformedCategory(f"duplicate generator {gen.id!r}", offender=gen.id)
            ids.add(gen.id)
            for end in (gen.source, gen.target):
                if end not in seen:
                    raise MalformedCategory(
                        f"generator {gen.id!r} refers to unknown object {end!r}", offender=gen.id
                    )
        for left, right in self.relations:
            ends = [self.path_ends(left), self.path_ends(right)]
            if ends[0] is None and ends[1] is None:
                raise MalformedCategory("relation between two empty paths", offender=(left, right))
            if ends[0] is None or ends[1] is None:
                loop = ends[0] or ends[1]
                if loop[0] != loop[1]:
                    raise MalformedCategory(
                        "identity relation on a path that is not a loop", offender=(left, right)
                    )
            elif ends[0] != ends[1]:
                raise MalformedCategory("relation sides have different endpoints", offender=(left, right))

    def path_ends(self, path):
        """(source, target) of a nonempty composable path, None for the empty path"""
        if not path:
            return None
        index = self.generator_index
        try:
            gens = [self.generators[index[g]] for g in path]
        except KeyError as exc:
            raise MalformedCategory(f"unknown generator {exc.args[0]!r} in path", offender=path) from exc
        for a, b in zip(gens, gens[1:]):
            if a.target != b.source:
                raise MalformedCategory(f"path {list(path)} is not composable at {a.id!r}", offender=path)
        return gens[0].source, gens[-1].target

    @cached_property
    def object_index(self):
        return {obj: i for i, obj in enumerate(self.objects)}

    @cached_property
    def generator_index(self):
        return {gen.id: i for i, gen in enumerate(self.generators)}

    @cached_property
    def out_edges(self):
        table = {obj: [] for obj in self.objects}
        for gen in self.generators:
            table[gen.source].append(gen)
        return table

    @cached_property
    def in_edges(self):
        table = {obj: [] for obj in self.objects}
        for gen in self.generators:
            table[gen.target].append(gen)
        return table

    def generator(self, gen_id):
        return self.generators[self.generator_index[gen_id]]

    def sort_key(self, obj):
        decoration = self.decorations.get(obj)
        if decoration is not None and hasattr(decoration, "sort_key"):
            return (0, decoration.sort_key, obj)
        return (1, (), obj)

    def label(self, obj):
        decoration = self.decorations.get(obj)
        return str(decoration) if decoration is not None else str(obj)

    def graph(self):
        g = nx.MultiDiGraph()
        g.add_nodes_from(self.objects)
        for gen in self.generators:
            g.add_edge(gen.source, gen.target, key=gen.id)
        return g

    def full_subcategory(self, objects, name=""):
        """Objects kept in ambient order; generators and relations among them"""
        keep = set(objects)
        gens = [g for g in self.generators if g.source in keep and g.target in keep]
        kept_ids = {g.id for g in gens}
        rels = [
            (left, right) for left, right in self.relations
            if set(left) <= kept_ids and set(right) <= kept_ids and self._relation_inside(left, right, keep)
        ]
        return PresentedCategory(
            objects=[o for o in self.objects if o in keep],
            generators=gens,
            relations=rels,
            decorations={o: d for o, d in self.decorations.items() if o in keep},
            name=name or self.name,
        )

    def _relation_inside(self, left, right, keep):
        ends = self.path_ends(left) or self.path_ends(right)
        return ends[0] in keep

    def extended(self, generators=(), relations=(), name=""):
        return PresentedCategory(
            objects=self.objects,
            generators=self.generators + tuple(generators),
            relations=self.relations + _relations(relations),
            decorations=self.decorations,
            name=name or self.name,
        )


class SetValuedDiagram:
    """
    A functor from a presented category to finite sets.

    value maps object ids to tuples of hashable elements; action maps
    generator ids to a dict or a callable. With checked=True every action is
    tabulated, its targets verified, and both sides of every relation are
    compared pointwise.
    """

    def __init__(self, base, value, action, checked=True):
        self.base = base
        self.value = {obj: tuple(value[obj]) for obj in base.objects if obj in value}
        self.action = dict(action)
        missing = [o for o in base.objects if o not in self.value]
        if missing:
            raise MalformedDiagram(f"no value for object {missing[0]!r}", offender=missing[0])
        for gen in base.generators:
            if gen.id not in self.action:
                raise MalformedDiagram(f"no action for generator {gen.id!r}", offender=gen.id)
        if checked:
            self._tabulate_and_check()

    def _tabulate_and_check(self):
        for gen in self.base.generators:
            target = set(self.value[gen.target])
            table = {}
            for x in self.value[gen.source]:
                y = self.apply(gen.id, x)
                if y not in target:
                    raise MalformedDiagram(
                        f"action of {gen.id!r} sends {x!r} outside the value of {gen.target!r}",
                        offender=gen.id,
                    )
                table[x] = y
            self.action[gen.id] = table
        for left, right in self.base.relations:
            source = (self.base.path_ends(left) or self.base.path_ends(right))[0]
            for x in self.value[source]:
                if self.apply_path(left, x) != self.apply_path(right, x):
                    raise MalformedDiagram(
                        f"relation {list(left)} = {list(right)} fails at {x!r}", offender=(left, right)
                    )

    def apply(self, gen_id, x):
        act = self.action[gen_id]
        return act[x] if isinstance(act, dict) else act(x)

    def apply_path(self, path, x):
        for gen_id in path:
            x = self.apply(gen_id, x)
        return x

    def restrict(self, subcategory):
        return SetValuedDiagram(
            subcategory,
            {o: self.value[o] for o in subcategory.objects},
            {g.id: self.action[g.id] for g in subcategory.generators},
            checked=False,
        )


def _element_key(x):
    return repr(x)


@attrs.frozen
class Cocone:
    """
    Colimit witness. apex holds canonical representatives (object, element);
    legs[obj][x] is the apex element that x in value(obj) is sent to.
    """
    apex: tuple
    legs: dict

    def __len__(self):
        return len(self.apex)

    def leg(self, obj):
        return self.legs[obj]

    def check(self, diagram):
        for gen in diagram.base.generators:
            src, tgt = self.legs[gen.source], self.legs[gen.target]
            for x in diagram.value[gen.source]:
                if tgt[diagram.apply(gen.id, x)] != src[x]:
                    return False
        return True


def colimit(diagram):
    """
    Colimit of a Set-valued diagram: the elements of the coproduct of all
    values glued along generator actions. Relations do not matter here.
    """
    base = diagram.base
    uf = UnionFind()
    for obj in base.objects:
        for x in diagram.value[obj]:
            uf.add((obj, x))
    for gen in base.generators:
        for x in diagram.value[gen.source]:
            uf.union((gen.source, x), (gen.target, diagram.apply(gen.id, x)))

    index = base.object_index
    representative = {}
    for root, members in uf.component_dict().items():
        representative[root] = min(members, key=lambda m: (index[m[0]], _element_key(m[1])))
    apex = tuple(sorted(representative.values(), key=lambda m: (index[m[0]], _element_key(m[1]))))
    legs = {
        obj: {x: representative[uf.find((obj, x))] for x in diagram.value[obj]}
        for obj in base.objects
    }
    return Cocone(apex=apex, legs=legs)


def pi0(category):
    """Connected components, each ordered by sort key, listed by their least member"""
    g = nx.Graph()
    g.add_nodes_from(category.objects)
    g.add_edges_from((gen.source, gen.target) for gen in category.generators)
    components = [sorted(c, key=category.sort_key) for c in nx.connected_components(g)]
    return sorted(components, key=lambda c: category.sort_key(c[0]))


class Verdict(enum.Enum):
    CERTIFIED = "certified"
    REFUTED = "refuted"
    UNKNOWN = "unknown"


EXIT_CODES = {Verdict.CERTIFIED: 0, Verdict.REFUTED: 2, Verdict.UNKNOWN: 3}


@attrs.frozen
class ComponentVerdict:
    objects: tuple = attrs.field(converter=tuple)
    verdict: Verdict
    evidence: dict = attrs.field(factory=dict)


@attrs.frozen
class Budget:
    """Search limits; running out yields UNKNOWN, never a wrong verdict"""
    rewrite_steps: int = 20000
    critical_pairs: int = 5000
    tietze_steps: int = 20000
    quotient_search: int = 4000

    def as_dict(self):
        return attrs.asdict(self)


@attrs.frozen
class Certificate:
    kind: str
    components: tuple = attrs.field(converter=tuple)
    truncation: dict = attrs.field(factory=dict)
    notes: tuple = attrs.field(converter=tuple, default=())
    runs: tuple = attrs.field(converter=tuple, default=())

    @property
    def verdict(self):
        verdicts = {c.verdict for c in self.components}
        if Verdict.REFUTED in verdicts:
            return Verdict.REFUTED
        if Verdict.UNKNOWN in verdicts:
            return Verdict.UNKNOWN
        return Verdict.CERTIFIED

    @property
    def exit_code(self):
        return EXIT_CODES[self.verdict]

    def counts(self):
        result = {v.value: 0 for v in Verdict}
        for c in self.components:
            result[c.verdict.value] += 1
        return result

    def component_of(self, obj):
        for component in self.components:
            if obj in component.objects:
                return component
        return None


def _sink_classes(category, component):
    g = nx.DiGraph()
    g.add_nodes_from(component)
    g.add_edges_from((gen.source, gen.target) for obj in component for gen in category.out_edges[obj])
    condensed = nx.condensation(g)
    sinks = []
    for node in condensed.nodes:
        if condensed.out_degree(node) == 0:
            sinks.append(sorted(condensed.nodes[node]["members"], key=category.sort_key))
    return sorted(sinks, key=lambda members: category.sort_key(members[0]))


def sink_classes(category):
    """Every sink class of the category, keyed by member"""
    return {obj: tuple(members) for component in pi0(category)
            for members in _sink_classes(category, component) for obj in members}


def paths_to(category, component, terminal):
    """
    For every object of the component with a path to terminal, the
    shortest such path, ties broken by generator order.
    """
    order = category.generator_index
    distance = {terminal: 0}
    queue = deque([terminal])
    while queue:
        obj = queue.popleft()
        for gen in category.in_edges[obj]:
            if gen.source not in distance:
                distance[gen.source] = distance[obj] + 1
                queue.append(gen.source)
    path = {terminal: ()}
    for obj in sorted(distance, key=lambda o: distance[o]):
        if obj == terminal:
            continue
        step = min(
            (g for g in category.out_edges[obj] if distance.get(g.target) == distance[obj] - 1),
            key=lambda g: order[g.id],
        )
        path[obj] = (step.id,) + path[step.target]
    members = set(component)
    return {o: p for o, p in path.items() if o in members}


def _contracts_to(category, component, paths, same):
    """First generator breaking g . path(y) == path(x), or None when all hold"""
    members = set(component)
    for obj in component:
        for gen in category.out_edges[obj]:
            if gen.target not in members:
                continue
            if not same(obj, (gen.id,) + paths[gen.target], paths[obj]):
                return gen.id
    return None


def terminal_certificate(category, budget=None, truncation=None, semantics=None):
    """
    Decide per component whether it has a terminal object.

    REFUTED when the component has two sink classes (strongly connected
    pieces with no way out): no object is reachable from both. Otherwise a
    candidate t in the single sink class is CERTIFIED when, for the chosen
    path p(x) from each x to t, every generator g: x -> y satisfies
    g . p(y) = p(x); that makes p(x) the only morphism x -> t.

    Paths are compared by semantics(source, path) when given, otherwise by
    normal forms under the relations read as rewrite rules.
    """
    budget = budget or Budget()
    if semantics is None:
        system = RewritingSystem.from_relations(category.relations)
        confluent = system.local_confluence(budget.critical_pairs, budget.rewrite_steps)

        def same(source, left, right):
            return system.normalize(left, budget.rewrite_steps) == system.normalize(right, budget.rewrite_steps)
    else:
        confluent = None

        def same(source, left, right):
            return semantics(source, left) == semantics(source, right)
    verdicts = []
    for component in pi0(category):
        sinks = _sink_classes(category, component)
        if len(sinks) > 1:
            verdicts.append(ComponentVerdict(component, Verdict.REFUTED, {
                "sinks": [s[0] for s in sinks],
                "sink_classes": sinks,
                "sink_labels": [category.label(s[0]) for s in sinks],
            }))
            continue
        evidence = {} if confluent is None else {"locally_confluent": confluent}
        verdict = Verdict.UNKNOWN
        for candidate in sinks[0]:
            paths = paths_to(category, component, candidate)
            try:
                offender = _contracts_to(category, component, paths, same)
            except BudgetExhausted as exc:
                evidence["budget"] = str(exc)
                break
            if offender is None:
                verdict = Verdict.CERTIFIED
                evidence.update({"terminal": candidate, "terminal_label": category.label(candidate)})
                break
            evidence.setdefault("failed_candidates", []).append({"object": candidate, "generator": offender})
        verdicts.append(ComponentVerdict(component, verdict, evidence))
    certificate = Certificate(TERMINAL_OBJECTS, verdicts, truncation or {})
    logger.info(
        "terminal certificate",
        extra={"category": category.name, "components": len(verdicts), **certificate.counts()},
    )
    return certificate


def spanning_tree(category, component):
    """Generator ids of a BFS spanning tree, edges used in either direction"""
    order = category.generator_index
    root = component[0]
    seen = {root}
    tree = set()
    queue = deque([root])
    while queue:
        obj = queue.popleft()
        edges = sorted(category.out_edges[obj] + category.in_edges[obj], key=lambda g: order[g.id])
        for gen in edges:
            other = gen.target if gen.source == obj else gen.source
            if other not in seen:
                seen.add(other)
                tree.add(gen.id)
                queue.append(other)
    return tree


def component_presentation(category, component):
    """Fundamental group of one component as a group presentation"""
    members = set(component)
    tree = spanning_tree(category, component)
    numbering = {}
    for gen in category.generators:
        if gen.source in members and gen.id not in tree:
            numbering[gen.id] = len(numbering) + 1

    def word(path):
        return [numbering[g] for g in path if g in numbering]

    relators = []
    for left, right in category.relations:
        ends = category.path_ends(left) or category.path_ends(right)
        if ends[0] not in members:
            continue
        relators.append(word(left) + [-x for x in reversed(word(right))])
    return Presentation(len(numbering), relators), numbering


def groupoid_trivial(category, budget=None, truncation=None):
    """
    Decide per component whether the fundamental group is trivial.

    Tietze simplification certifies; a nonzero invariant factor of the
    abelianization, or a nontrivial alternating quotient, refutes.
    """
    budget = budget or Budget()
    verdicts = []
    for component in pi0(category):
        presentation, numbering = component_presentation(category, component)
        evidence = {"generators": presentation.generators, "relators": len(presentation.relators)}
        try:
            simplified = presentation.simplify(budget.tietze_steps)
        except BudgetExhausted as exc:
            simplified = presentation
            evidence["budget"] = str(exc)
        if simplified.generators == 0:
            evidence.update({"invariant_factors": [], "presentation": simplified.as_dict()})
            verdicts.append(ComponentVerdict(component, Verdict.CERTIFIED, evidence))
            continue
        factors = simplified.abelian_invariants()
        evidence.update({"invariant_factors": factors, "presentation": simplified.as_dict()})
        if factors:
            evidence["loops"] = sorted(numbering, key=numbering.get)
            verdicts.append(ComponentVerdict(component, Verdict.REFUTED, evidence))
            continue
        quotient = find_alternating_quotient(simplified, limit=budget.quotient_search)
        if quotient is not None:
            evidence["alternating_quotient"] = quotient
            verdicts.append(ComponentVerdict(component, Verdict.REFUTED, evidence))
        else:
            verdicts.append(ComponentVerdict(component, Verdict.UNKNOWN, evidence))
    certificate = Certificate(GROUPOID_TRIVIAL, verdicts, truncation or {})
    logger.info(
        "groupoid certificate",
        extra={"category": category.name, "components": len(verdicts), **certificate.counts()},
    )
    return certificate
