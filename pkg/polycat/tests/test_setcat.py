import random

import networkx as nx
from django.test import SimpleTestCase

from polycat.classifier import TruncationParams, build_classifier
from polycat.exceptions import BudgetExhausted, MalformedCategory, MalformedDiagram
from polycat.groups import Presentation, determinantal_invariants, free_reduce
from polycat.polymonad import MonoidMonad
from polycat.rewriting import RewritingSystem, orient
from polycat.setcat import (
    Budget, Certificate, ComponentVerdict, Generator, PresentedCategory, SetValuedDiagram, Verdict,
    colimit, component_presentation, groupoid_trivial, pi0, terminal_certificate,
)
from polycat.unionfind import UnionFind


def span():
    """a <- x -> c"""
    return PresentedCategory(
        objects=["A", "X", "C"],
        generators=[Generator("u", "X", "A"), Generator("v", "X", "C")],
    )


def loop_category(relator_length):
    """One object with a loop g and relation g^n = 1"""
    g = Generator("g", "o", "o")
    return PresentedCategory(objects=["o"], generators=[g], relations=[(("g",) * relator_length, ())])


class UnionFindTest(SimpleTestCase):

    def test_union_merges_components(self):
        uf = UnionFind()
        uf.union_pairs([(1, 2), (3, 4), (2, 3)])
        uf.add(5)
        components = sorted(sorted(c) for c in uf.component_dict().values())
        self.assertEqual(components, [[1, 2, 3, 4], [5]])

    def test_find_adds_unknown_keys(self):
        uf = UnionFind()
        self.assertEqual(uf.find("new"), "new")
        self.assertIn("new", uf.parents)


class RewritingTest(SimpleTestCase):

    def test_orient_prefers_shorter_reduct(self):
        self.assertEqual(orient(("a",), ("b", "c")), (("b", "c"), ("a",)))
        self.assertIsNone(orient(("a",), ("a",)))

    def test_normalize_uses_leftmost_rule(self):
        system = RewritingSystem([(("a", "a"), ()), (("b", "a"), ("a", "b"))])
        self.assertEqual(system.normalize(("b", "a", "a")), ("b",))
        self.assertTrue(system.equivalent(("a", "a", "b"), ("b",)))

    def test_equal_length_cycle_is_reported(self):
        system = RewritingSystem([(("a", "b"), ("b", "a")), (("b", "a"), ("a", "b"))])
        with self.assertRaises(BudgetExhausted):
            system.normalize(("a", "b"), max_steps=50)

    def test_local_confluence(self):
        confluent = RewritingSystem([(("a", "a"), ())])
        self.assertTrue(confluent.local_confluence())
        broken = RewritingSystem([(("a", "b"), ("c",)), (("b", "d"), ("e",))])
        self.assertFalse(broken.local_confluence())


class GroupsTest(SimpleTestCase):

    def test_free_reduce(self):
        self.assertEqual(free_reduce([1, 2, -2, -1, 3]), [3])

    def test_simplify_eliminates_generators(self):
        # <a, b | a b^-1, b^3>
        simplified = Presentation(2, [[1, -2], [2, 2, 2]]).simplify()
        self.assertEqual(simplified.generators, 1)
        self.assertEqual(simplified.abelian_invariants(), [3])

    def test_abelian_invariants_free_part(self):
        self.assertEqual(Presentation(2, []).abelian_invariants(), [0, 0])
        self.assertEqual(Presentation(2, [[1, 1, 2, 2]]).abelian_invariants(), [2, 0])

    def test_determinantal_invariants_agree_with_smith_form(self):
        presentation = Presentation(2, [[1, 1, 2, 2], [2, 2, 2, 2]])
        self.assertEqual(
            determinantal_invariants(presentation.relation_matrix(), 2),
            presentation.abelian_invariants(),
        )


class PresentedCategoryTest(SimpleTestCase):

    def test_unknown_object_is_rejected(self):
        with self.assertRaises(MalformedCategory) as ctx:
            PresentedCategory(objects=["a"], generators=[Generator("g", "a", "b")])
        self.assertEqual(ctx.exception.offender, "g")

    def test_relation_endpoints_must_agree(self):
        with self.assertRaises(MalformedCategory):
            PresentedCategory(
                objects=["a", "b"],
                generators=[Generator("g", "a", "b"), Generator("h", "b", "a")],
                relations=[(("g",), ("h",))],
            )

    def test_full_subcategory_keeps_inner_generators(self):
        sub = span().full_subcategory(["X", "A"])
        self.assertEqual(sub.objects, ("A", "X"))
        self.assertEqual([g.id for g in sub.generators], ["u"])

    def test_pi0(self):
        discrete = PresentedCategory(objects=["a", "b", "c"], generators=[])
        self.assertEqual(len(pi0(discrete)), 3)
        joined = PresentedCategory(objects=["a", "b"], generators=[Generator("g", "a", "b")])
        self.assertEqual(pi0(joined), [["a", "b"]])


class ColimitTest(SimpleTestCase):

    def test_pushout_of_sets(self):
        diagram = SetValuedDiagram(span(), {"A": ("a", "b"), "X": ("x",), "C": ("c",)},
                                   {"u": {"x": "a"}, "v": {"x": "c"}})
        cocone = colimit(diagram)
        self.assertEqual(len(cocone), 2)
        self.assertEqual(cocone.leg("A")["a"], cocone.leg("C")["c"])
        self.assertTrue(cocone.check(diagram))

    def test_coproduct_of_points(self):
        category = PresentedCategory(objects=["a", "b", "c"], generators=[])
        diagram = SetValuedDiagram(category, {o: ("*",) for o in "abc"}, {})
        self.assertEqual(len(colimit(diagram)), 3)

    def test_action_leaving_the_target_is_rejected(self):
        with self.assertRaises(MalformedDiagram):
            SetValuedDiagram(span(), {"A": ("a",), "X": ("x",), "C": ("c",)},
                             {"u": {"x": "z"}, "v": {"x": "c"}})

    def test_relation_violation_is_rejected(self):
        category = loop_category(2)
        with self.assertRaises(MalformedDiagram):
            SetValuedDiagram(category, {"o": (0, 1, 2)}, {"g": lambda n: (n + 1) % 3})


class TerminalCertificateTest(SimpleTestCase):

    def test_single_object(self):
        category = PresentedCategory(objects=["a"], generators=[])
        certificate = terminal_certificate(category)
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertEqual(certificate.components[0].evidence["terminal"], "a")

    def test_two_sinks_refute(self):
        category = span()
        certificate = terminal_certificate(category)
        self.assertEqual(certificate.verdict, Verdict.REFUTED)
        self.assertEqual(certificate.exit_code, 2)
        self.assertEqual(certificate.components[0].evidence["sinks"], ["A", "C"])

    def test_parallel_arrows_need_a_relation(self):
        parallel = PresentedCategory(objects=["a", "b"],
                                     generators=[Generator("g", "a", "b"), Generator("h", "a", "b")])
        self.assertEqual(terminal_certificate(parallel).verdict, Verdict.UNKNOWN)
        glued = PresentedCategory(objects=["a", "b"],
                                  generators=[Generator("g", "a", "b"), Generator("h", "a", "b")],
                                  relations=[(("h",), ("g",))])
        self.assertEqual(terminal_certificate(glued).verdict, Verdict.CERTIFIED)


class GroupoidTest(SimpleTestCase):

    def test_tree_shaped_component(self):
        self.assertEqual(groupoid_trivial(span()).verdict, Verdict.CERTIFIED)

    def test_loop_of_order_two(self):
        certificate = groupoid_trivial(loop_category(2))
        component = certificate.components[0]
        self.assertEqual(component.verdict, Verdict.REFUTED)
        self.assertEqual(component.evidence["invariant_factors"], [2])
        self.assertEqual(component.evidence["loops"], ["g"])

    def test_loop_killed_by_relation(self):
        self.assertEqual(groupoid_trivial(loop_category(1)).verdict, Verdict.CERTIFIED)

    def test_presentation_ignores_spanning_tree(self):
        presentation, numbering = component_presentation(span(), ["A", "X", "C"])
        self.assertEqual(presentation.generators, 0)
        self.assertEqual(numbering, {})

    def test_commutator_leaves_free_abelian_group(self):
        # <a, b | a b a^-1 b^-1>
        category = PresentedCategory(
            objects=["o"],
            generators=[Generator("a", "o", "o"), Generator("b", "o", "o")],
            relations=[(("a", "b"), ("b", "a"))],
        )
        certificate = groupoid_trivial(category, Budget(tietze_steps=10))
        self.assertEqual(certificate.verdict, Verdict.REFUTED)
        self.assertEqual(certificate.components[0].evidence["invariant_factors"], [0, 0])


class CertificateTest(SimpleTestCase):

    def test_refutation_outranks_unknown(self):
        certificate = Certificate("terminal-objects", [
            ComponentVerdict(["a"], Verdict.UNKNOWN),
            ComponentVerdict(["b"], Verdict.REFUTED),
            ComponentVerdict(["c"], Verdict.CERTIFIED),
        ])
        self.assertEqual(certificate.verdict, Verdict.REFUTED)
        self.assertEqual(certificate.counts(), {"certified": 1, "refuted": 1, "unknown": 1})
        self.assertEqual(certificate.component_of("b").verdict, Verdict.REFUTED)
        self.assertIsNone(certificate.component_of("z"))


def random_category(rng):
    objects = [f"o{i}" for i in range(rng.randint(1, 6))]
    generators = [Generator(f"g{n}", rng.choice(objects), rng.choice(objects)) for n in range(rng.randint(0, 7))]
    return PresentedCategory(objects=objects, generators=generators)


def random_diagram(rng):
    category = random_category(rng)
    targets = {gen.target for gen in category.generators}
    value = {obj: tuple(range(rng.randint(1 if obj in targets else 0, 3))) for obj in category.objects}
    action = {}
    for gen in category.generators:
        action[gen.id] = {x: rng.choice(value[gen.target]) for x in value[gen.source]}
    return SetValuedDiagram(category, value, action)


class RandomCategoryTest(SimpleTestCase):

    def test_colimit_counts_element_components(self):
        rng = random.Random(11)
        for _ in range(120):
            diagram = random_diagram(rng)
            graph = nx.Graph()
            graph.add_nodes_from((obj, x) for obj, xs in diagram.value.items() for x in xs)
            for gen in diagram.base.generators:
                for x in diagram.value[gen.source]:
                    graph.add_edge((gen.source, x), (gen.target, diagram.apply(gen.id, x)))
            cocone = colimit(diagram)
            self.assertEqual(len(cocone), nx.number_connected_components(graph))
            self.assertTrue(cocone.check(diagram))

    def test_pi0_is_idempotent_and_ignores_names(self):
        rng = random.Random(5)
        for _ in range(50):
            category = random_category(rng)
            components = pi0(category)
            self.assertEqual(sorted(o for c in components for o in c), sorted(category.objects))
            for component in components:
                self.assertEqual(pi0(category.full_subcategory(component)), [component])
            renamed = PresentedCategory(
                objects=[f"r{o}" for o in category.objects],
                generators=[Generator(g.id, f"r{g.source}", f"r{g.target}") for g in category.generators],
            )
            self.assertEqual(sorted(sorted(f"r{o}" for o in c) for c in components),
                             sorted(sorted(c) for c in pi0(renamed)))

    def test_larger_budgets_only_refine_verdicts(self):
        classifier = build_classifier(MonoidMonad(), "T+1", TruncationParams(max_degree=1, max_xdeg=2))
        categories = [classifier.category, loop_category(2), loop_category(1)]
        for category in categories:
            settled = {}
            for steps in (0, 1, 4, 50, 20000):
                certificate = groupoid_trivial(category, Budget(tietze_steps=steps))
                for component in certificate.components:
                    key = component.objects[0]
                    if component.verdict == Verdict.UNKNOWN:
                        continue
                    self.assertEqual(settled.setdefault(key, component.verdict), component.verdict, (key, steps))
            self.assertNotIn(Verdict.UNKNOWN, {c.verdict for c in certificate.components})
