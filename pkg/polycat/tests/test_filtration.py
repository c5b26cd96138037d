from django.test import SimpleTestCase

from polycat.classifier import (
    ClassifierObject, TruncationParams, build_classifier, quasitameness_certificate, take_slice,
)
from polycat.exceptions import HypothesisNotMet, MalformedDiagram
from polycat.filtration import (
    ExtensionProblem, compare, cube_check, decomposition_check, direct_oracle, free_product_normal_forms,
    monoid_problem, object_value, random_problem, run_filtration,
)
from polycat.polymonad import AlgebraInstance, FiniteMonoid, GrMonoidMonad, MonoidMonad, builtin
from polycat.setcat import pi0


class FiltrationTest(SimpleTestCase):

    def test_trivial_monoid_counts_words(self):
        for k in (1, 2):
            result = run_filtration(monoid_problem(FiniteMonoid.trivial(), degree=k))
            self.assertEqual(result.sizes(), list(range(1, k + 2)))

    def test_free_product_with_a_letter(self):
        z2 = FiniteMonoid.cyclic(2)
        prob = monoid_problem(z2, degree=2)
        result = run_filtration(prob)
        self.assertEqual(result.sizes(), [2, 6, 14])
        self.assertTrue(result.stable)
        self.assertEqual(len(free_product_normal_forms(z2, ["l"], 2)), 14)
        self.assertTrue(all(stage.square_commutes for stage in result.stages))

    def test_isomorphic_f_changes_nothing(self):
        prob = monoid_problem(FiniteMonoid.cyclic(2), ("k",), ("l",), f={"k": "l"}, g={"k": "a1"}, degree=2)
        result = run_filtration(prob)
        self.assertEqual(result.sizes(), [2, 2, 2])
        for stage in result.stages[1:]:
            self.assertEqual(len(set(stage.connecting.values())), len(stage.connecting))

    def test_matches_direct_colimit(self):
        prob = monoid_problem(FiniteMonoid.boolean(), ("k",), ("l1", "l2"), f={"k": "l2"}, g={"k": "f"})
        result = run_filtration(prob, check_stability=False)
        self.assertEqual(compare(result, direct_oracle(prob, check_stability=False)).verdict, "MATCH")

    def test_random_instances(self):
        for seed in range(20):
            prob = random_problem(seed)
            result = run_filtration(prob, check_stability=False)
            comparison = compare(result, direct_oracle(prob, result.classifier, result.diagram,
                                                       check_stability=False))
            self.assertTrue(comparison.match, (seed, comparison.witness))

    def test_nop_instances_at_degree_two(self):
        for seed in range(3):
            prob = random_problem(seed, "nop")
            self.assertEqual((prob.truncation.max_degree, prob.truncation.max_valence), (2, 2))
            wide = prob.with_truncation(TruncationParams(2, 3, max_valence=2))
            result = run_filtration(wide, check_stability=False)
            self.assertEqual(len(result.sizes()), 3)
            comparison = compare(result, direct_oracle(wide, result.classifier, result.diagram,
                                                       check_stability=False))
            self.assertTrue(comparison.match, (seed, comparison.witness))
            if any(stage.uncovered for stage in result.stages):
                self.assertFalse(result.stable)

    def test_classes_without_g_generator_stay_unglued(self):
        prob = monoid_problem(FiniteMonoid.trivial(), ("k",), ("l",), f={"k": "l"}, g={"k": "e"},
                              degree=1, xdeg=0)
        result = run_filtration(prob, check_stability=False)
        self.assertEqual(result.sizes(), [1, 2])
        self.assertEqual(result.stages[1].uncovered, 1)
        self.assertFalse(result.stable)
        self.assertEqual(compare(result, direct_oracle(prob, check_stability=False)).verdict, "MATCH")

    def test_object_value_is_a_product(self):
        prob = monoid_problem(FiniteMonoid.cyclic(2), ("k",), ("l1", "l2", "l3"), f={"k": "l1"}, g={"k": "e"})
        z = ClassifierObject(MonoidMonad().operation("m4"), "XXKL")
        self.assertEqual(len(object_value(prob, z)), 12)

    def test_f_must_land_in_l(self):
        with self.assertRaises(MalformedDiagram):
            monoid_problem(FiniteMonoid.trivial(), ("k",), ("l",), f={"k": "nowhere"}, g={"k": "e"})


class ChecksTest(SimpleTestCase):

    def setUp(self):
        self.prob = monoid_problem(FiniteMonoid.cyclic(2), ("k1", "k2"), ("l",),
                                   f={"k1": "l", "k2": "l"}, g={"k1": "e", "k2": "a1"}, degree=2)

    def test_cube_and_pushout_product(self):
        result = run_filtration(self.prob, check_stability=False)
        for k in (1, 2):
            report = cube_check(result, k)
            self.assertTrue(report["punctured_cube"])
            self.assertTrue(report["pushout_product"])
            self.assertGreater(report["alternating_objects"], 0)

    def test_decomposition_needs_quasitameness(self):
        with self.assertRaises(HypothesisNotMet):
            decomposition_check(self.prob, "m1|K", 1, None)
        certificate = quasitameness_certificate(MonoidMonad(), TruncationParams(max_degree=1, max_xdeg=2))
        self.assertTrue(decomposition_check(self.prob, "m1|K", 1, certificate).match)

    def test_decomposition_on_gr_monoids(self):
        prob = monoid_problem(FiniteMonoid.cyclic(2), ("k",), ("l",), f={"k": "l"}, g={"k": "a1"},
                              degree=2, monad=GrMonoidMonad(), color="r")
        certificate = quasitameness_certificate(GrMonoidMonad(), TruncationParams(max_degree=2, max_xdeg=3))
        classifier = build_classifier(prob.monad, "T_{f,g}", prob.truncation, relations=False)
        components = pi0(take_slice(classifier, "q", 2).category)
        self.assertEqual(len(components), 3)
        for component in components:
            report = decomposition_check(prob, component[0], 2, certificate, classifier)
            self.assertTrue(report.match, (component[0], report.witness))

    def test_decomposition_on_gr_planar_operads(self):
        monad = builtin("gr_nop")
        trunc = TruncationParams(max_degree=2, max_xdeg=2, max_arity=2, max_valence=2)
        terminal = AlgebraInstance(monad, lambda color: ("e",), lambda op, args: "e", name="terminal")
        prob = ExtensionProblem(monad, terminal, {"*": ("k",)}, {"*": ("l1", "l2")},
                                {("*", "k"): "l1"}, {("*", "k"): "e"}, trunc, "gr_nop/terminal").validate()
        certificate = quasitameness_certificate(monad, trunc)
        classifier = build_classifier(monad, "T_{f,g}", trunc, relations=False)
        for k in (1, 2):
            components = pi0(take_slice(classifier, "q", k).category)
            self.assertTrue(components)
            for component in components:
                report = decomposition_check(prob, component[0], k, certificate, classifier)
                self.assertTrue(report.match, (k, component[0], report.witness))
