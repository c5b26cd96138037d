import itertools
from math import comb

from django.test import SimpleTestCase

from polycat.classifier import TruncationParams
from polycat.commutative import (
    ComProblem, burnside_count, com_classifier, com_oracle, com_quasitameness, compare_with_oracle,
    final_objects, free_comm_truncated, sigma_orbits, stars_and_bars, sym_pushout_stage,
)
from polycat.exceptions import ClassifierKindError, MalformedDiagram
from polycat.polymonad import FiniteMonoid
from polycat.setcat import Verdict


class CountingTest(SimpleTestCase):

    def test_truncated_free_commutative_monoid(self):
        self.assertEqual(len(free_comm_truncated(["a", "b"], 2)), 6)
        self.assertEqual(len(free_comm_truncated([], 3)), 1)
        self.assertEqual(len(free_comm_truncated(["a", "b", "c"], 3)), 20)
        self.assertEqual(stars_and_bars(2, 2), 6)
        self.assertEqual(stars_and_bars(3, 3), 20)

    def test_orbit_counts_agree(self):
        for size in range(1, 4):
            for k in range(4):
                tuples = list(itertools.product(range(size), repeat=k))
                orbits = len(sigma_orbits(tuples, k).component_dict())
                self.assertEqual(orbits, comb(size + k - 1, k), (size, k))
                self.assertEqual(burnside_count(size, k), orbits, (size, k))


class ClassifierTest(SimpleTestCase):

    def setUp(self):
        self.trunc = TruncationParams(max_degree=2, max_xdeg=2)

    def test_skeleton(self):
        category = com_classifier("Com+1", self.trunc)
        self.assertEqual(len(category.objects), 9)
        self.assertEqual(final_objects(category), ["X1K0L0", "X1K1L0", "X1K2L0"])

    def test_swapping_two_constants_survives(self):
        certificate = com_quasitameness(self.trunc)
        self.assertEqual(certificate.verdict, Verdict.REFUTED)
        self.assertEqual(certificate.component_of("X0K2L0").evidence["invariant_factors"], [2])
        self.assertEqual(certificate.component_of("X0K1L0").verdict, Verdict.CERTIFIED)

    def test_pointed_kind_is_noted(self):
        certificate = com_quasitameness(TruncationParams(max_degree=1, max_xdeg=1), kind="GrCom+1")
        self.assertIn("pointed relations extrapolated from the unpointed ones", certificate.notes)

    def test_unknown_kind(self):
        with self.assertRaises(ClassifierKindError):
            com_classifier("Com+7")


class PushoutTest(SimpleTestCase):

    def test_free_letters(self):
        trivial = FiniteMonoid.trivial()
        stages = sym_pushout_stage(ComProblem(trivial, l_set=("l",)), 2)
        self.assertEqual([len(s) for s in stages], [1, 2, 3])
        stages = sym_pushout_stage(ComProblem(trivial, l_set=("l1", "l2")), 2)
        self.assertEqual([len(s) for s in stages], [1, 3, 6])
        self.assertEqual(stages[2].orbit_table["L"], (3, 3))

    def test_cyclic_monoid(self):
        prob = ComProblem(FiniteMonoid.cyclic(2), l_set=("l",))
        stages = sym_pushout_stage(prob, 2)
        self.assertEqual([len(s) for s in stages], [2, 4, 6])
        self.assertTrue(compare_with_oracle(stages, com_oracle(prob, 2)))

    def test_constant_glued_to_monoid(self):
        prob = ComProblem(FiniteMonoid.cyclic(2), ("k",), ("l",), {"k": "l"}, {"k": "a1"})
        stages = sym_pushout_stage(prob, 2)
        self.assertEqual([len(s) for s in stages], [2, 2, 2])
        self.assertTrue(compare_with_oracle(stages, com_oracle(prob, 2)))

    def test_noncommutative_monoid_is_rejected(self):
        with self.assertRaises(MalformedDiagram):
            sym_pushout_stage(ComProblem(FiniteMonoid.left_zero(2)), 1)
