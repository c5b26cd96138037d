from django.test import SimpleTestCase

from polycat.classifier import (
    TruncationParams, build_classifier, localize, normalize_kind, quasitameness_certificate, reflect,
    require_quasitame, take_slice, tameness_certificate,
)
from polycat.exceptions import ClassifierKindError, HypothesisNotMet
from polycat.polymonad import GrMonoidMonad, IdentityMonad, MonoidMonad, builtin
from polycat.runner import check_group_evidence
from polycat.setcat import Verdict, pi0, sink_classes


class BuildTest(SimpleTestCase):

    def test_monoid_objects(self):
        classifier = build_classifier(MonoidMonad(), "T+1", TruncationParams(max_degree=1, max_xdeg=2))
        self.assertEqual(len(classifier.objects), 9)
        self.assertIn("m3|XKX", classifier.objects)
        self.assertNotIn("m3|XXX", classifier.objects)

    def test_identity_with_f_and_g(self):
        classifier = build_classifier(IdentityMonad(), "T_{f,g}", TruncationParams(max_degree=1))
        self.assertEqual(set(classifier.objects), {"id|X", "id|K", "id|L"})
        self.assertEqual(sorted(g.label for g in classifier.category.generators), ["F", "G"])

    def test_kind_names(self):
        self.assertEqual(normalize_kind("tfg"), "T_{f,g}")
        self.assertEqual(normalize_kind("T+2"), "T+2")
        with self.assertRaises(ClassifierKindError):
            normalize_kind("T+3")

    def test_truncation_bounds(self):
        with self.assertRaises(ValueError):
            TruncationParams(max_degree=-1)
        trunc = TruncationParams(max_degree=2, max_xdeg=3)
        self.assertEqual(trunc.valence, 5)
        self.assertEqual(trunc.bumped().max_xdeg, 4)
        self.assertIsNone(trunc.bumped().max_arity)
        wider = TruncationParams(2, 4, max_arity=2, max_valence=3).bumped()
        self.assertEqual((wider.max_xdeg, wider.max_arity, wider.max_valence), (5, 3, 4))

    def test_relations_identify_equal_data(self):
        classifier = build_classifier(MonoidMonad(), "T+1", TruncationParams(max_degree=1, max_xdeg=2))
        for left, right in classifier.category.relations:
            source = classifier.category.generator(left[0]).source
            self.assertEqual(classifier.path_datum(source, left), classifier.path_datum(source, right))


class SliceTest(SimpleTestCase):

    def setUp(self):
        self.classifier = build_classifier(MonoidMonad(), "T+2")

    def types(self, kind, k):
        piece = take_slice(self.classifier, kind, k)
        return {(self.classifier.obj(o).p, self.classifier.obj(o).q) for o in piece.objects}

    def test_degree_slices(self):
        self.assertEqual(self.types("l", 2), {(0, 2)})
        self.assertEqual(self.types("q", 2), {(1, 1), (2, 0)})
        self.assertEqual(self.types("xl", 1), {(0, 0), (0, 1)})

    def test_component_must_lie_in_q(self):
        with self.assertRaises(ClassifierKindError):
            take_slice(self.classifier, "component", 2, component="m2|LL")
        piece = take_slice(self.classifier, "component", 2, component="m2|KK")
        self.assertIn("m2|KK", piece.objects)

    def test_unknown_slice(self):
        with self.assertRaises(ClassifierKindError):
            take_slice(self.classifier, "r", 1)


class ReflectTest(SimpleTestCase):

    def test_to_l(self):
        classifier = build_classifier(MonoidMonad(), "T_{f,g}")
        target, path = reflect(classifier, "m2|KK", "toL")
        self.assertEqual(target.id, "m2|LL")
        self.assertEqual(len(path), 2)
        target, _ = reflect(classifier, "m2|XK", "toX")
        self.assertEqual(target.id, "m2|XX")

    def test_missing_moves(self):
        classifier = build_classifier(MonoidMonad(), "T+1", TruncationParams(max_degree=1, max_xdeg=1))
        with self.assertRaises(ClassifierKindError):
            reflect(classifier, "m1|K", "toL")
        with self.assertRaises(ClassifierKindError):
            reflect(classifier, "m1|K", "sideways")

    def test_localize_inverts_f(self):
        classifier = build_classifier(IdentityMonad(), "T_{f,g}", TruncationParams(max_degree=1))
        local = localize(classifier.category, "F")
        ids = [g.id for g in local.generators]
        self.assertIn("F:id|K#0~", ids)
        self.assertEqual(len(local.relations), len(classifier.category.relations) + 2)


class SquaresTest(SimpleTestCase):

    def test_f_and_x_spans_complete_uniquely(self):
        classifier = build_classifier(MonoidMonad(), "T_{f,g}", TruncationParams(max_degree=2, max_xdeg=3),
                                      relations=False)
        out_edges = classifier.category.out_edges
        spans = 0
        for obj in classifier.objects:
            for x in (g for g in out_edges[obj] if g.label == "X"):
                for f in (g for g in out_edges[obj] if g.label == "F"):
                    spans += 1
                    completions = [
                        (a.id, b.id) for a in out_edges[x.target] for b in out_edges[f.target]
                        if a.target == b.target
                        and classifier.path_datum(obj, (x.id, a.id)) == classifier.path_datum(obj, (f.id, b.id))
                    ]
                    self.assertEqual(len(completions), 1, (x.id, f.id, completions))
        self.assertGreater(spans, 0)

    def test_sinks_with_a_k_edge_admit_g(self):
        classifier = build_classifier(MonoidMonad(), "T_{f,g}", TruncationParams(max_degree=2, max_xdeg=4),
                                      relations=False)
        out_edges = classifier.category.out_edges

        def admits_g(members):
            return any(g.label == "G" for obj in members for g in out_edges[obj])

        for k in (1, 2):
            for kind in ("q", "qbar"):
                classes = set(sink_classes(take_slice(classifier, kind, k).category).values())
                self.assertTrue(classes)
                for members in classes:
                    if any(classifier.objects[obj].p for obj in members):
                        self.assertTrue(admits_g(members), (kind, k, members))


class TamenessTest(SimpleTestCase):

    def test_monoids_are_tame(self):
        certificate = tameness_certificate(MonoidMonad(), TruncationParams(max_degree=2, max_xdeg=3))
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertIn("stable at xdeg 4", certificate.notes)

    def test_gr_mon_components(self):
        small = build_classifier(GrMonoidMonad(), "T+1", TruncationParams(max_degree=1, max_xdeg=2))
        self.assertEqual(len(pi0(small.category)), 5)

        certificate = tameness_certificate(GrMonoidMonad(), TruncationParams(max_degree=2, max_xdeg=3))
        self.assertEqual(len(certificate.components), 8)
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        for component in certificate.components:
            coloring = component.evidence["terminal"].split("|")[1]
            self.assertTrue(coloring.startswith("X"), coloring)
            self.assertNotIn("XX", coloring)
        self.assertEqual(certificate.component_of("(oo)|KK").evidence["terminal"], "(ooooo)|XKXKX")

    def test_gr_mon_degree_three(self):
        certificate = tameness_certificate(GrMonoidMonad(), TruncationParams(max_degree=3, max_xdeg=4))
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertEqual(len(certificate.components), 11)
        terminals = {component.evidence["terminal"] for component in certificate.components}
        self.assertEqual(terminals, {
            "(o)|X", "(ooo)|XKX", "(ooooo)|XKXKX", "(ooooooo)|XKXKXKX",
            "[o#]|XK", "[ooo#]|XKXK", "[ooooo#]|XKXKXK",
            "[#]|X", "[oo#]|XKX", "[oooo#]|XKXKX", "[oooooo#]|XKXKXKX",
        })
        self.assertEqual(certificate.component_of("(ooo)|KKK").evidence["terminal"], "(ooooooo)|XKXKXKX")
        self.assertEqual(certificate.component_of("[oo#]|KKK").evidence["terminal"], "[ooooo#]|XKXKXK")

    def test_size_cut_sinks_are_not_evidence(self):
        trunc = TruncationParams(max_degree=3, max_xdeg=4, max_arity=4)
        certificate = tameness_certificate(GrMonoidMonad(), trunc)
        self.assertEqual(certificate.verdict, Verdict.UNKNOWN)
        first = certificate.runs[0] if certificate.runs else certificate
        for component in first.components:
            self.assertNotIn("(oooo)[KXKX]", component.evidence.get("sink_labels", ()))

    def test_gr_nop_is_not_tame(self):
        trunc = TruncationParams(2, 4, max_arity=2, max_valence=3)
        certificate = tameness_certificate(builtin("gr_nop"), trunc)
        self.assertEqual(certificate.verdict, Verdict.REFUTED)
        component = certificate.component_of("#:*(*([*],[*]),[*])|XXXXK")
        self.assertEqual(component.verdict, Verdict.REFUTED)
        self.assertIn("#:*([*],[*],[*])[XXXK]", component.evidence["sink_labels"])
        self.assertIn("#:*([*],[*])[XXK]", component.evidence["sink_labels"])

    def test_gr_nop_stump_is_circled_and_boxed(self):
        monad = builtin("gr_nop")
        circled = monad.operations("<;*>", 1, 2)
        self.assertEqual([op.code for op in circled], ["o:*()"])
        self.assertEqual(circled[0].target, "<;*>")
        self.assertIn("#:*()", [op.code for op in monad.operations("*", 1, 2)])
        self.assertEqual(monad.decode("o:*()").target, "<;*>")
        self.assertEqual(monad.decode("#:*()").target, "*")

    def test_symmetric_operads_are_not_quasitame(self):
        # the swap of the root's inputs fixes the object, and twice is the identity
        trunc = TruncationParams(max_degree=2, max_xdeg=1, max_arity=3, max_valence=2)
        classifier = build_classifier(builtin("sop"), "T+1", trunc)
        loops = [g for g in classifier.category.generators
                 if g.source == g.target == "*(*(),*())|XKK"]
        self.assertEqual([g.id for g in loops], ["X:*(*(),*())|XKK#0#*(|*@2,|*@1)"])

        certificate = quasitameness_certificate(builtin("sop"), trunc)
        self.assertEqual(certificate.verdict, Verdict.REFUTED)
        component = certificate.component_of("*(*(),*())|XKK")
        self.assertEqual(component.verdict, Verdict.REFUTED)
        self.assertEqual(component.evidence["invariant_factors"], [2])
        self.assertTrue(check_group_evidence(component.evidence))

    def test_monoids_are_quasitame(self):
        certificate = quasitameness_certificate(MonoidMonad(), TruncationParams(max_degree=1, max_xdeg=2))
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertIs(require_quasitame(certificate), certificate)

    def test_gr_mon_is_quasitame(self):
        trunc = TruncationParams(max_degree=2, max_xdeg=3)
        tameness = tameness_certificate(GrMonoidMonad(), trunc)
        certificate = quasitameness_certificate(GrMonoidMonad(), trunc, tameness=tameness)
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertEqual(len(certificate.components), 8)
        for component in certificate.components:
            self.assertEqual(component.evidence["invariant_factors"], [])

    def test_gr_nop_is_quasitame(self):
        trunc = TruncationParams(max_degree=2, max_xdeg=2, max_arity=2, max_valence=2)
        certificate = quasitameness_certificate(builtin("gr_nop"), trunc)
        self.assertEqual(certificate.verdict, Verdict.CERTIFIED)
        self.assertGreater(len(certificate.components), 1)
        self.assertIs(require_quasitame(certificate), certificate)

    def test_hypothesis_not_met(self):
        with self.assertRaises(HypothesisNotMet):
            require_quasitame(None)

