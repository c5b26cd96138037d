import hashlib
import json
import tempfile
from pathlib import Path

from django.test import SimpleTestCase

from polycat.exceptions import DefinitionError
from polycat.filtration import monoid_problem, run_filtration
from polycat.polymonad import FiniteMonoid, MonoidMonad, free_apply
from polycat.serialization import (
    category_document, certificate_document, dumps, free_algebra_document, load_certificate, render_table,
    stages_document, to_dot, validate_document, write_artifact,
)
from polycat.setcat import Generator, PresentedCategory, Verdict, terminal_certificate


def span():
    return PresentedCategory(
        objects=["A", "X", "C"],
        generators=[Generator("u", "X", "A"), Generator("v", "X", "C")],
        name="span",
    )


class JsonTest(SimpleTestCase):

    def test_dumps_is_canonical(self):
        self.assertEqual(dumps({"b": 1, "a": (1, 2)}), '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n')
        self.assertEqual(json.loads(dumps({("x", 1): Verdict.REFUTED})), {"('x', 1)": "REFUTED"})

    def test_write_artifact_returns_digest(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "nested" / "out.json"
            digest = write_artifact(path, "{}\n")
            self.assertEqual(digest, hashlib.sha256(b"{}\n").hexdigest())
            self.assertEqual(path.read_text(), "{}\n")
            self.assertEqual([p.name for p in path.parent.iterdir()], ["out.json"])


class CertificateDocumentTest(SimpleTestCase):

    def setUp(self):
        self.certificate = terminal_certificate(span())
        self.document = certificate_document(self.certificate, MonoidMonad(), "span")

    def test_round_trip(self):
        document, certificate = load_certificate(dumps(self.document))
        self.assertEqual(document["monad"], "builtin:mon")
        self.assertEqual(certificate.verdict, Verdict.REFUTED)
        self.assertEqual(certificate.components[0].evidence["sinks"], ["A", "C"])

    def test_schema_names_the_bad_field(self):
        self.document["exit_code"] = 5
        with self.assertRaises(DefinitionError) as ctx:
            validate_document(json.loads(dumps(self.document)), "certificate")
        self.assertIn("invalid at exit_code", str(ctx.exception))

    def test_not_json(self):
        with self.assertRaises(DefinitionError) as ctx:
            load_certificate("{\n  oops")
        self.assertEqual(ctx.exception.line, 2)

    def test_commutative_certificates_have_no_monad(self):
        self.assertEqual(certificate_document(self.certificate, None)["monad"], "builtin:com")


class RenderingTest(SimpleTestCase):

    def test_dot_clusters_and_sinks(self):
        dot = to_dot(span(), terminal_certificate(span()))
        self.assertIn("subgraph cluster_0", dot)
        self.assertEqual(dot.count("peripheries=2"), 2)
        self.assertIn('"X" -> "A"', dot)
        self.assertNotIn("subgraph", to_dot(span()))

    def test_category_document(self):
        document = category_document(span())
        self.assertEqual([o["id"] for o in document["objects"]], ["A", "X", "C"])
        self.assertEqual(document["generators"][0]["source"], "X")

    def test_stages_document_validates(self):
        result = run_filtration(monoid_problem(FiniteMonoid.trivial(), degree=1), check_stability=False)
        document = json.loads(dumps(stages_document(result)))
        self.assertEqual(validate_document(document, "stages")["sizes"], [1, 2])

    def test_free_algebra_document(self):
        table = free_apply(MonoidMonad(), {"*": ("x",)}, 2)
        self.assertEqual(free_algebra_document(MonoidMonad(), table)["sizes"], {"*": 3})

    def test_render_table(self):
        text = render_table([["a", 1], ["bbb", 22]], ["name", "n"])
        self.assertEqual(text, "name  n\n----  --\na     1\nbbb   22\n")
