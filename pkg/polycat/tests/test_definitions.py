import os
import tempfile

from django.test import SimpleTestCase

from polycat.constructions import plus_construction
from polycat.definitions import (
    PipelineNode, canonical_morphism, definition_of, evaluate, load_monad, parse_definition, parse_pipeline,
    serialize_definition,
)
from polycat.exceptions import DefinitionError, MalformedOperation, UnknownMonad
from polycat.polymonad import GrMonoidMonad, MonoidMonad

POINTED = """\
name: pointed
colors: ["*"]
operations:
  id: {target: "*", inputs: ["*"]}
  z: {target: "*", inputs: []}
units: {"*": id}
"""

BINARY_WITHOUT_TABLE = """\
name: loose
colors: ["*"]
operations:
  id: {target: "*", inputs: ["*"]}
  m: {target: "*", inputs: ["*", "*"]}
units: {"*": id}
"""


class PipelineTest(SimpleTestCase):

    def test_nested_steps(self):
        node = parse_pipeline("gr(plus(builtin:mon))")
        self.assertEqual(node.step, "gr")
        self.assertEqual(node.inner.inner, PipelineNode("builtin", "mon"))
        self.assertEqual(str(node), "gr(plus(builtin:mon))")

    def test_builtin_colors(self):
        node = parse_pipeline("builtin:nop(a,b)")
        self.assertEqual(node.colors, ("a", "b"))
        self.assertEqual(str(node), "builtin:nop(a,b)")

    def test_missing_paren_points_past_the_end(self):
        with self.assertRaises(DefinitionError) as ctx:
            parse_pipeline("plus(builtin:mon")
        self.assertEqual(ctx.exception.column, 17)
        self.assertEqual(ctx.exception.line, 1)

    def test_unknown_step(self):
        with self.assertRaises(DefinitionError) as ctx:
            parse_pipeline("frobnicate(builtin:mon)")
        self.assertEqual(ctx.exception.column, 1)
        self.assertIn("unknown pipeline step", str(ctx.exception))

    def test_space_after_colon(self):
        definition, monad = load_monad("builtin: gr_mon")
        self.assertEqual(monad.name, "Gr(Mon)")


class EvaluateTest(SimpleTestCase):

    def test_gr_of_a_morphism(self):
        _, monad = load_monad("gr_of(MonToSOp(builtin:mon))")
        self.assertEqual(monad.colors(), ("I:*", "J:*"))
        _, same = load_monad("gr(builtin:mon)")
        self.assertEqual(same.name, monad.name)

    def test_morphism_alone_is_not_a_monad(self):
        with self.assertRaises(UnknownMonad):
            evaluate(parse_pipeline("MonToSOp(builtin:mon)"))

    def test_no_canonical_morphism(self):
        with self.assertRaises(UnknownMonad):
            canonical_morphism(GrMonoidMonad())

    def test_provenance_round_trip(self):
        definition = definition_of(plus_construction(MonoidMonad()))
        self.assertEqual(str(definition.pipeline), "plus(builtin:mon)")
        again = parse_definition(serialize_definition(definition))
        self.assertEqual(again.pipeline, definition.pipeline)

    def test_missing_file(self):
        with self.assertRaises(DefinitionError):
            load_monad(os.path.join(tempfile.gettempdir(), "no-such-definition.yaml"))


class TableTest(SimpleTestCase):

    def test_table_monad(self):
        monad = parse_definition(POINTED).build()
        self.assertEqual([op.code for op in monad.operations("*", 1)], ["z", "id"])
        self.assertEqual(definition_of(monad).table, parse_definition(POINTED).table)

    def test_table_from_file(self):
        with tempfile.NamedTemporaryFile("w", suffix=".yaml", delete=False) as handle:
            handle.write(POINTED)
        try:
            definition, monad = load_monad(handle.name)
        finally:
            os.unlink(handle.name)
        self.assertEqual(definition.name, "pointed")
        self.assertEqual(monad.provenance, "table:pointed")

    def test_missing_composite_names_the_operation(self):
        monad = parse_definition(BINARY_WITHOUT_TABLE).build(check=False)
        m, unit = monad.operation("m"), monad.operation("id")
        with self.assertRaises(MalformedOperation) as ctx:
            monad.compose(m, [m, unit])
        self.assertEqual(ctx.exception.code, "m")

    def test_schema_error_is_located(self):
        text = POINTED.replace('z: {target: "*", inputs: []}', 'z: {target: "*", inputs: [], arity: 0}')
        with self.assertRaises(DefinitionError) as ctx:
            parse_definition(text)
        self.assertEqual(ctx.exception.line, 5)

    def test_unknown_color_names_the_operation(self):
        text = POINTED.replace('z: {target: "*", inputs: []}', 'z: {target: "q", inputs: []}')
        with self.assertRaises(DefinitionError) as ctx:
            parse_definition(text)
        self.assertIn("'z'", str(ctx.exception))
        self.assertEqual(ctx.exception.line, 5)
