"""
Monad definition documents.

A definition is either a one-line pipeline

    expr := STEP "(" expr ")" | "builtin:" NAME [ "(" COLOR { "," COLOR } ")" ] | "table:" NAME
    STEP := plus | gr | gr_of | with_constants | tfg | tf | tg
            | MonToSOp | NOpToSOp | IdToSOp | PlusToSOp | ModuleMorphism

or a YAML document with a name and either a `pipeline` key or an explicit
finite table (colors, operations, units, compose). `table:NAME` refers to
the table in the same document. Provenance strings of built monads are
pipelines, so every monad the engine builds can be written back.
"""

import logging
import re

import attrs
import jsonschema
import yaml

from . import constructions
from .exceptions import DefinitionError, MalformedOperation, PolycatError, UnknownMonad
from .polymonad import Composite, Operation, PolynomialMonad, builtin, op_sort_key, validate_monad

logger = logging.getLogger(__name__)

MONAD_STEPS = ("plus", "gr", "with_constants", "tfg", "tf", "tg")
MORPHISM_STEPS = ("MonToSOp", "NOpToSOp", "IdToSOp", "PlusToSOp", "ModuleMorphism")
STEPS = MONAD_STEPS + ("gr_of",) + MORPHISM_STEPS

DEFINITION_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["name"],
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "pipeline": {"type": "string", "minLength": 1},
        "colors": {"type": "array", "items": {"type": "string"}, "minItems": 1},
        "operations": {
            "type": "object",
            "additionalProperties": {
                "type": "object",
                "required": ["target", "inputs"],
                "properties": {
                    "target": {"type": "string"},
                    "inputs": {"type": "array", "items": {"type": "string"}},
                },
                "additionalProperties": False,
            },
        },
        "units": {"type": "object", "additionalProperties": {"type": "string"}},
        "compose": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["op", "subs", "result", "origin"],
                "properties": {
                    "op": {"type": "string"},
                    "subs": {"type": "array", "items": {"type": "string"}},
                    "result": {"type": "string"},
                    "origin": {
                        "type": "array",
                        "items": {"type": "array", "items": {"type": "integer", "minimum": 0},
                                  "minItems": 2, "maxItems": 2},
                    },
                },
                "additionalProperties": False,
            },
        },
    },
    "additionalProperties": False,
    "anyOf": [{"required": ["pipeline"]}, {"required": ["colors", "operations", "units"]}],
}


@attrs.frozen
class PipelineNode:
    """A parsed pipeline: a step applied to an inner node, a builtin, or a table reference"""
    step: str
    name: str = ""
    colors: tuple = attrs.field(converter=tuple, default=())
    inner: "PipelineNode | None" = None

    def __str__(self):
        if self.step == "builtin":
            colors = "" if self.colors in ((), ("*",)) else f"({','.join(self.colors)})"
            return f"builtin:{self.name}{colors}"
        if self.step == "table":
            return f"table:{self.name}"
        return f"{self.step}({self.inner})"


@attrs.frozen
class TableSpec:
    colors: tuple = attrs.field(converter=tuple)
    operations: tuple = attrs.field(converter=tuple)
    units: tuple = attrs.field(converter=tuple)
    compose: tuple = attrs.field(converter=tuple, default=())

    def as_dict(self):
        return {
            "colors": list(self.colors),
            "operations": {code: {"target": target, "inputs": list(inputs)}
                           for code, target, inputs in self.operations},
            "units": dict(self.units),
            "compose": [{"op": op, "subs": list(subs), "result": result, "origin": [list(o) for o in origin]}
                        for op, subs, result, origin in self.compose],
        }


@attrs.frozen
class MonadDefinition:
    name: str
    pipeline: PipelineNode | None = None
    table: TableSpec | None = None

    def build(self, check=True, bound=2):
        """The monad this definition describes, law-checked on bounded composites"""
        monad = evaluate(self.pipeline, self) if self.pipeline is not None else TableMonad(self.name, self.table)
        if check:
            validate_monad(monad, bound=bound, max_checks=4000).raise_for_failure()
        return monad


class _PipelineParser:
    token = re.compile(r"\s*(?:(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<punct>[():,])|(?P<color>[^\s():,]+))")

    def __init__(self, text, line=1):
        self.text = text
        self.line = line
        self.pos = 0

    def fail(self, message):
        raise DefinitionError(message, line=self.line, column=self.pos + 1)

    def peek(self):
        match = self.token.match(self.text, self.pos)
        if not match or match.end() == match.start():
            return None, None
        kind = match.lastgroup
        return kind, match.group(kind)

    def take(self, expected=None):
        match = self.token.match(self.text, self.pos)
        if not match or not match.lastgroup:
            self.fail(f"expected {expected or 'a token'}, found end of input")
        value = match.group(match.lastgroup)
        if expected is not None and value != expected:
            self.pos = match.start(match.lastgroup)
            self.fail(f"expected {expected!r}, found {value!r}")
        self.pos = match.end()
        return value

    def word(self, what):
        kind, value = self.peek()
        if kind not in ("name", "color"):
            self.pos += len(self.text[self.pos:]) - len(self.text[self.pos:].lstrip())
            self.fail(f"expected {what}, found {value or 'end of input'!r}")
        return self.take()

    def parse(self):
        node = self.expr()
        if self.text[self.pos:].strip():
            self.pos += len(self.text[self.pos:]) - len(self.text[self.pos:].lstrip())
            self.fail(f"unexpected trailing text {self.text[self.pos:].strip()!r}")
        return node

    def expr(self):
        kind, value = self.peek()
        if kind != "name":
            self.pos += len(self.text[self.pos:]) - len(self.text[self.pos:].lstrip())
            self.fail(f"expected a step or builtin:NAME, found {value!r}")
        start = self.pos
        self.take()
        if value in ("builtin", "table"):
            self.take(":")
            name = self.word("a name")
            colors = ()
            if value == "builtin" and self.peek()[1] == "(":
                self.take("(")
                colors = [self.word("a color")]
                while self.peek()[1] == ",":
                    self.take(",")
                    colors.append(self.word("a color"))
                self.take(")")
            return PipelineNode(value, name, colors)
        if value not in STEPS:
            self.pos = start + len(self.text[start:]) - len(self.text[start:].lstrip())
            self.fail(f"unknown pipeline step {value!r}; choose from {', '.join(STEPS)}")
        self.take("(")
        inner = self.expr()
        self.take(")")
        return PipelineNode(value, inner=inner)


def parse_pipeline(text, line=1):
    return _PipelineParser(text, line).parse()


def _locate(node, path):
    """Line and column (1-based) of the YAML node at a jsonschema path"""
    for key in path:
        if isinstance(node, yaml.MappingNode):
            found = [v for k, v in node.value if k.value == key]
            if not found:
                break
            node = found[0]
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            node = node.value[key]
        else:
            break
    return node.start_mark.line + 1, node.start_mark.column + 1


def _is_pipeline_line(text):
    stripped = text.strip()
    return "\n" not in stripped and bool(re.match(r"(builtin|table)\s*:|[A-Za-z_]\w*\s*\(", stripped))


def parse_definition(text):
    """
    Parse a definition document or a bare pipeline line. Syntax errors carry
    line and column; table inconsistencies name the operation at fault.
    """
    if _is_pipeline_line(text):
        node = parse_pipeline(text.strip())
        return MonadDefinition(name=str(node), pipeline=node)
    try:
        document = yaml.safe_load(text)
        tree = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise DefinitionError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                              line=mark.line + 1 if mark else None,
                              column=mark.column + 1 if mark else None) from exc
    if not isinstance(document, dict):
        raise DefinitionError("a definition is a mapping or a pipeline line", line=1, column=1)

    validator = jsonschema.Draft202012Validator(DEFINITION_SCHEMA)
    errors = sorted(validator.iter_errors(document), key=lambda e: list(e.absolute_path))
    if errors:
        line, column = _locate(tree, errors[0].absolute_path)
        raise DefinitionError(errors[0].message, line=line, column=column)

    name = document["name"]
    pipeline = None
    if "pipeline" in document:
        line, _ = _locate(tree, ["pipeline"])
        pipeline = parse_pipeline(document["pipeline"], line=line)
    table = None
    if "operations" in document:
        table = _read_table(document, tree)
    if pipeline is not None and table is None and _mentions_table(pipeline):
        raise DefinitionError("pipeline refers to a table but the document has none",
                              *_locate(tree, ["pipeline"]))
    return MonadDefinition(name=name, pipeline=pipeline, table=table)


def _mentions_table(node):
    while node is not None:
        if node.step == "table":
            return True
        node = node.inner
    return False


def _read_table(document, tree):
    colors = tuple(document["colors"])
    operations = []
    for code, spec in document["operations"].items():
        for i, color in enumerate([spec["target"]] + list(spec["inputs"])):
            if color not in colors:
                where = ["operations", code, "target"] if i == 0 else ["operations", code, "inputs", i - 1]
                raise DefinitionError(f"operation {code!r} uses unknown color {color!r}", *_locate(tree, where))
        operations.append((code, spec["target"], tuple(spec["inputs"])))
    by_code = {code: (target, inputs) for code, target, inputs in operations}
    for color in colors:
        unit = document["units"].get(color)
        if unit not in by_code or by_code[unit] != (color, (color,)):
            raise DefinitionError(f"unit of color {color!r} must be a unary operation {color} -> {color}",
                                  *_locate(tree, ["units", color] if unit else ["units"]))
    entries = []
    for i, entry in enumerate(document.get("compose", ())):
        for key in ("op", "result"):
            if entry[key] not in by_code:
                raise DefinitionError(f"compose entry refers to unknown operation {entry[key]!r}",
                                      *_locate(tree, ["compose", i, key]))
        op_target, op_inputs = by_code[entry["op"]]
        for j, sub in enumerate(entry["subs"]):
            if sub not in by_code or j >= len(op_inputs) or by_code[sub][0] != op_inputs[j]:
                raise DefinitionError(f"compose entry for {entry['op']!r}: {sub!r} does not fit slot {j}",
                                      *_locate(tree, ["compose", i, "subs", j]))
        if len(entry["subs"]) != len(op_inputs):
            raise DefinitionError(f"operation {entry['op']!r} has {len(op_inputs)} slots, "
                                  f"compose entry gives {len(entry['subs'])}", *_locate(tree, ["compose", i, "subs"]))
        arity = sum(len(by_code[s][1]) if s in by_code else 0 for s in entry["subs"])
        result_target, result_inputs = by_code[entry["result"]]
        if result_target != op_target or len(result_inputs) != arity or len(entry["origin"]) != arity:
            raise DefinitionError(f"fiber table of {entry['op']!r} does not match result {entry['result']!r}",
                                  *_locate(tree, ["compose", i, "origin"]))
        entries.append((entry["op"], tuple(entry["subs"]), entry["result"],
                        tuple(tuple(pair) for pair in entry["origin"])))
    return TableSpec(colors, operations, sorted(document["units"].items()), entries)


class TableMonad(PolynomialMonad):
    """
    A finite polynomial monad written out as tables. Composites with a unit
    on either side are implied and need no entry.
    """
    default_valence = 0

    def __init__(self, name, table):
        super().__init__()
        self.name = name
        self.table = table
        self.provenance = f"table:{name}"
        self._ops = {code: Operation(code, target, inputs) for code, target, inputs in table.operations}
        self._units = dict(table.units)
        self._table = {(op, subs): (result, origin) for op, subs, result, origin in table.compose}

    def colors(self, max_valence=None):
        return tuple(sorted(self.table.colors))

    def has_color(self, color):
        return color in self.table.colors

    def decode(self, code):
        if code not in self._ops:
            raise MalformedOperation(f"{self.name} has no operation {code!r}", code=code)
        return self._ops[code]

    def unit(self, color):
        return self._ops[self._units[color]]

    def _compose(self, op, subs):
        if self.is_unit(op):
            return Composite(subs[0], [(0, f) for f in range(subs[0].arity)])
        if all(self.is_unit(s) for s in subs):
            return Composite(op, [(e, 0) for e in range(op.arity)])
        key = (op.code, tuple(s.code for s in subs))
        if key not in self._table:
            raise MalformedOperation(f"{self.name} has no composite for {op.code}({', '.join(key[1])})",
                                     code=op.code)
        result, origin = self._table[key]
        return Composite(self._ops[result], origin)

    def _operations(self, color, max_arity, max_valence, max_size):
        return sorted((op for op in self._ops.values() if op.target == color), key=op_sort_key)


def _morphism(step, monad):
    if step == "MonToSOp":
        return constructions.MonToSOp(monad)
    if step == "NOpToSOp":
        return constructions.NOpToSOp(monad)
    if step == "IdToSOp":
        return constructions.IdToSOp(monad)
    if step == "PlusToSOp":
        if not isinstance(monad, constructions.PlusMonad):
            raise UnknownMonad(f"PlusToSOp needs a plus construction, got {monad.name}")
        return constructions.PlusToSOp(monad)
    return constructions.module_morphism(monad)


def canonical_morphism(monad):
    """The morphism to symmetric operads that `gr` uses for a monad"""
    if isinstance(monad, constructions.PlusMonad):
        return constructions.PlusToSOp(monad)
    provenance = monad.provenance or ""
    if provenance == "builtin:mon":
        return constructions.MonToSOp(monad)
    if provenance == "builtin:id":
        return constructions.IdToSOp(monad)
    if provenance.startswith("builtin:nop"):
        return constructions.NOpToSOp(monad)
    raise UnknownMonad(f"no canonical morphism to symmetric operads for {monad.name}")


def evaluate(node, definition=None):
    """Build the monad a pipeline describes"""
    if node.step == "builtin":
        return builtin(node.name, node.colors or ("*",))
    if node.step == "table":
        if definition is None or definition.table is None:
            raise UnknownMonad(f"no table named {node.name!r} in this definition")
        return TableMonad(node.name, definition.table)
    if node.step in MORPHISM_STEPS:
        raise UnknownMonad(f"{node.step} is a morphism; wrap it in gr_of(...)")
    if node.step == "gr_of":
        inner = node.inner
        if inner.step not in MORPHISM_STEPS:
            raise UnknownMonad(f"gr_of expects a morphism step, got {inner.step!r}")
        return constructions.gr_of(_morphism(inner.step, evaluate(inner.inner, definition)))
    monad = evaluate(node.inner, definition)
    if node.step == "plus":
        return constructions.plus_construction(monad)
    if node.step == "gr":
        return constructions.gr_of(canonical_morphism(monad))
    if node.step == "with_constants":
        return constructions.with_constants(monad)
    return constructions.tfg_monad(monad, node.step[1:])


def load_monad(spec, check=True):
    """
    A monad from a --monad argument: a pipeline line such as
    builtin:gr_mon, or a path to a definition file.
    """
    if _is_pipeline_line(spec):
        definition = parse_definition(spec)
    else:
        try:
            with open(spec, encoding="utf-8") as handle:
                definition = parse_definition(handle.read())
        except OSError as exc:
            raise DefinitionError(f"cannot read definition {spec!r}: {exc.strerror}") from exc
    try:
        return definition, definition.build(check=check)
    except PolycatError:
        logger.warning("definition rejected", extra={"definition": definition.name})
        raise


def serialize_definition(definition):
    document = {"name": definition.name}
    if definition.pipeline is not None:
        document["pipeline"] = str(definition.pipeline)
    if definition.table is not None:
        document.update(definition.table.as_dict())
    return yaml.safe_dump(document, sort_keys=False, default_flow_style=None)


def definition_of(monad, name=None):
    """Definition whose pipeline rebuilds the monad"""
    if isinstance(monad, TableMonad):
        return MonadDefinition(name=name or monad.name, table=monad.table)
    node = parse_pipeline(monad.provenance or monad.name)
    return MonadDefinition(name=name or monad.name, pipeline=node)
