"""
Plain-text artifacts: certificates, classifiers, stage tables and free
algebras as canonical JSON, presented categories as Graphviz DOT.
"""

import enum
import hashlib
import json
import os
from pathlib import Path

import attrs
import jsonschema

from .exceptions import DefinitionError
from .setcat import Certificate, ComponentVerdict, Verdict

ARTIFACT_VERSION = 1

CERTIFICATE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["artifact", "version", "monad", "kind", "verdict", "exit_code", "truncation", "components"],
    "properties": {
        "artifact": {"const": "certificate"},
        "version": {"const": ARTIFACT_VERSION},
        "monad": {"type": "string"},
        "classifier": {"type": "string"},
        "kind": {"enum": ["terminal-objects", "groupoid-trivial"]},
        "verdict": {"enum": [v.value for v in Verdict]},
        "exit_code": {"enum": [0, 2, 3]},
        "truncation": {"type": "object"},
        "notes": {"type": "array", "items": {"type": "string"}},
        "components": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["objects", "verdict", "evidence"],
                "properties": {
                    "objects": {"type": "array", "items": {"type": "string"}, "minItems": 1},
                    "verdict": {"enum": [v.value for v in Verdict]},
                    "evidence": {"type": "object"},
                },
            },
        },
        "runs": {"type": "array"},
    },
}

STAGES_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["artifact", "version", "problem", "sizes", "stages"],
    "properties": {
        "artifact": {"const": "stages"},
        "version": {"const": ARTIFACT_VERSION},
        "sizes": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "stages": {"type": "array", "items": {"type": "object"}},
        "comparison": {"type": "object"},
    },
}

SCHEMAS = {"certificate": CERTIFICATE_SCHEMA, "stages": STAGES_SCHEMA}


def jsonable(value):
    """Plain JSON data from attrs classes, enums, tuples, sets and dict keys of any kind"""
    if isinstance(value, enum.Enum):
        return value.value
    if attrs.has(type(value)):
        if hasattr(value, "as_dict"):
            return jsonable(value.as_dict())
        return jsonable(attrs.asdict(value, recurse=False))
    if isinstance(value, dict):
        return {k if isinstance(k, str) else repr(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return sorted((jsonable(v) for v in value), key=repr)
    if value is None or isinstance(value, (bool, int, float, str)):
        return value
    return str(value)


def dumps(document):
    return json.dumps(jsonable(document), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_artifact(path, text):
    """Atomic write; returns the sha256 of the bytes written"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    data = text.encode("utf-8")
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    os.replace(tmp, path)
    return hashlib.sha256(data).hexdigest()


def certificate_document(certificate, monad, classifier_name=""):
    return {
        "artifact": "certificate",
        "version": ARTIFACT_VERSION,
        "monad": (monad.provenance or monad.name) if monad is not None else "builtin:com",
        "classifier": classifier_name,
        "kind": certificate.kind,
        "verdict": certificate.verdict.value,
        "exit_code": certificate.exit_code,
        "truncation": certificate.truncation,
        "notes": list(certificate.notes),
        "components": [
            {"objects": list(c.objects), "verdict": c.verdict.value, "evidence": c.evidence}
            for c in certificate.components
        ],
        "runs": [certificate_document(run, monad, classifier_name) for run in certificate.runs],
    }


def validate_document(document, artifact):
    """Check a loaded artifact against its schema; errors name the failing path"""
    validator = jsonschema.Draft202012Validator(SCHEMAS[artifact])
    error = jsonschema.exceptions.best_match(validator.iter_errors(document))
    if error is not None:
        where = "/".join(str(p) for p in error.absolute_path) or "<root>"
        raise DefinitionError(f"{artifact} artifact invalid at {where}: {error.message}")
    return document


def load_certificate(text):
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DefinitionError(f"not JSON: {exc.msg}", line=exc.lineno, column=exc.colno) from exc
    validate_document(document, "certificate")
    components = [ComponentVerdict(c["objects"], Verdict(c["verdict"]), c["evidence"])
                  for c in document["components"]]
    return document, Certificate(document["kind"], components, document["truncation"], document.get("notes", ()))


def category_document(category):
    return {
        "artifact": "classifier",
        "version": ARTIFACT_VERSION,
        "name": category.name,
        "objects": [{"id": obj, "label": category.label(obj)} for obj in category.objects],
        "generators": [attrs.asdict(gen) for gen in category.generators],
        "relations": [[list(left), list(right)] for left, right in category.relations],
    }


def stages_document(result, comparison=None):
    document = {
        "artifact": "stages",
        "version": ARTIFACT_VERSION,
        "problem": result.problem.describe(),
        "sizes": result.sizes(),
        "stages": [stage.as_dict() for stage in result.stages],
        "stable": result.stable,
        "notes": list(result.notes),
    }
    if comparison is not None:
        document["comparison"] = comparison.as_dict()
    return document


def _quote(text):
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


VERDICT_COLORS = {Verdict.CERTIFIED: "darkgreen", Verdict.REFUTED: "firebrick", Verdict.UNKNOWN: "goldenrod"}


def to_dot(category, certificate=None):
    """
    DOT text for a presented category, one cluster per component when a
    certificate is given; terminal objects and sinks drawn doubled.
    """
    lines = [f"digraph {_quote(category.name or 'category')} {{", "    rankdir=LR;",
             "    node [shape=box, fontname=monospace];"]
    marked = set()
    groups = [((), list(category.objects))]
    if certificate is not None:
        groups = [(c, list(c.objects)) for c in certificate.components]
        for c in certificate.components:
            marked.update(c.evidence.get("sinks", ()))
            if "terminal" in c.evidence:
                marked.add(c.evidence["terminal"])
    for i, (component, objects) in enumerate(groups):
        indent = "    "
        if component:
            lines.append(f"    subgraph cluster_{i} {{")
            lines.append(f"        color={VERDICT_COLORS[component.verdict]}; label={_quote(component.verdict.value)};")
            indent = "        "
        for obj in objects:
            style = ", peripheries=2" if obj in marked else ""
            lines.append(f"{indent}{_quote(obj)} [label={_quote(category.label(obj))}{style}];")
        if component:
            lines.append("    }")
    for gen in category.generators:
        lines.append(f"    {_quote(gen.source)} -> {_quote(gen.target)} [label={_quote(gen.label or gen.id)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def free_algebra_document(monad, table):
    return {
        "artifact": "free",
        "version": ARTIFACT_VERSION,
        "monad": monad.provenance or monad.name,
        "sizes": {color: len(elements) for color, elements in table.items()},
        "elements": {color: [[op, list(args)] for op, args in elements] for color, elements in table.items()},
    }


def render_table(rows, headers):
    """Fixed-width text table"""
    rows = [[str(cell) for cell in row] for row in rows]
    widths = [max([len(h)] + [len(r[i]) for r in rows]) for i, h in enumerate(headers)]
    out = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    out.append("  ".join("-" * w for w in widths))
    out.extend("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in rows)
    return "\n".join(out) + "\n"
