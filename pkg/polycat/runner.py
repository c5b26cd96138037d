"""
Orchestration behind the management commands. Each entry point takes a
built monad (or instance options) and a RunConfig and returns a RunResult
holding the exit code, the text artifacts and a short summary; nothing here
touches the filesystem or the database.
"""

import logging
from collections import deque

import attrs
from sympy.combinatorics import Permutation

from . import commutative, serialization
from .classifier import (
    TruncationParams, build_classifier, normalize_kind, quasitameness_certificate, tameness_certificate,
)
from .constructions import gr_of, plus_construction
from .definitions import canonical_morphism, definition_of, evaluate, parse_pipeline, serialize_definition
from .exceptions import ClassifierKindError, ConsistencyViolation, DefinitionError
from .filtration import MONOIDS, compare, direct_oracle, monoid_problem, random_problem, run_filtration
from .groups import Presentation, _evaluate, determinantal_invariants
from .polymonad import free_apply, validate_monad
from .setcat import GROUPOID_TRIVIAL, TERMINAL_OBJECTS, Budget, Verdict, pi0, terminal_certificate

logger = logging.getLogger(__name__)

FORMATS = ("json", "dot", "table")
EXIT_OK, EXIT_ERROR, EXIT_REFUTED, EXIT_UNKNOWN = 0, 1, 2, 3


@attrs.frozen
class RunConfig:
    """Truncation, budgets, output format and seed; the seed fixes every random instance"""
    truncation: TruncationParams = attrs.field(factory=TruncationParams)
    budget: Budget = attrs.field(factory=Budget)
    output_format: str = attrs.field(default="json", validator=attrs.validators.in_(FORMATS))
    seed: int = 0

    @classmethod
    def from_options(cls, options, defaults):
        """Command options over the POLYCAT settings block"""
        def pick(name, key):
            value = options.get(name)
            return defaults[key] if value is None else value

        truncation = TruncationParams(
            max_degree=pick("degree", "DEGREE"),
            max_xdeg=pick("xdeg", "XDEG"),
            max_arity=options.get("arity"),
            max_valence=options.get("valence"),
        )
        steps = pick("budget", "BUDGET")
        budget = Budget(rewrite_steps=steps, critical_pairs=max(1, steps // 4), tietze_steps=steps,
                        quotient_search=defaults["QUOTIENT_SEARCH"])
        return cls(truncation, budget, pick("format", "FORMAT"), pick("seed", "SEED"))


@attrs.frozen
class RunResult:
    exit_code: int
    artifacts: tuple = attrs.field(converter=tuple, default=())
    summary: tuple = attrs.field(converter=tuple, default=())
    verdict: str = ""

    def artifact(self, name):
        return dict(self.artifacts)[name]


def combine_exit_codes(codes):
    """A refutation outranks an unknown; both outrank success"""
    codes = set(codes)
    for code in (EXIT_ERROR, EXIT_REFUTED, EXIT_UNKNOWN):
        if code in codes:
            return code
    return EXIT_OK


def _certificate_artifact(name, certificate, monad, category, kind, cfg):
    if cfg.output_format == "dot":
        return f"{name}.dot", serialization.to_dot(category, certificate)
    if cfg.output_format == "table":
        rows = [(i, len(c.objects), c.verdict.value, category.label(c.objects[0]))
                for i, c in enumerate(certificate.components)]
        return f"{name}.txt", serialization.render_table(rows, ["component", "objects", "verdict", "first object"])
    return f"{name}.json", serialization.dumps(serialization.certificate_document(certificate, monad, kind))


def analyze(monad, cfg, kind="T+1"):
    """Tameness and quasi-tameness certificates of the T+1 (or Com+1) classifier"""
    trunc = cfg.truncation
    kind = commutative.COM_ALIASES.get(kind.strip().lower(), kind)
    if kind in commutative.COM_KINDS or kind.lower() in commutative.COM_ALIASES:
        category = commutative.com_classifier(kind, trunc)
        tame = terminal_certificate(category, cfg.budget, trunc.as_dict())
        quasi = commutative.com_quasitameness(trunc, kind, cfg.budget)
    else:
        kind = normalize_kind(kind)
        if kind != "T+1":
            raise ClassifierKindError(
                f"analyze certifies the T+1 classifier, got {kind}; use classifier for {kind}"
            )
        category = build_classifier(monad, kind, trunc).category
        tame = tameness_certificate(monad, trunc, cfg.budget)
        quasi = quasitameness_certificate(monad, trunc, cfg.budget, tameness=tame)
    artifacts = [
        _certificate_artifact("tameness", tame, monad, category, kind, cfg),
        _certificate_artifact("quasitameness", quasi, monad, category, kind, cfg),
    ]
    summary = [
        f"tame (truncated): {tame.verdict.value}",
        f"quasi-tame (truncated): {quasi.verdict.value}",
    ]
    code = combine_exit_codes([tame.exit_code, quasi.exit_code])
    logger.info("analyze", extra={"monad": monad.name if monad else kind, "tame": tame.verdict.value,
                                  "quasitame": quasi.verdict.value, "exit_code": code})
    return RunResult(code, artifacts, summary, f"{tame.verdict.value}/{quasi.verdict.value}")


def classifier_dump(monad, cfg, kind="T+1"):
    if kind in commutative.COM_KINDS or kind.lower() in commutative.COM_ALIASES:
        category = commutative.com_classifier(kind, cfg.truncation)
    else:
        category = build_classifier(monad, normalize_kind(kind), cfg.truncation).category
    components = pi0(category)
    if cfg.output_format == "dot":
        artifact = ("classifier.dot", serialization.to_dot(category))
    elif cfg.output_format == "table":
        rows = [(i, len(c), category.label(c[0])) for i, c in enumerate(components)]
        artifact = ("classifier.txt", serialization.render_table(rows, ["component", "objects", "first object"]))
    else:
        artifact = ("classifier.json", serialization.dumps(serialization.category_document(category)))
    summary = [f"{category.name}: {len(category.objects)} objects, {len(category.generators)} generators, "
               f"{len(components)} components"]
    return RunResult(EXIT_OK, [artifact], summary)


def _pairs(text):
    if not text:
        return {}
    return dict(item.split("=", 1) for item in text.split(","))


def _names(text, default=()):
    return tuple(x for x in text.split(",") if x) if text else tuple(default)


def pushout(cfg, monad_name=None, monoid=None, k=None, l=None, f=None, g=None, use_commutative=False):
    """
    Filtration stages against the direct oracle, on a named instance when
    a monoid is given, otherwise on the random instance of cfg.seed.
    """
    if use_commutative:
        return _commutative_pushout(cfg, monoid or "trivial", k, l, f, g)
    trunc = cfg.truncation
    if monoid:
        if monoid not in MONOIDS:
            raise DefinitionError(f"unknown monoid {monoid!r}; choose from {', '.join(sorted(MONOIDS))}")
        prob = monoid_problem(MONOIDS[monoid](), _names(k), _names(l, ("l",)), _pairs(f), _pairs(g),
                              degree=trunc.max_degree, xdeg=trunc.max_xdeg)
    else:
        prob = random_problem(cfg.seed, monad_name)
    result = run_filtration(prob)
    oracle = direct_oracle(prob, result.classifier, result.diagram)
    comparison = compare(result, oracle)
    if not comparison.match:
        raise ConsistencyViolation(f"filtration and oracle disagree on {prob.name}: {comparison.witness}")
    code = EXIT_OK if result.stable and oracle.stable else EXIT_UNKNOWN
    if cfg.output_format == "table":
        rows = [(s.k, len(s), s.q_size, s.l_size) for s in result.stages]
        artifact = ("stages.txt", serialization.render_table(rows, ["k", "|S_k|", "|Q_k|", "|L_k|"]))
    else:
        artifact = ("stages.json", serialization.dumps(serialization.stages_document(result, comparison)))
    sizes = ", ".join(str(n) for n in result.sizes())
    summary = [f"{prob.name}: stages {sizes}", f"oracle: {comparison.verdict}"]
    if not result.stable:
        summary.append("unstable under a larger xdeg bound")
    return RunResult(code, [artifact], summary, comparison.verdict)


def _commutative_pushout(cfg, monoid, k, l, f, g):
    if monoid not in MONOIDS:
        raise DefinitionError(f"unknown monoid {monoid!r}; choose from {', '.join(sorted(MONOIDS))}")
    prob = commutative.ComProblem(MONOIDS[monoid](), _names(k), _names(l, ("l",)), _pairs(f), _pairs(g),
                                  name=f"Com/{monoid}")
    degree = cfg.truncation.max_degree
    stages = commutative.sym_pushout_stage(prob, degree)
    oracle = commutative.com_oracle(prob, degree)
    match = commutative.compare_with_oracle(stages, oracle)
    if not match:
        raise ConsistencyViolation(f"symmetric filtration and oracle disagree on {prob.name}")
    document = {"artifact": "stages", "version": serialization.ARTIFACT_VERSION,
                "problem": {"name": prob.name, "monoid": monoid, "K": list(prob.k_set), "L": list(prob.l_set)},
                "sizes": [len(s) for s in stages], "stages": [s.as_dict() for s in stages],
                "comparison": {"verdict": "MATCH", "sizes": [len(stages[-1]), len(oracle[0])]}}
    if cfg.output_format == "table":
        rows = [(s.k, len(s)) for s in stages]
        artifact = ("stages.txt", serialization.render_table(rows, ["k", "|S_k|"]))
    else:
        artifact = ("stages.json", serialization.dumps(document))
    sizes = ", ".join(str(len(s)) for s in stages)
    return RunResult(EXIT_OK, [artifact], [f"{prob.name}: stages {sizes}", "oracle: MATCH"], "MATCH")


def free(monad, cfg, generators):
    """Truncated free algebra on generators given per color"""
    bound = cfg.truncation.max_arity if cfg.truncation.max_arity is not None else cfg.truncation.max_degree
    table = free_apply(monad, generators, bound, cfg.truncation.max_valence)
    if cfg.output_format == "table":
        rows = [(color, len(elements)) for color, elements in table.items()]
        artifact = ("free.txt", serialization.render_table(rows, ["color", "elements"]))
    else:
        artifact = ("free.json", serialization.dumps(serialization.free_algebra_document(monad, table)))
    total = sum(len(e) for e in table.values())
    return RunResult(EXIT_OK, [artifact], [f"{monad.name}: {total} elements of arity <= {bound}"])


def derived(monad, step, cfg=None):
    """Definition file for Gr(T) or T+, law-checked before it is written"""
    if step == "gr":
        result = gr_of(canonical_morphism(monad))
    elif step == "plus":
        result = plus_construction(monad)
    else:
        raise DefinitionError(f"unknown construction {step!r}; choose gr or plus")
    validate_monad(result, bound=2, max_checks=4000).raise_for_failure()
    text = serialize_definition(definition_of(result))
    return RunResult(EXIT_OK, [(f"{step}.yaml", text)], [f"{result.name}: {result.provenance}"])


def _category_for(document):
    trunc = TruncationParams(**{key: document["truncation"].get(key) for key in
                                ("max_degree", "max_xdeg", "max_arity", "max_valence")})
    kind = document.get("classifier") or "T+1"
    if kind in commutative.COM_KINDS:
        return commutative.com_classifier(kind, trunc)
    monad = evaluate(parse_pipeline(document["monad"]))
    return build_classifier(monad, normalize_kind(kind), trunc).category


def _reachable(category, start):
    seen = {start}
    queue = deque([start])
    while queue:
        obj = queue.popleft()
        for gen in category.out_edges[obj]:
            if gen.target not in seen:
                seen.add(gen.target)
                queue.append(gen.target)
    return seen


def check_sink_evidence(category, component, evidence):
    """Two sinks with disjoint forward closures admit no common terminal object"""
    sinks = evidence.get("sinks", ())
    members = set(component)
    if len(sinks) < 2 or not set(sinks) <= members:
        return False
    closures = [_reachable(category, s) for s in sinks]
    return all(closures[i].isdisjoint(closures[j])
               for i in range(len(sinks)) for j in range(i + 1, len(sinks)))


def check_group_evidence(evidence):
    """Recheck the torsion through determinantal divisors, or the alternating quotient"""
    presentation = Presentation(**evidence["presentation"])
    if "alternating_quotient" in evidence:
        images = [Permutation(p) for p in evidence["alternating_quotient"]]
        nontrivial = any(not p.is_Identity for p in images)
        return nontrivial and all(_evaluate(r, images).is_Identity for r in presentation.relators)
    factors = determinantal_invariants(presentation.relation_matrix(), presentation.generators)
    claimed = evidence.get("invariant_factors", [])
    return bool(claimed) and sorted(factors) == sorted(claimed)


def verify(text):
    """
    Re-validate every REFUTED component of a certificate artifact without
    the code path that produced it: reachability by plain BFS for sinks,
    minors for invariant factors.
    """
    document, certificate = serialization.load_certificate(text)
    refuted = [c for c in certificate.components if c.verdict == Verdict.REFUTED]
    if not refuted:
        return RunResult(EXIT_OK, summary=["no refuted components to check"])
    category = _category_for(document) if certificate.kind == TERMINAL_OBJECTS else None
    failures = []
    for component in refuted:
        if certificate.kind == TERMINAL_OBJECTS:
            ok = check_sink_evidence(category, component.objects, component.evidence)
        elif certificate.kind == GROUPOID_TRIVIAL:
            ok = check_group_evidence(component.evidence)
        else:
            ok = False
        if not ok:
            failures.append(component.objects[0])
    if failures:
        raise ConsistencyViolation(f"evidence does not hold for components at {', '.join(failures)}")
    return RunResult(EXIT_OK, summary=[f"{len(refuted)} refuted component(s) re-validated"], verdict="verified")


