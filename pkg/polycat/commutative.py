"""
Commutative monoids, which no polynomial monad describes.

The classifier of Com+1 is the category of finite sets colored X or K,
with arbitrary maps on X and bijections on K; its skeleton has one object
(a, p) per pair of counts. Automorphisms on K survive, so the component
with two K's has fundamental group Z/2. Extensions are computed through
symmetric powers, the quotients by S_k taken by listing orbits.
"""

import itertools
import logging
from math import comb, factorial

import attrs
from sympy.combinatorics.named_groups import SymmetricGroup

from .classifier import TruncationParams
from .exceptions import ClassifierKindError, MalformedDiagram
from .polymonad import FiniteMonoid
from .setcat import Generator, PresentedCategory, SetValuedDiagram, colimit, groupoid_trivial
from .unionfind import UnionFind

logger = logging.getLogger(__name__)

COM_KINDS = {
    "Com+1": ("XK", False, ""),
    "Com_{f,g}": ("XKL", False, "fg"),
    "GrCom+1": ("XK", True, ""),
    "GrCom_{f,g}": ("XKL", True, "fg"),
}

COM_ALIASES = {"com+1": "Com+1", "com_fg": "Com_{f,g}", "com_{f,g}": "Com_{f,g}",
               "grcom+1": "GrCom+1", "grcom_fg": "GrCom_{f,g}", "grcom_{f,g}": "GrCom_{f,g}"}


@attrs.frozen
class ComClassifierObject:
    """Iso class of a finite set colored X/K/L, optionally with a colored point"""
    x: int
    k: int
    l: int = 0
    point: str | None = None

    @property
    def id(self):
        base = f"X{self.x}K{self.k}L{self.l}"
        return base if self.point is None else f"{base}*{self.point}"

    @property
    def degree(self):
        return self.k + self.l + (self.point in ("K", "L"))

    @property
    def xdeg(self):
        return self.x + (self.point == "X")

    @property
    def sort_key(self):
        return (self.point is not None, self.point or "", self.xdeg, self.degree, self.k, self.l)

    def __str__(self):
        return self.id


def _shift(obj, **change):
    return attrs.evolve(obj, **{name: getattr(obj, name) + delta for name, delta in change.items()})


def com_classifier(kind="Com+1", truncation=None):
    """
    Skeleton of the classifier: generators are transpositions tx/tk/tl,
    ins (new X, the unit), mrg (merge the last two X), f and g on the last
    K, and on pointed objects act (last X into the point) with f_pt, g_pt.
    """
    kind = COM_ALIASES.get(kind.strip().lower(), kind.strip())
    if kind not in COM_KINDS:
        raise ClassifierKindError(f"unknown commutative classifier {kind!r}; choose from {', '.join(COM_KINDS)}")
    trunc = truncation or TruncationParams()
    letters, pointed, moves = COM_KINDS[kind]
    has_l = "L" in letters

    objects = []
    points = [None] + (list(letters) if pointed else [])
    for point in points:
        for x in range(trunc.max_xdeg + 1):
            for k in range(trunc.max_degree + 1):
                for l in range(trunc.max_degree + 1 if has_l else 1):
                    obj = ComClassifierObject(x, k, l, point)
                    if obj.xdeg <= trunc.max_xdeg and obj.degree <= trunc.max_degree:
                        objects.append(obj)
    objects.sort(key=lambda o: o.sort_key)
    present = {o.id: o for o in objects}

    generators, relations = [], []

    def add(name, source, target):
        if source.id in present and target.id in present:
            gen = Generator(f"{name}@{source.id}", source.id, target.id, name.rstrip("0123456789"))
            generators.append(gen)
            return gen.id
        return None

    def gid(name, obj):
        key = f"{name}@{obj.id}"
        return key if key in ids else None

    for obj in objects:
        for letter, count in (("x", obj.x), ("k", obj.k), ("l", obj.l)):
            for i in range(1, count):
                add(f"t{letter}{i}", obj, obj)
        add("ins", obj, _shift(obj, x=1))
        if obj.x >= 2:
            add("mrg", obj, _shift(obj, x=-1))
        if obj.k >= 1 and "f" in moves:
            add("f", obj, _shift(obj, k=-1, l=1))
        if obj.k >= 1 and "g" in moves:
            add("g", obj, _shift(obj, k=-1, x=1))
        if obj.point == "X" and obj.x >= 1:
            add("act", obj, _shift(obj, x=-1))
        if obj.point == "K" and "f" in moves:
            add("f_pt", obj, attrs.evolve(obj, point="L"))
        if obj.point == "K" and "g" in moves:
            add("g_pt", obj, attrs.evolve(obj, point="X"))
    ids = {g.id for g in generators}

    def relate(left, right):
        if all(left) and all(right):
            relations.append((tuple(left), tuple(right)))

    for obj in objects:
        for letter, count in (("x", obj.x), ("k", obj.k), ("l", obj.l)):
            for i in range(1, count):
                t_i = gid(f"t{letter}{i}", obj)
                relate((t_i, t_i), ())
                if i + 1 < count:
                    t_j = gid(f"t{letter}{i + 1}", obj)
                    relate((t_i, t_j, t_i), (t_j, t_i, t_j))
                for j in range(i + 2, count):
                    relate((t_i, gid(f"t{letter}{j}", obj)), (gid(f"t{letter}{j}", obj), t_i))
        for (a, ca), (b, cb) in itertools.combinations((("x", obj.x), ("k", obj.k), ("l", obj.l)), 2):
            for i in range(1, ca):
                for j in range(1, cb):
                    relate((gid(f"t{a}{i}", obj), gid(f"t{b}{j}", obj)),
                           (gid(f"t{b}{j}", obj), gid(f"t{a}{i}", obj)))

        up = _shift(obj, x=1)
        ins = gid("ins", obj)
        if ins:
            relate((ins, gid("mrg", up)), ())
            for letter, count in (("x", obj.x), ("k", obj.k), ("l", obj.l)):
                for i in range(1, count):
                    relate((gid(f"t{letter}{i}", obj), ins), (ins, gid(f"t{letter}{i}", up)))
            if obj.point == "X":
                relate((ins, gid("act", up)), ())
        mrg = gid("mrg", obj)
        if mrg:
            down = _shift(obj, x=-1)
            relate((gid(f"tx{obj.x - 1}", obj), mrg), (mrg,))
            for i in range(1, obj.x - 2):
                relate((gid(f"tx{i}", obj), mrg), (mrg, gid(f"tx{i}", down)))
            for letter, count in (("k", obj.k), ("l", obj.l)):
                for i in range(1, count):
                    relate((gid(f"t{letter}{i}", obj), mrg), (mrg, gid(f"t{letter}{i}", down)))
            if obj.point == "X":
                relate((mrg, gid("act", down)), (gid("act", obj), gid("act", down)))
        act = gid("act", obj)
        if act:
            down = _shift(obj, x=-1)
            for letter, count in (("k", obj.k), ("l", obj.l)):
                for i in range(1, count):
                    relate((gid(f"t{letter}{i}", obj), act), (act, gid(f"t{letter}{i}", down)))
            for i in range(1, obj.x - 1):
                relate((gid(f"tx{i}", obj), act), (act, gid(f"tx{i}", down)))
        for move, change in (("f", {"k": -1, "l": 1}), ("g", {"k": -1, "x": 1})):
            gen = gid(move, obj)
            if not gen:
                continue
            after = _shift(obj, **change)
            for i in range(1, obj.k - 1):
                relate((gid(f"tk{i}", obj), gen), (gen, gid(f"tk{i}", after)))
            for letter, count in (("x", obj.x), ("l", obj.l)):
                for i in range(1, count):
                    relate((gid(f"t{letter}{i}", obj), gen), (gen, gid(f"t{letter}{i}", after)))

    category = PresentedCategory(objects=[o.id for o in objects], generators=generators,
                                 relations=relations, decorations=present, name=kind)
    logger.info("commutative classifier", extra={"kind": kind, "objects": len(objects),
                                                 "generators": len(generators), "relations": len(relations)})
    return category


def final_objects(category):
    """Objects with exactly one X element, the point included"""
    return [obj for obj in category.objects if category.decorations[obj].xdeg == 1]


def com_quasitameness(truncation=None, kind="Com+1", budget=None):
    trunc = truncation or TruncationParams()
    certificate = groupoid_trivial(com_classifier(kind, trunc), budget, trunc.as_dict())
    notes = [f"truncated at #K+#L <= {trunc.max_degree}, #X <= {trunc.max_xdeg}"]
    if kind.lower().startswith("grcom"):
        notes.append("pointed relations extrapolated from the unpointed ones")
    return attrs.evolve(certificate, notes=tuple(notes))


def free_comm_truncated(elements, n):
    """Multisets over elements of size at most n, as sorted tuples"""
    elements = sorted(elements, key=repr)
    return [combo for size in range(n + 1)
            for combo in itertools.combinations_with_replacement(elements, size)]


def stars_and_bars(size, n):
    if size == 0:
        return 1
    return sum(comb(j + size - 1, size - 1) for j in range(n + 1))


def sigma_orbits(tuples, k, uf=None):
    """
    Orbits of S_k permuting coordinates, found by closing under adjacent
    transpositions. Returns the union-find.
    """
    uf = uf or UnionFind()
    pool = set(tuples)
    for t in pool:
        uf.add(t)
        for i in range(k - 1):
            swapped = t[:i] + (t[i + 1], t[i]) + t[i + 2:]
            if swapped in pool:
                uf.union(t, swapped)
    return uf


def burnside_count(size, k):
    """Orbits of S_k on tuples of length k over a set of the given size"""
    if k == 0:
        return 1
    group = SymmetricGroup(k)
    total = sum(size ** perm.cycles for perm in group.generate())
    return total // factorial(k)


@attrs.frozen(eq=False)
class ComProblem:
    """A finite commutative monoid X, finite K and L, f: K -> L, g: K -> X"""
    monoid: FiniteMonoid
    k_set: tuple = attrs.field(converter=tuple, default=())
    l_set: tuple = attrs.field(converter=tuple, default=("l",))
    f: dict = attrs.field(factory=dict)
    g: dict = attrs.field(factory=dict)
    name: str = "com"

    def validate(self):
        if not self.monoid.is_commutative:
            raise MalformedDiagram(f"{self.monoid.name} is not commutative", offender=self.monoid.name)
        for x in self.k_set:
            if self.f.get(x) not in self.l_set or self.g.get(x) not in self.monoid.elements:
                raise MalformedDiagram(f"f or g undefined at {x!r}", offender=x)
        return self


@attrs.frozen(eq=False)
class SymStage:
    k: int
    elements: tuple
    classes: dict = attrs.field(repr=False)
    orbit_table: dict = attrs.field(factory=dict)

    def __len__(self):
        return len(self.elements)

    def as_dict(self):
        return {"k": self.k, "size": len(self.elements),
                "orbits": {str(j): list(counts) for j, counts in sorted(self.orbit_table.items())}}


def _canonical(monoid, x, multiset):
    return x, tuple(sorted(multiset, key=repr))


def sym_pushout_stage(prob, k):
    """
    Stages S_0 .. S_k with S_j the pushout of
    S_{j-1} <- X x Q_j / S_j -> X x L^j / S_j, where Q_j is the punctured
    cube colimit. Elements are pairs (x, multiset over L).
    """
    prob.validate()
    monoid = prob.monoid
    uf = UnionFind()
    for x in monoid.elements:
        uf.add((x, ()))
    stages = [_sym_stage(0, uf, {})]
    for j in range(1, k + 1):
        powers = list(itertools.product(prob.l_set, repeat=j))
        orbits = sigma_orbits(powers, j)
        orbit_count = len(orbits.component_dict())
        table = {"L": (orbit_count, burnside_count(len(prob.l_set), j))}
        for x in monoid.elements:
            for members in orbits.component_dict().values():
                uf.add(_canonical(monoid, x, members[0]))

        cube = UnionFind()
        corners = []
        for word in itertools.product("KL", repeat=j):
            if "K" not in word:
                continue
            for values in itertools.product(*[prob.k_set if c == "K" else prob.l_set for c in word]):
                corner = tuple(zip(word, values))
                corners.append(corner)
                cube.add(corner)
        pool = set(corners)
        for corner in corners:
            for i, (c, v) in enumerate(corner):
                if c == "K":
                    moved = corner[:i] + (("L", prob.f[v]),) + corner[i + 1:]
                    if moved in pool:
                        cube.union(corner, moved)
        sigma_orbits(corners, j, cube)
        q_classes = cube.component_dict()
        table["Q"] = (len(q_classes),)

        for members in q_classes.values():
            for x in monoid.elements:
                images = set()
                for corner in members:
                    ks = [v for c, v in corner if c == "K"]
                    ls = [v for c, v in corner if c == "L"]
                    lowered = _canonical(monoid, monoid.product([x] + [prob.g[v] for v in ks]), ls)
                    images.add(uf.find(lowered))
                    lifted = _canonical(monoid, x, [prob.f[v] if c == "K" else v for c, v in corner])
                    images.add(uf.find(lifted))
                uf.union(*images)
        stages.append(_sym_stage(j, uf, table))
    return stages


def _sym_stage(j, uf, table):
    classes = {}
    for root, members in uf.component_dict().items():
        classes[root] = min(members, key=lambda m: (len(m[1]), repr(m)))
    mapping = {m: classes[uf.find(m)] for m in list(uf.parents)}
    elements = tuple(sorted(set(classes.values()), key=lambda m: (len(m[1]), repr(m))))
    return SymStage(j, elements, mapping, table)


def com_diagram(prob, category):
    """Values X^a x K^p x L^q on the Com_{f,g} skeleton, actions by position"""
    monoid = prob.monoid
    value = {}
    for obj_id in category.objects:
        obj = category.decorations[obj_id]
        value[obj_id] = tuple(
            (xs, ks, ls)
            for xs in itertools.product(monoid.elements, repeat=obj.x)
            for ks in itertools.product(prob.k_set, repeat=obj.k)
            for ls in itertools.product(prob.l_set, repeat=obj.l)
        )

    def swap(part, i):
        def act(v):
            seq = list(v[part])
            seq[i - 1], seq[i] = seq[i], seq[i - 1]
            out = list(v)
            out[part] = tuple(seq)
            return tuple(out)
        return act

    actions = {}
    for gen in category.generators:
        name = gen.id.split("@")[0]
        if name.startswith("t"):
            actions[gen.id] = swap("xkl".index(name[1]), int(name[2:]))
        elif name == "ins":
            actions[gen.id] = lambda v: (v[0] + (monoid.unit,), v[1], v[2])
        elif name == "mrg":
            actions[gen.id] = lambda v: (v[0][:-2] + (monoid.multiply(v[0][-2], v[0][-1]),), v[1], v[2])
        elif name == "f":
            actions[gen.id] = lambda v: (v[0], v[1][:-1], v[2] + (prob.f[v[1][-1]],))
        elif name == "g":
            actions[gen.id] = lambda v: (v[0] + (prob.g[v[1][-1]],), v[1][:-1], v[2])
        else:
            raise ClassifierKindError(f"no set action for {gen.id}")
    return SetValuedDiagram(category, value, actions)


def com_oracle(prob, k, xdeg=None):
    """Colimit over the truncated Com_{f,g} skeleton in one shot"""
    prob.validate()
    trunc = TruncationParams(max_degree=k, max_xdeg=k + 1 if xdeg is None else xdeg)
    category = com_classifier("Com_{f,g}", trunc)
    diagram = com_diagram(prob, category)
    return colimit(diagram), diagram


def compare_with_oracle(stages, oracle):
    """
    Send (x, M) to the oracle class of the object with one X and the L
    multiset M; a bijection means the two computations agree.
    """
    cocone, diagram = oracle
    final = stages[-1]
    image = {}
    for element in final.elements:
        x, ls = element
        obj = ComClassifierObject(1, 0, len(ls)).id
        image[element] = cocone.legs[obj][((x,), (), ls)]
    return len(set(image.values())) == len(image) == len(cocone.apex)
