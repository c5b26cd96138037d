"""
Finitely presented groups.

Generators are 1..n and a relator is a list of nonzero ints, -a standing
for the inverse of generator a. Used for the fundamental group of a
presented category component.
"""

import itertools
import logging
from math import gcd

import attrs
from sympy import Matrix, ZZ
from sympy.combinatorics.named_groups import AlternatingGroup
from sympy.matrices.normalforms import invariant_factors

from .exceptions import BudgetExhausted

logger = logging.getLogger(__name__)


def free_reduce(word):
    out = []
    for letter in word:
        if out and out[-1] == -letter:
            out.pop()
        else:
            out.append(letter)
    return out


def cyclic_reduce(word):
    word = free_reduce(word)
    while len(word) > 1 and word[0] == -word[-1]:
        word = word[1:-1]
    return word


def invert(word):
    return [-letter for letter in reversed(word)]


@attrs.frozen
class Presentation:
    """
    A group presentation <1..generators | relators>
    """
    generators: int
    relators: tuple = attrs.field(converter=lambda rs: tuple(tuple(r) for r in rs))

    @property
    def is_trivial_presentation(self):
        return self.generators == 0

    def as_dict(self):
        return {
            "generators": self.generators,
            "relators": [list(r) for r in self.relators],
        }

    def relation_matrix(self):
        rows = []
        for relator in self.relators:
            row = [0] * self.generators
            for letter in relator:
                row[abs(letter) - 1] += 1 if letter > 0 else -1
            rows.append(row)
        return rows

    def simplify(self, max_steps=20000, max_length=50000):
        """
        Greedy Tietze moves: drop trivial relators, then repeatedly eliminate a
        generator that occurs exactly once in some relator, shortest relator
        first. Returns an equivalent presentation on renumbered generators.
        """
        alive = set(range(1, self.generators + 1))
        relators = [cyclic_reduce(list(r)) for r in self.relators]
        steps = 0
        while True:
            relators = _dedupe([r for r in relators if r])
            choice = _pick_elimination(relators)
            if choice is None:
                break
            steps += 1
            if steps > max_steps:
                raise BudgetExhausted("tietze steps", max_steps)
            index, position = choice
            relator = relators.pop(index)
            letter = relator[position]
            rotated = relator[position + 1:] + relator[:position]
            # letter * rotated == 1
            image = invert(rotated) if letter > 0 else rotated
            generator = abs(letter)
            alive.discard(generator)
            relators = [cyclic_reduce(_substitute(r, generator, image)) for r in relators]
            if sum(len(r) for r in relators) > max_length:
                raise BudgetExhausted("relator length", max_length)

        numbering = {g: i for i, g in enumerate(sorted(alive), start=1)}
        renumbered = [
            [numbering[abs(x)] * (1 if x > 0 else -1) for x in r] for r in relators
        ]
        return Presentation(len(numbering), sorted(renumbered, key=lambda r: (len(r), r)))

    def abelian_invariants(self):
        """Torsion coefficients > 1 followed by one 0 per free summand"""
        if self.generators == 0:
            return []
        rows = [row for row in self.relation_matrix() if any(row)]
        if not rows:
            return [0] * self.generators
        factors = [int(d) for d in invariant_factors(Matrix(rows), domain=ZZ)]
        rank = sum(1 for d in factors if d != 0)
        torsion = sorted(abs(d) for d in factors if abs(d) > 1)
        return torsion + [0] * (self.generators - rank)


def _dedupe(relators):
    seen = set()
    out = []
    for relator in relators:
        key = tuple(relator)
        if key not in seen:
            seen.add(key)
            out.append(relator)
    return out


def _pick_elimination(relators):
    best = None
    for index, relator in enumerate(relators):
        counts = {}
        for letter in relator:
            counts[abs(letter)] = counts.get(abs(letter), 0) + 1
        for position, letter in enumerate(relator):
            if counts[abs(letter)] == 1:
                key = (len(relator), abs(letter), index)
                if best is None or key < best[0]:
                    best = (key, index, position)
                break
    if best is None:
        return None
    return best[1], best[2]


def _substitute(word, generator, image):
    out = []
    for letter in word:
        if letter == generator:
            out.extend(image)
        elif letter == -generator:
            out.extend(invert(image))
        else:
            out.append(letter)
    return free_reduce(out)


def determinantal_invariants(rows, generators):
    """
    Invariant factors from gcds of k x k minors. Slow; meant to recheck the
    Smith normal form on small relation matrices.
    """
    rows = [list(r) for r in rows if any(r)]
    if generators == 0:
        return []
    if not rows:
        return [0] * generators
    matrix = Matrix(rows)
    previous = 1
    factors = []
    for k in range(1, min(matrix.rows, matrix.cols) + 1):
        divisor = 0
        for rs in itertools.combinations(range(matrix.rows), k):
            for cs in itertools.combinations(range(matrix.cols), k):
                minor = int(matrix.extract(list(rs), list(cs)).det(method="bareiss"))
                divisor = gcd(divisor, minor)
        if divisor == 0:
            break
        factors.append(divisor // previous)
        previous = divisor
    torsion = sorted(d for d in factors if d > 1)
    return torsion + [0] * (generators - len(factors))


def find_alternating_quotient(presentation, degree=5, limit=4000):
    """
    Search for a nontrivial homomorphism into the alternating group by brute
    force. Returns the list of image permutations (array form) or None.
    """
    elements = sorted(AlternatingGroup(degree).generate(), key=lambda p: p.array_form)
    n = presentation.generators
    if n == 0 or len(elements) ** n > limit:
        return None
    for images in itertools.product(elements, repeat=n):
        if all(p.is_Identity for p in images):
            continue
        if all(_evaluate(relator, images).is_Identity for relator in presentation.relators):
            return [p.array_form for p in images]
    return None


def _evaluate(relator, images):
    result = images[0] * ~images[0]
    for letter in relator:
        p = images[abs(letter) - 1]
        result = result * (p if letter > 0 else ~p)
    return result
