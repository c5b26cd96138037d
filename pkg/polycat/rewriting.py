"""
Oriented rewriting of generator paths.

Relations of a presented category are turned into rules that shrink paths
(longer side to shorter side; equal lengths keep the stored order, so the
side listed first is the redex). Words are tuples of generator ids.
"""

import logging
from collections import defaultdict

from .exceptions import BudgetExhausted

logger = logging.getLogger(__name__)


def orient(left, right):
    """Return (redex, reduct) for a relation, or None when both sides agree"""
    left, right = tuple(left), tuple(right)
    if left == right:
        return None
    if len(right) > len(left):
        return right, left
    return left, right


class RewritingSystem:
    """
    Rules over generator-id words with leftmost-first normalization.

    normalize() is sound for any rule set: equal normal forms mean the two
    words are equal modulo the relations. Only termination is at risk, so
    every call runs under a step budget and equal-length cycles are detected.
    """

    def __init__(self, rules=()):
        self.rules = []
        self._by_head = defaultdict(list)
        for left, right in rules:
            self.add_rule(left, right)

    @classmethod
    def from_relations(cls, relations):
        system = cls()
        for left, right in relations:
            rule = orient(left, right)
            if rule is not None:
                system.add_rule(*rule)
        return system

    def add_rule(self, left, right):
        left, right = tuple(left), tuple(right)
        if not left:
            raise ValueError("rule with an empty redex")
        self.rules.append((left, right))
        self._by_head[left[0]].append(len(self.rules) - 1)

    def __len__(self):
        return len(self.rules)

    def _match(self, word):
        for i, letter in enumerate(word):
            for index in self._by_head.get(letter, ()):
                left, right = self.rules[index]
                if word[i:i + len(left)] == left:
                    return i, left, right
        return None

    def step(self, word):
        """One leftmost rewrite, or None when word is irreducible"""
        found = self._match(word)
        if found is None:
            return None
        i, left, right = found
        return word[:i] + right + word[i + len(left):]

    def normalize(self, word, max_steps=10000):
        word = tuple(word)
        seen = set()
        for _ in range(max_steps):
            nxt = self.step(word)
            if nxt is None:
                return word
            if len(nxt) == len(word):
                if nxt in seen:
                    raise BudgetExhausted("rewrite cycle", max_steps)
                seen.add(word)
            else:
                seen.clear()
            word = nxt
        raise BudgetExhausted("rewrite steps", max_steps)

    def equivalent(self, a, b, max_steps=10000):
        return self.normalize(a, max_steps) == self.normalize(b, max_steps)

    def critical_pairs(self, limit=5000):
        """
        Yield (overlap word, reduct one, reduct two) for every overlap of two
        redexes: a proper suffix of one equal to a prefix of the other, or one
        redex contained in the other.
        """
        prefixes = defaultdict(list)
        for index, (left, _) in enumerate(self.rules):
            for i in range(1, len(left)):
                prefixes[left[:i]].append(index)

        produced = 0
        for left1, right1 in self.rules:
            for i in range(1, len(left1)):
                suffix = left1[i:]
                for index in prefixes.get(suffix, ()):
                    left2, right2 = self.rules[index]
                    overlap = left1 + left2[len(suffix):]
                    produced += 1
                    if produced > limit:
                        raise BudgetExhausted("critical pairs", limit)
                    yield overlap, right1 + left2[len(suffix):], left1[:i] + right2
            for left2, right2 in self.rules:
                if left2 == left1 or len(left2) >= len(left1):
                    continue
                for i in range(len(left1) - len(left2) + 1):
                    if left1[i:i + len(left2)] == left2:
                        produced += 1
                        if produced > limit:
                            raise BudgetExhausted("critical pairs", limit)
                        yield left1, right1, left1[:i] + right2 + left1[i + len(left2):]

    def unjoinable_pairs(self, limit=5000, max_steps=10000):
        failures = []
        for overlap, one, two in self.critical_pairs(limit):
            if self.normalize(one, max_steps) != self.normalize(two, max_steps):
                failures.append((overlap, one, two))
        return failures

    def local_confluence(self, limit=5000, max_steps=10000):
        """True, False, or None when the budget ran out"""
        try:
            failures = self.unjoinable_pairs(limit, max_steps)
        except BudgetExhausted as exc:
            logger.debug("local confluence undecided", extra={"reason": str(exc)})
            return None
        return not failures
