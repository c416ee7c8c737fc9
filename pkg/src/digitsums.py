"""
Branch-and-bound over digit sums Σ_j d_j · w_j.

A DigitSumSet fixes one weight per free position and a finite digit alphabet
({0} plus the nonzero digits given). Enumeration and successor queries walk the
digit tree depth-first; at every node the reachable sums form the closed range
[s, s + max_digit · Σ remaining weights], and children are cut with a bisect on
the sorted alphabet so wide alphabets cost only the children that can matter.

X_m is the set with weights 2^-1 .. 2^-m; the apex abscissae of the cover
triangles in the strip of a binary word a use the weights 2^-i for i in Z(a).
The arithmetic is generic: exact Fractions on certified paths, mpmath numbers
for the self-affine renderer.
"""

import logging
from bisect import bisect_left, bisect_right
from typing import Sequence

from src.errors import ResourceLimitError

logger = logging.getLogger(__name__)


class DigitSumSet:
    def __init__(self, weights: Sequence, digits: Sequence, node_budget: int, zero=0):
        self.weights = list(weights)
        self.digits = sorted(d for d in digits if d != 0)
        self.node_budget = node_budget
        self.nodes = 0
        self.zero = zero
        top = self.digits[-1] if self.digits else zero
        # suffix[j] = largest sum reachable from positions j..end
        self.suffix = [zero] * (len(self.weights) + 1)
        for j in range(len(self.weights) - 1, -1, -1):
            self.suffix[j] = self.suffix[j + 1] + top * self.weights[j]

    def _visit(self):
        self.nodes += 1
        if self.nodes > self.node_budget:
            raise ResourceLimitError(
                f"digit-sum search exceeded node budget {self.node_budget}",
                limit=self.node_budget,
            )

    def _children(self, s, j: int, lower, upper):
        """
        Child partial sums s + d·w_j for digits with lower < d < upper (open),
        in increasing order.
        """
        w = self.weights[j]
        candidates = []
        if lower < 0 < upper:
            candidates.append(s)
        start = bisect_right(self.digits, lower)
        stop = bisect_left(self.digits, upper)
        for d in self.digits[start:stop]:
            candidates.append(s + d * w)
        return candidates

    def enumerate(self, lo, hi) -> list:
        """Distinct sums strictly inside (lo, hi), sorted increasingly"""
        self.nodes = 0
        found = set()
        n = len(self.weights)

        def walk(j, s):
            self._visit()
            if j == n:
                if lo < s < hi:
                    found.add(s)
                return
            w = self.weights[j]
            rest = self.suffix[j + 1]
            for child in self._children(s, j, (lo - s - rest) / w, (hi - s) / w):
                walk(j + 1, child)

        walk(0, self.zero)
        logger.debug("enumerated %d sums in (%s, %s) using %d nodes", len(found), lo, hi, self.nodes)
        return sorted(found)

    def successor(self, lo):
        """Smallest sum >= lo, or None when every sum is below lo"""
        self.nodes = 0
        n = len(self.weights)
        best = [None]

        def walk(j, s):
            self._visit()
            if best[0] is not None and s >= best[0]:
                return
            if j == n:
                best[0] = s
                return
            w = self.weights[j]
            rest = self.suffix[j + 1]
            # children must still reach lo: s + d·w + rest >= lo
            lower = (lo - s - rest) / w
            if lower <= 0:
                walk(j + 1, s)
            for index in range(bisect_left(self.digits, lower), len(self.digits)):
                child = s + self.digits[index] * w
                if best[0] is not None and child >= best[0]:
                    break
                walk(j + 1, child)

        if self.suffix[0] >= lo:
            walk(0, self.zero)
        return best[0]

    def meets(self, lo, hi) -> bool:
        """True when some sum lies in the closed interval [lo, hi]"""
        s = self.successor(lo)
        return s is not None and s <= hi
