"""Shannon entropy of finitely supported distributions (base 2)."""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import InvalidArgument

FLOAT_TOL = 1e-9


def shannon(probs: Iterable | Mapping) -> float:
    """``-sum p log2 p`` with ``0 log 0 = 0``.

    Accepts a mapping (its values are used) or an iterable of probabilities.
    Rational inputs must sum to exactly 1; floats to within ``1e-9``.
    """
    if isinstance(probs, Mapping):
        probs = probs.values()
    ps = list(probs)
    if any(p < 0 for p in ps):
        raise InvalidArgument("negative probability")
    total = sum(ps)
    exact = all(isinstance(p, (int, Fraction)) for p in ps)
    if (exact and total != 1) or (not exact and abs(total - 1) > FLOAT_TOL):
        raise InvalidArgument(f"probabilities sum to {total}, not 1")
    if exact:
        fr = [Fraction(p) for p in ps if p]
        den = math.lcm(*(p.denominator for p in fr))
        return entropy_from_counts((p.numerator * (den // p.denominator) for p in fr), den)
    out = 0.0
    for p in ps:
        if p:
            out -= float(p) * math.log2(p)
    return out + 0.0


def entropy_from_counts(counts: Iterable[int], total: int | None = None) -> float:
    """Entropy of the distribution ``count / total`` for non-negative integers.

    Equal counts are grouped and logs are taken of Python integers, so a
    uniform distribution on ``2^j`` atoms gives exactly ``j``.
    """
    groups = Counter(int(c) for c in counts if c)
    total = sum(c * mult for c, mult in groups.items()) if total is None else int(total)
    if total <= 0:
        raise InvalidArgument("empty count vector")
    log_total = math.log2(total)
    acc = 0.0
    for c, mult in sorted(groups.items()):
        acc += (c * mult / total) * (log_total - math.log2(c))
    return acc + 0.0
