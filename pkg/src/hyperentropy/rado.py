"""The random k-hypergraph built in generations.

Generation 0 is a single vertex.  Generation ``l`` has one vertex ``a_X`` for
every set ``X`` of (k-1)-subsets of ``V_{l-1}``, the vertices of earlier
generations; ``a_X`` forms an edge with ``d`` exactly when ``d`` is in ``X``.

Vertices are ``(generation, index)`` pairs.  Within generation ``l`` the
index of ``a_X`` is the bitmask of ``X`` over the colex enumeration of the
(k-1)-subsets of ``V_{l-1}``, whose global ids run ``0 .. |V_{l-1}| - 1``.
A vertex's global id is ``|V_{l-1}| + index``.

Edges are read off index bits whenever the index has at most ``bit_cap``
bits.  Beyond that the generation size itself is out of reach; vertices are
then opaque tokens and edges to earlier vertices are memoized fair coins,
which has the law of a uniformly chosen ``a_X``.
"""

from __future__ import annotations

import hashlib
import itertools
import math
import threading
from functools import lru_cache
from typing import Iterable, NamedTuple, Sequence

from .errors import InvalidArgument, ResourceLimit

DEFAULT_BIT_CAP = 1 << 16
# sizes beyond this many bits are reported as not computable
SIZE_BIT_LIMIT = 1 << 20


class Vertex(NamedTuple):
    gen: int
    index: int


@lru_cache(maxsize=None)
def _sizes(k: int, upto: int) -> tuple[tuple[int, int], ...]:
    """``(|A_l|, |V_l|)`` for ``l = 0 .. upto``; raises when a size is out of reach."""
    out = [(1, 1)]
    for l in range(1, upto + 1):
        v_prev = out[-1][1]
        bits = _comb_checked(v_prev, k - 1, l)
        a = 1 << bits
        out.append((a, v_prev + a))
    return tuple(out)


def _comb_checked(v: int, r: int, l: int) -> int:
    if v.bit_length() > SIZE_BIT_LIMIT:
        raise ResourceLimit(f"|A_{l}| = 2^C(|V_{l-1}|, {r}) with |V_{l-1}| of {v.bit_length()} bits")
    bits = math.comb(v, r)
    if bits > SIZE_BIT_LIMIT:
        raise ResourceLimit(
            f"|A_{l}| = 2^C(|V_{l-1}|, {r}) has more than {SIZE_BIT_LIMIT} bits "
            f"(the exponent alone has {bits.bit_length()} bits)",
            required=bits,
            limit=SIZE_BIT_LIMIT,
        )
    return bits


def generation_size(k: int, l: int) -> tuple[int, int]:
    """``(|A_l|, |V_l|)`` as exact integers."""
    if k < 1:
        raise InvalidArgument(f"need k >= 1, got {k}")
    if l < 0:
        raise InvalidArgument(f"need l >= 0, got {l}")
    return _sizes(k, l)[l]


def index_bits(k: int, l: int) -> int:
    """Bits of a generation-``l`` index: ``C(|V_{l-1}|, k-1)`` (0 for ``l = 0``)."""
    if l == 0:
        return 0
    return math.comb(generation_size(k, l - 1)[1], k - 1)


def index_bits_or_none(k: int, l: int) -> int | None:
    try:
        return index_bits(k, l)
    except ResourceLimit:
        return None


def colex_rank(d: Iterable[int]) -> int:
    """Rank of a set of naturals in colex order among sets of its size."""
    return sum(math.comb(x, i + 1) for i, x in enumerate(sorted(d)))


def colex_unrank(rank: int, r: int) -> tuple[int, ...]:
    out = []
    for i in range(r, 0, -1):
        x = i - 1
        while math.comb(x + 1, i) <= rank:
            x += 1
        out.append(x)
        rank -= math.comb(x, i)
    return tuple(sorted(out))


def default_explicit_gens(k: int) -> int:
    if k == 2:
        return 2
    if k == 3:
        return 3
    l = 0
    while True:
        try:
            if generation_size(k, l + 1)[1] > 256:
                return l
        except ResourceLimit:
            return l
        l += 1


class RadoHypergraph:
    """Lazily evaluated generational Rado k-hypergraph.

    ``explicit_gens`` bounds the generations that are enumerated for listing
    and for :meth:`check_alice`; edge queries work at any generation.
    """

    def __init__(self, k: int, explicit_gens: int | None = None, bit_cap: int = DEFAULT_BIT_CAP):
        if k < 1:
            raise InvalidArgument(f"need k >= 1, got {k}")
        self.k = k
        self.explicit_gens = default_explicit_gens(k) if explicit_gens is None else int(explicit_gens)
        if self.explicit_gens < 0:
            raise InvalidArgument("explicit_gens must be >= 0")
        self.bit_cap = bit_cap
        self._coins: dict[tuple, bool] = {}
        self._lock = threading.Lock()

    # -- sizes and ids -------------------------------------------------------

    def generation_size(self, l: int) -> int:
        return generation_size(self.k, l)[0]

    def cumulative_size(self, l: int) -> int:
        return generation_size(self.k, l)[1] if l >= 0 else 0

    def is_indexed(self, l: int) -> bool:
        """Whether generation ``l`` vertices carry their neighbourhood in the index."""
        bits = index_bits_or_none(self.k, l)
        return bits is not None and bits <= self.bit_cap

    def global_id(self, v: Vertex) -> int:
        return self.cumulative_size(v.gen - 1) + v.index

    def vertex_of_id(self, gid: int) -> Vertex:
        l = 0
        while self.cumulative_size(l) <= gid:
            l += 1
        return Vertex(l, gid - self.cumulative_size(l - 1))

    def check_vertex(self, v) -> Vertex:
        v = Vertex(int(v[0]), int(v[1]))
        if v.gen < 0 or v.index < 0:
            raise InvalidArgument(f"invalid vertex {v}")
        if self.is_indexed(v.gen) and v.index >= self.generation_size(v.gen):
            raise InvalidArgument(f"index {v.index} out of range for generation {v.gen}")
        return v

    def vertices(self, l: int) -> list[Vertex]:
        if l > self.explicit_gens:
            raise InvalidArgument(f"generation {l} is beyond the {self.explicit_gens} explicit ones")
        return [Vertex(l, i) for i in range(self.generation_size(l))]

    def neighbourhood(self, v: Vertex) -> list[tuple[int, ...]]:
        """``X`` for ``v = a_X``: (k-1)-sets of global ids, in colex order."""
        v = self.check_vertex(v)
        if not self.is_indexed(v.gen):
            raise InvalidArgument(f"generation {v.gen} vertices are opaque tokens")
        bits = index_bits(self.k, v.gen)
        return [colex_unrank(r, self.k - 1) for r in range(bits) if v.index >> r & 1]

    def vertex_for_set(self, l: int, X: Iterable[Iterable[int]]) -> Vertex:
        if l < 1:
            raise InvalidArgument("only generations >= 1 are indexed by sets")
        bound = self.cumulative_size(l - 1)
        idx = 0
        for d in X:
            d = tuple(sorted(d))
            if len(d) != self.k - 1 or len(set(d)) != len(d) or any(not 0 <= x < bound for x in d):
                raise InvalidArgument(f"{d} is not a {self.k - 1}-subset of V_{l - 1}")
            idx |= 1 << colex_rank(d)
        return Vertex(l, idx)

    # -- edges ---------------------------------------------------------------

    def has_edge(self, vertices: Sequence, seed: int = 0) -> bool:
        vs = [self.check_vertex(v) for v in vertices]
        if len(vs) != self.k:
            raise InvalidArgument(f"need {self.k} vertices, got {len(vs)}")
        if len(set(vs)) != len(vs):
            raise InvalidArgument(f"repeated vertex among {vs}")
        top = max(vs, key=lambda v: v.gen)
        if sum(v.gen == top.gen for v in vs) > 1:
            return False
        others = [v for v in vs if v is not top]
        if self.is_indexed(top.gen):
            return bool(top.index >> colex_rank(self.global_id(v) for v in others) & 1)
        # earlier vertices may themselves be tokens, so key the coin by vertex pairs
        return self._coin(seed, top, tuple(sorted(others)))

    def _coin(self, seed: int, top: Vertex, d: tuple) -> bool:
        key = (int(seed), top.gen, top.index, d)
        with self._lock:
            hit = self._coins.get(key)
            if hit is None:
                digest = hashlib.blake2b(repr(key).encode(), digest_size=8).digest()
                hit = bool(digest[0] & 1)
                self._coins[key] = hit
        return hit

    def edges_among(self, vertices: Sequence, seed: int = 0) -> list[tuple[int, ...]]:
        """Positions ``(i_0 < ... < i_{k-1})`` of the listed vertices spanning edges."""
        vs = [self.check_vertex(v) for v in vertices]
        return [
            e
            for e in itertools.combinations(range(len(vs)), self.k)
            if len({vs[i] for i in e}) == self.k and self.has_edge([vs[i] for i in e], seed)
        ]

    # -- extension property ---------------------------------------------------

    def check_alice(self, l: int, budget: int = 10**7) -> bool:
        """Every one-vertex extension pattern over every ``D`` in ``V_l`` occurs in ``A_{l+1}``."""
        if l < 0 or l + 1 > self.explicit_gens:
            raise InvalidArgument(f"need 0 <= l and l + 1 <= {self.explicit_gens}")
        V = self.cumulative_size(l)
        A = self.generation_size(l + 1)
        work = (1 << V) * A
        if work > budget:
            raise ResourceLimit(f"check over 2^{V} subsets x {A} vertices exceeds budget", required=work, limit=budget)
        for size in range(V + 1):
            for D in itertools.combinations(range(V), size):
                ranks = [colex_rank(d) for d in itertools.combinations(D, self.k - 1)]
                seen = {tuple(idx >> r & 1 for r in ranks) for idx in range(A)}
                if len(seen) != 1 << len(ranks):
                    return False
        return True

    # -- serialization -------------------------------------------------------

    def to_json(self, gens: int | None = None) -> dict:
        gens = self.explicit_gens if gens is None else gens
        out = []
        for l in range(gens + 1):
            out.append(
                {
                    "gen": l,
                    "size": self.generation_size(l),
                    "vertices": [
                        {"id": self.global_id(v), "index": v.index, "X": [list(d) for d in self.neighbourhood(v)]}
                        for v in self.vertices(l)
                    ],
                }
            )
        return {"k": self.k, "gens": gens, "generations": out}
