"""Step-function extended hypergraphons.

A :class:`StepHypergraphon` partitions ``[0, 1]`` into ``m`` intervals (the
:class:`Grid`) and assigns a distribution over qf k-types to every *cell
vector*: one cell per coordinate ``F`` of ``P_{<k}(k)``, coordinates in
shortlex order.  Cell vectors are flattened in ``itertools.product`` order.

The Sym(k) coherence condition reads ``W(sigma.c) = sigma.W(c)``, where
``sigma`` moves the coordinate at ``F`` to ``sigma(F)``, i.e.
``(sigma.c)[F] = c[sigma^{-1}(F)]``.  Both sides are then left actions, which
is what makes sampled structures exchangeable for every k.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from functools import cached_property, lru_cache, reduce
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from . import core
from .core import Signature
from .errors import (
    IncoherentHypergraphon,
    IncompleteTable,
    InvalidArgument,
    UnsupportedSignature,
)
from .information import shannon


def _frac(x) -> Fraction:
    if isinstance(x, (list, tuple)):
        return Fraction(int(x[0]), int(x[1]))
    if isinstance(x, float):
        return Fraction(x).limit_denominator(1 << 32)
    return Fraction(x)


class Grid:
    """Interval partition of ``[0, 1]``: cell ``i`` has mass ``weights[i]``."""

    __slots__ = ("weights",)

    def __init__(self, weights: Iterable):
        ws = tuple(_frac(w) for w in weights)
        if not ws:
            raise InvalidArgument("a grid needs at least one cell")
        if any(w <= 0 for w in ws):
            raise InvalidArgument(f"grid weights must be positive: {ws}")
        if sum(ws) != 1:
            raise InvalidArgument(f"grid weights sum to {sum(ws)}, not 1")
        self.weights = ws

    @classmethod
    def uniform(cls, m: int) -> "Grid":
        return cls([Fraction(1, m)] * m)

    @property
    def m(self) -> int:
        return len(self.weights)

    def cumulative(self) -> list[Fraction]:
        return list(itertools.accumulate(self.weights))

    def cumulative_float(self) -> np.ndarray:
        return np.array([float(c) for c in self.cumulative()], dtype=np.float64)

    def cell_of(self, u: float) -> int:
        """First cell whose cumulative weight exceeds ``u``."""
        for i, c in enumerate(self.cumulative_float()):
            if u < c:
                return i
        return self.m - 1

    def integer_weights(self) -> tuple[int, list[int]]:
        den = reduce(math.lcm, (w.denominator for w in self.weights), 1)
        return den, [int(w * den) for w in self.weights]

    def __eq__(self, other):
        return isinstance(other, Grid) and self.weights == other.weights

    def __hash__(self):
        return hash(self.weights)

    def __repr__(self):
        return f"Grid({[str(w) for w in self.weights]})"


class TypeDistribution:
    """A finitely supported distribution over qf-type indices with rational weights."""

    __slots__ = ("items", "_hash")

    def __init__(self, weights: Mapping[int, object] | Iterable[tuple[int, object]]):
        pairs = weights.items() if isinstance(weights, Mapping) else weights
        acc: dict[int, Fraction] = {}
        for t, p in pairs:
            t = int(t.index) if isinstance(t, core.QfType) else int(t)
            p = _frac(p)
            if p < 0:
                raise InvalidArgument(f"negative weight {p} on type {t}")
            if p:
                acc[t] = acc.get(t, Fraction(0)) + p
        if sum(acc.values()) != 1:
            raise InvalidArgument(f"type distribution sums to {sum(acc.values())}")
        self.items: tuple[tuple[int, Fraction], ...] = tuple(sorted(acc.items()))
        self._hash = hash(self.items)

    @classmethod
    def point(cls, t: int) -> "TypeDistribution":
        return cls({t: 1})

    @classmethod
    def uniform(cls, types: Iterable[int]) -> "TypeDistribution":
        ts = list(types)
        return cls({t: Fraction(1, len(ts)) for t in ts})

    def prob(self, t: int) -> Fraction:
        return dict(self.items).get(int(t), Fraction(0))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(t for t, _ in self.items)

    def is_point_mass(self) -> bool:
        return len(self.items) == 1

    def entropy(self) -> float:
        return shannon([p for _, p in self.items])

    def act(self, sigma: Sequence[int], n_relations: int, k: int) -> "TypeDistribution":
        s = tuple(sigma)
        return TypeDistribution(
            {core.act_on_type_index(s, t, n_relations, k): p for t, p in self.items}
        )

    def __eq__(self, other):
        return isinstance(other, TypeDistribution) and self.items == other.items

    def __hash__(self):
        return self._hash

    def __repr__(self):
        inner = ", ".join(f"{t}: {p}" for t, p in self.items)
        return f"TypeDistribution({{{inner}}})"


class StepHypergraphon:
    """A piecewise-constant extended hypergraphon over a uniform-arity signature."""

    def __init__(
        self,
        signature: Signature,
        grid: Grid,
        table: Mapping[Sequence[int], TypeDistribution | Mapping] | Sequence[TypeDistribution],
    ):
        self.signature = signature
        self.k = signature.require_uniform()
        self.n_relations = len(signature.relations)
        self.grid = grid
        self.coords: tuple[core.Subset, ...] = core.shortlex(self.k, self.k)[0]
        size = self.m ** len(self.coords)
        n_types = core.n_types(self.n_relations, self.k)

        if isinstance(table, Mapping):
            dists: list[TypeDistribution | None] = [None] * size
            for cells, d in table.items():
                dists[self.flat_index(cells)] = _as_dist(d)
            missing = [i for i, d in enumerate(dists) if d is None]
            if missing:
                raise IncompleteTable(
                    f"{len(missing)} of {size} cell vectors have no entry, "
                    f"first missing {self.cells_of(missing[0])}"
                )
        else:
            dists = [_as_dist(d) for d in table]
            if len(dists) != size:
                raise IncompleteTable(f"expected {size} table entries, got {len(dists)}")
        for d in dists:
            if d.support and d.support[-1] >= n_types:
                raise InvalidArgument(f"type index {d.support[-1]} out of range")
        self._dists: tuple[TypeDistribution, ...] = tuple(dists)

    # -- indexing ------------------------------------------------------------

    @property
    def m(self) -> int:
        return self.grid.m

    @property
    def n_coords(self) -> int:
        return len(self.coords)

    def flat_index(self, cells: Sequence[int]) -> int:
        cells = tuple(cells)
        if len(cells) != self.n_coords:
            raise InvalidArgument(f"cell vector needs {self.n_coords} coordinates, got {len(cells)}")
        idx = 0
        for c in cells:
            if not 0 <= c < self.m:
                raise InvalidArgument(f"cell {c} out of range for m={self.m}")
            idx = idx * self.m + c
        return idx

    def cells_of(self, flat: int) -> tuple[int, ...]:
        out = []
        for _ in range(self.n_coords):
            flat, r = divmod(flat, self.m)
            out.append(r)
        return tuple(reversed(out))

    def cell_vectors(self) -> Iterable[tuple[int, ...]]:
        return itertools.product(range(self.m), repeat=self.n_coords)

    @property
    def table(self) -> dict[tuple[int, ...], TypeDistribution]:
        return dict(zip(self.cell_vectors(), self._dists))

    @property
    def distributions(self) -> tuple[TypeDistribution, ...]:
        return self._dists

    # -- semantics -----------------------------------------------------------

    def evaluate(self, cells: Sequence[int]) -> TypeDistribution:
        return self._dists[self.flat_index(cells)]

    def randomize(self, cells: Sequence[int], u: float) -> core.QfType:
        """Inverse-CDF draw: the first type whose cumulative weight exceeds ``u``."""
        if not 0 <= u < 1:
            raise InvalidArgument(f"u must lie in [0, 1), got {u}")
        d = self.evaluate(cells)
        acc = Fraction(0)
        target = Fraction(u)
        for t, p in d.items:
            acc += p
            if target < acc:
                return core.QfType(self.k, self.n_relations, t)
        return core.QfType(self.k, self.n_relations, d.items[-1][0])

    def cell_weight(self, cells: Sequence[int]) -> Fraction:
        w = Fraction(1)
        for c in cells:
            w *= self.grid.weights[c]
        return w

    def permute_cells(self, sigma: Sequence[int], cells: Sequence[int]) -> tuple[int, ...]:
        """``(sigma.c)[F] = c[sigma^{-1}(F)]``."""
        return permute_cells(self.k, sigma, cells)

    def violations(self) -> list[tuple[core.Perm, tuple[int, ...]]]:
        out = []
        cache: dict[tuple[TypeDistribution, core.Perm], TypeDistribution] = {}
        for s in core.permutations(self.k)[1:]:
            for cells, d in zip(self.cell_vectors(), self._dists):
                key = (d, s)
                if key not in cache:
                    cache[key] = d.act(s, self.n_relations, self.k)
                if self.evaluate(self.permute_cells(s, cells)) != cache[key]:
                    out.append((s, cells))
        return out

    def validate(self) -> list[tuple[core.Perm, tuple[int, ...]]]:
        """Empty list when coherent, else the ``(sigma, cells)`` violations."""
        return self.violations()

    def require_coherent(self) -> "StepHypergraphon":
        bad = self.violations()
        if bad:
            raise IncoherentHypergraphon(bad)
        return self

    def integral_entropy(self) -> float:
        total = 0.0
        for cells, d in zip(self.cell_vectors(), self._dists):
            if not d.is_point_mass():
                total += float(self.cell_weight(cells)) * d.entropy()
        return total

    def induces_borel(self) -> bool:
        if not all(d.is_point_mass() for d in self._dists):
            return False
        singletons = [i for i, F in enumerate(self.coords) if len(F) == 1]
        seen: dict[tuple[int, ...], TypeDistribution] = {}
        for cells, d in zip(self.cell_vectors(), self._dists):
            key = tuple(cells[i] for i in singletons)
            if seen.setdefault(key, d) != d:
                return False
        return True

    # -- dense forms used by the kernels -------------------------------------

    @cached_property
    def alphabet(self) -> np.ndarray:
        """Sorted type indices that occur with positive probability somewhere."""
        return np.array(sorted({t for d in self._dists for t in d.support}), dtype=np.int64)

    @cached_property
    def cdf_table(self) -> np.ndarray:
        """``(m^P, a)`` float cumulative weights over the alphabet."""
        pos = {int(t): i for i, t in enumerate(self.alphabet)}
        out = np.zeros((len(self._dists), len(self.alphabet)), dtype=np.float64)
        for row, d in enumerate(self._dists):
            acc = Fraction(0)
            probs = [Fraction(0)] * len(self.alphabet)
            for t, p in d.items:
                probs[pos[t]] = p
            for j, p in enumerate(probs):
                acc += p
                out[row, j] = float(acc)
            out[row, -1] = 1.0
        return out

    def integer_table(self) -> tuple[int, list[list[int]]]:
        """Common denominator and the per-cell numerators over the alphabet."""
        den = reduce(
            math.lcm, (p.denominator for d in self._dists for _, p in d.items), 1
        )
        pos = {int(t): i for i, t in enumerate(self.alphabet)}
        rows = []
        for d in self._dists:
            row = [0] * len(self.alphabet)
            for t, p in d.items:
                row[pos[t]] = int(p * den)
            rows.append(row)
        return den, rows

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "signature": self.signature.to_json(),
            "grid": [[w.numerator, w.denominator] for w in self.grid.weights],
            "table": [
                {
                    "cells": list(cells),
                    "dist": [[t, p.numerator, p.denominator] for t, p in d.items],
                }
                for cells, d in zip(self.cell_vectors(), self._dists)
            ],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "StepHypergraphon":
        sig = Signature.from_json(data["signature"])
        if sig.uniform_arity != int(data["k"]):
            raise UnsupportedSignature(f"signature arity does not match k={data['k']}")
        grid = Grid(_frac(w) for w in data["grid"])
        table = {}
        for entry in data["table"]:
            cells = tuple(int(c) for c in entry["cells"])
            if cells in table:
                raise InvalidArgument(f"duplicate table entry for cells {cells}")
            table[cells] = TypeDistribution({int(t): Fraction(int(a), int(b)) for t, a, b in entry["dist"]})
        return cls(sig, grid, table)

    def __repr__(self):
        return f"StepHypergraphon(k={self.k}, m={self.m}, {self.signature})"


@lru_cache(maxsize=None)
def _coord_sources(k: int) -> dict[core.Perm, tuple[int, ...]]:
    coords = core.shortlex(k, k)[0]
    pos = {F: i for i, F in enumerate(coords)}
    return {
        s: tuple(pos[core.act_on_subset(core.inverse(s), F)] for F in coords)
        for s in core.permutations(k)
    }


def permute_cells(k: int, sigma: Sequence[int], cells: Sequence[int]) -> tuple[int, ...]:
    src = _coord_sources(k)[tuple(sigma)]
    return tuple(cells[j] for j in src)


def _as_dist(d) -> TypeDistribution:
    return d if isinstance(d, TypeDistribution) else TypeDistribution(d)


# ---------------------------------------------------------------------------
# constructors


def from_function(
    signature: Signature, grid: Grid, fn: Callable[[tuple[int, ...]], TypeDistribution | Mapping]
) -> StepHypergraphon:
    k = signature.require_uniform()
    P = len(core.shortlex(k, k)[0])
    cells = itertools.product(range(grid.m), repeat=P)
    return StepHypergraphon(signature, grid, [_as_dist(fn(c)) for c in cells])


def _hypergraph_signature(signature: Signature | None, k: int) -> Signature:
    sig = signature if signature is not None else Signature.hypergraph(k)
    if len(sig.relations) != 1 or sig.functions or sig.relations[0][1] != k:
        raise UnsupportedSignature(f"expected a single {k}-ary relation, got {sig}")
    return sig


def delta_top(k: int) -> TypeDistribution:
    return TypeDistribution.point(core.top_type(k).index)


def delta_bottom(k: int) -> TypeDistribution:
    return TypeDistribution.point(0)


def make_constant(dist: TypeDistribution | Mapping, signature: Signature | None = None, k: int | None = None) -> StepHypergraphon:
    """The hypergraphon with the same output everywhere (one grid cell)."""
    if signature is None:
        if k is None:
            raise InvalidArgument("need a signature or an arity")
        signature = Signature.hypergraph(k)
    return from_function(signature, Grid([1]), lambda _c: dist)


def make_er(signature: Signature | None = None, k: int = 2) -> StepHypergraphon:
    """Constant ``Uniform{u_top, u_bot}``: the Erdos-Renyi hypergraphon with p = 1/2."""
    sig = _hypergraph_signature(signature, k)
    top = core.top_type(k).index
    return make_constant(TypeDistribution.uniform([0, top]), sig)


def make_full(k: int) -> StepHypergraphon:
    return make_constant(delta_top(k), Signature.hypergraph(k))


def make_empty(k: int) -> StepHypergraphon:
    return make_constant(delta_bottom(k), Signature.hypergraph(k))


def make_half_half(k: int) -> StepHypergraphon:
    """Complete hypergraph if the global coordinate is below 1/2, else empty."""
    sig = Signature.hypergraph(k)
    top, bot = delta_top(k), delta_bottom(k)
    # coordinate 0 is the empty set
    return from_function(sig, Grid.uniform(2), lambda c: top if c[0] == 0 else bot)


def make_triangle() -> StepHypergraphon:
    """3-edges on the triangles of a hidden fair-coin graph on pairs."""
    sig = Signature.hypergraph(3)
    top, bot = delta_top(3), delta_bottom(3)
    coords = core.shortlex(3, 3)[0]
    pairs = [i for i, F in enumerate(coords) if len(F) == 2]
    return from_function(
        sig, Grid.uniform(2), lambda c: top if all(c[i] == 0 for i in pairs) else bot
    )


def random_coherent(
    signature: Signature,
    grid: Grid,
    rng: np.random.Generator,
    denominator: int = 8,
    max_support: int | None = None,
) -> StepHypergraphon:
    """A random coherent step hypergraphon.

    One distribution with weights in ``(1/denominator) Z`` is drawn per Sym(k)
    orbit of cell vectors and transported along the orbit; on cell vectors
    with a non-trivial stabilizer it is averaged over the stabilizer first.
    """
    k = signature.require_uniform()
    L = len(signature.relations)
    n_types = core.n_types(L, k)
    P = len(core.shortlex(k, k)[0])
    perms = core.permutations(k)
    table: dict[tuple[int, ...], TypeDistribution] = {}
    for cells in itertools.product(range(grid.m), repeat=P):
        if cells in table:
            continue
        size = n_types if max_support is None else min(max_support, n_types)
        support = rng.choice(n_types, size=size, replace=False)
        counts = rng.multinomial(denominator, np.ones(size) / size)
        base = {int(t): Fraction(int(c), denominator) for t, c in zip(support, counts) if c}
        stab = [s for s in perms if permute_cells(k, s, cells) == cells]
        acc: dict[int, Fraction] = {}
        for s in stab:
            for t, p in base.items():
                u = core.act_on_type_index(s, t, L, k)
                acc[u] = acc.get(u, Fraction(0)) + p / len(stab)
        d = TypeDistribution(acc)
        for s in perms:
            # W(s.c) = s.W(c)
            table[permute_cells(k, s, cells)] = d.act(s, L, k)
    return StepHypergraphon(signature, grid, table)


# module-level aliases mirroring the method names
def validate(W: StepHypergraphon):
    return W.validate()


def evaluate(W: StepHypergraphon, cells: Sequence[int]) -> TypeDistribution:
    return W.evaluate(cells)


def randomize(W: StepHypergraphon, cells: Sequence[int], u: float) -> core.QfType:
    return W.randomize(cells, u)


def integral_entropy(W: StepHypergraphon) -> float:
    return W.integral_entropy()


def induces_borel(W: StepHypergraphon) -> bool:
    return W.induces_borel()
