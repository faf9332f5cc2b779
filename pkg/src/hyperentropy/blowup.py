"""Blow-ups of the generational Rado hypergraph and the growth-rate schedule.

A schedule groups generations into rounds: round ``r`` covers ``g_r``
consecutive generations, each of total mass ``alpha = 1 / (g_r 2^r)``, so
round ``r`` carries mass ``2^-r``.  Inside a generation the mass is shared
equally by its vertices.  Truncating after ``r_max`` rounds leaves mass
``2^-r_max``, which is given back to round 1 by scaling its generations by
``1 + 2^(1 - r_max)``; vertices of one generation keep equal masses.
"""

from __future__ import annotations

import bisect
import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Mapping, NamedTuple, Sequence

import numpy as np
from scipy import stats

from . import _kernels as K
from . import core
from .entropy import bootstrap_stderr, miller_madow
from .errors import InsufficientGamma, InvalidArgument, ResourceLimit
from .hypergraphon import Grid, StepHypergraphon, delta_bottom, delta_top, from_function
from .rado import RadoHypergraph, Vertex, generation_size, index_bits_or_none

TAIL_RULES = ("zero", "constant")
MAX_PATTERNS = 4096


def _to_fraction(v) -> Fraction:
    if isinstance(v, float):
        return Fraction(v)
    return Fraction(str(v)) if isinstance(v, str) else Fraction(v)


def threshold(r: int, k: int) -> Fraction:
    """``2^{-(r+1)k - 3k - 1} k^{-k}``: values of gamma above it enlarge ``g_r``."""
    return Fraction(1, 2 ** ((r + 1) * k + 3 * k + 1) * k**k)


@dataclass(frozen=True)
class BlowupSchedule:
    k: int
    r_max: int
    gamma: tuple[tuple[int, Fraction], ...]
    tail: str
    g: tuple[int, ...]

    @cached_property
    def ranges(self) -> tuple[tuple[int, int], ...]:
        """``Gamma_r`` as half-open generation ranges ``[lo, hi)``, r = 1..r_max."""
        out, lo = [], 0
        for gr in self.g:
            out.append((lo, lo + gr))
            lo += gr
        return tuple(out)

    @property
    def n_generations(self) -> int:
        return sum(self.g)

    @property
    def remainder_factor(self) -> Fraction:
        return 1 + Fraction(2, 2**self.r_max)

    def round_of(self, l: int) -> int:
        for r, (lo, hi) in enumerate(self.ranges, start=1):
            if lo <= l < hi:
                return r
        raise InvalidArgument(f"generation {l} is outside the {self.r_max} scheduled rounds")

    def alpha_raw(self, l: int) -> Fraction:
        r = self.round_of(l)
        return Fraction(1, self.g[r - 1] * 2**r)

    def alpha(self, l: int) -> Fraction:
        """Mass of generation ``l`` after the truncation remainder is returned to round 1."""
        a = self.alpha_raw(l)
        return a * self.remainder_factor if self.round_of(l) == 1 else a

    def raw_total(self) -> Fraction:
        return sum((self.g[r - 1] * Fraction(1, self.g[r - 1] * 2**r) for r in range(1, self.r_max + 1)), Fraction(0))

    def total(self) -> Fraction:
        return sum((self.alpha(l) for l in range(self.n_generations)), Fraction(0))

    def per_vertex_mass(self, l: int) -> Fraction:
        return self.alpha(l) / generation_size(self.k, l)[0]

    def gamma_at(self, n: int) -> Fraction:
        return _gamma_lookup(dict(self.gamma), self.tail, n)

    @cached_property
    def _bounds(self) -> tuple[list[Fraction], np.ndarray]:
        cum = list(itertools.accumulate(self.alpha(l) for l in range(self.n_generations)))
        return cum, np.array([float(c) for c in cum])

    def intervals(self) -> list[tuple[Fraction, Fraction, int]]:
        cum = self._bounds[0]
        return [(cum[l - 1] if l else Fraction(0), cum[l], l) for l in range(self.n_generations)]

    def generation_of(self, u: float) -> int:
        """The generation whose interval contains ``u`` in ``[0, 1)``."""
        cum = self._bounds[1]
        return min(bisect.bisect_right(cum, u), self.n_generations - 1)

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "r_max": self.r_max,
            "tail": self.tail,
            "gamma": [[n, str(v)] for n, v in self.gamma],
            "g": list(self.g),
            "ranges": [list(x) for x in self.ranges],
            "alpha": [str(Fraction(1, gr * 2**r)) for r, gr in enumerate(self.g, start=1)],
            "remainder_factor": str(self.remainder_factor),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "BlowupSchedule":
        gamma = {int(n): _to_fraction(v) for n, v in data["gamma"]}
        sched = build_schedule(gamma, int(data["k"]), int(data["r_max"]), data.get("tail", "zero"))
        if "g" in data and list(data["g"]) != list(sched.g):
            raise InvalidArgument(f"stored g {data['g']} disagrees with recomputed {list(sched.g)}")
        return sched


def _gamma_lookup(table: Mapping[int, Fraction], tail: str, n: int) -> Fraction:
    if n in table:
        return table[n]
    if n > max(table, default=-1) and tail == "constant" and table:
        return table[max(table)]
    return Fraction(0)


def build_schedule(gamma, k: int, r_max: int, tail: str = "zero") -> BlowupSchedule:
    """Round lengths ``g_r = max({2^{r+3} k} U {n : gamma(n) > threshold(r)})``.

    ``gamma`` maps ``n`` to a value in ``[0, 1]`` (a mapping or ``(n, value)``
    pairs).  With ``tail="zero"`` gamma vanishes past the table; with
    ``tail="constant"`` it keeps its last value, and a last value above a
    threshold leaves ``g_r`` undefined.
    """
    if k < 1 or r_max < 1:
        raise InvalidArgument(f"need k >= 1 and r_max >= 1, got k={k}, r_max={r_max}")
    if tail not in TAIL_RULES:
        raise InvalidArgument(f"tail rule must be one of {TAIL_RULES}, got {tail!r}")
    pairs = gamma.items() if isinstance(gamma, Mapping) else gamma
    table: dict[int, Fraction] = {}
    for n, v in pairs:
        n, v = int(n), _to_fraction(v)
        if n < 0 or not 0 <= v <= 1:
            raise InvalidArgument(f"gamma({n}) = {v} is not a value in [0, 1] at n >= 0")
        table[n] = v
    last = max(table) if table else None
    g = []
    for r in range(1, r_max + 1):
        thr = threshold(r, k)
        if tail == "constant" and last is not None and table[last] > thr:
            raise InsufficientGamma(
                f"gamma stays at {table[last]} > {thr} past n={last}, so g_{r} is not finite"
            )
        big = [n for n, v in table.items() if v > thr]
        g.append(max([2 ** (r + 3) * k] + big))
    return BlowupSchedule(k, r_max, tuple(sorted(table.items())), tail, tuple(g))


# ---------------------------------------------------------------------------
# sampling


def _check_k(k: int, sched: BlowupSchedule, rado: RadoHypergraph) -> None:
    if not k == sched.k == rado.k:
        raise InvalidArgument(f"arity mismatch: k={k}, schedule k={sched.k}, hypergraph k={rado.k}")


def draw_vertex(rado: RadoHypergraph, l: int, rnd: random.Random) -> Vertex:
    """A uniform vertex of generation ``l``; opaque generations get a 128-bit token."""
    if rado.is_indexed(l):
        return Vertex(l, rnd.randrange(rado.generation_size(l)))
    return Vertex(l, rnd.getrandbits(128))


def blowup_vertices(sched: BlowupSchedule, rado: RadoHypergraph, n: int, seed: int) -> list[Vertex]:
    """Images of ``0 .. n-1`` under the blow-up map for one seed."""
    out = []
    for j in range(n):
        l = sched.generation_of(K.keyed_uniform(seed, (j,)))
        out.append(draw_vertex(rado, l, random.Random(K.derive_seed(seed, j))))
    return out


def sample_blowup(k: int, sched: BlowupSchedule, rado: RadoHypergraph, n: int, seed: int) -> core.FiniteStructure:
    """``G(n, W)`` for the blow-up of the Rado hypergraph along the schedule."""
    _check_k(k, sched, rado)
    if n < k:
        raise InvalidArgument(f"need n >= k = {k}, got {n}")
    images = blowup_vertices(sched, rado, n, seed)
    top = core.top_type(k).index
    types = []
    for J in core.shortlex(n, k)[1]:
        vs = [images[i] for i in J]
        edge = len(set(vs)) == k and rado.has_edge(vs, seed)
        types.append(top if edge else 0)
    return core.structure_from_types(core.Signature.hypergraph(k), n, types)


def _edge_codes(rado: RadoHypergraph, gens: Sequence[int], trials: int, seed: int, backend=None) -> np.ndarray:
    """Induced-edge bitmasks for ``trials`` draws of one uniform vertex per slot."""
    k = rado.k
    edges = list(itertools.combinations(range(len(gens)), k))
    bits = [index_bits_or_none(k, l) for l in gens]
    if all(b is not None and b <= 62 for b in bits):
        rng = np.random.default_rng(np.random.SeedSequence([int(seed) & K.MASK, 0xC0DE]))
        sizes = [rado.generation_size(l) for l in gens]
        idx = np.stack([rng.integers(0, s, size=trials, dtype=np.int64) for s in sizes], axis=1)
        offsets = [rado.cumulative_size(l - 1) for l in gens]
        return K.rado_edge_codes(gens, offsets, idx, np.array(edges, dtype=np.int64).reshape(-1, k), backend)
    rnd = random.Random(K.derive_seed(seed, 0xC0DE))
    codes = np.zeros(trials, dtype=np.int64)
    for t in range(trials):
        vs = [draw_vertex(rado, l, rnd) for l in gens]
        code = 0
        for e, J in enumerate(edges):
            sub = [vs[i] for i in J]
            if len(set(sub)) == k and rado.has_edge(sub, seed):
                code |= 1 << e
        codes[t] = code
    return codes


class Uniformity(NamedTuple):
    frequencies: np.ndarray
    pvalue: float
    statistic: float


def conditional_uniformity(
    k: int,
    sched: BlowupSchedule,
    rado: RadoHypergraph,
    rho: Sequence[int],
    trials: int,
    seed: int,
    backend: str | None = None,
) -> Uniformity:
    """Counts of each labelled k-hypergraph on ``len(rho)`` vertices drawn one per generation.

    Graph codes set bit ``e`` for the e-th k-subset in shortlex order.  The
    p-value is Pearson's chi-square test against the uniform law.
    """
    _check_k(k, sched, rado)
    gens = [int(l) for l in rho]
    if len(set(gens)) != len(gens):
        raise InvalidArgument(f"rho must be injective, got {gens}")
    if any(not 0 <= l < sched.n_generations for l in gens):
        raise InvalidArgument(f"generations {gens} fall outside the schedule")
    n_edges = math.comb(len(gens), k)
    if 2**n_edges > MAX_PATTERNS:
        raise ResourceLimit(f"2^{n_edges} hypergraph patterns exceed {MAX_PATTERNS}", required=2**n_edges, limit=MAX_PATTERNS)
    codes = _edge_codes(rado, gens, trials, seed, backend)
    freq = np.bincount(codes, minlength=2**n_edges)
    test = stats.chisquare(freq)
    return Uniformity(freq, float(test.pvalue), float(test.statistic))


class EntropyBound(NamedTuple):
    estimate: float
    stderr: float
    bound: int
    holds: bool


def conditional_entropy_bound(
    k: int,
    sched: BlowupSchedule,
    rado: RadoHypergraph,
    rho: Sequence[int],
    trials: int,
    seed: int,
    backend: str | None = None,
) -> EntropyBound:
    """Estimated entropy of the induced structure given the generations ``rho``.

    Compared with ``C(|image of rho|, k)``; ``holds`` means the estimate is at
    least the bound minus three standard errors.
    """
    _check_k(k, sched, rado)
    gens = [int(l) for l in rho]
    if any(not 0 <= l < sched.n_generations for l in gens):
        raise InvalidArgument(f"generations {gens} fall outside the schedule")
    image = len(set(gens))
    n_edges = math.comb(len(gens), k)
    if 2 ** math.comb(image, k) > MAX_PATTERNS or n_edges > 62:
        raise ResourceLimit(f"{n_edges} k-sets over an image of {image} generations is beyond the budget")
    codes = _edge_codes(rado, gens, trials, seed, backend)
    _, counts = np.unique(codes, return_counts=True)
    bound = math.comb(image, k)
    if len(counts) == 1:
        return EntropyBound(0.0, 0.0, bound, bound == 0)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & K.MASK, 0xB007]))
    est, se = float(miller_madow(counts)), bootstrap_stderr(counts, rng)
    return EntropyBound(est, se, bound, bool(est >= bound - 3 * se))


def truncated_step_form(k: int, sched: BlowupSchedule, rado: RadoHypergraph, gen_cap: int) -> StepHypergraphon:
    """Step hypergraphon of the blow-up restricted to generations ``<= gen_cap``.

    Every vertex of ``V_{gen_cap}`` gets a cell of its blow-up mass; the rest of
    ``[0, 1]`` is one extra cell that behaves as an isolated vertex.
    """
    _check_k(k, sched, rado)
    if gen_cap < 0 or gen_cap > rado.explicit_gens:
        raise InvalidArgument(f"gen_cap {gen_cap} exceeds the {rado.explicit_gens} explicit generations")
    if gen_cap >= sched.n_generations:
        raise InvalidArgument(f"gen_cap {gen_cap} is beyond the scheduled generations")
    verts = [v for l in range(gen_cap + 1) for v in rado.vertices(l)]
    if len(verts) > 16:
        raise InvalidArgument(f"{len(verts)} vertices; truncated forms are limited to 16")
    weights = [sched.per_vertex_mass(v.gen) for v in verts]
    rest = 1 - sum(weights)
    cells: list[Vertex | None] = list(verts)
    if rest > 0:
        weights.append(rest)
        cells.append(None)
    coords = core.shortlex(k, k)[0]
    singles = [coords.index((i,)) for i in range(k)]
    top, bot = delta_top(k), delta_bottom(k)

    def entry(c):
        vs = [cells[c[i]] for i in singles]
        if any(v is None for v in vs) or len(set(vs)) < k:
            return bot
        return top if rado.has_edge(vs) else bot

    return from_function(core.Signature.hypergraph(k), Grid(weights), entry)
