"""Entropy functions ``h(n) = H(mu_n)`` of step hypergraphons, exact and Monte Carlo.

The exact law of ``G(n, W)`` is computed by variable elimination.  The
hidden variables are the cells of every ``D`` in ``P_{<k}(n)``; the observed
ones are the types of the k-sets.  Processing k-sets in shortlex order, a
cell variable is brought in (weighted by its grid mass) at its first use and
summed out after its last use.  The cell of the empty set touches every k-set
and is handled by an outer loop instead.  All arithmetic is on integers over
the common denominator ``Dg^{|P_{<k}(n)|} * Dt^{C(n,k)}``, using ``int64``
when that fits and Python integers otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

import numpy as np

from . import _kernels as K
from . import core
from .errors import InvalidArgument, InvalidMeasure, ResourceLimit
from .hypergraphon import StepHypergraphon, TypeDistribution
from .information import entropy_from_counts, shannon
from .sampler import sample_type_indices

DEFAULT_BUDGET = 10**8
DEFAULT_MAX_SUPPORT = 10**7


# ---------------------------------------------------------------------------
# finite measures on structures


class FiniteMeasure:
    """A finitely supported probability measure on structures, rational masses."""

    __slots__ = ("atoms",)

    def __init__(self, atoms: Mapping | Iterable[tuple[object, object]]):
        pairs = atoms.items() if isinstance(atoms, Mapping) else atoms
        acc: dict = {}
        for M, p in pairs:
            p = Fraction(p)
            if p < 0:
                raise InvalidMeasure(f"negative mass {p} on {M}")
            if p:
                acc[M] = acc.get(M, Fraction(0)) + p
        if sum(acc.values()) != 1:
            raise InvalidMeasure(f"masses sum to {sum(acc.values())}, not 1")
        self.atoms: dict = acc

    @classmethod
    def point(cls, M) -> "FiniteMeasure":
        return cls({M: 1})

    @classmethod
    def uniform(cls, structures: Iterable) -> "FiniteMeasure":
        ms = list(dict.fromkeys(structures))
        return cls({M: Fraction(1, len(ms)) for M in ms})

    def prob(self, M) -> Fraction:
        return self.atoms.get(M, Fraction(0))

    __getitem__ = prob

    @property
    def support(self) -> list:
        return list(self.atoms)

    def items(self):
        return self.atoms.items()

    def __len__(self):
        return len(self.atoms)

    def entropy(self) -> float:
        return shannon(self.atoms.values())

    def masses(self) -> list[Fraction]:
        return sorted(self.atoms.values())

    def map(self, fn) -> "FiniteMeasure":
        """Pushforward along a map on structures."""
        acc: dict = {}
        for M, p in self.atoms.items():
            N = fn(M)
            acc[N] = acc.get(N, Fraction(0)) + p
        return FiniteMeasure(acc)

    def marginal(self, m: int) -> "FiniteMeasure":
        """The law of the induced substructure on ``[m]``."""
        return self.map(lambda M: M.restrict(m))

    def act(self, sigma: Sequence[int]) -> "FiniteMeasure":
        return self.map(lambda M: core.logic_act(sigma, M))

    def __eq__(self, other):
        return isinstance(other, FiniteMeasure) and self.atoms == other.atoms

    def __hash__(self):
        return hash(frozenset(self.atoms.items()))

    def __repr__(self):
        return f"FiniteMeasure({len(self.atoms)} atoms, H={self.entropy():.6g})"


def h(dist) -> float:
    """Shannon entropy in bits of a measure, type distribution, mapping or sequence."""
    if isinstance(dist, FiniteMeasure):
        return dist.entropy()
    if isinstance(dist, TypeDistribution):
        return dist.entropy()
    return shannon(dist)


# ---------------------------------------------------------------------------
# exact law of the type vector


@dataclass(frozen=True)
class TypeLaw:
    """Exact law of the vector of k-set types on ``[n]``.

    ``counts[i_0, ..., i_{C-1}] / denominator`` is the probability that the
    j-th k-set (shortlex) has type ``alphabet[i_j]``.
    """

    signature: core.Signature
    n: int
    alphabet: np.ndarray
    counts: np.ndarray
    denominator: int
    cost: int = field(default=0, compare=False)

    def entropy(self) -> float:
        flat = self.counts.ravel()
        flat = flat[flat != 0]
        if flat.dtype == object:
            return entropy_from_counts(flat.tolist(), self.denominator)
        values, mult = np.unique(flat, return_counts=True)
        return _grouped_entropy(values.tolist(), mult.tolist(), self.denominator)

    def to_measure(self) -> FiniteMeasure:
        atoms = {}
        alpha = self.alphabet.tolist()
        for idx in zip(*np.nonzero(self.counts)):
            types = [alpha[i] for i in idx]
            M = core.structure_from_types(self.signature, self.n, types)
            atoms[M] = Fraction(int(self.counts[idx]), self.denominator)
        return FiniteMeasure(atoms)


def _grouped_entropy(values: Sequence[int], mult: Sequence[int], total: int) -> float:
    log_total = math.log2(total)
    acc = 0.0
    for c, m in zip(values, mult):
        acc += (int(c) * int(m) / total) * (log_total - math.log2(int(c)))
    return acc + 0.0


def _plan(n: int, k: int):
    below, exact, _ = core.shortlex(n, k)
    coords = core.shortlex(k, k)[0]
    jvars = [[tuple(J[i] for i in F) for F in coords[1:]] for J in exact]
    last: dict[core.Subset, int] = {}
    for j, ds in enumerate(jvars):
        for D in ds:
            last[D] = j
    return below, exact, jvars, last


def elimination_cost(n: int, k: int, m: int, a: int) -> tuple[int, int]:
    """``(total entries touched, largest intermediate)`` of the exact elimination."""
    _, _, jvars, last = _plan(n, k)
    live: set = set()
    n_out = 0
    total = peak = 0
    for j, ds in enumerate(jvars):
        live.update(ds)
        n_out += 1
        size = m ** len(live) * a**n_out
        total += size
        peak = max(peak, size)
        live.difference_update(D for D in ds if last[D] == j)
    return total * m, peak


def exact_type_law(W: StepHypergraphon, n: int, budget: int = DEFAULT_BUDGET) -> TypeLaw:
    """Exact law of the type vector of ``G(n, W)`` (see module docstring)."""
    k = W.k
    if n < k:
        raise InvalidArgument(f"need n >= k = {k}, got n = {n}")
    m, a = W.m, len(W.alphabet)
    cost, _ = elimination_cost(n, k, m, a)
    if cost > budget:
        raise ResourceLimit(
            f"exact law of G({n}, W) needs about {cost:.3g} operations, budget is {budget:.3g}",
            required=cost,
            limit=budget,
        )
    below, exact, jvars, last = _plan(n, k)
    dg, wint = W.grid.integer_weights()
    dt, rows = W.integer_table()
    denominator = dg ** len(below) * dt ** len(exact)
    dtype = np.int64 if denominator < 2**62 else object
    P = W.n_coords
    table = np.array(rows, dtype=dtype).reshape((m,) * P + (a,))
    w = np.array(wint, dtype=dtype)

    counts = None
    for e in range(m):
        part = _eliminate(table[e], w, jvars, last, len(exact), dtype)
        part = part * w[e]
        counts = part if counts is None else counts + part
    return TypeLaw(W.signature, n, W.alphabet, counts, denominator, cost)


def _eliminate(factor, w, jvars, last, n_out, dtype):
    A = np.ones((), dtype=dtype)
    axes: list = []
    for j, ds in enumerate(jvars):
        for D in ds:
            if D not in axes:
                A = A[..., None] * w
                axes.append(D)
        A = A[..., None]
        axes.append(("t", j))
        fax = ds + [("t", j)]
        where = [axes.index(x) for x in fax]
        order = sorted(range(len(fax)), key=lambda i: where[i])
        shape = [1] * len(axes)
        for i in order:
            shape[where[i]] = factor.shape[i]
        A = A * factor.transpose(order).reshape(shape)
        for D in ds:
            if last[D] == j:
                i = axes.index(D)
                A = A.sum(axis=i)
                axes.pop(i)
    return A.transpose([axes.index(("t", j)) for j in range(n_out)])


def exact_mu_n(W: StepHypergraphon, n: int, budget: int = DEFAULT_BUDGET) -> FiniteMeasure:
    """The law ``mu_n`` of ``G(n, W)`` as a measure on structures on ``[n]``."""
    return exact_type_law(W, n, budget).to_measure()


def exact_entropy(W: StepHypergraphon, n: int, budget: int = DEFAULT_BUDGET) -> float:
    return exact_type_law(W, n, budget).entropy()


# ---------------------------------------------------------------------------
# Monte Carlo


class MCEstimate(NamedTuple):
    estimate: float
    stderr: float
    support: int
    samples: int


def miller_madow(counts: np.ndarray) -> float:
    """Plug-in entropy in bits plus the ``(K - 1) / (2 N ln 2)`` bias correction."""
    c = counts[counts > 0]
    N = c.sum()
    if N == 0:
        raise InvalidArgument("no observations")
    p = c / N
    plug = float(-(p * np.log2(p)).sum())
    N = int(N)
    return plug + (len(c) - 1) / (2.0 * N * math.log(2)) + 0.0


def bootstrap_stderr(counts: np.ndarray, rng: np.random.Generator, resamples: int = 100) -> float:
    counts = np.asarray(counts, dtype=np.int64)
    N = int(counts.sum())
    p = counts / N
    stats = [miller_madow(rng.multinomial(N, p)) for _ in range(resamples)]
    return float(np.std(stats, ddof=1))


def type_vector_counts(
    W: StepHypergraphon,
    n: int,
    samples: int,
    seed: int,
    max_support: int = DEFAULT_MAX_SUPPORT,
    backend: str | None = None,
    chunk: int = 1 << 18,
) -> np.ndarray:
    """Multiplicities of the distinct sampled structures (order unspecified)."""
    a = len(W.alphabet)
    C = math.comb(n, W.k)
    packable = a**C < 2**63
    parts = []
    for lo in range(0, samples, chunk):
        cnt = min(chunk, samples - lo)
        rows = sample_type_indices(W, n, K.derive_seeds(seed, cnt, lo), backend)
        if packable:
            weights = np.array([a ** (C - 1 - j) for j in range(C)], dtype=np.int64)
            parts.append(rows @ weights)
        else:
            parts.append(rows)
    if packable:
        _, counts = np.unique(np.concatenate(parts), return_counts=True)
    else:
        _, counts = np.unique(np.concatenate(parts), axis=0, return_counts=True)
    if len(counts) > max_support:
        raise ResourceLimit(
            f"{len(counts)} distinct structures exceed the support budget {max_support}",
            required=len(counts),
            limit=max_support,
        )
    return counts


def mc_entropy(
    W: StepHypergraphon,
    n: int,
    samples: int,
    seed: int,
    resamples: int = 100,
    max_support: int = DEFAULT_MAX_SUPPORT,
    backend: str | None = None,
) -> MCEstimate:
    """Miller-Madow estimate of ``h(n)`` with a bootstrap standard error.

    Sample ``i`` uses substream ``i`` of ``seed``, so the result does not
    depend on how the kernel splits work across threads.
    """
    if samples < 100:
        raise InvalidArgument(f"need at least 100 samples, got {samples}")
    counts = type_vector_counts(W, n, samples, seed, max_support, backend)
    rng = np.random.default_rng(np.random.SeedSequence([int(seed) & K.MASK, 0xB007]))
    if len(counts) == 1:
        return MCEstimate(0.0, 0.0, 1, samples)
    return MCEstimate(miller_madow(counts), bootstrap_stderr(counts, rng, resamples), len(counts), samples)


# ---------------------------------------------------------------------------
# uniform non-redundant measure and bounds


def parse_profile(text: str) -> dict[int, int]:
    """Parse ``"2:1,1:2"`` into ``{2: 1, 1: 2}``."""
    out: dict[int, int] = {}
    for part in text.replace(" ", "").split(","):
        if not part:
            continue
        try:
            r, c = (int(x) for x in part.split(":"))
        except ValueError:
            raise InvalidArgument(f"bad profile entry {part!r}; expected arity:count") from None
        if r < 0 or c < 0:
            raise InvalidArgument(f"negative entry in profile {part!r}")
        out[r] = out.get(r, 0) + c
    return out


def uniform_nr_entropy(profile: Mapping[int, int] | str, n: int) -> int:
    """``sum_r C(n, r) r! a(r)``: the number of fair coins of the uniform non-redundant measure."""
    if isinstance(profile, str):
        profile = parse_profile(profile)
    if n < 0:
        raise InvalidArgument(f"n must be >= 0, got {n}")
    return sum(math.perm(n, r) * int(c) for r, c in profile.items() if r <= n)


def max_entropy_check(
    W: StepHypergraphon, profile: Mapping[int, int] | str | None = None, n: int = 4, budget: int = DEFAULT_BUDGET
) -> bool:
    """Whether ``h(n)`` stays below the uniform non-redundant entropy."""
    if profile is None:
        profile = W.signature.arity_profile()
    return exact_entropy(W, n, budget) <= uniform_nr_entropy(profile, n) + 1e-9


def finite_n_bounds(W: StepHypergraphon, n: int) -> tuple[float, float]:
    """Bounds on ``h(n)`` from the cell decomposition.

    Given all cells the k-set types are independent with entropies averaging
    the integral ``C``, so ``C(n,k) C <= h(n) <= C(n,k) C + |P_{<k}(n)| H(grid)``.
    """
    C = W.integral_entropy()
    N = math.comb(n, W.k)
    cells = len(core.shortlex(n, W.k)[0])
    grid_h = shannon(W.grid.weights)
    return N * C, N * C + cells * grid_h


@dataclass
class EntropyCurve:
    points: list[tuple[int, float, str, float]]
    k: int
    target: float

    @property
    def c_hat(self) -> float:
        n, hn, _, _ = self.points[-1]
        return hn / math.comb(n, self.k)

    def ratios(self) -> list[float]:
        return [hn / math.comb(n, self.k) for n, hn, _, _ in self.points]

    def monotone(self, tol: float = 1e-9) -> bool:
        hs = [p[1] for p in self.points]
        return all(b >= a - tol for a, b in zip(hs, hs[1:]))

    def to_csv_rows(self) -> list[list[str]]:
        return [[str(n), repr(hn), method, repr(se)] for n, hn, method, se in self.points]


def entropy_curve(
    W: StepHypergraphon,
    n_max: int,
    method: str = "exact",
    n_min: int | None = None,
    samples: int = 10**4,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> EntropyCurve:
    """``h(n)`` for ``n_min <= n <= n_max`` with the integral as the limit target."""
    n_min = W.k if n_min is None else n_min
    if n_max < W.k or n_min < W.k or n_min > n_max:
        raise InvalidArgument(f"need k <= n_min <= n_max, got k={W.k}, [{n_min}, {n_max}]")
    points = []
    for n in range(n_min, n_max + 1):
        if method == "exact":
            points.append((n, exact_entropy(W, n, budget), "exact", 0.0))
        elif method == "mc":
            est = mc_entropy(W, n, samples, seed)
            points.append((n, est.estimate, "mc", est.stderr))
        else:
            raise InvalidArgument(f"unknown method {method!r}")
    curve = EntropyCurve(points, W.k, W.integral_entropy())
    if method == "exact" and not curve.monotone():
        raise AssertionError(f"exact entropy curve is not non-decreasing: {points}")
    return curve
