"""Seeded sampling of ``G(n, W)`` for step hypergraphons.

Every subset ``D`` of ``[n]`` with ``|D| <= k`` carries a uniform ``zeta_D``
obtained from a keyed hash of ``(seed, D)``.  Subsets below size k choose a
grid cell; each k-set ``J`` reads the cells of ``tau_J(F)`` for every
coordinate ``F`` and draws its type by inverse CDF at ``zeta_J``.

Because ``zeta_D`` never depends on ``n``, restricting a sample on ``[n]`` to
``[n-1]`` gives the sample on ``[n-1]`` with the same seed.
"""

from __future__ import annotations

import threading
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from . import _kernels as K
from . import core
from .errors import IncoherentHypergraphon, InvalidArgument
from .hypergraphon import StepHypergraphon


class SampleContext:
    """Memoized keyed uniforms ``zeta_D`` for one seed.

    Materialization is guarded by a lock so one context can be shared by
    threads; the values themselves are a pure function of ``(seed, D)``.
    """

    def __init__(self, seed: int, n: int):
        self.seed = int(seed)
        self.n = int(n)
        self._state = K.seed_state(self.seed)
        self._zeta: dict[core.Subset, float] = {}
        self._lock = threading.Lock()

    def zeta(self, D: Iterable[int]) -> float:
        key = tuple(sorted(D))
        if key and (key[0] < 0 or key[-1] >= self.n):
            raise InvalidArgument(f"{key} is not a subset of [{self.n}]")
        with self._lock:
            z = self._zeta.get(key)
            if z is None:
                z = K.unit(K.mix64(self._state ^ K.subset_key(key)))
                self._zeta[key] = z
        return z

    def cell(self, D: Iterable[int], W: StepHypergraphon) -> int:
        return W.grid.cell_of(self.zeta(D))

    def cell_assignment(self, W: StepHypergraphon) -> dict[core.Subset, int]:
        below = core.shortlex(self.n, W.k)[0]
        return {D: self.cell(D, W) for D in below}


@lru_cache(maxsize=64)
def _layout(n: int, k: int):
    """Subset keys and the index arrays the batch kernel needs for ``(n, k)``."""
    below, exact, both = core.shortlex(n, k)
    pos = {D: i for i, D in enumerate(below)}
    coords = core.shortlex(k, k)[0]
    keys = np.array([K.subset_key(D) for D in both], dtype=np.uint64)
    jcoords = np.array(
        [[pos[tuple(J[i] for i in F)] for F in coords] for J in exact], dtype=np.int64
    ).reshape(len(exact), len(coords))
    jself = np.arange(len(below), len(both), dtype=np.int64)
    return keys, len(below), jcoords, jself


def _checked(W: StepHypergraphon, n: int) -> None:
    if n < W.k:
        raise InvalidArgument(f"need n >= k = {W.k}, got n = {n}")
    ok = getattr(W, "_coherent", None)
    if ok is None:
        ok = not W.violations()
        W._coherent = ok
    if not ok:
        raise IncoherentHypergraphon(W.violations())


def sample_type_indices(
    W: StepHypergraphon, n: int, seeds: Sequence[int] | np.ndarray, backend: str | None = None
) -> np.ndarray:
    """``(len(seeds), C(n, k))`` array of alphabet positions, rows aligned with seeds."""
    _checked(W, n)
    keys, n_below, jcoords, jself = _layout(n, W.k)
    states = K.seed_states(np.asarray(seeds, dtype=np.uint64).reshape(-1))
    return K.sample_types(
        states, keys, n_below, W.grid.cumulative_float(), jcoords, jself, W.cdf_table, W.m, backend
    )


def batch_seeds(seed: int, samples: int) -> np.ndarray:
    """Per-sample seeds of a batch: sample ``i`` uses substream ``i`` of ``seed``."""
    return K.derive_seeds(seed, samples)


def sample_batch(
    W: StepHypergraphon, n: int, samples: int, seed: int, backend: str | None = None
) -> np.ndarray:
    """Type vectors of ``samples`` independent draws as alphabet positions."""
    return sample_type_indices(W, n, batch_seeds(seed, samples), backend)


def sample(W: StepHypergraphon, n: int, seed: int, backend: str | None = None) -> core.FiniteStructure:
    """One draw of ``G(n, W)``, deterministic in ``(W, n, seed)``."""
    row = sample_type_indices(W, n, [int(seed) & K.MASK], backend)[0]
    return core.structure_from_types(W.signature, n, W.alphabet[row].tolist())


def sample_reference(W: StepHypergraphon, n: int, seed: int) -> core.FiniteStructure:
    """Scalar implementation of :func:`sample` through :class:`SampleContext`.

    Uses exact rational inverse CDFs; kept as an independent check on the
    vectorized kernels.
    """
    _checked(W, n)
    ctx = SampleContext(seed, n)
    coords = core.shortlex(W.k, W.k)[0]
    types = []
    for J in core.shortlex(n, W.k)[1]:
        cells = tuple(ctx.cell(tuple(J[i] for i in F), W) for F in coords)
        types.append(W.randomize(cells, ctx.zeta(J)).index)
    return core.structure_from_types(W.signature, n, types)


def sample_restriction_consistency(W: StepHypergraphon, n: int, seed: int) -> bool:
    """Whether the sample on ``[n]`` restricted to ``[n-1]`` is the sample on ``[n-1]``."""
    if n < W.k + 1:
        raise InvalidArgument(f"need n >= k + 1 = {W.k + 1}, got {n}")
    return sample(W, n, seed).restrict(n - 1) == sample(W, n - 1, seed)
