"""Hot loops: keyed uniforms, batched structure sampling, Rado edge codes.

Every kernel exists twice, as a numba ``@njit`` loop and as a vectorized
numpy expression; both produce bit-identical results.  Set
``HYPERENTROPY_DISABLE_NUMBA=1`` (or run without numba installed) to force
the numpy path.  Tests call both through the ``backend`` argument.

Randomness is a keyed hash rather than a stream: the uniform attached to a
subset ``D`` under seed ``s`` is ``unit(mix(state(s) ^ key(D)))`` where ``mix``
is the splitmix64 finalizer.  Because the value depends only on ``(s, D)``,
structures sampled on ``[n]`` and ``[n+1]`` with one seed agree on ``[n]``.
"""

from __future__ import annotations

import os

import numpy as np

MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB
_SIZE_SALT = 0x2545F4914F6CDD1D
INV_2_53 = 1.0 / (1 << 53)

_DISABLED = os.environ.get("HYPERENTROPY_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError("disabled by HYPERENTROPY_DISABLE_NUMBA")
    import numba
    from numba import njit, prange

    # the bundled TBB is too old for numba; OpenMP avoids a warning per process
    if numba.config.THREADING_LAYER == "default":
        numba.config.THREADING_LAYER = "omp"

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via the env flag in CI
    numba = None
    HAVE_NUMBA = False


def default_backend() -> str:
    return "numba" if HAVE_NUMBA else "numpy"


def _resolve(backend: str | None) -> str:
    b = backend or default_backend()
    if b == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but unavailable")
    if b not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {b!r}")
    return b


def set_threads(n: int) -> None:
    if HAVE_NUMBA and n > 0:
        numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


# ---------------------------------------------------------------------------
# scalar hashing (pure python, exact reference)


def mix64(z: int) -> int:
    z &= MASK
    z = ((z ^ (z >> 30)) * _M1) & MASK
    z = ((z ^ (z >> 27)) * _M2) & MASK
    return z ^ (z >> 31)


def seed_state(seed: int) -> int:
    return mix64((int(seed) & MASK) + GOLDEN)


def subset_key(D) -> int:
    items = sorted(int(x) for x in D)
    h = mix64((len(items) * GOLDEN) ^ _SIZE_SALT)
    for x in items:
        h = mix64(h ^ (((x + 1) * GOLDEN) & MASK))
    return h


def unit(z: int) -> float:
    return (z >> 11) * INV_2_53


def keyed_uniform(seed: int, D) -> float:
    return unit(mix64(seed_state(seed) ^ subset_key(D)))


def derive_seed(seed: int, index: int) -> int:
    """Seed of substream ``index``; used for per-sample seeds in batches."""
    return mix64(seed_state(seed) + ((int(index) + 1) * GOLDEN & MASK))


def derive_seeds(seed: int, count: int, start: int = 0) -> np.ndarray:
    idx = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed_state(seed)) + idx * np.uint64(GOLDEN)
    return _mix_np(z)


def _mix_np(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


def seed_states(seeds) -> np.ndarray:
    s = np.asarray(seeds, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix_np(s + np.uint64(GOLDEN))


def _unit_np(z: np.ndarray) -> np.ndarray:
    return (z >> np.uint64(11)).astype(np.float64) * INV_2_53


def keyed_uniforms(states: np.ndarray, keys: np.ndarray) -> np.ndarray:
    """``(S, K)`` array of uniforms for every (state, subset key) pair."""
    return _unit_np(_mix_np(states[:, None] ^ keys[None, :]))


# ---------------------------------------------------------------------------
# batched sampling of type vectors


def _sample_numpy(states, keys, n_below, cell_cum, jcoords, jself, cdf, m, chunk=1 << 14):
    S = states.shape[0]
    NJ, P = jcoords.shape
    a = cdf.shape[1]
    out = np.empty((S, NJ), dtype=np.int64)
    weights = m ** np.arange(P - 1, -1, -1, dtype=np.int64)
    for lo in range(0, S, chunk):
        hi = min(S, lo + chunk)
        U = keyed_uniforms(states[lo:hi], keys)
        cells = np.searchsorted(cell_cum, U[:, :n_below], side="right")
        np.minimum(cells, m - 1, out=cells)
        flat = cells[:, jcoords] @ weights if P else np.zeros((hi - lo, NJ), dtype=np.int64)
        rows = cdf[flat]  # (s, NJ, a)
        t = (rows <= U[:, jself][:, :, None]).sum(axis=2)
        np.minimum(t, a - 1, out=t)
        out[lo:hi] = t
    return out


if HAVE_NUMBA:

    @njit(cache=True, inline="always")
    def _mix_nb(z):
        z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
        return z ^ (z >> np.uint64(31))

    @njit(cache=True, parallel=True)
    def _sample_numba(states, keys, n_below, cell_cum, jcoords, jself, cdf, m):
        S = states.shape[0]
        ND = keys.shape[0]
        NJ, P = jcoords.shape
        a = cdf.shape[1]
        out = np.empty((S, NJ), dtype=np.int64)
        for s in prange(S):
            st = states[s]
            u = np.empty(ND, dtype=np.float64)
            for d in range(ND):
                z = _mix_nb(st ^ keys[d])
                u[d] = np.float64(z >> np.uint64(11)) * INV_2_53
            cells = np.empty(n_below, dtype=np.int64)
            for d in range(n_below):
                c = 0
                while c < m - 1 and cell_cum[c] <= u[d]:
                    c += 1
                cells[d] = c
            for j in range(NJ):
                flat = 0
                for f in range(P):
                    flat = flat * m + cells[jcoords[j, f]]
                uj = u[jself[j]]
                t = 0
                while t < a - 1 and cdf[flat, t] <= uj:
                    t += 1
                out[s, j] = t
        return out


def sample_types(states, keys, n_below, cell_cum, jcoords, jself, cdf, m, backend=None):
    """Alphabet positions of the types of every k-set, one row per seed state.

    ``keys`` lists subset keys for ``P_{<k}(n)`` (first ``n_below`` entries)
    followed by ``P_k(n)``; ``jcoords[j, f]`` points at the key of
    ``tau_J(F_f)`` and ``jself[j]`` at the key of ``J`` itself.
    """
    args = (
        np.ascontiguousarray(states, dtype=np.uint64),
        np.ascontiguousarray(keys, dtype=np.uint64),
        int(n_below),
        np.ascontiguousarray(cell_cum, dtype=np.float64),
        np.ascontiguousarray(jcoords, dtype=np.int64).reshape(len(jself), -1),
        np.ascontiguousarray(jself, dtype=np.int64),
        np.ascontiguousarray(cdf, dtype=np.float64),
        int(m),
    )
    if _resolve(backend) == "numba":
        return _sample_numba(*args)
    return _sample_numpy(*args)


# ---------------------------------------------------------------------------
# Rado hypergraph edge codes for explicitly indexed vertices


def _edge_codes_numpy(gens, offsets, idx, edges):
    T = idx.shape[0]
    E, k = edges.shape
    codes = np.zeros(T, dtype=np.int64)
    for e in range(E):
        members = edges[e]
        g = gens[members]
        top = int(np.argmax(g))
        if (g == g[top]).sum() > 1:
            continue
        others = [members[i] for i in range(k) if i != top]
        ids = np.stack([offsets[o] + idx[:, o] for o in others], axis=1) if others else np.zeros((T, 0), np.int64)
        ids.sort(axis=1)
        pos = np.zeros(T, dtype=np.int64)
        for i in range(k - 1):
            pos += _binom_vec(ids[:, i], i + 1)
        bit = (idx[:, members[top]] >> pos) & 1
        codes |= bit << e
    return codes


def _binom_vec(x, r):
    out = np.ones_like(x)
    for i in range(r):
        out = out * (x - i) // (i + 1)
    return out


if HAVE_NUMBA:

    @njit(cache=True, parallel=True)
    def _edge_codes_numba(gens, offsets, idx, edges, binom):
        T = idx.shape[0]
        E, k = edges.shape
        # slot of the unique latest generation per edge, or -1 on a tie
        tops = np.full(E, -1, dtype=np.int64)
        for e in range(E):
            top = 0
            for i in range(1, k):
                if gens[edges[e, i]] > gens[edges[e, top]]:
                    top = i
            tie = False
            for i in range(k):
                if i != top and gens[edges[e, i]] == gens[edges[e, top]]:
                    tie = True
            if not tie:
                tops[e] = top
        codes = np.zeros(T, dtype=np.int64)
        block = 4096
        for blk in prange((T + block - 1) // block):
            ids = np.empty(max(k - 1, 1), dtype=np.int64)
            for t in range(blk * block, min(T, (blk + 1) * block)):
                code = 0
                for e in range(E):
                    top = tops[e]
                    if top < 0:
                        continue
                    c = 0
                    for i in range(k):
                        if i != top:
                            o = edges[e, i]
                            x = offsets[o] + idx[t, o]
                            j = c - 1
                            while j >= 0 and ids[j] > x:
                                ids[j + 1] = ids[j]
                                j -= 1
                            ids[j + 1] = x
                            c += 1
                    pos = 0
                    for i in range(k - 1):
                        pos += binom[ids[i], i + 1]
                    code |= ((idx[t, edges[e, top]] >> pos) & 1) << e
                codes[t] = code
        return codes


def _binom_table(n_max: int, r_max: int) -> np.ndarray:
    """``C(x, r)`` for ``x <= n_max`` and ``r <= r_max``, saturated at 2^62."""
    table = np.zeros((n_max + 1, r_max + 1), dtype=np.int64)
    cap = 1 << 62
    for x in range(n_max + 1):
        table[x, 0] = 1
        for r in range(1, min(x, r_max) + 1):
            table[x, r] = min(cap, int(table[x - 1, r - 1]) + int(table[x - 1, r]))
    return table


def rado_edge_codes(gens, offsets, idx, edges, backend=None):
    """Bitmask of induced edges for each trial of explicitly indexed vertices.

    ``gens[j]`` and ``offsets[j]`` are the generation of slot ``j`` and the
    number of vertices before that generation; ``idx[t, j]`` is the index of
    the slot-``j`` vertex inside its generation (the bitmask of its neighbour
    set, so every position must be below 63).  ``edges`` lists k-subsets of
    slots; bit ``e`` of a code is set when edge ``edges[e]`` is present.
    """
    args = (
        np.ascontiguousarray(gens, dtype=np.int64),
        np.ascontiguousarray(offsets, dtype=np.int64),
        np.ascontiguousarray(idx, dtype=np.int64),
        np.ascontiguousarray(edges, dtype=np.int64),
    )
    if _resolve(backend) == "numba":
        gens_, offsets_, idx_, edges_ = args
        # only slots below the latest generation are ever ranked
        low = gens_ < gens_.max(initial=0)
        n_max = int((offsets_[low] + idx_[:, low].max(axis=0)).max()) if low.any() and len(idx_) else 0
        return _edge_codes_numba(*args, _binom_table(n_max, edges_.shape[1]))
    return _edge_codes_numpy(*args)
