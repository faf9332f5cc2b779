import itertools
import os
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from hyperentropy import _kernels as K
from hyperentropy.rado import RadoHypergraph, index_bits

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba unavailable")


def test_splitmix_reference_outputs():
    # first two outputs of the splitmix64 generator started from state 0
    assert K.seed_state(0) == 0xE220A8397B1DCDAF
    assert K.mix64(2 * K.GOLDEN) == 0x6E789E6AA1B965F4


def test_unit_range():
    assert K.unit(0) == 0.0
    assert K.unit(K.MASK) < 1.0


@given(st.integers(0, 2**64 - 1), st.lists(st.integers(0, 50), unique=True, max_size=4))
def test_keyed_uniform_ignores_order(seed, D):
    assert K.keyed_uniform(seed, D) == K.keyed_uniform(seed, list(reversed(D)))
    assert 0.0 <= K.keyed_uniform(seed, D) < 1.0


def test_subset_keys_separate_sizes():
    keys = {K.subset_key(D) for D in [(), (0,), (1,), (0, 1), (0, 1, 2)]}
    assert len(keys) == 5


@given(st.integers(0, 2**64 - 1), st.integers(1, 40), st.integers(0, 100))
def test_vectorized_seeds_match_scalar(seed, count, start):
    arr = K.derive_seeds(seed, count, start)
    assert [int(x) for x in arr] == [K.derive_seed(seed, start + i) for i in range(count)]
    st_ = K.seed_states(arr[:3])
    assert [int(x) for x in st_] == [K.seed_state(int(x)) for x in arr[:3]]


def test_keyed_uniforms_match_scalar():
    seeds = [0, 7, 2**63 + 5]
    Ds = [(), (3,), (1, 4)]
    U = K.keyed_uniforms(K.seed_states(seeds), np.array([K.subset_key(D) for D in Ds], dtype=np.uint64))
    assert U.tolist() == [[K.keyed_uniform(s, D) for D in Ds] for s in seeds]


def test_unknown_backend():
    with pytest.raises(ValueError):
        K._resolve("cuda")


def random_kernel_inputs(rng, S=50, m=3, n_below=5, NJ=4, P=3, a=4):
    states = rng.integers(0, 2**63, size=S, dtype=np.uint64)
    keys = rng.integers(0, 2**63, size=n_below + NJ, dtype=np.uint64)
    cell_cum = np.cumsum(np.full(m, 1.0 / m))
    jcoords = rng.integers(0, n_below, size=(NJ, P))
    jself = np.arange(n_below, n_below + NJ)
    raw = rng.random((m**P, a))
    cdf = np.cumsum(raw / raw.sum(axis=1, keepdims=True), axis=1)
    cdf[:, -1] = 1.0
    return states, keys, n_below, cell_cum, jcoords, jself, cdf, m


@needs_numba
@given(st.integers(0, 2**32 - 1))
def test_sample_kernel_backends_agree(seed):
    args = random_kernel_inputs(np.random.default_rng(seed))
    a = K.sample_types(*args, backend="numba")
    b = K.sample_types(*args, backend="numpy")
    assert np.array_equal(a, b)


@needs_numba
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_edge_code_backends_agree(seed, k):
    R = RadoHypergraph(k)
    rng = np.random.default_rng(seed)
    slots = 5
    gens = rng.integers(0, R.explicit_gens + 1, size=slots)
    offsets = np.array([R.cumulative_size(int(g) - 1) if g else 0 for g in gens])
    idx = np.stack([rng.integers(0, 2 ** index_bits(k, int(g)), size=30) for g in gens], axis=1)
    edges = np.array(list(itertools.combinations(range(slots), k)))
    a = K.rado_edge_codes(gens, offsets, idx, edges, backend="numba")
    b = K.rado_edge_codes(gens, offsets, idx, edges, backend="numpy")
    assert np.array_equal(a, b)


def test_env_flag_selects_numpy_path():
    code = (
        "from hyperentropy import _kernels as K, sampler, hypergraphon as H;"
        "print(K.HAVE_NUMBA, K.default_backend(), sampler.sample_batch(H.make_triangle(), 5, 50, 4).sum())"
    )
    env = dict(os.environ, HYPERENTROPY_DISABLE_NUMBA="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True).stdout.split()
    from hyperentropy import hypergraphon as H
    from hyperentropy import sampler

    assert out[:2] == ["False", "numpy"]
    assert int(out[2]) == int(sampler.sample_batch(H.make_triangle(), 5, 50, 4).sum())
