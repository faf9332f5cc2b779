"""Wall-clock comparison of the numba and numpy kernel backends.

    python3 benchmarks/bench_kernels.py --samples 200000 --repeat 3

Both backends are run on identical inputs and their outputs are checked for
equality before any timing is reported.
"""

import argparse
import itertools
import time

import numpy as np

from hyperentropy import _kernels as K
from hyperentropy import core, sampler
from hyperentropy import hypergraphon as H
from hyperentropy.rado import RadoHypergraph


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def cases(samples):
    rng = np.random.default_rng(0)
    w2 = H.random_coherent(core.Signature.hypergraph(2), H.Grid.uniform(3), rng)
    yield "sample k=2 m=3 n=8", lambda b: sampler.sample_batch(w2, 8, samples, 1, b)
    tri = H.make_triangle()
    yield "sample triangle n=6", lambda b: sampler.sample_batch(tri, 6, samples, 2, b)
    for k, gens in ((2, [0, 1, 2, 3]), (3, [0, 1, 2, 3])):
        R = RadoHypergraph(k)
        idx = np.stack([rng.integers(0, R.generation_size(l), size=samples) for l in gens], axis=1)
        offsets = [R.cumulative_size(l - 1) for l in gens]
        edges = np.array(list(itertools.combinations(range(len(gens)), k)))
        yield f"rado edge codes k={k} s={len(gens)}", (
            lambda b, gens=gens, offsets=offsets, idx=idx, edges=edges: K.rado_edge_codes(gens, offsets, idx, edges, b)
        )


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--samples", type=int, default=200_000)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--threads", type=int, default=0)
    args = p.parse_args(argv)
    if not K.HAVE_NUMBA:
        raise SystemExit("numba is unavailable (or disabled by HYPERENTROPY_DISABLE_NUMBA); nothing to compare")
    K.set_threads(args.threads)

    print(f"{'kernel':<26}{'numba s':>10}{'numpy s':>10}{'speedup':>9}")
    for name, fn in cases(args.samples):
        fn("numba")  # compile outside the timed region
        t_nb, out_nb = best_of(lambda: fn("numba"), args.repeat)
        t_np, out_np = best_of(lambda: fn("numpy"), args.repeat)
        if not np.array_equal(out_nb, out_np):
            raise SystemExit(f"{name}: backends disagree")
        print(f"{name:<26}{t_nb:>10.4f}{t_np:>10.4f}{t_np / t_nb:>8.1f}x")


if __name__ == "__main__":
    main()
