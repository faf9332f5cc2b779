import itertools
import math
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_mu
from hyperentropy import core, entropy
from hyperentropy import hypergraphon as H
from hyperentropy.entropy import FiniteMeasure
from hyperentropy.errors import InvalidArgument, InvalidMeasure, ResourceLimit
from hyperentropy.information import shannon


def random_w(k, m, seed, max_support=None):
    rng = np.random.default_rng(seed)
    return H.random_coherent(core.Signature.hypergraph(k), H.Grid.uniform(m), rng, max_support=max_support)


def triangle_oracle(n):
    """Entropy of the triangle hypergraph of a uniform random graph on [n]."""
    pairs = list(itertools.combinations(range(n), 2))
    counts = Counter()
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        G = {p for p, b in zip(pairs, bits) if b}
        counts[frozenset(T for T in itertools.combinations(range(n), 3) if all(q in G for q in itertools.combinations(T, 2)))] += 1
    total = 2 ** len(pairs)
    return -sum(c / total * math.log2(c / total) for c in counts.values())


@settings(max_examples=30)
@given(st.sampled_from([(2, 3), (2, 4), (3, 3)]), st.integers(1, 2), st.integers(0, 2**32 - 1))
def test_exact_law_matches_brute_force(kn, m, seed):
    k, n = kn
    # narrow supports keep the brute-force sum small
    W = random_w(k, m, seed, max_support=2)
    mu = entropy.exact_mu_n(W, n)
    assert dict(mu.items()) == brute_force_mu(W, n)


def test_er_entropy_is_number_of_k_sets():
    for k, ns in ((2, range(2, 7)), (3, range(3, 6))):
        W = H.make_er(k=k)
        for n in ns:
            assert entropy.exact_entropy(W, n) == math.comb(n, k)


@pytest.mark.parametrize("n", [3, 4, 5])
def test_triangle_matches_graph_enumeration(triangle, n):
    assert entropy.exact_entropy(triangle, n) == pytest.approx(triangle_oracle(n), abs=1e-12)


def test_triangle_frozen_values(triangle):
    assert entropy.exact_entropy(triangle, 3) == pytest.approx(0.5435644431995967, abs=1e-12)
    assert entropy.exact_entropy(triangle, 5) == pytest.approx(4.8545682384203195, abs=1e-12)


def test_budget_guard(er2):
    with pytest.raises(ResourceLimit) as info:
        entropy.exact_entropy(er2, 30)
    assert info.value.required > info.value.limit


def test_elimination_cost_grows_with_n():
    costs = [entropy.elimination_cost(n, 2, 2, 2)[0] for n in range(2, 9)]
    assert costs == sorted(costs)


@given(st.integers(2, 5))
def test_bounds_contain_exact(n):
    for W in (H.make_er(k=2), random_w(2, 2, n)):
        lo, hi = entropy.finite_n_bounds(W, n)
        assert lo - 1e-9 <= entropy.exact_entropy(W, n) <= hi + 1e-9


def test_mc_agrees_with_exact(er2):
    est = entropy.mc_entropy(er2, 4, 20000, seed=1)
    assert abs(est.estimate - 6.0) < max(4 * est.stderr, 0.05)
    assert est.support <= 64 and est.samples == 20000


def test_mc_is_reproducible():
    W = random_w(2, 2, 3)
    assert entropy.mc_entropy(W, 5, 2000, 8) == entropy.mc_entropy(W, 5, 2000, 8)


def test_mc_point_mass_and_small_samples():
    assert entropy.mc_entropy(H.make_full(2), 4, 500, 0)[:2] == (0.0, 0.0)
    with pytest.raises(InvalidArgument):
        entropy.mc_entropy(H.make_full(2), 4, 99, 0)


def test_mc_support_budget(er2):
    with pytest.raises(ResourceLimit):
        entropy.mc_entropy(er2, 6, 1000, 0, max_support=10)


def test_miller_madow_value():
    assert entropy.miller_madow(np.array([5, 5])) == pytest.approx(1 + 1 / (20 * math.log(2)))


def test_uniform_nr_entropy():
    assert entropy.uniform_nr_entropy({2: 1}, 4) == 12
    assert entropy.uniform_nr_entropy("2:1,1:2", 3) == 12
    assert entropy.uniform_nr_entropy("3:1", 2) == 0
    with pytest.raises(InvalidArgument):
        entropy.parse_profile("2-1")


def test_max_entropy_check():
    assert entropy.max_entropy_check(H.make_er(k=2), n=5)
    assert entropy.max_entropy_check(H.make_er(k=3), n=4)


def test_curve(er2):
    curve = entropy.entropy_curve(er2, 5)
    assert curve.monotone() and curve.ratios() == [1.0] * 4 and curve.c_hat == 1.0
    assert curve.to_csv_rows()[0] == ["2", "1.0", "exact", "0.0"]
    with pytest.raises(InvalidArgument):
        entropy.entropy_curve(er2, 5, method="guess")


def test_finite_measure_basics():
    sig = core.Signature.hypergraph(2)
    a = core.FiniteStructure(sig, 3, {"E": [(0, 1), (1, 0)]})
    b = core.FiniteStructure(sig, 3)
    mu = FiniteMeasure({a: Fraction(1, 4), b: Fraction(3, 4)})
    assert mu.entropy() == pytest.approx(shannon([0.25, 0.75]))
    assert entropy.h(mu) == mu.entropy()
    assert mu.marginal(3) == mu
    assert mu.marginal(2) == FiniteMeasure({a.restrict(2): Fraction(1, 4), b.restrict(2): Fraction(3, 4)})
    swapped = mu.act((2, 1, 0))
    assert swapped.prob(core.logic_act((2, 1, 0), a)) == Fraction(1, 4)
    with pytest.raises(InvalidMeasure):
        FiniteMeasure({a: Fraction(1, 2)})


def test_shannon_exact_and_float():
    assert shannon([Fraction(1, 2), Fraction(1, 4), Fraction(1, 4)]) == 1.5
    assert shannon([0.5, 0.5]) == 1.0
    with pytest.raises(InvalidArgument):
        shannon([0.5, 0.4])


joint_weights = st.lists(st.integers(0, 9), min_size=6, max_size=6).filter(any)


def joint(weights):
    total = sum(weights)
    return {(i // 3, i % 3): Fraction(w, total) for i, w in enumerate(weights) if w}


def marginal(p, axis):
    out = {}
    for key, q in p.items():
        out[key[axis]] = out.get(key[axis], Fraction(0)) + q
    return out


@given(joint_weights)
def test_chain_rule(weights):
    p = joint(weights)
    px = marginal(p, 0)
    cond = sum(float(qx) * entropy.h({y: q / qx for (x, y), q in p.items() if x == xv}) for xv, qx in px.items())
    assert entropy.h(p) == pytest.approx(entropy.h(px) + cond, abs=1e-12)
    # conditioning never increases entropy
    assert cond <= entropy.h(marginal(p, 1)) + 1e-12


@given(joint_weights)
def test_joint_entropy_subadditive(weights):
    p = joint(weights)
    px, py = marginal(p, 0), marginal(p, 1)
    assert entropy.h(p) <= entropy.h(px) + entropy.h(py) + 1e-12
    product = {(x, y): a * b for x, a in px.items() for y, b in py.items()}
    assert entropy.h(product) == pytest.approx(entropy.h(px) + entropy.h(py), abs=1e-12)
