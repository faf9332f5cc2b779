"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``PASS``/``FAIL`` line; the lines are also collected and
shown in the pytest terminal summary.  Run with
``pytest tests/test_acceptance.py -v``.
"""

import itertools
import math
import time
from collections import Counter
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from hyperentropy import blowup, core, entropy, interdef, sampler
from hyperentropy import hypergraphon as H
from hyperentropy.core import FiniteStructure, RedundantStructure, Signature
from hyperentropy.entropy import FiniteMeasure
from hyperentropy.errors import ResourceLimit
from hyperentropy.information import shannon
from hyperentropy.interdef import Interdefinition
from hyperentropy.rado import RadoHypergraph

RESULTS: list[str] = []


def report(number: int, title: str, ok: bool, detail: str) -> None:
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


# ---------------------------------------------------------------------------
# 1


def test_criterion_1_er_identity():
    start = time.perf_counter()
    bad = []
    for k, ns in ((2, range(2, 7)), (3, range(3, 6))):
        W = H.make_er(k=k)
        for n in ns:
            hn = entropy.exact_entropy(W, n)
            if hn != math.comb(n, k):
                bad.append((k, n, hn))
    elapsed = time.perf_counter() - start
    report(1, "ER entropy equals C(n,k)", not bad and elapsed < 60, f"mismatches={bad} runtime={elapsed:.2f}s (< 60s)")


# ---------------------------------------------------------------------------
# 2


def cell_decomposition(W, n):
    """``(H(types | cells), H(cells))`` of ``G(n, W)`` by enumerating cell assignments."""
    below, exact, _ = core.shortlex(n, W.k)
    coords = core.shortlex(W.k, W.k)[0]
    pos = {D: i for i, D in enumerate(below)}
    jcells = [[pos[tuple(J[i] for i in F)] for F in coords] for J in exact]
    ent = {c: W.evaluate(c).entropy() for c in W.cell_vectors()}
    cond = 0.0
    for assign in itertools.product(range(W.m), repeat=len(below)):
        weight = math.prod(W.grid.weights[c] for c in assign)
        cond += float(weight) * sum(ent[tuple(assign[i] for i in js)] for js in jcells)
    return cond, len(below) * shannon(W.grid.weights)


def test_criterion_2_entropy_ratio_bounds():
    quarter = H.make_constant(H.TypeDistribution.uniform(range(4)), k=2)
    cases = [("ER", H.make_er(k=2), range(2, 7), True), ("uniform-4", quarter, range(2, 6), True),
             ("triangle", H.make_triangle(), range(3, 6), False)]
    lines, ok = [], True
    integrals = set()
    for name, W, ns, constant in cases:
        C = W.integral_entropy()
        integrals.add(C)
        gaps = []
        for n in ns:
            N = math.comb(n, W.k)
            hn = entropy.exact_entropy(W, n)
            cond, h_cells = cell_decomposition(W, n)
            # h(n) = H(types | cells) + I(types; cells) and 0 <= I <= H(cells)
            ok &= math.isclose(cond, N * C, abs_tol=1e-9)
            ok &= abs(hn / N - C) <= h_cells / N + 1e-12
            ok &= (hn / N == C) if constant else True
            gaps.append(abs(hn / N - C))
        ok &= all(b <= a + 1e-12 for a, b in zip(gaps, gaps[1:]))
        lines.append(f"{name} C={C} |ratio-C|={[round(g, 6) for g in gaps]}")
    ok &= integrals == {0.0, 1.0, 2.0}
    report(2, "h(n)/C(n,k) within enumerated correction and approaching C", ok, "; ".join(lines))


# ---------------------------------------------------------------------------
# 3


def brute_force_uniform_nr(profile, n):
    rels = [(f"R{r}_{i}", r) for r, c in sorted(profile.items()) for i in range(c)]
    sig = Signature(rels)
    choices = [list(itertools.permutations(range(n), r)) for _, r in rels]
    slots = [(j, t) for j, ts in enumerate(choices) for t in ts]
    structures = set()
    for bits in itertools.product((0, 1), repeat=len(slots)):
        chosen = {name: [] for name, _ in rels}
        for (j, t), b in zip(slots, bits):
            if b:
                chosen[rels[j][0]].append(t)
        structures.add(FiniteStructure(sig, n, chosen))
    return FiniteMeasure.uniform(structures).entropy(), len(structures)


def test_criterion_3_uniform_nonredundant_formula():
    bad, checked = [], 0
    for profile in ({1: 1}, {2: 1}, {1: 2, 2: 1}):
        for n in range(0, 4):
            h_brute, count = brute_force_uniform_nr(profile, n)
            formula = entropy.uniform_nr_entropy(profile, n)
            checked += 1
            if not (h_brute == formula and count == 2**formula):
                bad.append((profile, n, h_brute, formula))
    report(3, "uniform non-redundant entropy formula", not bad, f"{checked} cases, mismatches={bad}")


# ---------------------------------------------------------------------------
# 4


def test_criterion_4_maximality():
    sig = Signature.hypergraph(2)
    profile = sig.arity_profile()
    worst, bad = -math.inf, []
    for seed in range(50):
        rng = np.random.default_rng(seed)
        W = H.random_coherent(sig, H.Grid.uniform(1 + seed % 3), rng)
        for n in range(2, 6):
            slack = entropy.exact_entropy(W, n) - entropy.uniform_nr_entropy(profile, n)
            worst = max(worst, slack)
            if slack > 1e-9:
                bad.append((seed, n))
    report(4, "h(n) <= uniform non-redundant entropy", not bad, f"50 W x n=2..5, max h - bound = {worst:.4f}, exceptions={bad}")


# ---------------------------------------------------------------------------
# 5


def test_criterion_5_conditional_uniformity():
    start = time.perf_counter()
    sched = blowup.build_schedule({n: Fraction(1, 2**n) for n in range(1, 41)}, k=2, r_max=4)
    R = RadoHypergraph(2)
    critical = stats.chi2.ppf(0.999, 7)
    triples = list(itertools.permutations(range(4), 3))
    below, lo, hi = 0, 1.0, 0.0
    for seed in range(100):
        res = blowup.conditional_uniformity(2, sched, R, triples[seed % len(triples)], 10**5, seed)
        f = res.frequencies / 10**5
        lo, hi = min(lo, f.min()), max(hi, f.max())
        below += res.statistic < critical
    elapsed = time.perf_counter() - start
    ok = 0.115 <= lo and hi <= 0.135 and below >= 99 and elapsed < 300
    report(5, "conditional uniformity of induced graphs", ok,
           f"freq range [{lo:.4f}, {hi:.4f}], chi2 < {critical:.2f} in {below}/100 runs, runtime={elapsed:.1f}s")


# ---------------------------------------------------------------------------
# 6


def test_criterion_6_schedule_arithmetic():
    sched = blowup.build_schedule({n: Fraction(1, 2**n) for n in range(1, 41)}, k=2, r_max=4)
    lo, hi = sched.ranges[0]
    ok = (
        sched.g[0] == 32
        and all(sched.alpha_raw(l) == Fraction(1, 64) for l in range(lo, hi))
        and sched.raw_total() == 1 - Fraction(1, 16)
        and sched.total() == 1
    )
    report(6, "blow-up schedule arithmetic", ok, f"g={sched.g} alpha_1={sched.alpha_raw(0)} raw total={sched.raw_total()}")


# ---------------------------------------------------------------------------
# 7

RSIG = Signature([("R", 3), ("S", 2)])
FSIG = Signature([("E", 2)], [("f", 2)])


def random_redundant(rng, n):
    rels = {}
    for name, a in RSIG.relations:
        tuples = list(itertools.product(range(n), repeat=a))
        take = rng.random(len(tuples)) < 0.3
        rels[name] = [t for t, b in zip(tuples, take) if b]
    return RedundantStructure(RSIG, n, rels)


def random_selector(rng, n):
    args = list(itertools.product(range(n), repeat=2))
    table = tuple(x[int(rng.integers(2))] for x in args)
    edges = [x for x in args if rng.random() < 0.4]
    return RedundantStructure(FSIG, n, {"E": edges}, {"f": table})


def random_measure(rng, make):
    atoms = {}
    for _ in range(int(rng.integers(1, 8))):
        atoms[make(rng, int(rng.integers(1, 5)))] = int(rng.integers(1, 30))
    total = sum(atoms.values())
    return FiniteMeasure({M: Fraction(w, total) for M, w in atoms.items()})


def test_criterion_7_interdefinitions_preserve_entropy():
    rng = np.random.default_rng(7)
    entropy_ok = trips = total = 0
    for kind, make, sig in (("redundancy", random_redundant, RSIG), ("functions", random_selector, FSIG)):
        psi = Interdefinition.of_kind(kind, sig)
        for _ in range(100):
            mu = random_measure(rng, make)
            nu = interdef.pushforward(mu, psi)
            entropy_ok += nu.masses() == mu.masses() and nu.entropy() == mu.entropy()
            for M in mu.support:
                total += 1
                trips += psi.backward(psi.forward(M)) == M
    ok = entropy_ok == 200 and trips == total
    report(7, "interdefinitions preserve entropy", ok, f"entropy equal in {entropy_ok}/200 measures, round trips {trips}/{total}")


# ---------------------------------------------------------------------------
# 8


def asymmetric_k3():
    coords = core.shortlex(3, 3)[0]
    singles = [coords.index((i,)) for i in range(3)]

    def entry(c):
        cls = [c[i] for i in singles]
        bits = [cls[p[0]] <= cls[p[1]] <= cls[p[2]] for p in core.permutations(3)]
        return H.TypeDistribution.point(core.QfType.from_bits(3, 1, bits).index)

    return H.from_function(Signature.hypergraph(3), H.Grid.uniform(2), entry)


def exchangeability_gap(W, n, N, seed):
    """Largest ``|p(M) - p(s.M)|`` over atoms and permutations among N samples."""
    rows = sampler.sample_batch(W, n, N, seed)
    freq = Counter(map(tuple, rows.tolist()))
    to_struct = {key: core.structure_from_types(W.signature, n, W.alphabet[list(key)].tolist()) for key in freq}
    p = Counter({to_struct[key]: c / N for key, c in freq.items()})
    gap = 0.0
    for s in itertools.permutations(range(n)):
        for M, q in p.items():
            gap = max(gap, abs(q - p[core.logic_act(s, M)]))
    return gap


def test_criterion_8_invariance_and_projectivity():
    rng = np.random.default_rng(8)
    family = [
        ("ER2", H.make_er(k=2)),
        ("triangle", H.make_triangle()),
        ("asym3", asymmetric_k3()),
        ("rand2", H.random_coherent(Signature.hypergraph(2), H.Grid.uniform(3), rng)),
        ("rand3", H.random_coherent(Signature.hypergraph(3), H.Grid.uniform(2), rng, max_support=3)),
    ]
    invariant = marginal = 0
    checks_inv = checks_marg = 0
    for name, W in family:
        laws = {}
        for n in range(W.k, 5):
            try:
                laws[n] = entropy.exact_mu_n(W, n)
            except ResourceLimit:  # the k=3 random law at n=4 is over the exact budget
                continue
        for n, mu in laws.items():
            for s in itertools.permutations(range(n)):
                checks_inv += 1
                invariant += mu.act(s) == mu
            if n + 1 in laws:
                checks_marg += 1
                marginal += laws[n + 1].marginal(n) == mu
    N = 10**5
    gaps = [exchangeability_gap(W, n, N, seed) for W, n, seed in
            ((family[3][1], 3, 1), (family[2][1], 4, 2), (family[1][1], 4, 3))]
    mc_ok = all(g <= 4 / math.sqrt(N) for g in gaps)
    ok = invariant == checks_inv and marginal == checks_marg and mc_ok and checks_marg > 0
    report(8, "invariance, projectivity, exchangeability", ok,
           f"Sym(n) invariance {invariant}/{checks_inv}, marginals {marginal}/{checks_marg}, "
           f"MC gaps {[round(g, 5) for g in gaps]} <= {4 / math.sqrt(N):.4f}")


# ---------------------------------------------------------------------------
# 9


@pytest.mark.parametrize("name,n", [("ER", 3), ("triangle", 4)])
def test_criterion_9_mc_matches_exact(name, n):
    W = H.make_er(k=2) if name == "ER" else H.make_triangle()
    exact = entropy.exact_entropy(W, n)
    hits = 0
    for seed in range(100):
        est = entropy.mc_entropy(W, n, 10**5, seed)
        hits += abs(est.estimate - exact) <= 3 * est.stderr
    report(9, f"Monte Carlo within 3 stderr of exact ({name}, n={n})", hits >= 95, f"{hits}/100 runs, exact={exact:.6f}")
