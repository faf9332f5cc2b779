"""Signatures, subset combinatorics, quantifier-free k-types and finite structures.

Conventions used throughout the package:

* subsets of ``[n] = {0, ..., n-1}`` are sorted tuples;
* shortlex order sorts subsets by size, then lexicographically;
* a permutation of ``[k]`` is a tuple ``p`` with ``p[i]`` the image of ``i``;
  permutations of ``[k]`` are indexed in lexicographic order;
* a complete non-redundant quantifier-free k-type over a signature with
  relations ``R_0, ..., R_{L-1}`` (all of arity k) is a bit vector with one bit
  per pair ``(R_r, p)``; bit number ``r * k! + index(p)`` says that
  ``R_r(x_{p(0)}, ..., x_{p(k-1)})`` holds.  The integer whose binary digits
  are these bits is the type's canonical index, so index 0 is the all-false
  type.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

from .errors import InvalidArgument, InvalidStructure, UnsupportedSignature

Subset = tuple[int, ...]
Perm = tuple[int, ...]


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class Symbol:
    name: str
    arity: int
    kind: str = "relation"  # or "function"


class Signature:
    """A finite language of named relation and function symbols."""

    __slots__ = ("relations", "functions", "_by_name")

    def __init__(self, relations: Iterable = (), functions: Iterable = ()):
        rels = tuple(_as_pair(r) for r in relations)
        funs = tuple(_as_pair(f) for f in functions)
        names = [name for name, _ in rels + funs]
        if len(set(names)) != len(names):
            raise InvalidArgument(f"duplicate symbol names in {names}")
        for name, arity in rels:
            if arity < 0:
                raise InvalidArgument(f"relation {name!r} has negative arity")
        for name, arity in funs:
            if arity < 0:
                raise InvalidArgument(f"function {name!r} has negative arity")
        self.relations: tuple[tuple[str, int], ...] = rels
        self.functions: tuple[tuple[str, int], ...] = funs
        self._by_name = {name: Symbol(name, a, "relation") for name, a in rels}
        self._by_name.update({name: Symbol(name, a, "function") for name, a in funs})

    @classmethod
    def hypergraph(cls, k: int, name: str = "E") -> "Signature":
        return cls([(name, k)])

    @property
    def uniform_arity(self) -> int | None:
        """The common arity of all relations, if there is one and no functions."""
        arities = {a for _, a in self.relations}
        if len(arities) == 1 and not self.functions:
            return arities.pop()
        return None

    def require_uniform(self) -> int:
        k = self.uniform_arity
        if k is None:
            raise UnsupportedSignature(
                f"need relations of a single arity and no functions, got {self}"
            )
        return k

    def arity_profile(self) -> dict[int, int]:
        profile: dict[int, int] = {}
        for _, a in self.relations:
            profile[a] = profile.get(a, 0) + 1
        return profile

    @property
    def max_arity(self) -> int:
        return max((a for _, a in self.relations + self.functions), default=0)

    def symbol(self, name: str) -> Symbol:
        try:
            return self._by_name[name]
        except KeyError:
            raise InvalidArgument(f"unknown symbol {name!r}") from None

    def relation_names(self) -> list[str]:
        return [name for name, _ in self.relations]

    def __eq__(self, other):
        return (
            isinstance(other, Signature)
            and self.relations == other.relations
            and self.functions == other.functions
        )

    def __hash__(self):
        return hash((self.relations, self.functions))

    def __repr__(self):
        parts = [f"{n}:{a}" for n, a in self.relations]
        parts += [f"{n}():{a}" for n, a in self.functions]
        return "Signature(" + ", ".join(parts) + ")"

    def to_json(self) -> list[dict]:
        out = [{"name": n, "arity": a} for n, a in self.relations]
        out += [{"name": n, "arity": a, "kind": "function"} for n, a in self.functions]
        return out

    @classmethod
    def from_json(cls, entries: Sequence[Mapping]) -> "Signature":
        rels, funs = [], []
        for e in entries:
            kind = e.get("kind", "relation")
            if kind == "relation":
                rels.append((e["name"], int(e["arity"])))
            elif kind == "function":
                funs.append((e["name"], int(e["arity"])))
            else:
                raise InvalidArgument(f"unknown symbol kind {kind!r}")
        return cls(rels, funs)


def _as_pair(sym) -> tuple[str, int]:
    if isinstance(sym, Symbol):
        return sym.name, sym.arity
    name, arity = sym
    return str(name), int(arity)


# ---------------------------------------------------------------------------
# subsets and permutations


@lru_cache(maxsize=None)
def _shortlex_cached(n: int, k: int):
    below = tuple(
        s for size in range(k) for s in itertools.combinations(range(n), size)
    )
    exact = tuple(itertools.combinations(range(n), k))
    return below, exact, below + exact


def shortlex(n: int, k: int) -> tuple[tuple[Subset, ...], tuple[Subset, ...], tuple[Subset, ...]]:
    """Return ``(P_{<k}(n), P_k(n), P_{<=k}(n))`` as shortlex-ordered tuples."""
    if n < 0 or k < 0:
        raise InvalidArgument(f"need n >= 0 and k >= 0, got n={n}, k={k}")
    return _shortlex_cached(n, k)


def shortlex_key(s: Iterable[int]) -> tuple[int, tuple[int, ...]]:
    t = tuple(sorted(s))
    return len(t), t


def subset_rank(s: Iterable[int], n: int) -> int:
    """Position of ``s`` in the shortlex enumeration of all subsets of ``[n]``."""
    t = tuple(sorted(s))
    if len(set(t)) != len(t) or (t and (t[0] < 0 or t[-1] >= n)):
        raise InvalidArgument(f"{s} is not a subset of [{n}]")
    r = len(t)
    rank = sum(math.comb(n, size) for size in range(r))
    # lexicographic rank among r-subsets of [n]
    prev = -1
    for i, x in enumerate(t):
        for y in range(prev + 1, x):
            rank += math.comb(n - 1 - y, r - 1 - i)
        prev = x
    return rank


def tau(J: Iterable[int]) -> tuple[int, ...]:
    """The increasing bijection ``[k] -> J`` as the tuple of its values."""
    items = list(J)
    t = tuple(sorted(items))
    if len(set(t)) != len(items):
        raise InvalidArgument(f"{items} has repeated elements")
    return t


@lru_cache(maxsize=None)
def permutations(k: int) -> tuple[Perm, ...]:
    return tuple(itertools.permutations(range(k)))


@lru_cache(maxsize=None)
def _perm_index(k: int) -> dict[Perm, int]:
    return {p: i for i, p in enumerate(permutations(k))}


def compose(s: Sequence[int], p: Sequence[int]) -> Perm:
    """``(s o p)(i) = s[p[i]]``."""
    return tuple(s[i] for i in p)


def inverse(p: Sequence[int]) -> Perm:
    inv = [0] * len(p)
    for i, v in enumerate(p):
        inv[v] = i
    return tuple(inv)


def check_perm(p: Sequence[int], n: int) -> Perm:
    t = tuple(int(x) for x in p)
    if len(t) != n or sorted(t) != list(range(n)):
        raise InvalidArgument(f"{list(p)} is not a permutation of [{n}]")
    return t


def act_on_subset(s: Sequence[int], F: Iterable[int]) -> Subset:
    return tuple(sorted(s[i] for i in F))


# ---------------------------------------------------------------------------
# quantifier-free types


@dataclass(frozen=True, order=True)
class QfType:
    """A complete non-redundant quantifier-free k-type, as its canonical index."""

    k: int
    n_relations: int
    index: int

    def __post_init__(self):
        if not 0 <= self.index < n_types(self.n_relations, self.k):
            raise InvalidArgument(f"type index {self.index} out of range")

    @classmethod
    def from_bits(cls, k: int, n_relations: int, bits: Sequence[bool]) -> "QfType":
        width = n_relations * math.factorial(k)
        if len(bits) != width:
            raise InvalidArgument(f"expected {width} bits, got {len(bits)}")
        return cls(k, n_relations, sum(1 << i for i, b in enumerate(bits) if b))

    @property
    def bits(self) -> tuple[bool, ...]:
        width = self.n_relations * math.factorial(self.k)
        return tuple(bool(self.index >> i & 1) for i in range(width))

    def holds(self, relation: int, perm: Sequence[int]) -> bool:
        pos = relation * math.factorial(self.k) + _perm_index(self.k)[tuple(perm)]
        return bool(self.index >> pos & 1)

    def atoms(self) -> list[tuple[int, Perm]]:
        """The (relation number, permutation) pairs whose atomic formula holds."""
        kf = math.factorial(self.k)
        perms = permutations(self.k)
        return [(i // kf, perms[i % kf]) for i, b in enumerate(self.bits) if b]


def n_types(n_relations: int, k: int) -> int:
    return 1 << (n_relations * math.factorial(k))


def enumerate_qf_types(signature: Signature, k: int) -> list[QfType]:
    """All complete non-redundant qf k-types, in canonical index order."""
    arity = signature.uniform_arity
    if arity is None or arity != k:
        raise UnsupportedSignature(f"{signature} does not have uniform arity {k}")
    L = len(signature.relations)
    return [QfType(k, L, i) for i in range(n_types(L, k))]


def top_type(k: int, n_relations: int = 1) -> QfType:
    """u_top: every relation holds of every ordering of the tuple."""
    return QfType(k, n_relations, n_types(n_relations, k) - 1)


def bottom_type(k: int, n_relations: int = 1) -> QfType:
    return QfType(k, n_relations, 0)


@lru_cache(maxsize=None)
def _bit_map(n_relations: int, k: int, sigma: Perm) -> tuple[int, ...]:
    # bit (r, p) of u moves to bit (r, sigma o p) of sigma . u
    kf = math.factorial(k)
    perms = permutations(k)
    index = _perm_index(k)
    return tuple(
        r * kf + index[compose(sigma, perms[j])] for r in range(n_relations) for j in range(kf)
    )


def act_on_type_index(sigma: Perm, index: int, n_relations: int, k: int) -> int:
    out = 0
    for src, dst in enumerate(_bit_map(n_relations, k, sigma)):
        if index >> src & 1:
            out |= 1 << dst
    return out


def sym_act_type(sigma: Sequence[int], u: QfType) -> QfType:
    """The natural action of Sym(k) on types, relabelling variables by ``sigma``."""
    s = check_perm(sigma, u.k)
    return QfType(u.k, u.n_relations, act_on_type_index(s, u.index, u.n_relations, u.k))


# ---------------------------------------------------------------------------
# structures


class RedundantStructure:
    """An L-structure on ``[n]`` whose relations may hold of tuples with repeats.

    Relations are stored as frozensets of tuples, functions as the tuple of
    their values on ``[n]^arity`` in lexicographic order of arguments.
    """

    __slots__ = ("signature", "n", "_relations", "_functions", "_hash")

    def __init__(
        self,
        signature: Signature,
        n: int,
        relations: Mapping[str, Iterable[Sequence[int]]] | None = None,
        functions: Mapping[str, object] | None = None,
    ):
        if n < 0:
            raise InvalidArgument(f"universe size must be >= 0, got {n}")
        self.signature = signature
        self.n = n
        relations = dict(relations or {})
        functions = dict(functions or {})
        for name in list(relations) + list(functions):
            signature.symbol(name)

        rels = {}
        for name, arity in signature.relations:
            tuples = frozenset(tuple(int(x) for x in t) for t in relations.get(name, ()))
            for t in tuples:
                if len(t) != arity or any(not 0 <= x < n for x in t):
                    raise InvalidStructure(f"bad tuple {t} for {name}:{arity} on [{n}]")
            rels[name] = tuples
        for name in relations:
            if signature.symbol(name).kind != "relation":
                raise InvalidStructure(f"{name!r} is a function symbol")

        funs = {}
        for name, arity in signature.functions:
            if name not in functions:
                raise InvalidStructure(f"function {name!r} has no interpretation")
            funs[name] = _function_table(functions[name], n, arity, name)
        for name in functions:
            if signature.symbol(name).kind != "function":
                raise InvalidStructure(f"{name!r} is a relation symbol")

        self._relations = rels
        self._functions = funs
        self._hash = None
        self._validate()

    def _validate(self):
        pass

    # -- access --------------------------------------------------------------

    def relation(self, name: str) -> frozenset:
        return self._relations[name]

    def holds(self, name: str, t: Sequence[int]) -> bool:
        return tuple(t) in self._relations[name]

    def function_table(self, name: str) -> tuple[int, ...]:
        return self._functions[name]

    def apply(self, name: str, args: Sequence[int]) -> int:
        idx = 0
        for a in args:
            idx = idx * self.n + a
        return self._functions[name][idx]

    @property
    def relations(self) -> dict[str, frozenset]:
        return dict(self._relations)

    @property
    def functions(self) -> dict[str, tuple[int, ...]]:
        return dict(self._functions)

    def is_non_redundant(self) -> bool:
        return all(
            len(set(t)) == len(t) for tuples in self._relations.values() for t in tuples
        )

    def restrict(self, m: int) -> "RedundantStructure":
        """The induced substructure on ``[m]`` (functions must stay inside ``[m]``)."""
        if not 0 <= m <= self.n:
            raise InvalidArgument(f"cannot restrict [{self.n}] to [{m}]")
        rels = {k: [t for t in v if all(x < m for x in t)] for k, v in self._relations.items()}
        funs = {}
        for name, arity in self.signature.functions:
            table = {}
            for args in itertools.product(range(m), repeat=arity):
                v = self.apply(name, args)
                if v >= m:
                    raise InvalidStructure(f"[{m}] is not closed under {name}")
                table[args] = v
            funs[name] = table
        return type(self)(self.signature, m, rels, funs)

    # -- identity ------------------------------------------------------------

    def _key(self):
        return (
            self.signature,
            self.n,
            tuple((k, tuple(sorted(v))) for k, v in self._relations.items()),
            tuple(self._functions.items()),
        )

    def __eq__(self, other):
        if not isinstance(other, RedundantStructure):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        rels = ", ".join(f"{k}={sorted(v)}" for k, v in self._relations.items())
        return f"{type(self).__name__}(n={self.n}, {rels})"

    # -- serialization -------------------------------------------------------

    def to_json(self) -> dict:
        funs = {}
        for name, arity in self.signature.functions:
            funs[name] = [
                list(args) + [self.apply(name, args)]
                for args in itertools.product(range(self.n), repeat=arity)
            ]
        return {
            "signature": self.signature.to_json(),
            "n": self.n,
            "relations": {k: [list(t) for t in sorted(v)] for k, v in self._relations.items()},
            "functions": funs,
        }


class FiniteStructure(RedundantStructure):
    """A non-redundant L-structure on ``[n]``: relation tuples have distinct entries."""

    __slots__ = ()

    def _validate(self):
        for name, tuples in self._relations.items():
            for t in tuples:
                if len(set(t)) != len(t):
                    raise InvalidStructure(
                        f"{name}{t} repeats an element; use RedundantStructure"
                    )


def _function_table(spec, n: int, arity: int, name: str) -> tuple[int, ...]:
    if isinstance(spec, Mapping):
        table = []
        for args in itertools.product(range(n), repeat=arity):
            if args in spec:
                table.append(int(spec[args]))
            elif arity == 1 and args[0] in spec:
                table.append(int(spec[args[0]]))
            else:
                raise InvalidStructure(f"{name} undefined at {args}")
    elif callable(spec):
        table = [int(spec(*args)) for args in itertools.product(range(n), repeat=arity)]
    else:
        table = [int(v) for v in spec]
        if len(table) != n**arity:
            raise InvalidStructure(f"{name} needs {n ** arity} values, got {len(table)}")
    if any(not 0 <= v < n for v in table):
        raise InvalidStructure(f"{name} takes values outside [{n}]")
    return tuple(table)


def structure_from_json(data: Mapping) -> RedundantStructure:
    """Load a structure; returns FiniteStructure when every tuple is repeat-free."""
    sig = Signature.from_json(data["signature"])
    n = int(data["n"])
    rels = {k: [tuple(t) for t in v] for k, v in data.get("relations", {}).items()}
    funs = {}
    for name, rows in data.get("functions", {}).items():
        funs[name] = {tuple(r[:-1]): r[-1] for r in rows}
    redundant = any(len(set(t)) != len(t) for v in rels.values() for t in v)
    cls = RedundantStructure if redundant else FiniteStructure
    return cls(sig, n, rels, funs)


def dumps(obj: Mapping) -> str:
    return json.dumps(obj, sort_keys=True)


def is_non_redundant(M: RedundantStructure) -> bool:
    return M.is_non_redundant()


def logic_act(sigma: Sequence[int], M: RedundantStructure) -> RedundantStructure:
    """Relabel ``M`` along ``sigma``: ``R^{sigma.M}(sigma(t))`` iff ``R^M(t)``."""
    s = check_perm(sigma, M.n)
    rels = {name: [tuple(s[x] for x in t) for t in M.relation(name)] for name, _ in M.signature.relations}
    funs = {}
    for name, arity in M.signature.functions:
        funs[name] = {
            tuple(s[x] for x in args): s[M.apply(name, args)]
            for args in itertools.product(range(M.n), repeat=arity)
        }
    return type(M)(M.signature, M.n, rels, funs)


def qf_type_of(M: RedundantStructure, J: Iterable[int]) -> QfType:
    """The qf type of the increasing enumeration of ``J`` in ``M``."""
    k = M.signature.require_uniform()
    t = tau(J)
    if len(t) != k:
        raise InvalidArgument(f"|J| = {len(t)} but the signature has arity {k}")
    L = len(M.signature.relations)
    index = 0
    pos = 0
    for name, _ in M.signature.relations:
        rel = M.relation(name)
        for p in permutations(k):
            if tuple(t[i] for i in p) in rel:
                index |= 1 << pos
            pos += 1
    return QfType(k, L, index)


def structure_from_types(
    signature: Signature, n: int, types: Mapping[Subset, int] | Sequence[int]
) -> FiniteStructure:
    """Assemble a non-redundant structure from the type indices of its k-sets.

    ``types`` maps each ``J`` in ``P_k(n)`` to a type index, or is a sequence
    aligned with the shortlex enumeration of ``P_k(n)``.
    """
    k = signature.require_uniform()
    _, exact, _ = shortlex(n, k)
    if not isinstance(types, Mapping):
        types = dict(zip(exact, types))
    kf = math.factorial(k)
    perms = permutations(k)
    names = signature.relation_names()
    rels: dict[str, list] = {name: [] for name in names}
    for J in exact:
        idx = int(types[J])
        pos = 0
        while idx:
            if idx & 1:
                p = perms[pos % kf]
                rels[names[pos // kf]].append(tuple(J[i] for i in p))
            idx >>= 1
            pos += 1
    return FiniteStructure(signature, n, rels)
