"""Quantifier-free interdefinitions between structure classes.

Two translations are provided, each as a pair of mutually inverse maps on
structures over ``[n]``:

* function elimination replaces a selector ``f`` of arity ``a`` by relations
  ``f@0 .. f@(a-1)``; ``f@i`` holds of ``x`` when ``i`` is the least position
  with ``f(x) = x_i``, so exactly one of them holds of every tuple;
* redundancy elimination replaces a relation ``R`` of arity ``k`` by one
  relation ``R#s`` per set partition ``s`` of ``[k]`` (restricted growth
  string), of arity the number of blocks, holding of the distinct values a
  tuple of ``R`` takes on the blocks.

Both preserve the masses of atoms of any finitely supported measure, hence
its entropy.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable

from .core import FiniteStructure, RedundantStructure, Signature
from .entropy import FiniteMeasure
from .errors import (
    InvalidArgument,
    InvalidMeasure,
    InvalidStructure,
    PreconditionViolation,
    UnsupportedSignature,
)

FUNCTION_SEP = "@"
PARTITION_SEP = "#"


@dataclass(frozen=True)
class EquivalenceRelation:
    """A set partition of ``[k]`` given by its restricted growth string."""

    rgs: tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.rgs)

    @property
    def n_classes(self) -> int:
        return max(self.rgs, default=-1) + 1

    @property
    def blocks(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(i for i, b in enumerate(self.rgs) if b == c) for c in range(self.n_classes))

    def least(self, i: int) -> int:
        """``f_E(i)``: the least element of the class of ``i``."""
        return self.rgs.index(self.rgs[i])

    @property
    def representatives(self) -> tuple[int, ...]:
        """``y^E``: the increasing enumeration of the image of ``f_E``."""
        return tuple(b[0] for b in self.blocks)

    def related(self, i: int, j: int) -> bool:
        return self.rgs[i] == self.rgs[j]

    @property
    def label(self) -> str:
        return "".join(str(b) if b < 10 else f"({b})" for b in self.rgs)

    @classmethod
    def of_tuple(cls, t) -> "EquivalenceRelation":
        """The kernel ``i ~ j iff t_i = t_j`` of a tuple."""
        first: dict = {}
        return cls(tuple(first.setdefault(x, len(first)) for x in t))

    @classmethod
    def from_label(cls, label: str) -> "EquivalenceRelation":
        out, i = [], 0
        while i < len(label):
            if label[i] == "(":
                j = label.index(")", i)
                out.append(int(label[i + 1 : j]))
                i = j + 1
            else:
                out.append(int(label[i]))
                i += 1
        rel = cls(tuple(out))
        if _is_growth_string(rel.rgs):
            return rel
        raise InvalidArgument(f"{label!r} is not a restricted growth string")


def _is_growth_string(rgs) -> bool:
    top = -1
    for b in rgs:
        if b > top + 1 or b < 0:
            return False
        top = max(top, b)
    return True


def enumerate_eq_rels(k: int) -> list[EquivalenceRelation]:
    """All set partitions of ``[k]`` in lexicographic order of growth strings."""
    if k < 0:
        raise InvalidArgument(f"need k >= 0, got {k}")
    out: list[tuple[int, ...]] = []

    def grow(prefix: list[int], top: int):
        if len(prefix) == k:
            out.append(tuple(prefix))
            return
        for b in range(top + 2):
            prefix.append(b)
            grow(prefix, max(top, b))
            prefix.pop()

    grow([], -1)
    return [EquivalenceRelation(r) for r in out]


# ---------------------------------------------------------------------------
# function elimination


def _function_target(sig: Signature) -> Signature:
    for name, arity in sig.functions:
        if arity == 0:
            raise UnsupportedSignature(
                f"constant symbol {name!r}: no constant is a selector, so it cannot be eliminated"
            )
    rels = list(sig.relations) + [
        (f"{name}{FUNCTION_SEP}{i}", a) for name, a in sig.functions for i in range(a)
    ]
    try:
        return Signature(rels)
    except InvalidArgument as exc:
        raise UnsupportedSignature(f"derived relation names collide: {exc}") from None


def is_selector(M: RedundantStructure, name: str) -> bool:
    arity = M.signature.symbol(name).arity
    return all(M.apply(name, x) in x for x in itertools.product(range(M.n), repeat=arity))


def eliminate_functions(M: RedundantStructure) -> RedundantStructure:
    """Replace every selector function by its position relations ``f@i``.

    The result keeps the relations of ``M``; it is redundant in general
    because ``f@i`` holds of tuples with repeated entries.
    """
    target = _function_target(M.signature)
    rels = {name: M.relation(name) for name, _ in M.signature.relations}
    for name, arity in M.signature.functions:
        pos = {f"{name}{FUNCTION_SEP}{i}": [] for i in range(arity)}
        for x in itertools.product(range(M.n), repeat=arity):
            v = M.apply(name, x)
            if v not in x:
                raise PreconditionViolation(f"{name}{x} = {v} is not one of its arguments; {name} is not a selector")
            pos[f"{name}{FUNCTION_SEP}{x.index(v)}"].append(x)
        rels.update(pos)
    return _build(target, M.n, rels)


def _source_from_function_target(sig: Signature) -> Signature:
    rels, funs = [], {}
    for name, arity in sig.relations:
        base, sep, idx = name.rpartition(FUNCTION_SEP)
        if sep and idx.isdigit():
            funs.setdefault(base, set()).add((int(idx), arity))
        else:
            rels.append((name, arity))
    functions = []
    for base, entries in funs.items():
        arity = max(a for _, a in entries)
        if sorted(entries) != [(i, arity) for i in range(arity)]:
            raise InvalidStructure(f"relations {base}@i do not describe one function")
        functions.append((base, arity))
    return Signature(rels, functions)


def restore_functions(N: RedundantStructure, source: Signature | None = None) -> RedundantStructure:
    """Inverse of :func:`eliminate_functions`; checks exactly one ``f@i`` per tuple."""
    source = source or _source_from_function_target(N.signature)
    if _function_target(source) != N.signature:
        raise InvalidStructure(f"{N.signature} is not the image of {source}")
    funs = {}
    for name, arity in source.functions:
        table = {}
        for x in itertools.product(range(N.n), repeat=arity):
            hits = [i for i in range(arity) if N.holds(f"{name}{FUNCTION_SEP}{i}", x)]
            if len(hits) != 1:
                raise InvalidStructure(f"{len(hits)} of the relations {name}@i hold at {x}, need exactly one")
            i = hits[0]
            if x.index(x[i]) != i:
                raise InvalidStructure(f"{name}@{i} holds at {x} but an earlier position has the same value")
            table[x] = x[i]
        funs[name] = table
    rels = {name: N.relation(name) for name, _ in source.relations}
    return _build(source, N.n, rels, funs)


# ---------------------------------------------------------------------------
# redundancy elimination


def _redundancy_target(sig: Signature) -> Signature:
    if sig.functions:
        raise UnsupportedSignature("redundancy elimination needs a relational signature")
    rels = [
        (f"{name}{PARTITION_SEP}{E.label}", E.n_classes)
        for name, arity in sig.relations
        for E in enumerate_eq_rels(arity)
    ]
    try:
        return Signature(rels)
    except InvalidArgument as exc:
        raise UnsupportedSignature(f"derived relation names collide: {exc}") from None


def eliminate_redundancy(M: RedundantStructure) -> FiniteStructure:
    """Split each relation by the equality pattern of its tuples."""
    target = _redundancy_target(M.signature)
    rels: dict[str, list] = {name: [] for name, _ in target.relations}
    for name, _ in M.signature.relations:
        for t in M.relation(name):
            E = EquivalenceRelation.of_tuple(t)
            rels[f"{name}{PARTITION_SEP}{E.label}"].append(tuple(t[i] for i in E.representatives))
    return FiniteStructure(target, M.n, rels)


def _source_from_redundancy_target(sig: Signature) -> Signature:
    seen: dict[str, int] = {}
    for name, _ in sig.relations:
        base, sep, label = name.rpartition(PARTITION_SEP)
        if not sep:
            raise InvalidStructure(f"relation {name!r} is not of the form R#pattern")
        seen.setdefault(base, len(EquivalenceRelation.from_label(label).rgs))
    return Signature(list(seen.items()))


def restore_redundancy(N: RedundantStructure, source: Signature | None = None) -> RedundantStructure:
    """Inverse of :func:`eliminate_redundancy`."""
    source = source or _source_from_redundancy_target(N.signature)
    if _redundancy_target(source) != N.signature:
        raise InvalidStructure(f"{N.signature} is not the image of {source}")
    if not N.is_non_redundant():
        raise InvalidStructure("the split relations must hold only of distinct tuples")
    rels: dict[str, list] = {name: [] for name, _ in source.relations}
    for name, arity in source.relations:
        for E in enumerate_eq_rels(arity):
            for y in N.relation(f"{name}{PARTITION_SEP}{E.label}"):
                rels[name].append(tuple(y[b] for b in E.rgs))
    return _build(source, N.n, rels)


def _build(sig: Signature, n: int, rels, funs=None) -> RedundantStructure:
    redundant = any(len(set(t)) != len(t) for ts in rels.values() for t in ts)
    cls = RedundantStructure if redundant else FiniteStructure
    return cls(sig, n, rels, funs or {})


def to_non_redundant(M: RedundantStructure) -> FiniteStructure:
    """Compose both eliminations: a relational, non-redundant copy of ``M``."""
    if M.signature.functions:
        M = eliminate_functions(M)
    return eliminate_redundancy(M)


# ---------------------------------------------------------------------------
# interdefinitions and measures


@dataclass(frozen=True)
class Interdefinition:
    kind: str
    source: Signature
    target: Signature
    forward: Callable
    backward: Callable

    @classmethod
    def functions(cls, source: Signature) -> "Interdefinition":
        return cls(
            "function-elimination",
            source,
            _function_target(source),
            eliminate_functions,
            lambda N: restore_functions(N, source),
        )

    @classmethod
    def redundancy(cls, source: Signature) -> "Interdefinition":
        return cls(
            "redundancy-elimination",
            source,
            _redundancy_target(source),
            eliminate_redundancy,
            lambda N: restore_redundancy(N, source),
        )

    @classmethod
    def of_kind(cls, kind: str, source: Signature) -> "Interdefinition":
        if kind in ("functions", "function-elimination"):
            return cls.functions(source)
        if kind in ("redundancy", "redundancy-elimination"):
            return cls.redundancy(source)
        raise InvalidArgument(f"unknown interdefinition kind {kind!r}")

    def in_source(self, M) -> bool:
        if not isinstance(M, RedundantStructure) or M.signature != self.source:
            return False
        if self.kind == "function-elimination":
            return all(is_selector(M, name) for name, _ in self.source.functions)
        return True

    def __call__(self, M):
        return self.forward(M)


def pushforward(mu: FiniteMeasure, psi: Interdefinition) -> FiniteMeasure:
    """The image measure ``nu(B) = mu(psi^{-1} B)``."""
    for M in mu.support:
        if not psi.in_source(M):
            raise InvalidMeasure(f"atom {M} lies outside the source class of {psi.kind}")
    return mu.map(psi.forward)


def entropy_preserved(mu: FiniteMeasure, psi: Interdefinition) -> bool:
    """Whether the pushforward has the same multiset of atom masses (hence entropy)."""
    nu = pushforward(mu, psi)
    same: bool = nu.masses() == mu.masses()
    return same and nu.entropy() == mu.entropy()
