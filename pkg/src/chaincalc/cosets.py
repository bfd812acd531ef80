"""Coset enumeration, permutation representations and Schreier generators."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .groups import Element, GroupContext, Subgroup

DEFAULT_COSET_CAP = 100_000
DEFAULT_PERM_CAP = 1_000_000


class ResourceError(RuntimeError):
    """An enumeration outgrew its configured cap."""

    def __init__(self, what: str, cap: int, level: int | None = None):
        self.what = what
        self.cap = cap
        self.level = level
        where = "" if level is None else f" at level {level}"
        super().__init__(f"{what} exceeded the cap of {cap}{where}")


def coset_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get("CHAINCALC_COSET_CAP", DEFAULT_COSET_CAP))


def perm_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    return int(os.environ.get("CHAINCALC_PERM_CAP", DEFAULT_PERM_CAP))


@dataclass(eq=False)
class CosetTable:
    """Left cosets ``gH`` reached by BFS from ``H`` over ``generators``.

    ``reps[i]`` is the first element found in coset ``i`` and ``words[i]`` the
    generator word that produced it; ``actions[s][i] = j`` iff
    ``generators[s] * reps[i]`` lies in coset ``j``.
    """

    ctx: GroupContext
    subgroup: Subgroup
    generators: tuple
    reps: list
    words: list
    parents: list
    actions: tuple
    lookup: dict = field(repr=False)

    def __len__(self):
        return len(self.reps)

    @property
    def index(self) -> int:
        return len(self.reps)

    def locate(self, g: Element) -> int:
        """Index of the coset containing ``g``."""
        return self.lookup[self.subgroup.coset_key(g)]

    def act(self, g: Element, i: int) -> int:
        return self.lookup[self.subgroup.coset_key(self.ctx.mul(g, self.reps[i]))]

    def perm_of(self, g: Element) -> np.ndarray:
        """The permutation of the cosets induced by left multiplication by ``g``."""
        key = self.subgroup.coset_key
        mul = self.ctx.mul
        lookup = self.lookup
        return np.fromiter((lookup[key(mul(g, r))] for r in self.reps),
                           dtype=_dtype(len(self.reps)), count=len(self.reps))

    def rep_word(self, i: int) -> str:
        return self.ctx.word_name(self.words[i])


def _dtype(n: int):
    return np.uint16 if n < 1 << 16 else np.int32


def enumerate_cosets(ctx: GroupContext, H: Subgroup, cap: int | None = None,
                     generators: Sequence[Element] | None = None,
                     level: int | None = None) -> CosetTable:
    """Breadth-first enumeration of ``G/H`` (or ``A/H`` for ``generators`` of A).

    Generators are used in the given order, so the table is reproducible.
    """
    cap = coset_cap(cap)
    gens = tuple(ctx.generators if generators is None else generators)
    key = H.coset_key
    mul = ctx.mul
    ident = ctx.identity
    reps = [ident]
    words: list[tuple] = [()]
    parents = [(-1, -1)]
    lookup = {key(ident): 0}
    rows = [[0] * 0 for _ in gens]
    head = 0
    while head < len(reps):
        r = reps[head]
        for s, g in enumerate(gens):
            x = mul(g, r)
            k = key(x)
            j = lookup.get(k)
            if j is None:
                j = len(reps)
                if j >= cap:
                    raise ResourceError("coset enumeration", cap, level)
                lookup[k] = j
                reps.append(x)
                words.append((s,) + words[head])
                parents.append((head, s))
            rows[s].append(j)
        head += 1
    dt = _dtype(len(reps))
    actions = tuple(np.array(row, dtype=dt) for row in rows)
    return CosetTable(ctx=ctx, subgroup=H, generators=gens, reps=reps, words=words,
                      parents=parents, actions=actions, lookup=lookup)


class FiniteQuotient:
    """The permutation group generated by a coset table's generator actions.

    Element 0 is the identity.  Each element ``e`` records the BFS parent and
    generator with ``perm(e) = perm(parent) o perm(generator)``, so the
    witness word of ``e`` is the generator path from the identity, and any
    homomorphism defined on generators can be evaluated on all elements in
    one pass (``evaluate_on``).
    """

    def __init__(self, table: CosetTable, cap: int | None = None, level: int | None = None):
        cap = perm_cap(cap)
        self.table = table
        self.degree = table.index
        gens = table.actions
        self.n_gens = len(gens)
        perms = [np.arange(self.degree, dtype=_dtype(self.degree))]
        index = {perms[0].tobytes(): 0}
        parent = [-1]
        via = [-1]
        step = []
        head = 0
        while head < len(perms):
            p = perms[head]
            row = []
            for s, g in enumerate(gens):
                q = p[g]
                b = q.tobytes()
                j = index.get(b)
                if j is None:
                    j = len(perms)
                    if j >= cap:
                        raise ResourceError("permutation closure", cap, level)
                    index[b] = j
                    perms.append(q)
                    parent.append(head)
                    via.append(s)
                row.append(j)
            step.append(row)
            head += 1
        self.perms = perms
        self._index = index
        self.parent = np.array(parent, dtype=np.int64)
        self.via = np.array(via, dtype=np.int64)
        self.step = np.array(step, dtype=np.int64).reshape(len(perms), self.n_gens)
        self.stabilizer = frozenset(i for i, p in enumerate(perms) if p[0] == 0)

    def __len__(self):
        return len(self.perms)

    @property
    def order(self) -> int:
        return len(self.perms)

    def index_of(self, perm: np.ndarray) -> int:
        return self._index[np.asarray(perm, dtype=self.perms[0].dtype).tobytes()]

    def element_of(self, g: Element) -> int:
        """Index of ``Theta(g)``."""
        return self.index_of(self.table.perm_of(g))

    def witness(self, e: int) -> tuple:
        word = []
        while e > 0:
            word.append(int(self.via[e]))
            e = int(self.parent[e])
        return tuple(reversed(word))

    def witness_element(self, e: int) -> Element:
        return self.table.ctx.evaluate(self.witness(e))

    def compose(self, i: int, j: int) -> int:
        """``i o j``."""
        return self._index[self.perms[i][self.perms[j]].tobytes()]

    def inverse(self, i: int) -> int:
        return self.index_of(np.argsort(self.perms[i]))

    def is_identity(self, i: int) -> bool:
        return i == 0

    def evaluate_on(self, target_step: np.ndarray) -> np.ndarray:
        """Images of all elements under the homomorphism sending generator ``s``
        to right-multiplication column ``s`` of ``target_step`` (another
        quotient's step table)."""
        out = np.zeros(len(self.perms), dtype=np.int64)
        parent, via = self.parent, self.via
        for e in range(1, len(self.perms)):
            out[e] = target_step[out[parent[e]], via[e]]
        return out

    def subgroup_closure(self, elems) -> frozenset:
        gens = [e for e in set(elems) if e != 0]
        seen = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.compose(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def conjugate_set(self, g: int, elems) -> frozenset:
        gi = self.inverse(g)
        return frozenset(self.compose(self.compose(g, e), gi) for e in elems)

    def point_stabilizer(self, point: int) -> frozenset:
        return frozenset(i for i, p in enumerate(self.perms) if p[point] == point)


def permutation_rep(table: CosetTable, cap: int | None = None, level: int | None = None
                    ) -> FiniteQuotient:
    return FiniteQuotient(table, cap=cap, level=level)


def core_membership(fq: FiniteQuotient, g: Element) -> bool:
    """``g`` lies in the normal core, i.e. acts trivially on every coset."""
    perm = fq.table.perm_of(g)
    return bool(np.array_equal(perm, np.arange(len(perm))))


def schreier_generators(table: CosetTable) -> list:
    """Elements ``rep(j)^-1 g rep(i)`` with ``j = g.i``, over all cosets and
    generators; identities and duplicates dropped.  Each fixes the base coset."""
    ctx = table.ctx
    mul, inv = ctx.mul, ctx.inv
    out = []
    seen = set()
    for i, r in enumerate(table.reps):
        for s, g in enumerate(table.generators):
            j = int(table.actions[s][i])
            if table.parents[j] == (i, s):
                continue
            x = mul(mul(inv(table.reps[j]), g), r)
            if x == ctx.identity or x in seen:
                continue
            seen.add(x)
            out.append(x)
    return out
