"""Explicit multiplication tables for the finite parts of semidirect products."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class FiniteGroupError(ValueError):
    pass


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its Cayley table; element 0 is the identity.

    ``perms`` is populated when the group was built from permutations, and is
    what ``permutation_action`` uses to build coordinate-permuting matrices.
    """

    name: str
    names: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]
    generators: tuple[int, ...]
    perms: tuple[tuple[int, ...], ...] | None = None
    inverses: tuple[int, ...] = field(init=False)

    def __post_init__(self):
        n = len(self.table)
        if len(self.names) != n or any(len(row) != n for row in self.table):
            raise FiniteGroupError(f"{self.name}: table is not square")
        if any(self.table[0][x] != x or self.table[x][0] != x for x in range(n)):
            raise FiniteGroupError(f"{self.name}: element 0 is not the identity")
        inv = []
        for x in range(n):
            row = self.table[x]
            if sorted(row) != list(range(n)):
                raise FiniteGroupError(f"{self.name}: row {x} is not a permutation")
            inv.append(row.index(0))
        t = self.table
        for x, y, z in itertools.product(range(n), repeat=3):
            if t[t[x][y]][z] != t[x][t[y][z]]:
                raise FiniteGroupError(f"{self.name}: not associative at {(x, y, z)}")
        object.__setattr__(self, "inverses", tuple(inv))
        if self.closure(self.generators) != frozenset(range(n)):
            raise FiniteGroupError(f"{self.name}: generators do not generate the group")

    @property
    def order(self) -> int:
        return len(self.table)

    def mul(self, x: int, y: int) -> int:
        return self.table[x][y]

    def inv(self, x: int) -> int:
        return self.inverses[x]

    def closure(self, elems) -> frozenset[int]:
        seen = {0}
        frontier = [0]
        gens = list(elems)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.table[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def is_subgroup(self, elems) -> bool:
        s = set(elems)
        return 0 in s and all(self.table[x][y] in s for x in s for y in s)

    def subgroup_generators(self, elems) -> tuple[int, ...]:
        """Greedy generating set of the subgroup ``elems`` (ascending order)."""
        gens: list[int] = []
        span = frozenset({0})
        for x in sorted(elems):
            if x not in span:
                gens.append(x)
                span = self.closure(gens)
        return tuple(gens)

    def index_of(self, name: str) -> int:
        key = normalize_name(name)
        for i, nm in enumerate(self.names):
            if normalize_name(nm) == key:
                return i
        if self.perms is not None and key.startswith("("):
            perm = parse_cycles(key, len(self.perms[0]))
            if perm in self.perms:
                return self.perms.index(perm)
        if key in ("e", "1", "()"):
            return 0
        raise FiniteGroupError(f"{self.name}: unknown element {name!r}")


def normalize_name(name: str) -> str:
    return "".join(name.split())


def compose(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[int, ...]:
    """``p o q``: apply ``q`` first."""
    return tuple(p[i] for i in q)


def parse_cycles(text: str, degree: int) -> tuple[int, ...]:
    """Parse cycle notation over points 1..degree, e.g. ``(1,2,3)(4,5)``."""
    img = list(range(degree))
    text = normalize_name(text)
    if text in ("", "()", "e"):
        return tuple(img)
    cycles = []
    for chunk in text.split(")"):
        if not chunk:
            continue
        if not chunk.startswith("("):
            raise FiniteGroupError(f"bad cycle notation {text!r}")
        body = chunk[1:]
        pts = [int(tok) - 1 for tok in body.split(",")] if "," in body else [int(ch) - 1 for ch in body]
        if any(p < 0 or p >= degree for p in pts) or len(set(pts)) != len(pts):
            raise FiniteGroupError(f"bad cycle {chunk + ')'!r} for degree {degree}")
        cycles.append(pts)
    # rightmost cycle acts first
    for pts in reversed(cycles):
        step = {pts[k]: pts[(k + 1) % len(pts)] for k in range(len(pts))}
        img = [step.get(x, x) for x in img]
    return tuple(img)


def cycle_name(p: tuple[int, ...]) -> str:
    seen = set()
    out = []
    for start in range(len(p)):
        if start in seen or p[start] == start:
            continue
        cyc = [start]
        seen.add(start)
        x = p[start]
        while x != start:
            cyc.append(x)
            seen.add(x)
            x = p[x]
        out.append("(" + ",".join(str(c + 1) for c in cyc) + ")")
    return "".join(out) or "e"


def from_permutations(name: str, gens: list[tuple[int, ...]],
                      names: dict[tuple[int, ...], str] | None = None) -> FiniteGroup:
    degree = len(gens[0])
    ident = tuple(range(degree))
    elems = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in elems:
                    elems.add(y)
                    nxt.append(y)
        frontier = nxt
    ordered = [ident] + sorted(elems - {ident})
    pos = {p: i for i, p in enumerate(ordered)}
    table = tuple(tuple(pos[compose(x, y)] for y in ordered) for x in ordered)
    labels = tuple((names or {}).get(p) or cycle_name(p) for p in ordered)
    return FiniteGroup(name=name, names=labels, table=table,
                       generators=tuple(pos[g] for g in gens), perms=tuple(ordered))


def symmetric(n: int) -> FiniteGroup:
    if n == 1:
        return trivial()
    if n == 2:
        return from_permutations("S2", [(1, 0)])
    return from_permutations(f"S{n}", [parse_cycles("(1,2)", n),
                                       parse_cycles("(" + ",".join(str(k) for k in range(1, n + 1)) + ")", n)])


def alternating(n: int) -> FiniteGroup:
    if n < 3:
        return trivial()
    gens = [parse_cycles(f"(1,2,{k})", n) for k in range(3, n + 1)]
    return from_permutations(f"A{n}", gens)


def cyclic(n: int) -> FiniteGroup:
    if n == 1:
        return trivial()
    g = tuple((k + 1) % n for k in range(n))
    return from_permutations(f"Z{n}", [g])


def z2() -> FiniteGroup:
    return FiniteGroup(name="Z2", names=("e", "t"), table=((0, 1), (1, 0)),
                       generators=(1,), perms=((0, 1), (1, 0)))


def trivial() -> FiniteGroup:
    return FiniteGroup(name="1", names=("e",), table=((0,),), generators=(), perms=((0,),))


def builtin(name: str) -> FiniteGroup:
    key = name.strip()
    if key in ("1", "trivial"):
        return trivial()
    if key == "Z2":
        return z2()
    kind, digits = key[0], key[1:]
    if digits.isdigit():
        n = int(digits)
        if kind == "S" and 1 <= n <= 5:
            return symmetric(n)
        if kind == "A" and 1 <= n <= 5:
            return alternating(n)
        if kind == "Z" and 1 <= n <= 60:
            return cyclic(n)
    raise FiniteGroupError(f"unknown builtin finite group {name!r}")


def permutation_action(group: FiniteGroup) -> tuple[tuple[tuple[int, ...], ...], ...]:
    """Permutation matrices ``A(f) e_j = e_{f(j)}``; a homomorphism for ``compose``."""
    if group.perms is None:
        raise FiniteGroupError(f"{group.name} has no permutation realization")
    out = []
    for p in group.perms:
        n = len(p)
        out.append(tuple(tuple(int(p[c] == r) for c in range(n)) for r in range(n)))
    return tuple(out)
