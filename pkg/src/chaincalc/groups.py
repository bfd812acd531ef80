"""Group backends: lattice semidirect products Z^n x| F and the Heisenberg group.

Elements are plain tuples so they hash and compare cheaply:

* lattice semidirect: ``(v, f)`` with ``v`` an integer tuple of length n and
  ``f`` an index into the finite part's table;
* Heisenberg: ``(x, y, z)``.

Subgroups expose ``contains``, ``coset_key`` and ``generators``.  The coset
key is a canonical label for the left coset ``gH``; coset enumeration never
needs anything else.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Hashable, Sequence

from . import lattice as lat
from .finite import FiniteGroup

LATTICE = "lattice"
HEISENBERG = "heisenberg"

Element = tuple


class GroupError(ValueError):
    """Structural mismatch between an element and its group."""


class SubgroupError(ValueError):
    """Data that does not describe a subgroup."""


class UnrepresentableError(ValueError):
    """A subgroup exists but has no canonical form in the family's shape.

    ``subgroup`` carries an exact membership-based stand-in.
    """

    def __init__(self, message, subgroup=None):
        super().__init__(message)
        self.subgroup = subgroup

    @property
    def predicate(self):
        return None if self.subgroup is None else self.subgroup.contains


@dataclass(frozen=True, eq=False)
class GroupContext:
    family: str
    rank: int
    generators: tuple
    generator_names: tuple[str, ...]
    finite: FiniteGroup | None = None
    action: tuple | None = None
    identity: Element = field(init=False)

    def __post_init__(self):
        if self.family == LATTICE:
            if self.finite is None or self.action is None:
                raise GroupError("lattice semidirect product needs a finite part and an action")
            if len(self.action) != self.finite.order:
                raise GroupError("need one action matrix per finite element")
            n = self.rank
            for f, a in enumerate(self.action):
                if len(a) != n or any(len(row) != n for row in a):
                    raise GroupError(f"action matrix for {self.finite.names[f]} is not {n}x{n}")
                if abs(lat.int_det(a)) != 1:
                    raise GroupError(f"action matrix for {self.finite.names[f]} is not unimodular")
            for f, g in itertools.product(range(self.finite.order), repeat=2):
                if lat.mat_mul(self.action[f], self.action[g]) != self.action[self.finite.mul(f, g)]:
                    raise GroupError("action is not a homomorphism "
                                     f"at ({self.finite.names[f]}, {self.finite.names[g]})")
            ident = (tuple([0] * n), 0)
        elif self.family == HEISENBERG:
            if self.rank != 3:
                raise GroupError("Heisenberg elements are triples")
            ident = (0, 0, 0)
        else:
            raise GroupError(f"unknown family {self.family!r}")
        if len(self.generator_names) != len(self.generators):
            raise GroupError("one name per generator")
        object.__setattr__(self, "identity", ident)
        for g in self.generators:
            self.check(g)

    # -- element arithmetic -------------------------------------------------

    def mul(self, g: Element, h: Element) -> Element:
        if self.family == HEISENBERG:
            return (g[0] + h[0], g[1] + h[1], g[2] + h[2] + g[0] * h[1])
        v, f = g
        w, k = h
        a = self.action[f]
        if f == 0:
            return (tuple(x + y for x, y in zip(v, w)), k)
        return (tuple(v[r] + sum(a[r][c] * w[c] for c in range(len(w))) for r in range(len(v))),
                self.finite.table[f][k])

    def inv(self, g: Element) -> Element:
        if self.family == HEISENBERG:
            x, y, z = g
            return (-x, -y, -z + x * y)
        v, f = g
        fi = self.finite.inverses[f]
        return (tuple(-x for x in lat.mat_vec(self.action[fi], v)), fi)

    def conj(self, g: Element, h: Element) -> Element:
        """``g h g^-1``."""
        return self.mul(self.mul(g, h), self.inv(g))

    def power(self, g: Element, k: int) -> Element:
        base = g if k >= 0 else self.inv(g)
        out = self.identity
        k = abs(k)
        while k:
            if k & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            k >>= 1
        return out

    def check(self, g) -> Element:
        if not isinstance(g, tuple):
            raise GroupError(f"{g!r} is not a group element")
        if self.family == HEISENBERG:
            if len(g) != 3 or not all(isinstance(c, int) for c in g):
                raise GroupError(f"{g!r} is not a Heisenberg element (x, y, z)")
            return g
        if len(g) != 2 or not isinstance(g[0], tuple) or not isinstance(g[1], int):
            raise GroupError(f"{g!r} is not a (vector, finite index) element")
        if len(g[0]) != self.rank or not all(isinstance(c, int) for c in g[0]):
            raise GroupError(f"{g!r} has the wrong lattice rank (expected {self.rank})")
        if not 0 <= g[1] < self.finite.order:
            raise GroupError(f"{g!r} has an unknown finite part")
        return g

    def evaluate(self, word: Sequence[int]) -> Element:
        """Element of a word over generator indices; ``~i`` (negative-1-offset) means inverse."""
        out = self.identity
        for s in word:
            g = self.generators[s] if s >= 0 else self.inv(self.generators[~s])
            out = self.mul(out, g)
        return out

    def word_name(self, word: Sequence[int]) -> str:
        if not word:
            return "e"
        parts = []
        for s, run in itertools.groupby(word):
            k = len(list(run)) * (1 if s >= 0 else -1)
            name = self.generator_names[s if s >= 0 else ~s]
            parts.append(name if k == 1 else f"{name}^{k}")
        return ".".join(parts)

    def finite_name(self, f: int) -> str:
        return self.finite.names[f]

    def format(self, g: Element) -> str:
        if self.family == HEISENBERG:
            return "(%d,%d,%d)" % g
        v, f = g
        return "(" + ",".join(str(x) for x in v) + ";" + self.finite.names[f] + ")"

    def __repr__(self):
        if self.family == HEISENBERG:
            return "GroupContext(heisenberg)"
        return f"GroupContext(Z^{self.rank} x| {self.finite.name})"


def lattice_semidirect(rank: int, finite: FiniteGroup, action, names: Sequence[str] | None = None,
                       ) -> GroupContext:
    """Z^rank x| finite, generated by the unit translations and the finite generators."""
    action = tuple(tuple(tuple(int(x) for x in row) for row in a) for a in action)
    gens = [(tuple(int(r == c) for r in range(rank)), 0) for c in range(rank)]
    gens += [(tuple([0] * rank), f) for f in finite.generators]
    if names is None:
        names = [f"a{c + 1}" if rank > 1 else "a" for c in range(rank)]
        names += [finite.names[f] for f in finite.generators]
    return GroupContext(family=LATTICE, rank=rank, generators=tuple(gens),
                        generator_names=tuple(names), finite=finite, action=action)


def heisenberg(names: Sequence[str] = ("x", "y")) -> GroupContext:
    return GroupContext(family=HEISENBERG, rank=3, generators=((1, 0, 0), (0, 1, 0)),
                        generator_names=tuple(names))


def trivial_action(rank: int, finite: FiniteGroup):
    return tuple(lat.identity(rank) for _ in range(finite.order))


def multiply(ctx: GroupContext, g: Element, h: Element) -> Element:
    return ctx.mul(ctx.check(g), ctx.check(h))


def inverse(ctx: GroupContext, g: Element) -> Element:
    return ctx.inv(ctx.check(g))


# -- subgroups ---------------------------------------------------------------


class Subgroup:
    """Common surface of every subgroup representation."""

    ctx: GroupContext

    def contains(self, g: Element) -> bool:
        raise NotImplementedError

    def coset_key(self, g: Element) -> Hashable:
        raise NotImplementedError

    def generators(self) -> tuple:
        raise NotImplementedError

    @property
    def index(self) -> int:
        raise NotImplementedError

    def describe(self) -> str:
        return repr(self)


@dataclass(frozen=True, eq=False)
class LatticeSubgroup(Subgroup):
    """``{(v_k + L Z^n, k) : k in K}`` inside ``Z^n x| F``.

    ``lattice`` is in column HNF and the translations are reduced modulo it,
    so equal subgroups compare equal field by field.
    """

    ctx: GroupContext
    lattice: lat.Matrix
    finite_part: frozenset
    translations: tuple  # sorted ((k, v_k), ...)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        ctx = self.ctx
        if ctx.family != LATTICE:
            raise SubgroupError("lattice subgroup needs a lattice semidirect context")
        fg = ctx.finite
        if not fg.is_subgroup(self.finite_part):
            raise SubgroupError("finite part is not a subgroup of "
                                + fg.name)
        trans = dict(self.translations)
        if set(trans) != set(self.finite_part):
            raise SubgroupError("need exactly one translation per finite-part element")
        L = self.lattice
        for k in self.finite_part:
            if not lat.sublattice(lat.mat_mul(ctx.action[k], L), L):
                raise SubgroupError(f"lattice is not invariant under {fg.names[k]}")
        if any(trans[0]):
            raise SubgroupError("translation of the identity must lie in the lattice")
        for k, k2 in itertools.product(self.finite_part, repeat=2):
            lhs = trans[fg.mul(k, k2)]
            rhs = lat.reduce([a + b for a, b in zip(trans[k], lat.mat_vec(ctx.action[k], trans[k2]))], L)
            if lhs != rhs:
                raise SubgroupError("translations are not closed under multiplication at "
                                    f"({fg.names[k]}, {fg.names[k2]})")
        self._prepare_keys()

    def _prepare_keys(self):
        ctx, fg = self.ctx, self.ctx.finite
        trans = dict(self.translations)
        rep = {}
        shifted = {}
        offset = {}
        for f in range(fg.order):
            f0 = min(fg.mul(f, k) for k in self.finite_part)
            k = fg.mul(fg.inv(f), f0)
            rep[f] = f0
            offset[f] = lat.mat_vec(ctx.action[f], trans[k])
            if f0 not in shifted:
                shifted[f0] = lat.hnf(lat.columns(lat.mat_mul(ctx.action[f0], self.lattice)), ctx.rank)
        self._cache.update(rep=rep, shifted=shifted, offset=offset, trans=trans)

    def __eq__(self, other):
        return (isinstance(other, LatticeSubgroup) and other.ctx is self.ctx
                and other.lattice == self.lattice and other.finite_part == self.finite_part
                and other.translations == self.translations)

    def __hash__(self):
        return hash((self.lattice, self.finite_part, self.translations))

    def contains(self, g):
        v, f = g
        t = self._cache["trans"].get(f)
        if t is None:
            return False
        return lat.contains(self.lattice, [a - b for a, b in zip(v, t)])

    def coset_key(self, g):
        v, f = g
        c = self._cache
        f0 = c["rep"][f]
        off = c["offset"][f]
        return (f0, lat.reduce([a + b for a, b in zip(v, off)], c["shifted"][f0]))

    def translation(self, k: int):
        return self._cache["trans"][k]

    def generators(self):
        n = self.ctx.rank
        out = [(col, 0) for col in map(tuple, lat.columns(self.lattice))]
        trans = self._cache["trans"]
        for k in self.ctx.finite.subgroup_generators(self.finite_part):
            out.append((trans[k], k))
        assert all(len(v) == n for v, _ in out)
        return tuple(out)

    @property
    def index(self):
        return lat.determinant(self.lattice) * self.ctx.finite.order // len(self.finite_part)

    def describe(self):
        fg = self.ctx.finite
        ks = ",".join(fg.names[k] for k in sorted(self.finite_part))
        tr = ", ".join(f"{fg.names[k]}->{list(v)}" for k, v in self.translations if any(v))
        return f"L={[list(r) for r in self.lattice]} K={{{ks}}}" + (f" v: {tr}" if tr else "")

    def __repr__(self):
        return f"LatticeSubgroup({self.describe()})"


def lattice_subgroup(ctx: GroupContext, lattice_gens, finite_part, translations=None) -> LatticeSubgroup:
    """Build and canonicalize a lattice-family subgroup.

    ``lattice_gens`` is a square matrix whose columns span L (or any list of
    spanning column vectors given as a matrix); ``translations`` maps finite
    indices to vectors (missing entries default to zero).
    """
    n = ctx.rank
    try:
        L = lat.hnf(lat.columns(lattice_gens), n)
    except lat.LatticeError as exc:
        raise SubgroupError(f"lattice part: {exc}") from None
    K = frozenset(int(k) for k in finite_part)
    trans = dict(translations or {})
    for k in trans:
        if k not in K:
            raise SubgroupError(f"translation given for {ctx.finite.names[k]} outside the finite part")
    canon = tuple(sorted((k, lat.reduce(trans.get(k, [0] * n), L)) for k in K))
    return LatticeSubgroup(ctx, L, K, canon)


def heisenberg_valid(M: Sequence[Sequence[int]], m: int) -> bool:
    """Exact test that ``M Z^2 x mZ`` is closed under the Heisenberg product.

    Closure needs ``m | x * y'`` for all lattice vectors (x, y), (x', y');
    the twist is bilinear, so basis columns suffice.
    """
    cols = lat.columns(M)
    return m > 0 and all((c1[0] * c2[1]) % m == 0 for c1 in cols for c2 in cols)


def row_condition(M: Sequence[Sequence[int]], m: int) -> bool:
    """``m`` divides both entries of some row of ``M`` (sufficient for a subgroup)."""
    return any(all(x % m == 0 for x in row) for row in M)


@dataclass(frozen=True, eq=False)
class HeisenbergSubgroup(Subgroup):
    """``M Z^2 x mZ`` with ``M`` in column HNF."""

    ctx: GroupContext
    lattice: lat.Matrix
    m: int

    def __post_init__(self):
        if self.ctx.family != HEISENBERG:
            raise SubgroupError("Heisenberg subgroup needs the Heisenberg context")
        if not heisenberg_valid(self.lattice, self.m):
            raise SubgroupError(f"M Z^2 x {self.m}Z with M={[list(r) for r in self.lattice]} "
                                "is not a subgroup")

    def __eq__(self, other):
        return (isinstance(other, HeisenbergSubgroup) and other.lattice == self.lattice
                and other.m == self.m)

    def __hash__(self):
        return hash((self.lattice, self.m))

    def contains(self, g):
        x, y, z = g
        return z % self.m == 0 and lat.contains(self.lattice, (x, y))

    def coset_key(self, g):
        x, y, z = g
        x0, y0 = lat.reduce((x, y), self.lattice)
        return (x0, y0, (z - x0 * (y - y0)) % self.m)

    def generators(self):
        out = [(c[0], c[1], 0) for c in lat.columns(self.lattice)]
        out.append((0, 0, self.m))
        return tuple(out)

    @property
    def index(self):
        return lat.determinant(self.lattice) * self.m

    def describe(self):
        return f"M={[list(r) for r in self.lattice]} m={self.m}"

    def __repr__(self):
        return f"HeisenbergSubgroup({self.describe()})"


def heisenberg_subgroup(ctx: GroupContext, M, m: int) -> HeisenbergSubgroup:
    if m <= 0:
        raise SubgroupError("m must be positive")
    try:
        L = lat.hnf(lat.columns(M), 2)
    except lat.LatticeError as exc:
        raise SubgroupError(f"matrix part: {exc}") from None
    return HeisenbergSubgroup(ctx, L, int(m))


def whole_group(ctx: GroupContext) -> Subgroup:
    if ctx.family == HEISENBERG:
        return heisenberg_subgroup(ctx, lat.identity(2), 1)
    return lattice_subgroup(ctx, lat.identity(ctx.rank), range(ctx.finite.order))


class PredicateSubgroup(Subgroup):
    """A finite-index subgroup known only through membership and coset labels.

    Used for conjugates and filtered subgroups that leave the family's
    canonical shape.  Generators are produced lazily from a coset table.
    """

    def __init__(self, ctx: GroupContext, contains: Callable, coset_key: Callable,
                 description: str, index: int | None = None, generators=None):
        self.ctx = ctx
        self._contains = contains
        self._key = coset_key
        self._description = description
        self._index = index
        self._generators = None if generators is None else tuple(generators)

    def contains(self, g):
        return self._contains(g)

    def coset_key(self, g):
        return self._key(g)

    def generators(self):
        if self._generators is None:
            from .cosets import enumerate_cosets, schreier_generators
            self._generators = tuple(schreier_generators(enumerate_cosets(self.ctx, self)))
        return self._generators

    @property
    def index(self):
        if self._index is None:
            from .cosets import enumerate_cosets
            self._index = len(enumerate_cosets(self.ctx, self).reps)
        return self._index

    def describe(self):
        return self._description

    def __repr__(self):
        return f"PredicateSubgroup({self._description})"


def conjugate_predicate(H: Subgroup, g: Element) -> PredicateSubgroup:
    """Exact ``g H g^-1`` through membership of ``g^-1 x g`` in ``H``."""
    ctx = H.ctx
    gi = ctx.inv(g)
    return PredicateSubgroup(
        ctx,
        contains=lambda x: H.contains(ctx.mul(ctx.mul(gi, x), g)),
        coset_key=lambda x: H.coset_key(ctx.mul(x, g)),
        description=f"{ctx.format(g)} ({H.describe()}) {ctx.format(g)}^-1",
        index=H.index,
    )


def contains(ctx: GroupContext, H: Subgroup, g: Element) -> bool:
    return H.contains(ctx.check(g))


def subgroup_generators(ctx: GroupContext, H: Subgroup) -> list:
    return list(H.generators())


def conjugate_subgroup(ctx: GroupContext, H: Subgroup, g: Element) -> Subgroup:
    """Canonical form of ``g H g^-1``.

    Raises UnrepresentableError (carrying an exact predicate stand-in) when
    the conjugate has no canonical form in the family's shape.
    """
    g = ctx.check(g)
    if isinstance(H, LatticeSubgroup):
        fg = ctx.finite
        w, f = g
        A = ctx.action
        fi = fg.inv(f)
        lattice_cols = lat.columns(lat.mat_mul(A[f], H.lattice))
        K = [fg.mul(fg.mul(f, k), fi) for k in H.finite_part]
        trans = {}
        for k in H.finite_part:
            kk = fg.mul(fg.mul(f, k), fi)
            a = lat.mat_vec(A[f], H.translation(k))
            b = lat.mat_vec(A[kk], w)
            trans[kk] = [w[r] + a[r] - b[r] for r in range(ctx.rank)]
        return lattice_subgroup(ctx, lat.from_columns(lattice_cols, ctx.rank), K, trans)
    if isinstance(H, HeisenbergSubgroup):
        a, b, _ = g
        cols = lat.columns(H.lattice)
        # g (x,y,z) g^-1 = (x, y, z + a*y - b*x)
        if all((a * c[1] - b * c[0]) % H.m == 0 for c in cols):
            return H
        raise UnrepresentableError(
            f"conjugate of {H.describe()} by {ctx.format(g)} is not of the form M Z^2 x mZ",
            subgroup=conjugate_predicate(H, g))
    return conjugate_predicate(H, g)


def is_subset(A: Subgroup, B: Subgroup) -> bool:
    """``A`` contained in ``B``, checked on generators of ``A``."""
    return all(B.contains(h) for h in A.generators())
