"""Group chains: cores, discriminant approximations, normal form, kernels, verdicts.

Everything here is a certificate at finite depth.  A chain ``G_1 > G_2 > ...``
is truncated at ``chain.depth``; permutation quotients ``G/C_i`` are built
only for the first ``depth`` levels (the expensive part), while
membership-only probes (kernels, weak normality) may look at every level the
chain carries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import lattice as lat
from .cosets import (CosetTable, FiniteQuotient, ResourceError, enumerate_cosets,
                     permutation_rep, schreier_generators)
from .groups import (LATTICE, Element, GroupContext, HeisenbergSubgroup,
                     LatticeSubgroup, PredicateSubgroup, Subgroup, SubgroupError,
                     UnrepresentableError, conjugate_subgroup, heisenberg_subgroup,
                     heisenberg_valid, is_subset, lattice_subgroup)

DEFAULT_WINDOW = 2


class ChainError(ValueError):
    """Levels that do not form a properly descending chain."""


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GroupChain:
    ctx: GroupContext
    levels: tuple
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        prev_index = 1
        prev = None
        for i, H in enumerate(self.levels, start=1):
            if H.ctx is not self.ctx:
                raise ChainError(f"level {i} lives in a different group")
            idx = H.index
            if idx <= prev_index:
                raise ChainError(f"level {i} has index {idx}, not larger than {prev_index}")
            if prev is not None and not is_subset(H, prev):
                raise ChainError(f"level {i} is not contained in level {i - 1}")
            prev, prev_index = H, idx

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, i: int) -> Subgroup:
        """``G_i``; level 0 is the whole group."""
        if i == 0:
            from .groups import whole_group
            return whole_group(self.ctx)
        return self.levels[i - 1]

    def truncated(self, depth: int) -> "GroupChain":
        return GroupChain(self.ctx, self.levels[:depth], dict(self.provenance))


def make_chain(ctx: GroupContext, levels: Sequence[Subgroup], **provenance) -> GroupChain:
    return GroupChain(ctx, tuple(levels), provenance or {"kind": "explicit"})


@dataclass(eq=False)
class LevelData:
    i: int
    subgroup: Subgroup
    table: CosetTable
    fq: FiniteQuotient
    D: frozenset
    to_prev: np.ndarray | None = None

    @property
    def index(self) -> int:
        return self.table.index


class ChainLevels(Sequence):
    """Built levels ``0..depth`` with cached bonding maps between quotients."""

    def __init__(self, chain: GroupChain, levels: list):
        self.chain = chain
        self._levels = levels
        self._bonding: dict = {}

    def __getitem__(self, i):
        return self._levels[i]

    def __len__(self):
        return len(self._levels)

    @property
    def depth(self) -> int:
        return len(self._levels) - 1

    def bonding(self, n: int, i: int) -> np.ndarray:
        """``delta^n_i``: element indices of ``G/C_n`` mapped into ``G/C_i``.

        Evaluated by re-running each element's witness word at level ``i``.
        """
        if n < i:
            raise ValueError("bonding maps go from deeper to shallower levels")
        if n == i:
            return np.arange(self._levels[n].fq.order)
        key = (n, i)
        if key not in self._bonding:
            self._bonding[key] = self._levels[n].fq.evaluate_on(self._levels[i].fq.step)
        return self._bonding[key]

    def image(self, n: int, i: int, elems) -> frozenset:
        m = self.bonding(n, i)
        return frozenset(int(m[e]) for e in elems)


def build_levels(chain: GroupChain, depth: int | None = None, coset_cap: int | None = None,
                 perm_cap: int | None = None) -> ChainLevels:
    """Coset tables, quotients ``G/C_i`` and stabilizers ``D_i`` for levels 0..depth."""
    depth = chain.depth if depth is None else depth
    if depth > chain.depth:
        raise PreconditionError(f"chain has only {chain.depth} levels, asked for {depth}")
    out = []
    for i in range(depth + 1):
        H = chain.level(i)
        table = enumerate_cosets(chain.ctx, H, cap=coset_cap, level=i)
        if table.index != H.index:
            raise ChainError(f"level {i}: enumerated {table.index} cosets, expected {H.index}")
        fq = permutation_rep(table, cap=perm_cap, level=i)
        out.append(LevelData(i=i, subgroup=H, table=table, fq=fq, D=fq.stabilizer))
    levels = ChainLevels(chain, out)
    for i in range(1, depth + 1):
        levels[i].to_prev = levels.bonding(i, i - 1)
    return levels


def core_criterion(levels: ChainLevels, i: int, base: int = 1) -> bool:
    """``G_i cap C_base = C_i``, read as: no non-identity element of ``D_i``
    dies in ``G/C_base``."""
    if i <= base:
        return True
    m = levels.bonding(i, base)
    return all(m[e] != 0 for e in levels[i].D if e != 0)


def core_criterion_base(levels: ChainLevels, window: int = DEFAULT_WINDOW) -> int | None:
    """Least ``b`` with ``G_i cap C_b = C_i`` for every built ``i > b``.

    Only bases with at least ``window`` built levels after them count; the
    criterion is vacuous at the deepest level.
    """
    for b in range(1, levels.depth - window + 1):
        if all(core_criterion(levels, i, b) for i in range(b + 1, levels.depth + 1)):
            return b
    return None


def bonding_flags(levels: ChainLevels, i: int) -> tuple[bool, bool]:
    """(surjective, injective) for ``delta^i_{i-1}`` restricted to ``D_i``."""
    img = levels.image(i, i - 1, levels[i].D)
    surjective = img == levels[i - 1].D
    injective = len(img) == len(levels[i].D)
    return surjective, injective


# -- stable images -----------------------------------------------------------


@dataclass
class StableImages:
    """``sets[i]`` is the intersection of ``delta^n_i(D_n)`` over ``i <= n <= probe``."""

    probe_depth: int
    window: int
    sets: list
    history: list
    stabilized: list

    def size(self, i: int) -> int:
        return len(self.sets[i])


def stable_images(levels: ChainLevels, probe_depth: int | None = None,
                  window: int = DEFAULT_WINDOW) -> StableImages:
    probe = levels.depth if probe_depth is None else probe_depth
    if probe > levels.depth:
        raise PreconditionError(f"probe depth {probe} exceeds built depth {levels.depth}")
    sets: list = [frozenset({0})]
    history: list = [[1]]
    stabilized = [True]
    for i in range(1, probe + 1):
        current = levels[i].D
        sizes = [len(current)]
        for n in range(i + 1, probe + 1):
            current = current & levels.image(n, i, levels[n].D)
            sizes.append(len(current))
        sets.append(current)
        history.append(sizes)
        tail = sizes[-(window + 1):]
        stabilized.append(len(sizes) > window and len(set(tail)) == 1)
    return StableImages(probe_depth=probe, window=window, sets=sets, history=history,
                        stabilized=stabilized)


@dataclass
class Verdict:
    kind: str  # "trivial" | "finite" | "lowerBound"
    size: int
    stabilized_at: int | None
    growth: list
    criterion_base: int | None

    def __str__(self):
        if self.kind == "trivial":
            return "trivial"
        if self.kind == "finite":
            return f"finite({self.size})"
        return f"lowerBound({self.size})"

    def as_dict(self):
        return {"kind": self.kind, "size": self.size, "stabilizedAt": self.stabilized_at,
                "growth": list(self.growth), "coreCriterionBase": self.criterion_base}


def discriminant_verdict(levels: ChainLevels, stable: StableImages) -> Verdict:
    """trivial / finite(k) / lowerBound(k) at the probed depth.

    finite(k) needs both a plateau of the stable image sizes at ``k`` from
    some stabilized level on, and a base ``b`` at or before the plateau with
    ``G_i cap C_b = C_i`` at every built level.
    """
    probe = stable.probe_depth
    sizes = [stable.size(i) for i in range(1, probe + 1)]
    base = core_criterion_base(levels, stable.window)
    if all(s == 1 for s in sizes):
        return Verdict("trivial", 1, 1 if sizes else None, sizes, base)
    stab_levels = [i for i in range(1, probe + 1) if stable.stabilized[i]]
    if stab_levels and base is not None:
        k = stable.size(stab_levels[-1])
        start = probe
        while start > 1 and stable.size(start - 1) == k:
            start -= 1
        if all(stable.size(i) == k for i in range(start, probe + 1)) \
                and start <= stab_levels[-1] and base <= start:
            return Verdict("finite", k, start, sizes, base)
    return Verdict("lowerBound", max(sizes), None, sizes, base)


def is_normal_form(levels: ChainLevels, stable: StableImages) -> list:
    """Per level ``i >= 1``: ``S_i = D_i``."""
    return [stable.sets[i] == levels[i].D for i in range(1, stable.probe_depth + 1)]


# -- normal form ---------------------------------------------------------------


def _left_coset_classes(fq: FiniteQuotient, S: frozenset) -> np.ndarray:
    cls = np.full(fq.order, -1, dtype=np.int64)
    nxt = 0
    for x in range(fq.order):
        if cls[x] >= 0:
            continue
        for s in S:
            cls[fq.compose(x, s)] = nxt
        nxt += 1
    return cls


def filtered_subgroup(level: LevelData, S: frozenset) -> PredicateSubgroup:
    """``{g in G_i : Theta_i(g) in S}`` for a subgroup ``S`` of ``D_i``."""
    fq = level.fq
    cls = _left_coset_classes(fq, S)
    home = cls[0]
    H = level.subgroup
    return PredicateSubgroup(
        H.ctx,
        contains=lambda g: H.contains(g) and cls[fq.element_of(g)] == home,
        coset_key=lambda g: int(cls[fq.element_of(g)]),
        description=f"{{g in G_{level.i} : Theta_{level.i}(g) in S_{level.i}}}",
        index=fq.order // len(S),
    )


def canonical_form(H: Subgroup, table: CosetTable | None = None) -> Subgroup:
    """Family-shaped canonical form of a finite-index subgroup given by membership.

    Lattice family: ``L`` is the stabilizer of the base coset under the
    translation subgroup, and each finite element's translation is read off
    the translation orbit.  Heisenberg: the projected lattice and the central
    part, accepted only if they reproduce ``H`` exactly.
    """
    if isinstance(H, (LatticeSubgroup, HeisenbergSubgroup)):
        return H
    ctx = H.ctx
    if table is None:
        table = enumerate_cosets(ctx, H)
    gens = schreier_generators(table)
    if ctx.family == LATTICE:
        n = ctx.rank
        zero = tuple([0] * n)
        units = [tuple(int(r == c) for r in range(n)) for c in range(n)]
        orbit = {0: zero}
        queue = [0]
        vectors = []
        while queue:
            c = queue.pop(0)
            u = orbit[c]
            for e in units:
                w = tuple(a + b for a, b in zip(u, e))
                d = table.locate((w, 0))
                if d in orbit:
                    diff = tuple(a - b for a, b in zip(w, orbit[d]))
                    if any(diff):
                        vectors.append(diff)
                else:
                    orbit[d] = w
                    queue.append(d)
        L = lat.hnf(vectors, n) if vectors else None
        if L is None:
            raise UnrepresentableError("translation stabilizer is not a full lattice", subgroup=H)
        K, trans = [], {}
        for f in range(ctx.finite.order):
            c = table.locate((zero, f))
            if c in orbit:
                K.append(f)
                trans[f] = [-x for x in orbit[c]]
        try:
            canon = lattice_subgroup(ctx, L, K, trans)
        except SubgroupError as exc:
            raise UnrepresentableError(str(exc), subgroup=H) from None
    else:
        cols = [(g[0], g[1]) for g in gens if g[0] or g[1]]
        if not cols:
            raise UnrepresentableError("projection is not a full lattice", subgroup=H)
        try:
            L = lat.hnf(cols, 2)
        except lat.LatticeError:
            raise UnrepresentableError("projection is not a full lattice", subgroup=H) from None
        m = next((z for z in range(1, table.index + 1) if H.contains((0, 0, z))), None)
        if m is None or not heisenberg_valid(L, m):
            raise UnrepresentableError(f"{H.describe()} is not of the form M Z^2 x mZ", subgroup=H)
        canon = heisenberg_subgroup(ctx, L, m)
    if canon.index != table.index or not all(canon.contains(g) for g in gens):
        raise UnrepresentableError(f"{H.describe()} has no canonical form", subgroup=H)
    return canon


def normal_form_transform(chain: GroupChain, levels: ChainLevels, stable: StableImages,
                          ) -> GroupChain:
    """Replace ``G_i`` by ``{g in G_i : Theta_i(g) in S_i}`` so every ``D_i`` equals its stable image.

    Consecutive levels that become equal are merged.
    """
    if stable.probe_depth < levels.depth:
        raise PreconditionError("stable images must be probed through every built level")
    new = []
    for i in range(1, levels.depth + 1):
        S = stable.sets[i]
        if S == levels[i].D:
            H = levels[i].subgroup
        else:
            H = canonical_form(filtered_subgroup(levels[i], S))
        if new and new[-1].index == H.index and is_subset(H, new[-1]):
            continue
        new.append(H)
    prov = dict(chain.provenance)
    prov["normalForm"] = True
    return GroupChain(chain.ctx, tuple(new), prov)


# -- equivalence and conjugation --------------------------------------------


@dataclass
class Equivalence:
    equivalent: bool
    witness: list
    failed_at: tuple | None = None

    def __bool__(self):
        return self.equivalent


def chains_equivalent(a: GroupChain, b: GroupChain, depth: int | None = None) -> Equivalence:
    """Greedy interleaving search.

    For each ``i`` find the least ``j`` with ``A_j <= B_i`` and with
    ``B_j <= A_i``.  A failure only means no interleaving was found within
    ``depth`` levels.
    """
    if a.ctx is not b.ctx:
        raise PreconditionError("chains live in different groups")
    depth = min(a.depth, b.depth) if depth is None else depth
    depth = min(depth, a.depth, b.depth)
    witness = []
    for i in range(1, depth + 1):
        for name, x, y in (("A<=B", a, b), ("B<=A", b, a)):
            target = y.level(i)
            j = next((j for j in range(1, x.depth + 1) if is_subset(x.level(j), target)), None)
            if j is None:
                return Equivalence(False, witness, (name, i))
            witness.append((name, i, j))
    return Equivalence(True, witness)


def conjugate_chain(chain: GroupChain, point_reps: Sequence[Element]) -> GroupChain:
    """``{g_i G_i g_i^-1}`` for a compatible sequence ``g_j G_i = g_i G_i`` (j >= i).

    Missing trailing representatives repeat the last one.
    """
    ctx = chain.ctx
    reps = [ctx.check(g) for g in point_reps]
    if not reps:
        raise PreconditionError("need at least one point representative")
    reps = reps + [reps[-1]] * (chain.depth - len(reps))
    reps = reps[:chain.depth]
    for i in range(chain.depth):
        gi_inv = ctx.inv(reps[i])
        for j in range(i + 1, chain.depth):
            if not chain.levels[i].contains(ctx.mul(gi_inv, reps[j])):
                raise PreconditionError(
                    f"point representatives incompatible at level {i + 1} (with level {j + 1})")
    new = []
    for H, g in zip(chain.levels, reps):
        try:
            new.append(conjugate_subgroup(ctx, H, g))
        except UnrepresentableError as exc:
            new.append(exc.subgroup)
    prov = dict(chain.provenance)
    prov["conjugatedBy"] = [ctx.format(g) for g in reps]
    return GroupChain(ctx, tuple(new), prov)


# -- kernels -----------------------------------------------------------------


@dataclass
class KernelProbe:
    survives: bool
    level: int

    def __str__(self):
        return f"inKernelUpTo({self.level})" if self.survives else f"exitsAt({self.level})"


def kernel_probe(chain: GroupChain, g: Element, max_level: int | None = None) -> KernelProbe:
    g = chain.ctx.check(g)
    top = chain.depth if max_level is None else min(max_level, chain.depth)
    for i in range(1, top + 1):
        if not chain.level(i).contains(g):
            return KernelProbe(False, i)
    return KernelProbe(True, top)


def kernel_core_factorization(chain: GroupChain, levels: ChainLevels, kernel_gens) -> list:
    """Per level: the images of the kernel generators generate all of ``D_i``."""
    gens = [chain.ctx.check(k) for k in kernel_gens]
    for k in gens:
        if not kernel_probe(chain, k).survives:
            raise PreconditionError(f"{chain.ctx.format(k)} is not in the kernel to depth {chain.depth}")
    out = []
    for i in range(1, levels.depth + 1):
        fq = levels[i].fq
        span = fq.subgroup_closure(fq.element_of(k) for k in gens)
        out.append(span == levels[i].D)
    return out


def kernel_in_core(chain: GroupChain, levels: ChainLevels, kernel_gens) -> list:
    """Per level: every kernel generator acts trivially, i.e. the kernel lies in ``C_i``."""
    return [all(levels[i].fq.element_of(k) == 0 for k in kernel_gens)
            for i in range(1, levels.depth + 1)]


# -- regularity --------------------------------------------------------------


class _RelativeCores:
    """Coset tables of ``G_i`` inside ``G_{i0}``, for cores relative to ``G_{i0}``."""

    def __init__(self, chain: GroupChain, coset_cap: int | None = None):
        self.chain = chain
        self.cap = coset_cap
        self._tables: dict = {}

    def table(self, i0: int, i: int) -> CosetTable:
        key = (i0, i)
        if key not in self._tables:
            ambient = self.chain.level(i0)
            gens = None if i0 == 0 else ambient.generators()
            self._tables[key] = enumerate_cosets(self.chain.ctx, self.chain.level(i), cap=self.cap,
                                                 generators=gens, level=i)
        return self._tables[key]

    def in_core(self, i0: int, i: int, j: int) -> bool:
        """``G_j`` lies in the core of ``G_i`` relative to ``G_{i0}``."""
        table = self.table(i0, i)
        H = self.chain.level(i)
        ctx = self.chain.ctx
        for h in self.chain.level(j).generators():
            for r in table.reps:
                if H.coset_key(ctx.mul(h, r)) != H.coset_key(r):
                    return False
        return True

    def regular_from(self, i0: int, top: int) -> bool:
        for i in range(i0, top + 1):
            if not any(self.in_core(i0, i, j) for j in range(i, top + 1)):
                return False
        return True


@dataclass
class RegularityFlags:
    regular: bool
    weakly_normal_at: int | None
    core_base: int | None
    virtually_regular_witness: str | None
    probe_depth: int

    def as_dict(self):
        return {"regularAtDepth": self.regular, "weaklyNormalAtDepth": self.weakly_normal_at,
                "coreCriterionBase": self.core_base,
                "virtuallyRegularWitness": self.virtually_regular_witness,
                "probeDepth": self.probe_depth}


def regularity_flags(chain: GroupChain, levels: ChainLevels, probe_depth: int | None = None,
                     window: int = DEFAULT_WINDOW, coset_cap: int | None = None) -> RegularityFlags:
    """Finite-depth certificates for regularity, weak normality and virtual regularity.

    Regular: every ``G_i`` (``i <= probe``) contains some ``G_j`` normal in G.
    Weakly normal at ``i0``: the same test for the truncated chain inside
    ``G_{i0}``, with cores taken relative to ``G_{i0}``; a certificate needs
    ``i0 + window <= probe`` so at least ``window`` levels back it.
    Core witness: the least ``b`` with ``G_i cap C_b = C_i`` at every built
    level (the restricted chain inside ``C_b`` is then normal).
    """
    probe = chain.depth if probe_depth is None else min(probe_depth, chain.depth)
    rel = _RelativeCores(chain, coset_cap)
    regular = rel.regular_from(0, probe)
    weakly = None
    for i0 in range(0, probe - window + 1):
        if rel.regular_from(i0, probe):
            weakly = i0
            break
    base = core_criterion_base(levels, window)
    if base is not None:
        witness = f"C{base}"
    elif weakly is not None:
        witness = f"G{weakly}"
    else:
        witness = None
    return RegularityFlags(regular=regular, weakly_normal_at=weakly, core_base=base,
                           virtually_regular_witness=witness, probe_depth=probe)


# -- normalizers and rational cores ------------------------------------------


def small_generating_set(fq: FiniteQuotient, S) -> list:
    gens: list = []
    span = frozenset({0})
    for s in sorted(S):
        if s not in span:
            gens.append(s)
            span = fq.subgroup_closure(gens)
            if span == S:
                break
    return gens


def normalizer_index_level(levels: ChainLevels, stable: StableImages, i: int,
                           budget: int = 5_000_000) -> int:
    """Index of the normalizer of ``S_i`` in ``G/C_i``."""
    fq = levels[i].fq
    S = stable.sets[i]
    if len(S) == 1:
        return 1
    gens = small_generating_set(fq, S)
    if fq.order * len(gens) > budget:
        raise ResourceError("normalizer search", budget, i)
    count = 0
    for x in range(fq.order):
        xi = fq.inverse(x)
        if all(fq.compose(fq.compose(x, s), xi) in S for s in gens):
            count += 1
    return fq.order // count


def rational_core(levels: ChainLevels, S: frozenset, i: int) -> frozenset:
    """Intersection of ``Theta_i(k) S Theta_i(k)^-1`` over coset representatives ``k``."""
    lv = levels[i]
    out = S
    for r in lv.table.reps:
        out = out & lv.fq.conjugate_set(lv.fq.element_of(r), S)
        if len(out) == 1:
            break
    return out


def is_normal_in_quotient(levels: ChainLevels, S: frozenset, i: int) -> bool:
    fq = levels[i].fq
    gens = [fq.element_of(g) for g in levels.chain.ctx.generators]
    return all(fq.conjugate_set(g, S) == S for g in gens)


# -- stability ---------------------------------------------------------------


def ball(ctx: GroupContext, radius: int) -> list:
    """Elements of word length <= radius over the generators and their inverses, BFS order."""
    steps = list(ctx.generators) + [ctx.inv(g) for g in ctx.generators]
    seen = {ctx.identity}
    out = [ctx.identity]
    frontier = [ctx.identity]
    for _ in range(radius):
        nxt = []
        for x in frontier:
            for s in steps:
                y = ctx.mul(x, s)
                if y not in seen:
                    seen.add(y)
                    out.append(y)
                    nxt.append(y)
        frontier = nxt
    return out


@dataclass
class StabilityReport:
    stable: bool
    points_checked: int
    pool_size: int
    witness: dict | None
    kernel_sizes: list

    def as_dict(self):
        return {"stableAtProbe": self.stable, "pointsChecked": self.points_checked,
                "poolSize": self.pool_size, "unstableWitness": self.witness}


def stability_search(chain: GroupChain, levels: ChainLevels, radius: int = 4,
                     max_points: int = 128) -> StabilityReport:
    """Look for a basepoint whose discriminant is not represented by its kernel.

    For sampled tree points ``y = g x`` at the deepest built level, kernel
    candidates are the elements of a word-length ball lying in every level of
    the conjugate chain ``g G_j g^-1``; their images must generate the
    stabilizer of ``y`` in each built quotient.  A failure is an instability
    witness for that pool; success is stability up to the probe.
    """
    ctx = chain.ctx
    d = levels.depth
    pool = ball(ctx, radius)
    leaves = levels[d].table.reps
    n = len(leaves)
    if n <= max_points:
        picks = range(n)
    else:
        picks = sorted({(k * n) // max_points for k in range(max_points)})
    sizes = []
    for c in picks:
        g = leaves[c]
        gi = ctx.inv(g)
        survivors = [x for x in pool
                     if all(chain.level(j).contains(ctx.mul(ctx.mul(gi, x), g))
                            for j in range(1, chain.depth + 1))]
        sizes.append(len(survivors))
        for i in range(1, d + 1):
            fq = levels[i].fq
            span = fq.subgroup_closure(fq.element_of(x) for x in survivors)
            if len(span) != len(levels[i].D):
                return StabilityReport(False, len(sizes), len(pool),
                                       {"point": ctx.word_name(levels[d].table.words[c]),
                                        "coset": int(c), "level": i,
                                        "kernelCandidates": len(survivors),
                                        "covered": len(span), "needed": len(levels[i].D)},
                                       sizes)
    return StabilityReport(True, len(sizes), len(pool), None, sizes)
