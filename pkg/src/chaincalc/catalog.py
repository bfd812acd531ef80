"""Built-in example chains and their expected properties.

Each entry builds ``(ctx, chain)`` from integer parameters.  The chain carries
``depth + extra`` levels: quotients are built for the first ``depth``, the
extra levels feed membership-only probes (weak normality, kernels).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

from . import finite as fin
from .chains import (DEFAULT_WINDOW, GroupChain, build_levels, core_criterion,
                     discriminant_verdict, is_normal_form, kernel_core_factorization, kernel_probe,
                     regularity_flags, stability_search, stable_images)
from .cosets import ResourceError
from .groups import (GroupContext, heisenberg, heisenberg_subgroup, lattice_semidirect,
                     lattice_subgroup, row_condition, trivial_action)


class CatalogError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    k = 2
    while k * k <= n:
        if n % k == 0:
            return False
        k += 1
    return True


def check_primes(*ps: int) -> None:
    for p in ps:
        if not is_prime(p):
            raise CatalogError(f"{p} is not prime")
    if len(set(ps)) != len(ps):
        raise CatalogError("primes must be distinct")


# -- group constructors --------------------------------------------------------


def dihedral_group() -> GroupContext:
    """Z x| Z2 with t acting by -1; generators a = (1, e), b = (0, t)."""
    return lattice_semidirect(1, fin.z2(), [((1,),), ((-1,),)], names=["a", "b"])


def swap_group() -> GroupContext:
    """Z^2 x| Z2 with t swapping the coordinates."""
    return lattice_semidirect(2, fin.z2(), [((1, 0), (0, 1)), ((0, 1), (1, 0))],
                              names=["a", "b", "t"])


def generalized_dihedral_group(n: int) -> GroupContext:
    sym = fin.symmetric(n)
    return lattice_semidirect(n, sym, fin.permutation_action(sym))


def product_group(F: fin.FiniteGroup) -> GroupContext:
    return lattice_semidirect(1, F, trivial_action(1, F),
                              names=["a"] + [f"h{k + 1}" for k in range(len(F.generators))])


def point_stabilizer(F: fin.FiniteGroup, point: int) -> frozenset:
    return frozenset(k for k, p in enumerate(F.perms) if p[point] == point)


def finite_subgroup(F: fin.FiniteGroup, name: str) -> frozenset:
    """``A4``/``S4``-style names mean the stabilizer of the last point; otherwise
    a comma-free list of element names in braces."""
    name = name.strip()
    if name.startswith("{"):
        elems = frozenset(F.index_of(tok) for tok in name.strip("{}").split(";") if tok.strip())
        if not F.is_subgroup(elems):
            raise CatalogError(f"{name} is not a subgroup of {F.name}")
        return elems
    if name == "trivial":
        return frozenset({0})
    if F.perms is None:
        raise CatalogError(f"cannot name subgroups of {F.name}")
    degree = len(F.perms[0])
    stab = point_stabilizer(F, degree - 1)
    if len(stab) * degree != F.order or name[1:] != str(degree - 1):
        raise CatalogError(f"{name} is not a point stabilizer of {F.name}")
    return stab


# -- entries -------------------------------------------------------------------


@dataclass
class Claim:
    name: str
    expected: object
    citation: str
    definite: bool = True


@dataclass
class CatalogEntry:
    name: str
    description: str
    default_params: dict
    default_depth: int
    build: Callable
    kernel_gens: Callable
    claims: Callable
    expected_discriminant: str
    aliases: tuple = ()

    def instantiate(self, params: dict | None = None, depth: int | None = None,
                    extra: int = DEFAULT_WINDOW):
        p = dict(self.default_params)
        p.update(params or {})
        depth = self.default_depth if depth is None else depth
        ctx, levels = self.build(p, depth + extra)
        chain = GroupChain(ctx, tuple(levels),
                           {"kind": "parametric", "catalog": self.name, "params": p})
        return ctx, chain


def _dihedral(p, depth):
    ctx = dihedral_group()
    return ctx, [lattice_subgroup(ctx, [[2 ** i]], [0, 1]) for i in range(1, depth + 1)]


def _dihedral_kernel(ctx, p):
    return [((0,), 1)]


def _product(p, depth):
    F = fin.builtin(p["F"])
    K = finite_subgroup(F, p["K"])
    if len(K) in (1, F.order):
        raise CatalogError("K must be a nontrivial proper subgroup")
    r = p["r"]
    if r < 2:
        raise CatalogError("r must be at least 2")
    ctx = product_group(F)
    return ctx, [lattice_subgroup(ctx, [[r ** i]], K) for i in range(1, depth + 1)]


def _product_kernel(ctx, p):
    F = ctx.finite
    K = finite_subgroup(F, p["K"])
    return [((0,), k) for k in F.subgroup_generators(K)]


def _heis_wr(p, depth):
    P, Q = p["p"], p["q"]
    check_primes(P, Q)
    ctx = heisenberg()
    out = []
    for n in range(1, depth + 1):
        M = [[Q * P ** n, P * Q ** n], [P ** (n + 1), Q ** (n + 1)]]
        if not row_condition(M, P):
            raise CatalogError(f"level {n} fails the row condition")
        out.append(heisenberg_subgroup(ctx, M, P))
    return ctx, out


def _heis_wr_kernel(ctx, p):
    return [(0, 0, p["p"])]


def _heis_main6(p, depth):
    P, Q = p["p"], p["q"]
    check_primes(P, Q)
    ctx = heisenberg()
    return ctx, [heisenberg_subgroup(ctx, [[P ** n, 0], [0, Q ** n]], P ** n)
                 for n in range(1, depth + 1)]


def _no_kernel(ctx, p):
    return []


def _swap(p, depth):
    P, Q = p["p"], p["q"]
    check_primes(P, Q)
    ctx = swap_group()
    return ctx, [lattice_subgroup(ctx, [[P ** i, 0], [0, Q ** i]], [0]) for i in range(1, depth + 1)]


def _gen_dihedral(p, depth):
    primes = tuple(p["primes"])
    check_primes(*primes)
    n = len(primes)
    ctx = generalized_dihedral_group(n)
    levels = []
    for i in range(1, depth + 1):
        L = [[primes[r] ** i if r == c else 0 for c in range(n)] for r in range(n)]
        levels.append(lattice_subgroup(ctx, L, [0]))
    return ctx, levels


def _claims_dihedral(p, depth):
    return [
        Claim("indices", [2 ** i for i in range(1, depth + 1)], "expected: |G:G_i| = 2^i"),
        Claim("weaklyNormal", False, "expected: weakly normal = no"),
        Claim("virtuallyRegular", True, "expected: virtually regular = yes"),
        Claim("discriminant", "finite(2)", "expected: D_x finite, isomorphic to K_x = Z2"),
        Claim("kernelFactorization", True, "expected: G_i = K_x C_i"),
        Claim("stable", False, "expected: stable = no"),
    ]


def _claims_product(p, depth):
    F = fin.builtin(p["F"])
    k = len(finite_subgroup(F, p["K"]))
    return [
        Claim("Dsizes", [k] * depth, "expected: G_i/C_i = K x Gamma_i/Gamma_i"),
        Claim("weaklyNormal", True, "expected: weakly normal = yes"),
        Claim("virtuallyRegular", True, "expected: virtually regular = yes"),
        Claim("discriminant", f"finite({k})", "expected: D_x = K"),
        Claim("kernelFactorization", True, "expected: realized by kernel elements"),
        Claim("stable", True, "expected: stable = yes"),
    ]


def _claims_heis_wr(p, depth):
    return [
        Claim("rowCondition", True, "expected: the row divisibility test passes at every level"),
        Claim("weaklyNormal", True, "expected: weakly normal = yes"),
        Claim("virtuallyRegular", True, "expected: virtually regular = yes"),
        Claim("discriminant", ("finiteBetween", 2, p["p"]),
              "expected: D_x finite, nontrivial, cardinality at most p"),
        Claim("stable", None, "open: stable = ?", definite=False),
    ]


def _claims_main6(p, depth):
    return [
        Claim("kernelTrivial", True, "expected: K_x trivial"),
        Claim("weaklyNormal", False, "expected: weakly normal = no"),
        Claim("virtuallyRegular", None, "open: virtually regular = ? (C1 core criterion reported)",
              definite=False),
        Claim("discriminant", ("infinite", p["p"]), "expected: |G_n/P_n| = p^n, D_x infinite"),
        Claim("stable", False, "expected: stable = no"),
    ]


def _claims_swap(p, depth):
    pq = p["p"] * p["q"]
    return [
        Claim("Dsizes", [pq ** i for i in range(1, depth + 1)], "expected: card(G_i/C_i) = p^i q^i"),
        Claim("bondingSurjective", True, "expected: bonding maps surjective"),
        Claim("weaklyNormal", True, "expected: weakly normal = yes"),
        Claim("virtuallyRegular", True, "expected: virtually regular = yes"),
        Claim("discriminant", ("infinite", 2), "expected: D_x infinite"),
        Claim("stable", False, "expected: stable = no"),
    ]


def _claims_gen_dihedral(p, depth):
    return [
        Claim("weaklyNormal", True, "expected: weakly normal = yes"),
        Claim("virtuallyRegular", True, "expected: virtually regular = yes"),
        Claim("discriminant", ("infinite", 2), "expected: D_x infinite"),
        Claim("stable", False, "expected: stable = no"),
    ]


ENTRIES = {
    e.name: e for e in [
        CatalogEntry("dihedral", "infinite dihedral group, G_i = <a^(2^i), b>",
                     {}, 6, _dihedral, _dihedral_kernel, _claims_dihedral, "finite (Z2)",
                     aliases=("ex-RT",)),
        CatalogEntry("product", "F x Z, G_i = K x r^i Z",
                     {"F": "A5", "K": "A4", "r": 3}, 3, _product, _product_kernel,
                     _claims_product, "finite (K)", aliases=("finitediscr",)),
        CatalogEntry("heis-wr", "Heisenberg, Gamma_n = M_n Z^2 x pZ",
                     {"p": 2, "q": 3}, 3, _heis_wr, _heis_wr_kernel, _claims_heis_wr,
                     "finite, nontrivial, at most p", aliases=("eq-wrHeisenberg",)),
        CatalogEntry("heis-main6", "Heisenberg, G_n = A_n Z^2 x p^n Z",
                     {"p": 2, "q": 3}, 3, _heis_main6, _no_kernel, _claims_main6, "infinite",
                     aliases=("main-6",)),
        CatalogEntry("dihedral-swap", "Z^2 x| Z2 (swap), G_i = Gamma_i x {1}",
                     {"p": 2, "q": 3}, 2, _swap, _no_kernel, _claims_swap, "infinite",
                     aliases=("example63",)),
        CatalogEntry("gen-dihedral", "Z^n x| S_n, Gamma_i = diag(p_1^i..p_n^i) Z^n",
                     {"primes": (2, 3, 5)}, 1, _gen_dihedral, _no_kernel, _claims_gen_dihedral,
                     "infinite", aliases=("example63-1",)),
    ]
}

ALIASES = {a: e.name for e in ENTRIES.values() for a in e.aliases}


def get(name: str) -> CatalogEntry:
    key = ALIASES.get(name, name)
    if key not in ENTRIES:
        raise CatalogError(f"unknown catalog entry {name!r}; known: {', '.join(sorted(ENTRIES))}")
    return ENTRIES[key]


def instantiate(name: str, params: dict | None = None, depth: int | None = None,
                extra: int = DEFAULT_WINDOW):
    return get(name).instantiate(params, depth, extra)


# -- regression ----------------------------------------------------------------


@dataclass
class ClaimResult:
    name: str
    expected: object
    observed: object
    status: str  # pass | fail | reported | unevaluated
    citation: str

    def as_dict(self):
        return {"claim": self.name, "expected": plain(self.expected),
                "observed": plain(self.observed), "status": self.status,
                "citation": self.citation}


def plain(x):
    if isinstance(x, tuple):
        return [plain(v) for v in x]
    if isinstance(x, list):
        return [plain(v) for v in x]
    return x


def observe(name: str, params: dict | None = None, depth: int | None = None,
            coset_cap: int | None = None, perm_cap: int | None = None) -> dict:
    entry = get(name)
    p = dict(entry.default_params)
    p.update(params or {})
    depth = entry.default_depth if depth is None else depth
    ctx, chain = entry.instantiate(p, depth)
    levels = build_levels(chain, depth, coset_cap=coset_cap, perm_cap=perm_cap)
    return observe_levels(chain, levels, entry.kernel_gens(ctx, p), coset_cap=coset_cap)


def observe_levels(chain: GroupChain, levels, kernel_gens, coset_cap: int | None = None) -> dict:
    """Everything the claims look at, for a chain whose quotients are built."""
    ctx = chain.ctx
    depth = levels.depth
    stable = stable_images(levels)
    verdict = discriminant_verdict(levels, stable)
    flags = regularity_flags(chain, levels, coset_cap=coset_cap)
    factor = kernel_core_factorization(chain, levels, kernel_gens)
    stab = stability_search(chain, levels)
    obs = {
        "indices": [levels[i].index for i in range(1, depth + 1)],
        "Dsizes": [len(levels[i].D) for i in range(1, depth + 1)],
        "Ssizes": [stable.size(i) for i in range(1, depth + 1)],
        "bondingSurjective": all(levels.image(i, i - 1, levels[i].D) == levels[i - 1].D
                                 for i in range(2, depth + 1)),
        "normalForm": is_normal_form(levels, stable),
        "weaklyNormal": flags.weakly_normal_at is not None,
        "weaklyNormalAt": flags.weakly_normal_at,
        "virtuallyRegular": flags.virtually_regular_witness is not None,
        "coreBase": flags.core_base,
        "coreWitness1": all(core_criterion(levels, i, 1) for i in range(2, depth + 1)),
        "discriminant": verdict,
        "kernelFactorization": all(factor),
        "stable": stab.stable,
        "stability": stab,
        "flags": flags,
        "stableImages": stable,
        "levels": levels,
        "chain": chain,
    }
    if ctx.family == "heisenberg":
        obs["rowCondition"] = all(row_condition(H.lattice, H.m) for H in chain.levels[:depth])
        obs["kernelTrivial"] = not any(
            kernel_probe(chain, (x, y, z), depth).survives
            for x in range(-3, 4) for y in range(-3, 4) for z in range(-3, 4)
            if (x, y, z) != (0, 0, 0))
    return obs


def evaluate_claims(entry: CatalogEntry, p: dict, depth: int, obs: dict) -> list:
    out = []
    for c in entry.claims(p, depth):
        observed, ok = _evaluate(c, obs)
        if not c.definite:
            status = "reported"
        else:
            status = "pass" if ok else "fail"
        out.append(ClaimResult(c.name, c.expected, plain(observed), status, c.citation))
    return out


def _evaluate(claim: Claim, obs: dict):
    v = obs.get(claim.name)
    if claim.name == "discriminant":
        verdict = v
        exp = claim.expected
        if isinstance(exp, str):
            return str(verdict), str(verdict) == exp
        if exp[0] == "finiteBetween":
            ok = verdict.kind == "finite" and exp[1] <= verdict.size <= exp[2]
            return str(verdict), ok
        if exp[0] == "infinite":
            growth = verdict.growth
            ok = verdict.kind == "lowerBound" and all(
                b > a for a, b in zip(growth, growth[1:]))
            return f"{verdict} growth={growth}", ok
    if claim.name == "virtuallyRegular" and not claim.definite:
        return f"witness-C1 result: {'yes' if obs['coreWitness1'] else 'no'}", None
    if claim.name == "stable" and not claim.definite:
        yn = lambda b: "yes" if b else "no"
        return (f"kernel factorization: {yn(obs['kernelFactorization'])}; "
                f"stability search: {yn(obs['stable'])}"), None
    return v, (v == claim.expected if claim.definite else None)


def run_regression(name: str, params: dict | None = None, depth: int | None = None,
                   coset_cap: int | None = None, perm_cap: int | None = None) -> list:
    entry = get(name)
    p = dict(entry.default_params)
    p.update(params or {})
    depth = entry.default_depth if depth is None else depth
    try:
        obs = observe(name, p, depth, coset_cap, perm_cap)
    except ResourceError as exc:
        return [ClaimResult(c.name, c.expected, str(exc), "unevaluated", c.citation)
                for c in entry.claims(p, depth)]
    return evaluate_claims(entry, p, depth, obs)
