"""Shared fixtures-by-cache and the brute-force oracles used across tests."""

from __future__ import annotations

import functools
import random

from chaincalc import catalog
from chaincalc.chains import build_levels, stable_images


@functools.lru_cache(maxsize=None)
def built(name: str, depth: int | None = None):
    """(ctx, chain, levels) for a catalog entry with default parameters."""
    entry = catalog.get(name)
    depth = entry.default_depth if depth is None else depth
    ctx, chain = entry.instantiate(depth=depth)
    return ctx, chain, build_levels(chain, depth)


@functools.lru_cache(maxsize=None)
def observed(name: str):
    return catalog.observe(name)


def random_element(ctx, rng: random.Random, length: int = 8):
    word = [rng.choice(range(len(ctx.generators))) for _ in range(length)]
    word = [s if rng.random() < 0.5 else ~s for s in word]
    return ctx.evaluate(word)


# -- oracles -------------------------------------------------------------------
#
# These deliberately avoid FiniteQuotient and bonding maps: cosets are found by
# their own search over coset keys, and quotient elements are identified by
# what they do to every coset.


def coset_reps(ctx, H):
    """Left coset representatives of H, found by a plain search over keys."""
    key = H.coset_key
    reps = {key(ctx.identity): ctx.identity}
    todo = [ctx.identity]
    while todo:
        g = todo.pop()
        for s in ctx.generators:
            for x in (ctx.mul(s, g), ctx.mul(ctx.inv(s), g)):
                k = key(x)
                if k not in reps:
                    reps[k] = x
                    todo.append(x)
    return list(reps.values())


def in_core_by_conjugates(ctx, H, reps, g) -> bool:
    """g lies in every conjugate r H r^-1."""
    return all(H.contains(ctx.mul(ctx.mul(ctx.inv(r), g), r)) for r in reps)


def signature(ctx, H, reps, g) -> frozenset:
    """The permutation of G/H induced by g, as pairs of coset keys."""
    key = H.coset_key
    return frozenset((key(r), key(ctx.mul(g, r))) for r in reps)


@functools.lru_cache(maxsize=None)
def quotient_by_search(ctx, H):
    """All elements of G/core(H) as signatures, each with one group element."""
    reps = coset_reps(ctx, H)
    ident = signature(ctx, H, reps, ctx.identity)
    found = {ident: ctx.identity}
    todo = [ctx.identity]
    while todo:
        g = todo.pop()
        for s in ctx.generators:
            x = ctx.mul(g, s)
            sig = signature(ctx, H, reps, x)
            if sig not in found:
                found[sig] = x
                todo.append(x)
    return reps, found


def stabilizer_by_search(ctx, H):
    """Signatures of G_i/C_i, with a group element for each."""
    _, found = quotient_by_search(ctx, H)
    return {sig: g for sig, g in found.items() if H.contains(g)}


def stable_by_search(ctx, chain, i: int, probe: int) -> set:
    """Level-i signatures of the intersection of images of D_n, i <= n <= probe."""
    Hi = chain.level(i)
    reps_i = coset_reps(ctx, Hi)
    out = None
    for n in range(i, probe + 1):
        D_n = stabilizer_by_search(ctx, chain.level(n))
        img = {signature(ctx, Hi, reps_i, g) for g in D_n.values()}
        out = img if out is None else out & img
    return out


def library_signatures(levels, i: int, elems) -> set:
    """Level-i quotient elements of the library, rewritten as oracle signatures."""
    lv = levels[i]
    key = lv.subgroup.coset_key
    reps = lv.table.reps
    out = set()
    for e in elems:
        p = lv.fq.perms[e]
        out.add(frozenset((key(reps[c]), key(reps[int(p[c])])) for c in range(len(reps))))
    return out


def library_stable(name: str, probe: int):
    ctx, chain, levels = built(name, probe)
    return stable_images(levels, probe)
