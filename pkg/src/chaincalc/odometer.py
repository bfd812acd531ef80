"""The action of G on the coset tree: finite-depth points, coding and export.

A point at depth ``d`` is a path ``(c_1, ..., c_d)`` of coset indices, one
per level, read off the coset tables of a built chain.  Deeper paths are
finer points; nothing here ever looks at an infinite sequence.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .chains import ChainLevels, PreconditionError
from .groups import Element

TREE_FORMAT = "chaincalc-tree/1"


@dataclass(frozen=True)
class TreePoint:
    path: tuple

    @property
    def depth(self) -> int:
        return len(self.path)

    def truncate(self, depth: int) -> "TreePoint":
        return TreePoint(self.path[:depth])


def basepoint(depth: int) -> TreePoint:
    return TreePoint((0,) * depth)


def point_of(levels: ChainLevels, g: Element, depth: int | None = None) -> TreePoint:
    """``g x``: the path of cosets ``g G_i``."""
    depth = levels.depth if depth is None else depth
    _check_depth(levels, depth)
    return TreePoint(tuple(levels[i].table.locate(g) for i in range(1, depth + 1)))


def _check_depth(levels: ChainLevels, depth: int):
    if depth < 0 or depth > levels.depth:
        raise PreconditionError(f"depth {depth} outside the built levels 0..{levels.depth}")


def incompatibility(levels: ChainLevels, p: TreePoint) -> int | None:
    """First level ``i`` whose coset does not contain the next level's coset, else None."""
    _check_depth(levels, p.depth)
    ctx = levels.chain.ctx
    for i, c in enumerate(p.path, start=1):
        if not 0 <= c < levels[i].index:
            return i
        if i < p.depth:
            tab, nxt = levels[i].table, levels[i + 1].table
            x = ctx.mul(ctx.inv(tab.reps[c]), nxt.reps[p.path[i]])
            if not levels[i].subgroup.contains(x):
                return i
    return None


def is_compatible(levels: ChainLevels, p: TreePoint) -> bool:
    return incompatibility(levels, p) is None


def _require(levels, p):
    bad = incompatibility(levels, p)
    if bad is not None:
        raise PreconditionError(f"point {list(p.path)} is not a coset path (breaks at level {bad})")


def act(levels: ChainLevels, g: Element, p: TreePoint) -> TreePoint:
    """``g . (c_i) = (g c_i)`` level by level."""
    _require(levels, p)
    g = levels.chain.ctx.check(g)
    return TreePoint(tuple(levels[i].table.act(g, c) for i, c in enumerate(p.path, start=1)))


@dataclass
class CodingTrace:
    point: TreePoint
    level: int
    code: dict = field(default_factory=dict)  # word text -> coset index

    def agrees_with(self, other: "CodingTrace") -> bool:
        return self.level == other.level and self.code == other.code


def orbit_coding(levels: ChainLevels, p: TreePoint, sample_words: Iterable[Sequence[int]],
                 level: int | None = None) -> CodingTrace:
    """For each sample word ``w``, the level-``i`` coset holding ``w . p``."""
    _require(levels, p)
    level = p.depth if level is None else level
    if not 1 <= level <= p.depth:
        raise PreconditionError(f"coding level {level} outside 1..{p.depth}")
    ctx = levels.chain.ctx
    tab = levels[level].table
    c = p.path[level - 1]
    code = {}
    for w in sample_words:
        code[ctx.word_name(w)] = tab.act(ctx.evaluate(w), c)
    return CodingTrace(p, level, code)


def point_stabilizer_probe(levels: ChainLevels, p: TreePoint, candidates: Iterable[Element]) -> list:
    """The candidates fixing ``p`` (to its depth)."""
    _require(levels, p)
    return [g for g in candidates if act(levels, g, p) == p]


# -- tree export ---------------------------------------------------------------


@dataclass
class TreeDocument:
    depth: int
    vertices: list  # (level, index, rep word)
    edges: list  # ((level, index), (level + 1, index))
    basepoint: list  # vertex ids on the basepoint path

    def counts(self) -> list:
        out = [0] * (self.depth + 1)
        for lv, _, _ in self.vertices:
            out[lv] += 1
        return out

    def to_text(self) -> str:
        lines = [f"# {TREE_FORMAT} depth={self.depth} vertices={len(self.vertices)} "
                 f"edges={len(self.edges)}"]
        lines.append("basepoint " + " ".join(f"{lv}:{c}" for lv, c in self.basepoint))
        for lv, c, w in self.vertices:
            lines.append(f"{lv}:{c}:{w}")
        for (l0, c0), (l1, c1) in self.edges:
            lines.append(f"{l0}:{c0} -> {l1}:{c1}")
        return "\n".join(lines) + "\n"

    def to_dot(self) -> str:
        base = set(self.basepoint)
        lines = ["digraph cosets {", "  rankdir=TB;"]
        for lv, c, w in self.vertices:
            style = ", style=bold, color=red" if (lv, c) in base else ""
            lines.append(f'  "{lv}:{c}" [label="{w}"{style}];')
        for (l0, c0), (l1, c1) in self.edges:
            style = " [color=red]" if (l0, c0) in base and (l1, c1) in base else ""
            lines.append(f'  "{l0}:{c0}" -> "{l1}:{c1}"{style};')
        lines.append("}")
        return "\n".join(lines) + "\n"


def export_tree(levels: ChainLevels, depth: int | None = None) -> TreeDocument:
    """Vertices are the cosets of ``G_i`` in table (BFS) order; an edge joins
    ``c`` at level ``i`` to each level ``i+1`` coset inside it."""
    depth = levels.depth if depth is None else depth
    _check_depth(levels, depth)
    vertices = []
    edges = []
    for i in range(depth + 1):
        tab = levels[i].table
        vertices.extend((i, c, tab.rep_word(c)) for c in range(tab.index))
        if i == 0:
            continue
        up = levels[i - 1].table
        for c, r in enumerate(tab.reps):
            edges.append(((i - 1, up.locate(r)), (i, c)))
    edges.sort()
    return TreeDocument(depth, vertices, edges, [(i, 0) for i in range(depth + 1)])
