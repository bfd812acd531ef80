"""Chain specification files.

A spec has three blocks::

    group {
      family = lattice        # or heisenberg
      rank = 1
      finite = Z2             # builtin name, or <(1,2), (1,2,3)>
      action t = [[-1]]       # per finite generator; or trivial / permutation
      names = a, b
    }
    chain {
      p = 2                   # integer parameters, overridable with --set
      primes p                # optional: must be distinct primes
      level {                 # template evaluated for i = 1, 2, ...
        lattice = [[p^i]]     # rows as written; the columns span the lattice
        finite = {e, t}
      }
    }
    analysis {
      depth = 4
      kernel = b
      reports = kernel, stability
    }

Numbered ``level 1 { ... }`` blocks give an explicit chain instead of a
template.  Integer expressions use ``+ - * ^`` (``·`` also multiplies),
parentheses, parameters and the level variable ``i``.  Statements end at a
newline or ``;`` and ``#`` starts a comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import finite as fin
from . import lattice as lat
from .catalog import CatalogError, check_primes, finite_subgroup
from .chains import DEFAULT_WINDOW, ChainError, GroupChain
from .groups import (GroupContext, GroupError, SubgroupError, heisenberg, heisenberg_subgroup,
                     lattice_semidirect, lattice_subgroup, trivial_action)


class SpecError(ValueError):
    """A syntax or semantic problem, with a position when one is known."""

    def __init__(self, kind: str, message: str, line: int | None = None, col: int | None = None,
                 level: int | None = None):
        self.kind = kind
        self.message = message
        self.line = line
        self.col = col
        self.level = level
        where = ""
        if line is not None:
            where = f"line {line}, column {col}: " if col is not None else f"line {line}: "
        lv = f" (level {level})" if level is not None else ""
        super().__init__(f"{where}{kind} error{lv}: {message}")

    def as_dict(self):
        return {"kind": self.kind, "message": self.message, "line": self.line,
                "column": self.col, "level": self.level}


# -- tokens ----------------------------------------------------------------------


@dataclass(frozen=True)
class Token:
    kind: str  # name | int | op | nl | eof
    text: str
    line: int
    col: int

    def describe(self) -> str:
        if self.kind == "nl":
            return "end of line"
        if self.kind == "eof":
            return "end of input"
        return repr(self.text)


_TOKEN = re.compile(r"(?P<ws>[ \t\r]+)|(?P<comment>#[^\n]*)|(?P<nl>\n)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
                    r"|(?P<int>\d+)|(?P<op>[{}\[\]()=,;+\-*^<>·])")


def tokenize(text: str) -> list:
    out = []
    line, start = 1, 0
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise SpecError("syntax", f"unexpected character {text[pos]!r}", line, pos - start + 1)
        kind = m.lastgroup
        col = pos - start + 1
        if kind == "nl":
            out.append(Token("nl", "\n", line, col))
            line += 1
            start = m.end()
        elif kind in ("name", "int", "op"):
            tok = m.group()
            out.append(Token(kind, "*" if tok == "·" else tok, line, col))
        pos = m.end()
    out.append(Token("eof", "", line, pos - start + 1))
    return out


# -- expressions -----------------------------------------------------------------


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Neg:
    arg: object


@dataclass(frozen=True)
class Bin:
    op: str
    left: object
    right: object
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


PREC = {"+": 1, "-": 1, "*": 2, "^": 4}


def evaluate(e, env: dict) -> int:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        if e.name not in env:
            raise SpecError("semantic", f"unknown name {e.name!r}", e.line, e.col)
        return env[e.name]
    if isinstance(e, Neg):
        return -evaluate(e.arg, env)
    a, b = evaluate(e.left, env), evaluate(e.right, env)
    if e.op == "+":
        return a + b
    if e.op == "-":
        return a - b
    if e.op == "*":
        return a * b
    if b < 0:
        raise SpecError("semantic", f"negative exponent {b}", e.line, e.col)
    return a ** b


def expr_text(e, parent: int = 0, right: bool = False) -> str:
    """Canonical text: minimal parentheses, re-parses to the same tree."""
    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Neg):
        s = "-" + expr_text(e.arg, 3)
        return f"({s})" if parent >= 3 else s
    p = PREC[e.op]
    if e.op == "^":
        s = f"{expr_text(e.left, p + 1)}^{expr_text(e.right, p, True)}"
    else:
        s = f"{expr_text(e.left, p)} {e.op} {expr_text(e.right, p, True)}"
    if p < parent or (p == parent and right and e.op != "^"):
        return f"({s})"
    return s


# -- document --------------------------------------------------------------------


@dataclass(frozen=True)
class Factor:
    """A generator power ``name^exp`` or an explicit tuple ``(x, y, z)`` /
    ``(v1, ..., vn; f)``."""

    name: str | None = None
    exp: object = None
    coords: tuple = ()
    finite: str | None = None


@dataclass
class GroupBlock:
    family: str = "lattice"
    rank: object = None
    finite: tuple | None = None  # ("builtin", name) | ("perms", (cycle, ...))
    action: tuple = ("trivial",)  # ("trivial",) | ("permutation",) | ("matrices", ((gen, M), ...))
    names: tuple | None = None
    line: int = field(default=0, compare=False)


@dataclass
class LevelSpec:
    number: int | None = None
    lattice: tuple | None = None
    finite: tuple | None = None  # ("named", name) | ("elements", (name, ...))
    center: object = None
    translations: tuple = ()
    line: int = field(default=0, compare=False)


@dataclass
class ChainBlock:
    kind: str = "parametric"
    params: tuple = ()  # ((name, expr), ...)
    primes: tuple = ()
    count: object = None
    levels: tuple = ()
    line: int = field(default=0, compare=False)
    primes_line: int = field(default=0, compare=False)


ANALYSIS_INTS = ("depth", "probe_depth", "coset_cap", "perm_cap", "window")
REPORT_KINDS = ("kernel", "stability")


@dataclass
class AnalysisBlock:
    ints: tuple = ()  # ((key, expr), ...) in canonical key order
    kernel: tuple | None = None  # tuple of words (tuples of Factor)
    reports: tuple = ()
    expect: str | None = None

    def get(self, key):
        return dict(self.ints).get(key)


@dataclass
class ChainSpecDocument:
    group: GroupBlock
    chain: ChainBlock
    analysis: AnalysisBlock = field(default_factory=AnalysisBlock)

    def to_text(self) -> str:
        return serialize(self)


# -- parser ----------------------------------------------------------------------


class _Parser:
    def __init__(self, text: str):
        self.toks = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def next(self) -> Token:
        t = self.toks[self.pos]
        self.pos += 1
        return t

    def fail(self, expected: str, tok: Token | None = None):
        tok = tok or self.tok
        raise SpecError("syntax", f"expected {expected}, found {tok.describe()}", tok.line, tok.col)

    def at(self, text: str) -> bool:
        return self.tok.kind == "op" and self.tok.text == text

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(repr(text))
        return self.next()

    def name(self, what: str = "a name") -> Token:
        if self.tok.kind != "name":
            self.fail(what)
        return self.next()

    def skip_blank(self):
        while self.tok.kind == "nl" or self.at(";"):
            self.next()

    def end_stmt(self):
        if self.tok.kind == "nl" or self.at(";"):
            self.next()
        elif not self.at("}") and self.tok.kind != "eof":
            self.fail("end of statement")

    # expressions
    def expr(self):
        e = self.term()
        while self.at("+") or self.at("-"):
            t = self.next()
            e = Bin(t.text, e, self.term(), t.line, t.col)
        return e

    def term(self):
        e = self.unary()
        while self.at("*"):
            t = self.next()
            e = Bin("*", e, self.unary(), t.line, t.col)
        return e

    def unary(self):
        if self.at("-"):
            self.next()
            return Neg(self.unary())
        return self.power()

    def power(self):
        e = self.atom()
        if self.at("^"):
            t = self.next()
            e = Bin("^", e, self.unary(), t.line, t.col)
        return e

    def atom(self):
        t = self.tok
        if t.kind == "int":
            self.next()
            return Num(int(t.text))
        if t.kind == "name":
            self.next()
            return Var(t.text, t.line, t.col)
        if self.at("("):
            self.next()
            e = self.expr()
            self.expect(")")
            return e
        self.fail("an integer expression")

    def vector(self):
        self.expect("[")
        out = [self.expr()]
        while self.at(","):
            self.next()
            out.append(self.expr())
        self.expect("]")
        return tuple(out)

    def matrix(self):
        self.expect("[")
        rows = [self.vector()]
        while self.at(","):
            self.next()
            rows.append(self.vector())
        self.expect("]")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            t = self.toks[self.pos - 1]
            raise SpecError("syntax", "matrix rows have different lengths", t.line, t.col)
        return tuple(rows)

    def name_list(self):
        out = [self.name().text]
        while self.at(","):
            self.next()
            out.append(self.name().text)
        return tuple(out)

    def raw_item(self, stops: tuple) -> str:
        """Concatenated token text up to a top-level stop symbol, e.g. ``(1,2,3)``."""
        depth = 0
        parts = []
        while True:
            t = self.tok
            if t.kind in ("nl", "eof"):
                break
            if t.kind == "op" and depth == 0 and t.text in stops:
                break
            if t.kind == "op" and t.text in "([":
                depth += 1
            elif t.kind == "op" and t.text in ")]":
                if depth == 0:
                    break
                depth -= 1
            parts.append(t.text)
            self.next()
        if not parts:
            self.fail("an element name")
        return "".join(parts)

    def dashed_name(self) -> str:
        parts = [self.name().text]
        while self.at("-") or self.tok.kind == "int":
            parts.append(self.next().text)
            if self.tok.kind in ("name", "int"):
                parts.append(self.next().text)
        return "".join(parts)

    def word(self):
        factors = [self.factor()]
        while self.at("*"):
            self.next()
            factors.append(self.factor())
        return tuple(factors)

    def factor(self):
        if self.at("("):
            self.next()
            coords = [self.expr()]
            while self.at(","):
                self.next()
                coords.append(self.expr())
            fname = None
            if self.at(";"):
                self.next()
                fname = self.raw_item((")",))
            self.expect(")")
            return Factor(coords=tuple(coords), finite=fname)
        t = self.name("a generator name or an element tuple")
        exp = None
        if self.at("^"):
            self.next()
            exp = self.unary()
        return Factor(name=t.text, exp=exp)

    # blocks
    def document(self) -> ChainSpecDocument:
        blocks = {}
        self.skip_blank()
        while self.tok.kind != "eof":
            t = self.name("a block name (group, chain, analysis)")
            if t.text not in ("group", "chain", "analysis"):
                raise SpecError("syntax", f"unknown block {t.text!r}; expected group, chain or analysis",
                                t.line, t.col)
            if t.text in blocks:
                raise SpecError("syntax", f"duplicate {t.text} block", t.line, t.col)
            self.expect("{")
            blocks[t.text] = getattr(self, "block_" + t.text)(t)
            self.expect("}")
            self.skip_blank()
        for need in ("group", "chain"):
            if need not in blocks:
                t = self.tok
                raise SpecError("syntax", f"missing {need} block", t.line, t.col)
        return ChainSpecDocument(blocks["group"], blocks["chain"],
                                 blocks.get("analysis", AnalysisBlock()))

    def block_group(self, head: Token) -> GroupBlock:
        g = GroupBlock(line=head.line)
        matrices = []
        seen = set()
        self.skip_blank()
        while not self.at("}"):
            k = self.name("a group setting")
            key = k.text
            if key == "action" and self.tok.kind == "name" and not self.at("="):
                gen = self.next().text
                self.expect("=")
                matrices.append((gen, self.matrix()))
                self.end_stmt()
                self.skip_blank()
                continue
            if key in seen:
                raise SpecError("syntax", f"duplicate setting {key!r}", k.line, k.col)
            seen.add(key)
            self.expect("=")
            if key == "family":
                f = self.name("lattice or heisenberg")
                if f.text not in ("lattice", "heisenberg"):
                    raise SpecError("syntax", f"unknown family {f.text!r}; expected lattice or heisenberg",
                                    f.line, f.col)
                g.family = f.text
            elif key == "rank":
                g.rank = self.expr()
            elif key == "finite":
                if self.at("<"):
                    self.next()
                    cycles = [self.raw_item((",", ">"))]
                    while self.at(","):
                        self.next()
                        cycles.append(self.raw_item((",", ">")))
                    self.expect(">")
                    g.finite = ("perms", tuple(cycles))
                else:
                    g.finite = ("builtin", self.name("a finite group name").text)
            elif key == "action":
                a = self.name("trivial or permutation")
                if a.text not in ("trivial", "permutation"):
                    raise SpecError("syntax", f"unknown action {a.text!r}", a.line, a.col)
                g.action = (a.text,)
            elif key == "names":
                g.names = self.name_list()
            else:
                raise SpecError("syntax", f"unknown group setting {key!r}", k.line, k.col)
            self.end_stmt()
            self.skip_blank()
        if matrices:
            if "action" in seen:
                raise SpecError("syntax", "both a named action and action matrices given", head.line)
            g.action = ("matrices", tuple(matrices))
        return g

    def block_chain(self, head: Token) -> ChainBlock:
        c = ChainBlock(line=head.line)
        params = []
        levels = []
        kind = None
        self.skip_blank()
        while not self.at("}"):
            k = self.name("a chain setting or level block")
            if k.text == "level":
                number = None
                if self.tok.kind == "int":
                    number = int(self.next().text)
                self.expect("{")
                levels.append(self.level_body(number, k))
                self.expect("}")
            elif k.text == "kind":
                self.expect("=")
                v = self.name("parametric or explicit")
                if v.text not in ("parametric", "explicit"):
                    raise SpecError("syntax", f"unknown chain kind {v.text!r}", v.line, v.col)
                kind = v
            elif k.text == "primes":
                c.primes = self.name_list()
                c.primes_line = k.line
            elif k.text == "levels":
                self.expect("=")
                c.count = self.expr()
            else:
                if k.text == "i":
                    raise SpecError("syntax", "'i' is the level variable, not a parameter", k.line, k.col)
                if any(n == k.text for n, _ in params):
                    raise SpecError("syntax", f"parameter {k.text!r} set twice", k.line, k.col)
                self.expect("=")
                params.append((k.text, self.expr()))
            self.end_stmt()
            self.skip_blank()
        if not levels:
            t = self.tok
            raise SpecError("syntax", "chain block has no levels; expected a level block", t.line, t.col)
        numbered = [lv.number is not None for lv in levels]
        if all(numbered):
            c.kind = "explicit"
            for want, lv in enumerate(levels, start=1):
                if lv.number != want:
                    raise SpecError("syntax", f"level {lv.number} out of order; expected level {want}",
                                    lv.line)
        elif not any(numbered) and len(levels) == 1:
            c.kind = "parametric"
        else:
            raise SpecError("syntax", "use one unnumbered level template or numbered levels 1, 2, ...",
                            levels[0].line)
        if kind is not None and kind.text != c.kind:
            raise SpecError("syntax", f"kind = {kind.text} does not match the level blocks",
                            kind.line, kind.col)
        c.params = tuple(params)
        c.levels = tuple(levels)
        return c

    def level_body(self, number, head: Token) -> LevelSpec:
        lv = LevelSpec(number=number, line=head.line)
        trans = []
        self.skip_blank()
        while not self.at("}"):
            k = self.name("a level setting")
            if k.text == "translation":
                f = self.raw_item(("=",))
                self.expect("=")
                trans.append((f, self.vector()))
            else:
                self.expect("=")
                if k.text == "lattice":
                    lv.lattice = self.matrix()
                elif k.text == "center":
                    lv.center = self.expr()
                elif k.text == "finite":
                    if self.at("{"):
                        self.next()
                        elems = [self.raw_item((",", "}"))]
                        while self.at(","):
                            self.next()
                            elems.append(self.raw_item((",", "}")))
                        self.expect("}")
                        lv.finite = ("elements", tuple(elems))
                    else:
                        lv.finite = ("named", self.name("a subgroup name").text)
                else:
                    raise SpecError("syntax", f"unknown level setting {k.text!r}", k.line, k.col)
            self.end_stmt()
            self.skip_blank()
        lv.translations = tuple(trans)
        return lv

    def block_analysis(self, head: Token) -> AnalysisBlock:
        a = AnalysisBlock()
        ints = {}
        self.skip_blank()
        while not self.at("}"):
            k = self.name("an analysis setting")
            self.expect("=")
            if k.text in ANALYSIS_INTS:
                ints[k.text] = self.expr()
            elif k.text == "kernel":
                words = [self.word()]
                while self.at(","):
                    self.next()
                    words.append(self.word())
                a.kernel = tuple(words)
            elif k.text == "reports":
                names = self.name_list()
                for n in names:
                    if n not in REPORT_KINDS:
                        raise SpecError("syntax", f"unknown report {n!r}; expected one of "
                                        + ", ".join(REPORT_KINDS), k.line, k.col)
                a.reports = names
            elif k.text == "expect":
                a.expect = self.dashed_name()
            else:
                raise SpecError("syntax", f"unknown analysis setting {k.text!r}", k.line, k.col)
            self.end_stmt()
            self.skip_blank()
        a.ints = tuple((key, ints[key]) for key in ANALYSIS_INTS if key in ints)
        return a


def parse_spec(text: str) -> ChainSpecDocument:
    return _Parser(text).document()


def parse_words(text: str) -> tuple:
    """Comma-separated element words, e.g. ``a^2 * b, (0, 0, 2)``."""
    ps = _Parser(text)
    words = [ps.word()]
    while ps.at(","):
        ps.next()
        words.append(ps.word())
    if ps.tok.kind != "eof":
        ps.fail("',' or end of input")
    return tuple(words)


# -- serialization ---------------------------------------------------------------


def _matrix_text(M) -> str:
    return "[" + ", ".join("[" + ", ".join(expr_text(x) for x in row) + "]" for row in M) + "]"


def word_text(word) -> str:
    parts = []
    for f in word:
        if f.name is not None:
            parts.append(f.name if f.exp is None else f"{f.name}^{expr_text(f.exp, 4, True)}")
        else:
            inner = ", ".join(expr_text(x) for x in f.coords)
            parts.append(f"({inner}; {f.finite})" if f.finite is not None else f"({inner})")
    return " * ".join(parts)


def serialize(doc: ChainSpecDocument) -> str:
    g, c, a = doc.group, doc.chain, doc.analysis
    out = ["group {", f"  family = {g.family}"]
    if g.rank is not None:
        out.append(f"  rank = {expr_text(g.rank)}")
    if g.finite is not None:
        if g.finite[0] == "builtin":
            out.append(f"  finite = {g.finite[1]}")
        else:
            out.append("  finite = <" + ", ".join(g.finite[1]) + ">")
    if g.action[0] == "matrices":
        for gen, M in g.action[1]:
            out.append(f"  action {gen} = {_matrix_text(M)}")
    elif g.action[0] != "trivial" or g.family == "lattice":
        out.append(f"  action = {g.action[0]}")
    if g.names is not None:
        out.append("  names = " + ", ".join(g.names))
    out += ["}", "", "chain {", f"  kind = {c.kind}"]
    for name, e in c.params:
        out.append(f"  {name} = {expr_text(e)}")
    if c.primes:
        out.append("  primes " + ", ".join(c.primes))
    if c.count is not None:
        out.append(f"  levels = {expr_text(c.count)}")
    for lv in c.levels:
        out.append("  level {" if lv.number is None else f"  level {lv.number} {{")
        if lv.lattice is not None:
            out.append(f"    lattice = {_matrix_text(lv.lattice)}")
        if lv.finite is not None:
            if lv.finite[0] == "named":
                out.append(f"    finite = {lv.finite[1]}")
            else:
                out.append("    finite = {" + ", ".join(lv.finite[1]) + "}")
        for f, vec in lv.translations:
            out.append(f"    translation {f} = [" + ", ".join(expr_text(x) for x in vec) + "]")
        if lv.center is not None:
            out.append(f"    center = {expr_text(lv.center)}")
        out.append("  }")
    out.append("}")
    if a != AnalysisBlock():
        out += ["", "analysis {"]
        for key, e in a.ints:
            out.append(f"  {key} = {expr_text(e)}")
        if a.kernel is not None:
            out.append("  kernel = " + ", ".join(word_text(w) for w in a.kernel))
        if a.reports:
            out.append("  reports = " + ", ".join(a.reports))
        if a.expect is not None:
            out.append(f"  expect = {a.expect}")
        out.append("}")
    return "\n".join(out) + "\n"


# -- semantics -------------------------------------------------------------------


@dataclass
class BuiltSpec:
    ctx: GroupContext
    chain: GroupChain
    params: dict
    depth: int
    probe_depth: int
    coset_cap: int | None
    perm_cap: int | None
    window: int
    kernel: list | None
    reports: tuple
    expect: str | None


def _finite_group(g: GroupBlock) -> fin.FiniteGroup:
    if g.finite is None:
        return fin.trivial()
    try:
        if g.finite[0] == "builtin":
            return fin.builtin(g.finite[1])
        pts = [int(x) for cyc in g.finite[1] for x in re.findall(r"\d+", cyc)]
        degree = max(pts) if pts else 1
        gens = [fin.parse_cycles(cyc, degree) for cyc in g.finite[1]]
        return fin.from_permutations("perm", gens)
    except fin.FiniteGroupError as exc:
        raise SpecError("semantic", str(exc), g.line) from None


def _action(g: GroupBlock, F: fin.FiniteGroup, rank: int, env: dict):
    kind = g.action[0]
    if kind == "trivial":
        return trivial_action(rank, F)
    if kind == "permutation":
        if F.perms is None or len(F.perms[0]) != rank:
            raise SpecError("semantic", "permutation action needs a permutation group of degree = rank",
                            g.line)
        return fin.permutation_action(F)
    given = {}
    for gen, M in g.action[1]:
        try:
            f = F.index_of(gen)
        except fin.FiniteGroupError as exc:
            raise SpecError("semantic", str(exc), g.line) from None
        if f not in F.generators:
            raise SpecError("semantic", f"{gen} is not a generator of {F.name}", g.line)
        mat = tuple(tuple(evaluate(x, env) for x in row) for row in M)
        if len(mat) != rank or any(len(r) != rank for r in mat):
            raise SpecError("semantic", f"action matrix for {gen} is not {rank}x{rank}", g.line)
        given[f] = mat
    ident = tuple(lat.identity(rank))
    mats = {0: ident}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for f in F.generators:
                y = F.mul(x, f)
                m = tuple(map(tuple, lat.mat_mul(mats[x], given.get(f, ident))))
                if y not in mats:
                    mats[y] = m
                    nxt.append(y)
                elif mats[y] != m:
                    raise SpecError("semantic", "action matrices do not define a homomorphism",
                                    g.line)
        frontier = nxt
    return tuple(mats[f] for f in range(F.order))


def build_group(g: GroupBlock, env: dict) -> GroupContext:
    try:
        if g.family == "heisenberg":
            if g.finite is not None or g.action[0] != "trivial":
                raise SpecError("semantic", "the Heisenberg family takes no finite part or action",
                                g.line)
            return heisenberg(g.names or ("x", "y"))
        if g.rank is None:
            raise SpecError("semantic", "lattice family needs a rank", g.line)
        rank = evaluate(g.rank, env)
        if rank < 1:
            raise SpecError("semantic", "rank must be positive", g.line)
        F = _finite_group(g)
        action = _action(g, F, rank, env)
        if g.names is not None and len(g.names) != rank + len(F.generators):
            raise SpecError("semantic", f"names: need {rank + len(F.generators)} generator names, "
                            f"got {len(g.names)}", g.line)
        return lattice_semidirect(rank, F, action, names=g.names)
    except GroupError as exc:
        raise SpecError("semantic", str(exc), g.line) from None


def _finite_part(ctx: GroupContext, spec, line, level) -> frozenset:
    F = ctx.finite
    if spec is None:
        return frozenset({0})
    try:
        if spec[0] == "elements":
            elems = frozenset(F.index_of(n) for n in spec[1])
            if not F.is_subgroup(elems):
                raise SpecError("semantic", "finite part {" + ", ".join(spec[1]) + "} is not a subgroup",
                                line, level=level)
            return elems
        name = spec[1]
        if name == "all":
            return frozenset(range(F.order))
        return finite_subgroup(F, name)
    except (fin.FiniteGroupError, CatalogError) as exc:
        raise SpecError("semantic", str(exc), line, level=level) from None


def build_level(ctx: GroupContext, lv: LevelSpec, env: dict, i: int):
    try:
        if lv.lattice is None:
            raise SpecError("semantic", "level needs a lattice", lv.line, level=i)
        M = [[evaluate(x, env) for x in row] for row in lv.lattice]
        if ctx.family == "heisenberg":
            if lv.center is None:
                raise SpecError("semantic", "Heisenberg level needs a center", lv.line, level=i)
            if len(M) != 2:
                raise SpecError("semantic", "Heisenberg lattice must have 2 rows", lv.line, level=i)
            return heisenberg_subgroup(ctx, M, evaluate(lv.center, env))
        if len(M) != ctx.rank:
            raise SpecError("semantic", f"lattice must have {ctx.rank} rows", lv.line, level=i)
        K = _finite_part(ctx, lv.finite, lv.line, i)
        trans = {}
        for fname, vec in lv.translations:
            try:
                f = ctx.finite.index_of(fname)
            except fin.FiniteGroupError as exc:
                raise SpecError("semantic", str(exc), lv.line, level=i) from None
            trans[f] = [evaluate(x, env) for x in vec]
        return lattice_subgroup(ctx, M, K, trans)
    except SubgroupError as exc:
        raise SpecError("semantic", str(exc), lv.line, level=i) from None
    except SpecError as exc:
        if exc.level is None:
            exc = SpecError(exc.kind, exc.message, exc.line, exc.col, level=i)
        raise exc from None


def element_of(ctx: GroupContext, word, env: dict):
    out = ctx.identity
    names = list(ctx.generator_names)
    for f in word:
        if f.name is not None:
            if f.name == "e" and "e" not in names:  # identity
                continue
            if f.name not in names:
                raise SpecError("semantic", f"unknown generator {f.name!r}")
            k = 1 if f.exp is None else evaluate(f.exp, env)
            g = ctx.power(ctx.generators[names.index(f.name)], k)
        else:
            coords = [evaluate(x, env) for x in f.coords]
            if ctx.family == "heisenberg":
                if len(coords) != 3 or f.finite is not None:
                    raise SpecError("semantic", "Heisenberg elements are (x, y, z)")
                g = tuple(coords)
            else:
                if len(coords) != ctx.rank:
                    raise SpecError("semantic", f"element needs {ctx.rank} coordinates")
                try:
                    fi = 0 if f.finite is None else ctx.finite.index_of(f.finite)
                except fin.FiniteGroupError as exc:
                    raise SpecError("semantic", str(exc)) from None
                g = (tuple(coords), fi)
        out = ctx.mul(out, g)
    return out


def params_of(doc: ChainSpecDocument, overrides: dict | None = None) -> dict:
    env = {}
    overrides = dict(overrides or {})
    declared = {n for n, _ in doc.chain.params}
    for k in overrides:
        if k not in declared:
            raise SpecError("semantic", f"--set {k}: no such parameter (declared: "
                            + (", ".join(sorted(declared)) or "none") + ")")
    for name, e in doc.chain.params:
        env[name] = overrides[name] if name in overrides else evaluate(e, env)
    if doc.chain.primes:
        for p in doc.chain.primes:
            if p not in env:
                raise SpecError("semantic", f"primes: {p!r} is not a parameter", doc.chain.primes_line)
        try:
            check_primes(*(env[p] for p in doc.chain.primes))
        except CatalogError as exc:
            raise SpecError("semantic", str(exc), doc.chain.primes_line) from None
    return env


def build(doc: ChainSpecDocument, overrides: dict | None = None, depth: int | None = None,
          probe_depth: int | None = None, coset_cap: int | None = None,
          perm_cap: int | None = None) -> BuiltSpec:
    """Evaluate a parsed spec into a chain; command-line values beat spec values."""
    env = params_of(doc, overrides)
    a = doc.analysis

    def setting(key, given, default):
        if given is not None:
            return given
        e = a.get(key)
        return default if e is None else evaluate(e, env)

    window = setting("window", None, DEFAULT_WINDOW)
    ctx = build_group(doc.group, env)
    c = doc.chain
    if c.kind == "explicit":
        n_levels = len(c.levels)
        depth = setting("depth", depth, n_levels)
        if depth > n_levels:
            raise SpecError("semantic", f"depth {depth} exceeds the {n_levels} explicit levels")
        subs = [build_level(ctx, lv, dict(env, i=k), k) for k, lv in enumerate(c.levels, start=1)]
    else:
        depth = setting("depth", depth, 3)
        n_levels = depth + window if c.count is None else evaluate(c.count, env)
        if n_levels < depth:
            raise SpecError("semantic", f"levels = {n_levels} is less than depth {depth}")
        subs = [build_level(ctx, c.levels[0], dict(env, i=k), k) for k in range(1, n_levels + 1)]
    if depth < 0:
        raise SpecError("semantic", "depth must be non-negative")
    try:
        chain = GroupChain(ctx, tuple(subs), {"kind": c.kind, "params": dict(env)})
    except ChainError as exc:
        m = re.match(r"level (\d+)", str(exc))
        lv = int(m.group(1)) if m else None
        raise SpecError("semantic", str(exc), c.line, level=lv) from None
    probe = setting("probe_depth", probe_depth, depth)
    if probe > depth:
        raise SpecError("semantic", f"probe depth {probe} exceeds depth {depth}")
    kernel = None
    if a.kernel is not None:
        kernel = [element_of(ctx, w, env) for w in a.kernel]
    return BuiltSpec(ctx=ctx, chain=chain, params=env, depth=depth, probe_depth=probe,
                     coset_cap=setting("coset_cap", coset_cap, None),
                     perm_cap=setting("perm_cap", perm_cap, None), window=window,
                     kernel=kernel, reports=a.reports, expect=a.expect)
