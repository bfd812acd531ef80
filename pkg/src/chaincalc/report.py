"""Assemble chain analyses into one report with machine and human renderings."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .chains import (DEFAULT_WINDOW, GroupChain, bonding_flags, build_levels,
                     discriminant_verdict, is_normal_form, kernel_core_factorization,
                     kernel_in_core, kernel_probe, regularity_flags, stability_search,
                     stable_images)

SCHEMA = "chaincalc-report/1"
WITNESS_LIMIT = 8  # list stable image elements by witness word up to this size


@dataclass
class ChainReport:
    group: str
    provenance: dict
    depth: int
    probe_depth: int
    levels: list
    verdict: dict
    regularity: dict
    kernel: dict | None = None
    stability: dict | None = None
    expectations: list = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "schema": SCHEMA,
            "group": self.group,
            "provenance": self.provenance,
            "depth": self.depth,
            "probeDepth": self.probe_depth,
            "levels": self.levels,
            "verdict": self.verdict,
            "regularity": self.regularity,
            "kernel": self.kernel,
            "stability": self.stability,
            "expectations": self.expectations,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, indent=2) + "\n"

    def to_text(self) -> str:
        return render_human(self.as_dict())


def _plain(x):
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if hasattr(x, "item"):  # numpy scalars
        return x.item()
    return x


def analyze(chain: GroupChain, depth: int | None = None, probe_depth: int | None = None,
            coset_cap: int | None = None, perm_cap: int | None = None,
            kernel_gens=None, stability: bool = False, window: int = DEFAULT_WINDOW,
            levels=None) -> ChainReport:
    """Build the levels and run every finite-depth check on them.

    ``depth`` levels get quotients; the whole chain (possibly deeper) is used
    by the membership-only probes.
    """
    ctx = chain.ctx
    depth = chain.depth if depth is None else min(depth, chain.depth)
    probe = depth if probe_depth is None else min(probe_depth, depth)
    if levels is None:
        levels = build_levels(chain, depth, coset_cap=coset_cap, perm_cap=perm_cap)
    stable = stable_images(levels, probe, window)
    verdict = discriminant_verdict(levels, stable)
    flags = regularity_flags(chain, levels, window=window, coset_cap=coset_cap)
    normal_form = is_normal_form(levels, stable)

    rows = []
    for i in range(1, depth + 1):
        lv = levels[i]
        row = {
            "level": i,
            "subgroup": lv.subgroup.describe(),
            "index": lv.index,
            "quotientOrder": lv.fq.order,
            "D": len(lv.D),
            "normalLevel": len(lv.D) == 1,
        }
        if i <= probe:
            S = stable.sets[i]
            row["S"] = len(S)
            row["stabilized"] = bool(stable.stabilized[i])
            row["stableHistory"] = list(stable.history[i])
            row["normalForm"] = bool(normal_form[i - 1])
            if len(S) <= WITNESS_LIMIT:
                row["stableWitnesses"] = sorted(ctx.word_name(lv.fq.witness(e)) for e in S)
        if i >= 2:
            surj, inj = bonding_flags(levels, i)
            row["bondingSurjective"] = surj
            row["bondingInjective"] = inj
        rows.append(row)

    kernel = None
    if kernel_gens is not None:
        gens = [ctx.check(k) for k in kernel_gens]
        probes = {ctx.format(k): str(kernel_probe(chain, k)) for k in gens}
        kernel = {"generators": [ctx.format(k) for k in gens], "probes": probes}
        if all(kernel_probe(chain, k).survives for k in gens):
            kernel["factorization"] = kernel_core_factorization(chain, levels, gens)
            kernel["inCore"] = kernel_in_core(chain, levels, gens)
    stab = stability_search(chain, levels).as_dict() if stability else None
    return ChainReport(
        group=repr(ctx),
        provenance=_plain(chain.provenance),
        depth=depth,
        probe_depth=probe,
        levels=_plain(rows),
        verdict=_plain(verdict.as_dict() | {"text": str(verdict)}),
        regularity=_plain(flags.as_dict()),
        kernel=_plain(kernel),
        stability=_plain(stab),
    )


# -- human rendering -------------------------------------------------------------


COLUMNS = [("level", "i"), ("index", "index"), ("quotientOrder", "|G/C|"), ("D", "|D|"),
           ("S", "|S|"), ("stabilized", "stab"), ("bondingSurjective", "onto"),
           ("bondingInjective", "1-1"), ("normalLevel", "normal"), ("normalForm", "nf")]


def cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "yes" if v else "no"
    return str(v)


def table(header: list, rows: list) -> str:
    widths = [max(len(h), *(len(r[k]) for r in rows)) if rows else len(h)
              for k, h in enumerate(header)]
    out = ["  ".join(h.rjust(w) for h, w in zip(header, widths)),
           "  ".join("-" * w for w in widths)]
    out += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(out)


def render_human(doc: dict) -> str:
    """Aligned-column text built from the same dict as the machine report."""
    lines = [f"group: {doc['group']}", f"depth: {doc['depth']} (probe {doc['probeDepth']})"]
    rows = [[cell(r.get(k)) for k, _ in COLUMNS] for r in doc["levels"]]
    lines += ["", table([h for _, h in COLUMNS], rows), ""]
    for r in doc["levels"]:
        if "stableWitnesses" in r:
            lines.append(f"S_{r['level']} = {{{', '.join(r['stableWitnesses'])}}}")
    v = doc["verdict"]
    lines.append(f"discriminant: {v['text']}  growth {v['growth']}")
    reg = doc["regularity"]
    lines.append(f"regular at depth: {cell(reg['regularAtDepth'])}")
    lines.append(f"weakly normal at: {cell(reg['weaklyNormalAtDepth'])}")
    lines.append(f"virtually regular witness: {cell(reg['virtuallyRegularWitness'])}")
    if doc.get("kernel"):
        k = doc["kernel"]
        lines.append("kernel generators: " + ", ".join(k["generators"]))
        for g, pr in sorted(k["probes"].items()):
            lines.append(f"  {g}: {pr}")
        if "factorization" in k:
            lines.append(f"  kernel covers D_i: {' '.join(cell(x) for x in k['factorization'])}")
            lines.append(f"  kernel inside C_i: {' '.join(cell(x) for x in k['inCore'])}")
    if doc.get("stability"):
        s = doc["stability"]
        lines.append(f"stable at probe: {cell(s['stableAtProbe'])} "
                     f"({s['pointsChecked']} points, pool {s['poolSize']})")
        if s["unstableWitness"]:
            w = s["unstableWitness"]
            lines.append(f"  witness point {w['point']} level {w['level']}: "
                         f"kernel covers {w['covered']} of {w['needed']}")
    if doc.get("expectations"):
        lines.append("")
        rows = [[e["claim"], e["status"], cell(e["observed"]), e["citation"]]
                for e in doc["expectations"]]
        lines.append(table(["claim", "status", "observed", "expectation"], rows))
    return "\n".join(lines) + "\n"
