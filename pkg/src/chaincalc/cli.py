"""Command-line frontend.

Exit codes: 0 success, 1 invalid input (or a failed catalog claim), 2 a
resource cap was hit.  Errors go to stderr; with ``--format machine`` a JSON
error document is also written to stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

from . import catalog, odometer, report
from . import specfile as sf
from .chains import (ChainError, PreconditionError, build_levels, chains_equivalent,
                     conjugate_chain, kernel_probe)
from .cosets import ResourceError
from .finite import FiniteGroupError
from .groups import GroupError, SubgroupError

EXIT_OK, EXIT_INVALID, EXIT_RESOURCE = 0, 1, 2
INVALID = (sf.SpecError, ChainError, PreconditionError, catalog.CatalogError, SubgroupError,
           GroupError, FiniteGroupError, OSError)


class UsageError(ValueError):
    pass


def bundled_specs() -> dict:
    root = resources.files("chaincalc") / "specs"
    return {p.name[:-len(".chain")]: p for p in root.iterdir() if p.name.endswith(".chain")}


def read_spec(path: str) -> tuple[str, str]:
    """Text of a spec file; a catalog name or alias falls back to the bundled spec."""
    p = Path(path)
    if p.exists() or "/" in path or path.endswith(".chain"):
        return p.read_text(encoding="utf-8"), str(p)
    specs = bundled_specs()
    try:
        name = catalog.get(path).name
    except catalog.CatalogError:
        name = path
    if name not in specs:
        raise FileNotFoundError(f"no such spec file or bundled spec: {path}")
    return specs[name].read_text(encoding="utf-8"), f"<bundled {name}>"


def parse_sets(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        key = key.strip()
        if not sep or not key:
            raise UsageError(f"--set expects k=v, got {item!r}")
        try:
            out[key] = int(val)
        except ValueError:
            raise UsageError(f"--set {key}: {val!r} is not an integer") from None
    return out


def load(args):
    text, where = read_spec(args.spec)
    doc = sf.parse_spec(text)
    built = sf.build(doc, parse_sets(args.set), depth=args.depth,
                     probe_depth=getattr(args, "probe_depth", None),
                     coset_cap=args.coset_cap, perm_cap=args.perm_cap)
    return doc, built, where


def emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _claim_params(entry: catalog.CatalogEntry, doc: sf.ChainSpecDocument, env: dict) -> dict:
    p = {k: env[k] for k in entry.default_params if k in env}
    if "primes" in entry.default_params and doc.chain.primes:
        p["primes"] = tuple(env[n] for n in doc.chain.primes)
    return p


def run_analysis(doc, built, levels=None) -> report.ChainReport:
    levels = levels or build_levels(built.chain, built.depth, coset_cap=built.coset_cap,
                                    perm_cap=built.perm_cap)
    kernel = built.kernel if "kernel" in built.reports or built.kernel else None
    rep = report.analyze(built.chain, built.depth, built.probe_depth,
                         coset_cap=built.coset_cap, perm_cap=built.perm_cap,
                         kernel_gens=kernel, stability="stability" in built.reports,
                         window=built.window, levels=levels)
    if built.expect:
        entry = catalog.get(built.expect)
        p = dict(entry.default_params)
        p.update(_claim_params(entry, doc, built.params))
        obs = catalog.observe_levels(built.chain, levels, built.kernel or [],
                                     coset_cap=built.coset_cap)
        rep.expectations = [c.as_dict() for c in catalog.evaluate_claims(entry, p, built.depth, obs)]
    return rep


def render(args, rep: report.ChainReport) -> str:
    return rep.to_json() if args.format == "machine" else rep.to_text()


# -- subcommands -------------------------------------------------------------------


def cmd_analyze(args) -> int:
    doc, built, _ = load(args)
    emit(args, render(args, run_analysis(doc, built)))
    return EXIT_OK


def cmd_catalog(args) -> int:
    names = [args.name] if args.name else sorted(catalog.ENTRIES)
    params = parse_sets(args.set)
    docs = []
    worst = EXIT_OK
    for name in names:
        entry = catalog.get(name)
        unknown = set(params) - set(entry.default_params)
        if unknown:
            raise UsageError(f"{entry.name} has no parameter(s) {', '.join(sorted(unknown))}")
        results = catalog.run_regression(name, params, args.depth, args.coset_cap, args.perm_cap)
        depth = entry.default_depth if args.depth is None else args.depth
        docs.append({"entry": entry.name, "depth": depth,
                     "params": catalog.plain(dict(entry.default_params, **params)),
                     "claims": [r.as_dict() for r in results]})
        if any(r.status == "unevaluated" for r in results):
            worst = max(worst, EXIT_RESOURCE)
        elif any(r.status == "fail" for r in results):
            worst = max(worst, EXIT_INVALID)
    if args.format == "machine":
        text = json.dumps({"schema": "chaincalc-catalog/1", "entries": docs},
                          sort_keys=True, indent=2) + "\n"
    else:
        parts = []
        for d in docs:
            rows = [[c["claim"], c["status"], report.cell(c["observed"]), c["citation"]]
                    for c in d["claims"]]
            parts.append(f"{d['entry']} (depth {d['depth']}, params {d['params']})\n"
                         + report.table(["claim", "status", "observed", "expectation"], rows))
        text = "\n\n".join(parts) + "\n"
    emit(args, text)
    return worst


def cmd_tree(args) -> int:
    _, built, _ = load(args)
    depth = built.depth
    levels = build_levels(built.chain, depth, coset_cap=built.coset_cap, perm_cap=built.perm_cap)
    tree = odometer.export_tree(levels, depth)
    emit(args, tree.to_dot() if args.format == "dot" else tree.to_text())
    return EXIT_OK


def cmd_kernel(args) -> int:
    doc, built, _ = load(args)
    ctx = built.chain.ctx
    words = sf.parse_words(args.elements) if args.elements else doc.analysis.kernel
    if not words:
        raise UsageError("no elements: pass --elements or set kernel in the analysis block")
    elems = [sf.element_of(ctx, w, built.params) for w in words]
    levels = build_levels(built.chain, built.depth, coset_cap=built.coset_cap,
                          perm_cap=built.perm_cap)
    base = odometer.basepoint(built.depth)
    fixers = {ctx.format(g) for g in odometer.point_stabilizer_probe(levels, base, elems)}
    rows = []
    for w, g in zip(words, elems):
        probe = kernel_probe(built.chain, g)
        rows.append({"word": sf.word_text(w), "element": ctx.format(g), "probe": str(probe),
                     "survives": probe.survives, "fixesBasepoint": ctx.format(g) in fixers,
                     "imagesTrivial": [levels[i].fq.element_of(g) == 0
                                       for i in range(1, built.depth + 1)]})
    if args.format == "machine":
        text = json.dumps({"schema": "chaincalc-kernel/1", "depth": built.depth,
                           "chainDepth": built.chain.depth, "elements": rows},
                          sort_keys=True, indent=2) + "\n"
    else:
        table = [[r["word"], r["element"], r["probe"], report.cell(r["fixesBasepoint"]),
                  " ".join(report.cell(x) for x in r["imagesTrivial"])] for r in rows]
        text = report.table(["word", "element", "kernel probe", "fixes x", "in C_i"], table) + "\n"
    emit(args, text)
    return EXIT_OK


def cmd_conjugate(args) -> int:
    doc, built, _ = load(args)
    ctx = built.chain.ctx
    reps = [sf.element_of(ctx, w, built.params) for w in sf.parse_words(args.reps)]
    conj = conjugate_chain(built.chain, reps)
    eq = chains_equivalent(built.chain, conj, built.depth)
    cbuilt = sf.BuiltSpec(**{**built.__dict__, "chain": conj, "expect": None, "kernel": None})
    rep = run_analysis(doc, cbuilt)
    rep.provenance["equivalentToOriginal"] = eq.equivalent
    if not eq.equivalent:
        rep.provenance["equivalenceFailedAt"] = list(eq.failed_at)
    emit(args, render(args, rep))
    return EXIT_OK


# -- entry point -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chaincalc",
                                 description="Exact computations with chains of finite-index subgroups.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True, formats=("human", "machine")):
        if spec:
            p.add_argument("spec", help="spec file, or the name of a bundled catalog spec")
        p.add_argument("--depth", type=int, help="number of levels to build quotients for")
        p.add_argument("--coset-cap", type=int, help="max cosets per level (env CHAINCALC_COSET_CAP)")
        p.add_argument("--perm-cap", type=int, help="max quotient order (env CHAINCALC_PERM_CAP)")
        p.add_argument("--set", action="append", metavar="K=V", help="override an integer parameter")
        p.add_argument("--out", help="write to this file instead of stdout")
        p.add_argument("--format", choices=formats, default=formats[0])

    p = sub.add_parser("analyze", help="analyze the chain in a spec file")
    common(p)
    p.add_argument("--probe-depth", type=int, help="deepest level used for stable images")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("catalog", help="check a built-in example against its expected values")
    p.add_argument("name", nargs="?", help="entry name or alias (all entries if omitted)")
    common(p, spec=False)
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("tree", help="export the coset tree")
    common(p, formats=("text", "dot"))
    p.set_defaults(func=cmd_tree)

    p = sub.add_parser("kernel", help="probe elements for membership in every level")
    common(p)
    p.add_argument("--elements", help="comma-separated words, e.g. 'b, a^2 * b'")
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("conjugate", help="conjugate the chain by point representatives and re-analyze")
    common(p)
    p.add_argument("--probe-depth", type=int)
    p.add_argument("--reps", required=True, help="comma-separated words g_1, g_2, ...")
    p.set_defaults(func=cmd_conjugate)
    return ap


def _fail(args, code: int, kind: str, exc: Exception) -> int:
    print(f"chaincalc: {exc}", file=sys.stderr)
    if getattr(args, "format", None) == "machine":
        payload = {"kind": kind, "message": str(exc)}
        if isinstance(exc, sf.SpecError):
            payload.update(exc.as_dict())
        if isinstance(exc, ResourceError):
            payload.update({"what": exc.what, "cap": exc.cap, "level": exc.level})
        sys.stdout.write(json.dumps({"error": payload}, sort_keys=True, indent=2) + "\n")
    return code


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except ResourceError as exc:
        return _fail(args, EXIT_RESOURCE, "resource", exc)
    except UsageError as exc:
        return _fail(args, EXIT_INVALID, "usage", exc)
    except INVALID as exc:
        kind = exc.kind if isinstance(exc, sf.SpecError) else "validation"
        return _fail(args, EXIT_INVALID, kind, exc)


if __name__ == "__main__":
    sys.exit(main())
