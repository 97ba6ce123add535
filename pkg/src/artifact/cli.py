"""
Command-line interface.  Every command prints one JSON report (or a short
text/TSV rendering) and exits with 0 when values were computed or the verdict
holds, 1 when a verdict fails, 2 on usage errors and 3 when a capacity limit
is hit.

    artifact depth --group A1:ad --mu 3
    artifact check-pct --group C3:ad --mu 1/2,1/2,1/2 --level hyperspecial
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import _linalg as la
from .admissible import adm_K, parse_level
from .errors import ArtifactError, CapacityError, PreconditionError
from .newton import IsocrystalClass, b_of_mu_set, generic_class, defect
from .rootdata import GroupSpecError, build_group
from .serialize import parse_vec, rat

log = logging.getLogger("artifact")

EXIT_OK, EXIT_FALSE, EXIT_USAGE, EXIT_CAPACITY = 0, 1, 2, 3
CACHE_ENV = "ARTIFACT_CACHE_DIR"


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------- JSON helpers

def jsonable(obj):
    """Convert reports to JSON-ready values; rationals become "p/q" strings."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return rat(obj)
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = list(obj)
        if isinstance(obj, (set, frozenset)):
            items = sorted(items, key=repr)
        return [jsonable(v) for v in items]
    if isinstance(obj, float):
        raise TypeError("floats are not allowed in reports")
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(report) -> str:
    return json.dumps(jsonable(report), sort_keys=True, ensure_ascii=False, indent=2)


# ---------------------------------------------------------------------- cache

class TableCache:
    """Content-addressed store of class-dimension tables, keyed by group spec and element."""

    def __init__(self, root: str | None):
        self.root = Path(root) if root else None
        self.hits = 0
        self.misses = 0

    def _path(self, spec: str, key: str) -> Path:
        g = hashlib.sha256(spec.encode()).hexdigest()[:16]
        h = hashlib.sha256(f"{spec}\0{key}".encode()).hexdigest()
        return self.root / g / h[:2] / f"{h}.json"

    def load(self, spec: str, key: str):
        if self.root is None:
            return None
        p = self._path(spec, key)
        try:
            data = json.loads(p.read_text())
            if data.get("key") != key or data.get("spec") != spec:
                raise ValueError("key mismatch")
            self.hits += 1
            return data["value"]
        except FileNotFoundError:
            self.misses += 1
            return None
        except (OSError, ValueError, KeyError, TypeError) as e:
            log.warning("ignoring corrupt cache entry %s: %s", p, e)
            self.misses += 1
            return None

    def store(self, spec: str, key: str, value) -> None:
        if self.root is None:
            return
        p = self._path(spec, key)
        try:
            p.parent.mkdir(parents=True, exist_ok=True)
            tmp = p.with_suffix(f".{os.getpid()}.tmp")
            tmp.write_text(json.dumps({"spec": spec, "key": key, "value": value}, sort_keys=True))
            os.replace(tmp, p)
        except OSError as e:
            log.warning("cache write failed for %s: %s", p, e)

    def stats(self) -> dict:
        n = self.hits + self.misses
        return {"hits": self.hits, "misses": self.misses,
                "hit_rate": rat(Fraction(self.hits, n)) if n else "0"}


# ---------------------------------------------------------------------- argument handling

def _group(args):
    try:
        return build_group(args.group)
    except GroupSpecError as e:
        raise UsageError(str(e)) from None


def _mu(G, args, required=True):
    if args.mu is None:
        if required:
            raise UsageError("--mu is required")
        return None
    try:
        v = parse_vec(args.mu)
    except (ValueError, ZeroDivisionError):
        raise UsageError(f"cannot parse --mu {args.mu!r}") from None
    if args.coweights:
        if len(v) != G.rank:
            raise UsageError(f"--coweights expects {G.rank} entries")
        return G.from_coweights(v)
    if len(v) != G.ambient_dim:
        raise UsageError(f"--mu expects {G.ambient_dim} ambient coordinates")
    return G.from_ambient(v)


def _dominant_mu(G, args):
    mu = _mu(G, args)
    if not la.is_integral(mu):
        raise UsageError("μ is not in the cocharacter lattice of this group")
    dom, _ = G.dominant(mu)
    return la.as_int(dom)


def _element(G, text):
    try:
        return G.affine.parse(text)
    except (ValueError, ZeroDivisionError) as e:
        raise UsageError(str(e)) from None


def _nu_class(G, args, bs):
    if not getattr(args, "nu", None):
        return None
    nu = G.from_ambient(parse_vec(args.nu))
    hits = [b for b in bs if la.normalize(b.nu) == la.normalize(nu)]
    if not hits:
        raise UsageError("no class of B(G, μ) has this Newton point")
    return hits[0]


def _cls(G, b: IsocrystalClass):
    return b.to_json(G)


def _ser(G, x):
    return G.affine.serialize(x)


def _orbit_label(o):
    return [i + 1 for i in o]


# ---------------------------------------------------------------------- commands

def cmd_depth(args):
    from .depth import depth
    G = _group(args)
    mu = _mu(G, args)
    r = depth(G, mu)
    return {"depth": r.value, "witness_orbit": _orbit_label(r.witness_orbit),
            "per_orbit": [{"orbit": _orbit_label(o), "value": v} for o, v in r.per_orbit.items()]}, True


def cmd_enumerate_depth(args):
    from .depth import coweight_coefficients, depth, enumerate_below
    G = _group(args)
    out = []
    for mu in enumerate_below(G, Fraction(args.bound)):
        out.append({"coweights": list(coweight_coefficients(G, mu)), "depth": depth(G, mu).value})
        if args.limit and len(out) >= args.limit:
            break
    return {"bound": Fraction(args.bound), "count": len(out), "cocharacters": out}, True


def cmd_classify(args):
    from .depth import classify_lt2
    rows = classify_lt2(args.max_rank)
    return {"max_rank": args.max_rank,
            "rows": [{"group": r.group, "coweight": r.label, "coefficients": list(r.coefficients),
                      "depth": r.depth} for r in rows]}, True


def cmd_adm(args):
    G = _group(args)
    mu = _dominant_mu(G, args)
    K = parse_level(G, args.level)
    S = adm_K(G, mu, K)
    return {"level": [i for i in K.J], "count": len(S),
            "elements": [{"x": _ser(G, x), "length": S.lengths[x]} for x in S.elements],
            "cover_edges": len(S.cover_edges)}, True


def cmd_check_pct(args):
    from .reduction import is_positive_coxeter
    G = _group(args)
    mu = _dominant_mu(G, args)
    S = adm_K(G, mu, parse_level(G, args.level))
    rows, ok = [], True
    for x in S.elements:
        wit = is_positive_coxeter(G, x)
        row = {"x": _ser(G, x), "pct": wit is not None}
        if wit is not None:
            row["v"] = [i + 1 for i in G.weyl.word(wit[0])]
            row["J"] = [i + 1 for i in wit[1]]
        else:
            ok = False
        rows.append(row)
    passes = sum(1 for r in rows if r["pct"])
    return {"count": len(rows), "passes": passes, "failures": len(rows) - passes, "elements": rows}, ok


def cmd_check_gct(args):
    from .reduction import geometric_coxeter_check
    G = _group(args)
    mu = _dominant_mu(G, args)
    S = adm_K(G, mu, parse_level(G, args.level))
    rows, ok = [], True
    for x in S.elements:
        r = geometric_coxeter_check(G, x, terminal=args.terminal)
        row = {"x": _ser(G, x), "gct": r.verdict}
        if r.newton_set is not None:
            row["classes"] = sorted((_cls(G, b) for b in r.newton_set), key=lambda d: d["nu"])
        ok = ok and r.verdict
        rows.append(row)
    return {"terminal": args.terminal, "count": len(rows),
            "passes": sum(1 for r in rows if r["gct"]), "elements": rows}, ok


def _dims_rows(G, x, cache: TableCache):
    from .reduction import class_dims
    key = _ser(G, x)
    hit = cache.load(G.spec, key)
    if hit is not None:
        return hit
    out = class_dims(G, x)
    rows = [{"class": _cls(G, b), "dim": out.table[b]} for b in out.keys_sorted(G)]
    rows = jsonable(rows)
    cache.store(G.spec, key, rows)
    return rows


def _targets(G, args):
    if args.element:
        return [_element(G, args.element)]
    mu = _dominant_mu(G, args)
    return list(adm_K(G, mu, parse_level(G, args.level)).elements)


def cmd_class_dims(args, cache):
    G = _group(args)
    out = [{"x": _ser(G, x), "table": _dims_rows(G, x, cache)} for x in _targets(G, args)]
    return {"elements": out}, True


def cmd_bgx(args, cache):
    G = _group(args)
    out = []
    for x in _targets(G, args):
        rows = _dims_rows(G, x, cache)
        out.append({"x": _ser(G, x), "classes": [r["class"] for r in rows],
                    "generic": _cls(G, generic_class(G, x))})
    return {"elements": out}, True


def _classes_for(G, args, mu):
    bs = b_of_mu_set(G, mu)
    b = _nu_class(G, args, bs)
    if b is not None:
        return [b]
    if getattr(args, "indecomposable", False):
        return bs.indecomposable(mu)
    return list(bs)


def cmd_check_l1bc(args, closed=False):
    from .criteria import verify_CL1BC, verify_L1BC
    G = _group(args)
    mu = _dominant_mu(G, args)
    fn = verify_CL1BC if closed else verify_L1BC
    out, ok = [], True
    for b in _classes_for(G, args, mu):
        rep = fn(G, b, mu)
        ok = ok and rep.verdict
        out.append({"class": _cls(G, b), **rep.to_json()})
    return {"bound": list(mu), "classes": out}, ok


def cmd_check_ing(args):
    from .criteria import verify_ING
    G = _group(args)
    mu = _dominant_mu(G, args)
    rep = verify_ING(G, mu, parse_level(G, args.level))
    return rep.to_json(), rep.verdict


def cmd_dim_union(args):
    from .criteria import union_adlv_dim_iwahori
    G = _group(args)
    mu = _dominant_mu(G, args)
    out = []
    for b in _classes_for(G, args, mu):
        r = union_adlv_dim_iwahori(G, mu, b)
        out.append({"class": _cls(G, b), "dim": r[0], "argmax": [_ser(G, x) for x in r[1]]})
    return {"classes": out}, True


def cmd_dim_formula(args):
    from .criteria import _gl_data, depth2_gln_dim, ing_dim_formula, verify_ING, verify_L1BC
    G = _group(args)
    mu = _dominant_mu(G, args)
    K = parse_level(G, args.level)
    bs = b_of_mu_set(G, mu)
    ing = verify_ING(G, mu, K).verdict
    l1 = all(verify_L1BC(G, c, mu).verdict for c in bs.indecomposable(mu))
    gl_labels = None
    try:
        _gl_data(G)
        gl_labels = sorted(0 if j >= G.rank else j + 1 for j in K.J)
    except PreconditionError:
        pass
    out = []
    for b in _classes_for(G, args, mu):
        from .newton import is_hn_indecomposable
        if not is_hn_indecomposable(G, mu, b):
            continue
        row = {"class": _cls(G, b)}
        if ing and l1:
            row["ing_formula"] = ing_dim_formula(G, mu, K, b, verified=True)
        if gl_labels is not None:
            try:
                row["depth2_formula"] = depth2_gln_dim(G, mu, gl_labels, b)
                if not K.is_iwahori:
                    row["note"] = "unverified at this level"
            except PreconditionError:
                pass
        out.append(row)
    return {"ing": ing, "l1bc": l1, "classes": out}, ing and l1


def cmd_newton_cutoff(args):
    from .criteria import newton_cutoff
    G = _group(args)
    mu = _dominant_mu(G, args)
    x = _element(G, args.element)
    r = newton_cutoff(G, x, mu, Fraction(args.s))
    return {"index": r.index, "tau": _ser(G, r.tau), "mu_prime": list(G.to_ambient(r.mu_prime))}, True


def cmd_selftest(args):
    from .depth import depth
    from .reduction import is_positive_coxeter
    checks = []
    G = build_group("A1:ad")
    checks.append(("depth PGL2 3ω", depth(G, G.from_coweights([3])).value == Fraction(3, 2)))
    G = build_group("A2")
    checks.append(("|Adm(1,0,0)| = 7", len(adm_K(G, (1, 0, 0), parse_level(G, None))) == 7))
    G = build_group("C3:ad")
    mu = G.from_ambient((Fraction(1, 2),) * 3)
    S = adm_K(G, la.as_int(mu), parse_level(G, "hyperspecial"))
    npct = sum(1 for x in S.elements if is_positive_coxeter(G, x) is not None)
    checks.append(("Sp6 hyperspecial 8 elements, 7 positive Coxeter", (len(S), npct) == (8, 7)))
    b = b_of_mu_set(build_group("A2"), (2, 0, 0)).minimum()
    checks.append(("basic defect GL3", defect(build_group("A2"), b) == 2))
    ok = all(v for _, v in checks)
    return {"checks": [{"name": n, "ok": v} for n, v in checks]}, ok


COMMANDS = {
    "depth": cmd_depth, "enumerate-depth": cmd_enumerate_depth, "classify": cmd_classify,
    "adm": cmd_adm, "check-pct": cmd_check_pct, "check-gct": cmd_check_gct,
    "class-dims": cmd_class_dims, "bgx": cmd_bgx, "check-l1bc": cmd_check_l1bc,
    "check-cl1bc": lambda a: cmd_check_l1bc(a, closed=True), "check-ing": cmd_check_ing,
    "dim-union": cmd_dim_union, "dim-formula": cmd_dim_formula,
    "newton-cutoff": cmd_newton_cutoff, "selftest": cmd_selftest,
}
_CACHED = {"class-dims", "bgx"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description=__doc__.splitlines()[1].strip())
    p.add_argument("--cache-dir", default=None, help=f"table cache directory (overrides ${CACHE_ENV})")
    p.add_argument("--format", choices=("json", "text", "tsv"), default="json")
    p.add_argument("--provenance", action="store_true", help="add cache statistics to the report")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def group_args(sp, mu=True, level=False, element=False):
        sp.add_argument("--group", required=True, help="e.g. A2, C3:ad, Res^2:A3:ad, A2~2:ad")
        if mu:
            sp.add_argument("--mu", help="comma separated ambient coordinates (rationals allowed)")
            sp.add_argument("--coweights", action="store_true",
                            help="read --mu in the fundamental coweight basis")
        if level:
            sp.add_argument("--level", default="iwahori",
                            help="iwahori, hyperspecial, or affine labels such as 0,2")
        if element:
            sp.add_argument("--element", help="element such as t[1,0,0]*w[1,2]")
        sp.add_argument("--json", action="store_true", help="same as --format json")

    sp = sub.add_parser("depth")
    group_args(sp)
    sp = sub.add_parser("enumerate-depth")
    group_args(sp, mu=False)
    sp.add_argument("--bound", default="2")
    sp.add_argument("--limit", type=int, default=0)
    sp = sub.add_parser("classify")
    sp.add_argument("--max-rank", type=int, default=7)
    sp.add_argument("--json", action="store_true")
    for name in ("adm", "check-pct", "check-gct", "check-ing"):
        sp = sub.add_parser(name)
        group_args(sp, level=True)
        if name == "check-gct":
            sp.add_argument("--terminal", choices=("newton-only", "strict"), default="newton-only")
    for name in ("class-dims", "bgx"):
        sp = sub.add_parser(name)
        group_args(sp, level=True, element=True)
    for name in ("check-l1bc", "check-cl1bc", "dim-union"):
        sp = sub.add_parser(name)
        group_args(sp)
        sp.add_argument("--nu", help="select one class by its Newton point (ambient coordinates)")
        sp.add_argument("--indecomposable", action="store_true",
                        help="only Hodge–Newton indecomposable classes")
    sp = sub.add_parser("dim-formula")
    group_args(sp, level=True)
    sp.add_argument("--nu")
    sp = sub.add_parser("newton-cutoff")
    group_args(sp, element=True)
    sp.add_argument("--s", required=True)
    sp = sub.add_parser("selftest")
    sp.add_argument("--json", action="store_true")
    return p


def _render(report: dict, fmt: str) -> str:
    if fmt == "json":
        return dumps(report)
    flat = jsonable(report)
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
            for i, e in enumerate(v):
                walk(f"{prefix}[{i}]", e)
        else:
            val = ",".join(map(str, v)) if isinstance(v, list) else str(v)
            lines.append(f"{prefix}\t{val}" if fmt == "tsv" else f"{prefix}: {val}")
    walk("", flat)
    return "\n".join(lines)


def run(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(message)s")
    fmt = "json" if getattr(args, "json", False) else args.format
    cache = TableCache(args.cache_dir or os.environ.get(CACHE_ENV))
    fn = COMMANDS[args.command]
    try:
        result, ok = fn(args, cache) if args.command in _CACHED else fn(args)
    except UsageError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as e:
        print(f"capacity error: {e}", file=sys.stderr)
        return EXIT_CAPACITY
    except PreconditionError as e:
        print(f"precondition failed: {e}", file=sys.stderr)
        return EXIT_USAGE
    except ArtifactError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_FALSE
    report = {"command": args.command, "verdict": bool(ok), "result": result}
    if getattr(args, "group", None):
        report["group"] = args.group
    if args.provenance:
        report["provenance"] = {"cache": cache.stats()}
    log.info("cache %s", cache.stats())
    print(_render(report, fmt), file=out)
    return EXIT_OK if ok else EXIT_FALSE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
