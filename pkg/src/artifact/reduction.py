"""
Deligne–Lusztig reduction: minimal length reduction, class-dimension tables
B(G)_x → dim X_x(b), positive and geometric Coxeter type, and the bounds
attached to positive Coxeter pairs.

>>> from artifact.rootdata import build_group
>>> G = build_group("A1")
>>> out = class_dims(G, G.affine.parse("t[2,0]*w[1]"))
>>> [(G.to_ambient(b.nu), d) for b, d in out.table.items()]
[((1, 1), 1)]
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import _linalg as la
from .admissible import length_positive_set
from .errors import ArtifactError, InternalConsistencyError, PreconditionError
from .newton import (IsocrystalClass, b_of_mu_set, bg_leq, defect, generic_class,
                     newton_point)
from .weylcombi import AffineElement

__all__ = [
    "ReductionOutcome", "GCTResult", "UndecidableTerminal", "minimal_length_reduction",
    "class_dims", "is_positive_coxeter", "is_partial_sigma_coxeter", "sigma_support",
    "geometric_coxeter_check", "pct_bounds", "pct_dimension", "TERMINAL_POLICIES",
]

TERMINAL_POLICIES = ("newton-only", "strict")
PLATEAU_CAP = 200000


class UndecidableTerminal(ArtifactError):
    """The strict terminal policy reached a minimal length element."""


@dataclass
class ReductionOutcome:
    source: AffineElement
    table: dict            # IsocrystalClass -> int
    provenance: dict = field(default_factory=dict)

    def keys_sorted(self, G):
        return sorted(self.table, key=lambda b: (G.pairing_2rho(b.nu), b.nu))


@dataclass
class GCTResult:
    verdict: bool
    newton_set: Optional[frozenset]
    policy: str = "newton-only"


def _plateau_drop(G, y: AffineElement):
    """BFS over the length plateau of y; returns (plateau, drop) with drop = (z, j) or None."""
    A = G.affine
    ly = A.length(y)
    seen = {y}
    order = [y]
    i = 0
    while i < len(order):
        z = order[i]
        i += 1
        for j in range(A.nsimple):
            zz = A.sigma_conjugate(z, j)
            lz = A.length(zz)
            if lz == ly - 2:
                return order, (z, j)
            if lz == ly and zz not in seen:
                seen.add(zz)
                order.append(zz)
                if len(order) > PLATEAU_CAP:
                    from .errors import CapacityError
                    raise CapacityError("length plateau exceeds cap")
    return order, None


def minimal_length_reduction(G, x: AffineElement):
    """(terminal, path) where each path step is (element, simple index, kind) and kind is 'shift' or 'drop'."""
    A = G.affine
    path = []
    y = x
    while True:
        plateau, drop = _plateau_drop(G, y)
        if drop is None:
            return y, path
        z, j = drop
        path.extend(_shift_path(G, y, z))
        path.append((z, j, "drop"))
        y = A.sigma_conjugate(z, j)


def _shift_path(G, y, z):
    """A length-preserving shift sequence from y to z (BFS tree)."""
    if y == z:
        return []
    A = G.affine
    ly = A.length(y)
    parent = {y: None}
    order = [y]
    i = 0
    while i < len(order):
        a = order[i]
        i += 1
        for j in range(A.nsimple):
            b = A.sigma_conjugate(a, j)
            if b not in parent and A.length(b) == ly:
                parent[b] = (a, j)
                if b == z:
                    steps = []
                    cur = b
                    while parent[cur] is not None:
                        p, jj = parent[cur]
                        steps.append((p, jj, "shift"))
                        cur = p
                    return steps[::-1]
                order.append(b)
    raise InternalConsistencyError("shift target not reachable")


def _combine(t1: dict, t2: dict) -> dict:
    out = {}
    for b, d in t1.items():
        out[b] = d + 1
    for b, d in t2.items():
        out[b] = max(out.get(b, -1), d + 1)
    return out


def _dims_table(G, y: AffineElement, stats: dict) -> dict:
    cache = G.cache("class_dims")
    r = cache.get(y)
    if r is not None:
        stats["hits"] = stats.get("hits", 0) + 1
        return r
    A = G.affine
    plateau, drop = _plateau_drop(G, y)
    stats["nodes"] = stats.get("nodes", 0) + 1
    if drop is None:
        b = newton_point(G, y)
        for z in plateau:
            if newton_point(G, z) != b:
                raise InternalConsistencyError("minimal length plateau meets several classes")
        table = {b: int(A.length(y) - G.pairing_2rho(b.nu))}
        stats.setdefault("terminals", []).append(y)
    else:
        z, j = drop
        s = A.simples[j]
        t1 = _dims_table(G, A.mul(s, z), stats)
        t2 = _dims_table(G, A.sigma_conjugate(z, j), stats)
        table = _combine(t1, t2)
    for z in plateau:
        cache[z] = table
    return table


def class_dims(G, x: AffineElement) -> ReductionOutcome:
    """The map [b] ↦ dim X_x(b) over B(G)_x."""
    stats: dict = {}
    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 10000))
    try:
        table = _dims_table(G, x, stats)
    finally:
        sys.setrecursionlimit(old)
    prov = {"nodes": stats.get("nodes", 0), "cache_hits": stats.get("hits", 0),
            "terminals": [G.affine.serialize(t) for t in stats.get("terminals", [])]}
    return ReductionOutcome(x, dict(table), prov)


# ---------------------------------------------------------------------- Coxeter type

def sigma_support(G, u: int) -> tuple[int, ...]:
    """Union of the σ-orbits of the letters of a reduced word of u."""
    letters = set(G.weyl.word(u))
    out = set()
    for o in G.simple_orbits:
        if letters & set(o):
            out |= set(o)
    return tuple(sorted(out))


def is_partial_sigma_coxeter(G, u: int) -> bool:
    word = G.weyl.word(u)
    orbits = {G.orbit_of(i) for i in word}
    return len(orbits) == len(word)


def _classical_u(G, x: AffineElement, v: int) -> int:
    W = G.weyl
    return W.mul(W.inv(v), W.sigma(W.mul(x.w, v)))


def is_positive_coxeter(G, x: AffineElement):
    """First (v, J) with v ∈ LP(x) and v^{-1} σ(wv) partial σ-Coxeter, or None."""
    W = G.weyl
    lp = sorted(length_positive_set(G, x), key=lambda v: (W.length(v), W.word(v)))
    for v in lp:
        u = _classical_u(G, x, v)
        if is_partial_sigma_coxeter(G, u):
            return v, sigma_support(G, u)
    return None


def _gct(G, y: AffineElement, policy: str, memo: dict):
    r = memo.get(y)
    if r is not None:
        return r
    A = G.affine
    plateau, drop = _plateau_drop(G, y)
    if drop is None:
        if policy == "strict":
            raise UndecidableTerminal(f"undecidable terminal {A.serialize(y)}")
        res = (True, frozenset([newton_point(G, y)]))
    else:
        z, j = drop
        v1, n1 = _gct(G, A.mul(A.simples[j], z), policy, memo)
        v2, n2 = _gct(G, A.sigma_conjugate(z, j), policy, memo)
        if not (v1 and v2) or (n1 & n2):
            res = (False, None)
        else:
            res = (True, n1 | n2)
    for z in plateau:
        memo[z] = res
    return res


def geometric_coxeter_check(G, x: AffineElement, terminal: str = "newton-only") -> GCTResult:
    if terminal not in TERMINAL_POLICIES:
        raise PreconditionError(f"unknown terminal policy {terminal!r}")
    memo = G.cache("gct:" + terminal)
    v, n = _gct(G, x, terminal, memo)
    return GCTResult(v, n, terminal)


# ---------------------------------------------------------------------- positive Coxeter bounds

def _right_mu(G, x: AffineElement):
    W = G.weyl
    return W.act(W.inv(x.w), x.lam)


def _in_coroot_span(G, v, J) -> bool:
    central, c = G.coroot_expansion(v)
    return not any(central) and all(c[i] == 0 for i in range(G.rank) if i not in J)


def _geq(G, a, b) -> bool:
    """a ≥ b for rational cocharacters: a − b is a non-negative combination of positive coroots."""
    central, c = G.coroot_expansion(la.sub(a, b))
    return not any(central) and all(t >= 0 for t in c)


def pct_bounds(G, x: AffineElement, v: int):
    """(b_min, b_max) for a positive Coxeter pair (x, v).

    b_min is the smallest class with the Kottwitz point of x whose Newton point
    differs from the σ-average of v^{-1}μ by an element of ℚΦ_J^∨.  The lower
    inequality ν ≥ avg(v^{-1}μ − wt) does not bound ν from above, so b_max is
    the generic class; both ends are checked against the reduction table.
    """
    W = G.weyl
    u = _classical_u(G, x, v)
    if v not in length_positive_set(G, x) or not is_partial_sigma_coxeter(G, u):
        raise PreconditionError("(x, v) is not a positive Coxeter pair")
    J = set(sigma_support(G, u))
    mu = _right_mu(G, x)
    vmu = W.act(W.inv(v), mu)
    base = G.sigma_average(vmu)
    wt = W.qbg_weight(v, W.sigma(W.mul(x.w, v)))
    low = G.sigma_average(la.sub(vmu, wt))
    mu_dom, _ = G.dominant(x.lam)
    bs = b_of_mu_set(G, la.as_int(mu_dom))
    kappa = G.kottwitz_class(x.lam)
    c12 = [b for b in bs if b.kappa == kappa and _in_coroot_span(G, la.sub(b.nu, base), J)]
    mins = [b for b in c12 if all(bg_leq(G, b, c) for c in c12)]
    if len(mins) != 1:
        raise InternalConsistencyError("lower positive Coxeter bound is not unique")
    b_min = mins[0]
    b_max = generic_class(G, x)
    if b_max not in c12 or not _geq(G, b_max.nu, low):
        raise InternalConsistencyError("generic class violates the positive Coxeter conditions")
    keys = set(class_dims(G, x).table)
    if keys != set(bs.interval(b_min, b_max)):
        raise InternalConsistencyError("B(G)_x is not the interval [b_min, b_max]")
    return b_min, b_max


def _twisted_length(G, x: AffineElement) -> int:
    from .criteria import qbg_d
    return qbg_d(G, x)


def pct_dimension(G, x: AffineElement, b: IsocrystalClass) -> Fraction:
    """½(ℓ(x) + ℓ_{R,σ}(w) − ⟨ν(b), 2ρ⟩ − def(b)), checked against class_dims."""
    out = class_dims(G, x).table
    if b not in out:
        raise PreconditionError("b is outside B(G)_x")
    lr = G.weyl.reflection_length(x.w) if G.is_split else _twisted_length(G, x)
    val = Fraction(G.affine.length(x) + lr - G.pairing_2rho(b.nu) - defect(G, b), 2)
    if val != out[b]:
        raise InternalConsistencyError(f"dimension formula {val} disagrees with reduction {out[b]}")
    return val
