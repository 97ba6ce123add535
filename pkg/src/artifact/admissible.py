"""
Admissible sets, parahoric levels, the ≤_K order, length functionals and
length positive sets.

>>> from artifact.rootdata import build_group
>>> G = build_group("A2")
>>> len(adm(G, G.from_ambient((1, 0, 0))).elements)
7
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from . import _linalg as la
from .errors import PreconditionError
from .weylcombi import AffineElement

__all__ = [
    "ParahoricSpec", "AdmissibleSet", "parse_level", "adm", "adm_K",
    "adm_K_hyperspecial", "is_admissible", "leqK", "length_functional",
    "length_positive_set", "dominant_below",
]


@dataclass(frozen=True)
class ParahoricSpec:
    """σ-stable proper set J of affine simple reflection indices (internal numbering)."""
    J: tuple[int, ...]

    @staticmethod
    def make(G, J: Iterable[int]) -> "ParahoricSpec":
        J = tuple(sorted(set(J)))
        A = G.affine
        for j in J:
            if not 0 <= j < A.nsimple:
                raise PreconditionError(f"affine simple index {j} out of range")
            if A.sigma_simple[j] not in J:
                raise PreconditionError("level is not σ-stable")
        for ci, c in enumerate(G.components):
            so = G.simple_off[ci]
            comp = set(range(so, so + c.rank)) | {G.rank + ci}
            if comp <= set(J):
                raise PreconditionError("level generates an infinite group")
        return ParahoricSpec(J)

    @property
    def is_iwahori(self) -> bool:
        return not self.J

    def is_hyperspecial(self, G) -> bool:
        return self.J == tuple(range(G.rank))


def parse_level(G, text: str | None) -> ParahoricSpec:
    """'iwahori', 'hyperspecial', or comma separated labels (0 = affine root; 0@c on component c)."""
    if text is None or text.strip().lower() in ("", "iwahori", "i"):
        return ParahoricSpec(())
    t = text.strip().lower()
    if t in ("hyperspecial", "k", "special"):
        return ParahoricSpec.make(G, range(G.rank))
    J = []
    for tok in t.split(","):
        tok = tok.strip()
        if "@" in tok:
            a, c = tok.split("@")
            if int(a) != 0:
                raise PreconditionError("only the affine label 0 takes a component suffix")
            J.append(G.rank + int(c))
        else:
            J.append(G.affine.affine_label(int(tok)))
    return ParahoricSpec.make(G, J)


@dataclass
class AdmissibleSet:
    mu: tuple
    level: ParahoricSpec
    elements: tuple[AffineElement, ...]
    cover_edges: tuple[tuple[AffineElement, AffineElement], ...]   # (lower, upper)
    lengths: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, x) -> bool:
        return x in self._set

    def __iter__(self):
        return iter(self.elements)

    @property
    def _set(self):
        s = self.__dict__.get("_s")
        if s is None:
            s = self.__dict__["_s"] = frozenset(self.elements)
        return s

    def maximal_elements(self) -> list[AffineElement]:
        lowers = {a for a, _ in self.cover_edges}
        return [x for x in self.elements if x not in lowers]


def _sort_key(A, x):
    return (A.length(x), x.lam, A.W.word(x.w))


def _check_dominant(G, mu):
    if not la.is_integral(mu):
        raise PreconditionError("μ must be integral")
    if not G.is_dominant(mu):
        raise PreconditionError("μ must be dominant")
    return la.as_int(mu)


def adm(G, mu: Sequence) -> AdmissibleSet:
    """Adm(μ) with its Bruhat cover graph, by downward closure from the extreme translations."""
    mu = _check_dominant(G, mu)
    cache = G.cache("adm")
    if mu in cache:
        return cache[mu]
    A = G.affine
    tops = [A.translation(l) for l in G.orbit(mu)]
    seen = set(tops)
    q = deque(tops)
    edges = []
    while q:
        y = q.popleft()
        for z in A.lower_covers(y):
            edges.append((z, y))
            if z not in seen:
                seen.add(z)
                q.append(z)
    elems = tuple(sorted(seen, key=lambda x: _sort_key(A, x)))
    res = AdmissibleSet(mu, ParahoricSpec(()), elems, tuple(edges),
                        {x: A.length(x) for x in elems})
    cache[mu] = res
    return res


def adm_K(G, mu: Sequence, K: ParahoricSpec) -> AdmissibleSet:
    """Adm(μ) ∩ W̃^K (minimal length representatives of x W̃_K)."""
    if K.is_iwahori:
        return adm(G, mu)
    mu = _check_dominant(G, mu)
    cache = G.cache("adm_K")
    key = (mu, K.J)
    if key in cache:
        return cache[key]
    A = G.affine
    full = adm(G, mu)
    elems = tuple(x for x in full.elements if A.is_min_in_coset(x, K.J))
    keep = set(elems)
    edges = tuple((a, b) for a, b in full.cover_edges if a in keep and b in keep)
    res = AdmissibleSet(mu, K, elems, edges, {x: full.lengths[x] for x in elems})
    cache[key] = res
    return res


def dominant_below(G, mu: Sequence) -> list[tuple]:
    """All dominant λ ≤ μ, by subtracting positive coroots while staying dominant."""
    mu = la.as_int(mu)
    seen = {mu}
    q = deque([mu])
    while q:
        v = q.popleft()
        for c in G.pos_coroot:
            u = la.sub(v, c)
            if u not in seen and G.is_dominant(u):
                seen.add(u)
                q.append(u)
    return sorted(seen)


def adm_K_hyperspecial(G, mu: Sequence) -> list[AffineElement]:
    """Independent construction of Adm(μ)^K for K = W_0: minimal representatives of ε^λ W_0, λ_dom ≤ μ."""
    A = G.affine
    J = tuple(range(G.rank))
    out = set()
    for lam in dominant_below(G, mu):
        for l in G.orbit(lam):
            out.add(A.min_coset_rep(A.translation(l), J))
    return sorted(out, key=lambda x: _sort_key(A, x))


def is_admissible(G, x: AffineElement, mu: Sequence) -> bool:
    mu = _check_dominant(G, mu)
    A = G.affine
    if G.pi1(x.lam) != G.pi1(mu):
        return False
    if A.length(x) > G.pairing_2rho(mu):
        return False
    return any(A.bruhat_leq(x, A.translation(l)) for l in G.orbit(mu))


def leqK(G, xp: AffineElement, x: AffineElement, K: ParahoricSpec) -> bool:
    """x' ≤_K x: some w ∈ W̃_K has w x' σ(w)^{-1} ≤ x."""
    A = G.affine
    if K.is_iwahori:
        return A.bruhat_leq(xp, x)
    for w in A.parabolic_elements(K.J):
        y = A.mul(A.mul(w, xp), A.inv(A.sigma(w)))
        if A.bruhat_leq(y, x):
            return True
    return False


def _signed_func(G, r):
    return G.pos_func[r] if r >= 0 else tuple(-a for a in G.pos_func[-r - 1])


def length_functional(G, x: AffineElement, r: int) -> int:
    """ℓ(x, α) for the root with signed index r; x written as w ε^μ."""
    W = G.weyl
    mu = W.act(W.inv(x.w), x.lam)
    f = _signed_func(G, r)
    wr = W.root_image(x.w, r)
    return la.dot(mu, f) + (1 if r >= 0 else 0) - (1 if wr >= 0 else 0)


def length_positive_set(G, x: AffineElement) -> list[int]:
    """LP(x) = {v ∈ W_0 : ℓ(x, vα) ≥ 0 for all α > 0}."""
    cache = G.cache("LP")
    if x in cache:
        return cache[x]
    W = G.weyl
    elems = W.elements()
    mu = W.act(W.inv(x.w), x.lam)
    # tabulate ℓ(x, β) over all signed roots once
    table = {}
    for p in range(G.npos):
        for r in (p, -p - 1):
            f = _signed_func(G, r)
            wr = W.root_image(x.w, r)
            table[r] = la.dot(mu, f) + (1 if r >= 0 else 0) - (1 if wr >= 0 else 0)
    out = []
    for v in elems:
        if all(table[W.root_image(v, p)] >= 0 for p in range(G.npos)):
            out.append(v)
    cache[x] = out
    return out
