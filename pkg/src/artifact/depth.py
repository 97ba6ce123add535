"""
The depth invariant max_O ⟨μ_dom, ω_O⟩, its variants, low-depth enumeration
and the classification of adjoint quasi-simple pairs with 1 < depth < 2.

>>> from artifact.rootdata import build_group
>>> G = build_group("A1:ad")
>>> depth(G, G.from_coweights([3])).value
Fraction(3, 2)
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Sequence

from . import _linalg as la
from .errors import PreconditionError
from .rootdata import _twist_permutation, build_group, diagram_automorphisms

__all__ = [
    "DepthReport", "depth", "depth_prime", "depth_nqs", "enumerate_below",
    "classify_lt2", "levi_depth", "check_levi_inequality", "ClassificationRow",
    "coweight_coefficients", "adjoint_groups",
]


@dataclass(frozen=True)
class DepthReport:
    value: Fraction
    witness_orbit: tuple
    per_orbit: dict

    def __post_init__(self):
        assert self.value == max(self.per_orbit.values(), default=Fraction(0))


def _report(G, per) -> DepthReport:
    orbits = G.simple_orbits
    if not orbits:
        return DepthReport(Fraction(0), (), {})
    vals = {o: Fraction(v) for o, v in zip(orbits, per)}
    best = max(orbits, key=lambda o: (vals[o], [-i for i in o]))
    return DepthReport(vals[best], best, vals)


def depth(G, mu: Sequence) -> DepthReport:
    dom, _ = G.dominant(mu)
    return _report(G, G.orbit_coefficients(dom))


def depth_prime(G, mu: Sequence) -> Fraction:
    return _report(G, G.orbit_coefficients(mu)).value


def _frac(a) -> Fraction:
    a = Fraction(a)
    return a - (a.numerator // a.denominator)


def depth_nqs(G, mu: Sequence, offset: Sequence) -> Fraction:
    """max_O (⟨μ_dom, ω_O⟩ + frac(⟨offset, ω_O⟩)) for the translation part offset of σ on the apartment."""
    dom, _ = G.dominant(mu)
    a = G.orbit_coefficients(dom)
    b = G.orbit_coefficients(offset)
    return max((Fraction(x) + _frac(y) for x, y in zip(a, b)), default=Fraction(0))


def _coweights(G):
    out = []
    for i in range(G.rank):
        w = G.fundamental_coweight(i)
        if not la.is_integral(w):
            raise PreconditionError("fundamental coweights are not in the cocharacter lattice; use an adjoint group")
        out.append(la.as_int(w))
    return out


def enumerate_below(G, u) -> Iterator[tuple]:
    """Dominant μ with depth(G, μ) < u, in first-in first-out order from 0."""
    u = Fraction(u)
    if u <= 0:
        raise PreconditionError("bound must be positive")
    oms = _coweights(G)
    zero = (0,) * G.dim
    seen = {zero}
    q = deque([zero])
    while q:
        mu = q.popleft()
        if depth(G, mu).value >= u:
            continue
        yield mu
        for om in oms:
            nu = la.add(mu, om)
            if nu not in seen:
                seen.add(nu)
                q.append(nu)


def coweight_coefficients(G, mu: Sequence) -> tuple:
    """Coefficients of μ (modulo centre) in the fundamental coweight basis: ⟨μ, α_i⟩."""
    return tuple(la.dot(mu, f) for f in G.simple_func)


def levi_depth(G, J: Sequence[int], mu: Sequence) -> Fraction:
    """Depth of μ in the σ-stable standard Levi with simple roots J."""
    J = tuple(sorted(set(J)))
    perm = G.frobenius.simple_perm
    if any(perm[j] not in J for j in J):
        raise PreconditionError("J must be σ-stable")
    if not J:
        return Fraction(0)
    dom, _ = G.dominant(mu, simple=J)
    A = tuple(tuple(G.cartan[i][j] for j in J) for i in J)
    p = [Fraction(la.dot(dom, G.simple_func[j])) for j in J]
    c = la.vec_mat(p, la.inverse(A))  # p_j = Σ_i c_i A_ij
    coeff = dict(zip(J, c))
    best = Fraction(0)
    for o in G.simple_orbits:
        if o[0] in coeff:
            best = max(best, sum((coeff[i] for i in o), Fraction(0)))
    return best


def check_levi_inequality(G, J, mu) -> bool:
    return levi_depth(G, J, mu) <= depth(G, mu).value


# ---------------------------------------------------------------------- classification

@dataclass(frozen=True)
class ClassificationRow:
    cartan_type: str
    rank: int
    twist: int
    coefficients: tuple   # μ = Σ c_i ω_i^vee, canonical up to diagram automorphisms
    depth: Fraction

    @property
    def label(self) -> str:
        parts = []
        for i, c in enumerate(self.coefficients, start=1):
            if c:
                parts.append(("" if c == 1 else str(c)) + f"w{i}")
        return "+".join(parts) or "0"

    @property
    def group(self) -> str:
        return f"{self.cartan_type}{self.rank}" + (f"~{self.twist}" if self.twist > 1 else "")


def adjoint_groups(max_rank: int) -> list[tuple[str, int, int]]:
    """(type, rank, twist order) for adjoint absolutely quasi-simple groups up to the given rank."""
    out = []
    for n in range(1, max_rank + 1):
        out.append(("A", n, 1))
        if n >= 2:
            out.append(("A", n, 2))
        if n >= 2:
            out.append(("B", n, 1))
        if n >= 3:
            out.append(("C", n, 1))
        if n >= 4:
            out.append(("D", n, 1))
            out.append(("D", n, 2))
        if n == 4:
            out.append(("D", 4, 3))
            out.append(("F", 4, 1))
        if n == 2:
            out.append(("G", 2, 1))
        if n in (6, 7, 8):
            out.append(("E", n, 1))
        if n == 6:
            out.append(("E", 6, 2))
    return out


def _canonical(coeffs, autos):
    return max(tuple(coeffs[p.index(i)] for i in range(len(coeffs))) for p in autos)


def classify_lt2(max_rank: int, cap: int = 8) -> list[ClassificationRow]:
    if max_rank > cap:
        raise PreconditionError(f"max_rank above the configured cap {cap}")
    rows = []
    for t, n, tw in adjoint_groups(max_rank):
        spec = f"{t}{n}" + (f"~{tw}" if tw > 1 else "") + ":ad"
        G = build_group(spec)
        tp = _twist_permutation(t, n, tw)
        autos = [p for p in diagram_automorphisms(t, n)
                 if all(p[tp[i]] == tp[p[i]] for i in range(n))]
        found = set()
        for mu in enumerate_below(G, 2):
            d = depth(G, mu).value
            if d > 1:
                found.add((_canonical(coweight_coefficients(G, mu), autos), d))
        for c, d in sorted(found):
            rows.append(ClassificationRow(t, n, tw, c, d))
    return rows
