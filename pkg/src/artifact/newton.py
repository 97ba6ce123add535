"""
σ-conjugacy class invariants: Newton and Kottwitz points, the order on B(G),
fundamental elements, generic classes, defects and Hodge–Newton
(in)decomposability.

>>> from artifact.rootdata import build_group
>>> G = build_group("A1")
>>> b = newton_point(G, G.affine.parse("t[2,0]*w[1]"))
>>> G.to_ambient(b.nu)
(1, 1)
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from . import _linalg as la
from .errors import InternalConsistencyError, PreconditionError
from .weylcombi import AffineElement

__all__ = [
    "IsocrystalClass", "BSet", "newton_point", "is_fundamental", "bg_leq",
    "b_of_mu_set", "generic_class", "defect", "defect_fixed_space",
    "defect_breakpoints", "is_hn_indecomposable", "max_indec",
    "chain_length", "chai_length", "class_of_translation",
]


@dataclass(frozen=True, order=True)
class IsocrystalClass:
    """A σ-conjugacy class, identified by its dominant Newton point and Kottwitz point."""
    nu: tuple      # lattice coordinates, exact rationals
    kappa: tuple

    def pair_2rho(self, G):
        return G.pairing_2rho(self.nu)

    def to_json(self, G) -> dict:
        from .serialize import rat
        return {"nu": [rat(a) for a in G.to_ambient(self.nu)], "kappa": list(self.kappa),
                "defect": defect(G, self)}


# ---------------------------------------------------------------------- Newton points

def _twisted_operator(G, w: int):
    W = G.weyl
    m = W.mats[w]
    if G.is_split:
        return m
    return la.mat_mul(m, G.frobenius.matrix)


def newton_point(G, x: AffineElement) -> IsocrystalClass:
    cache = G.cache("newton")
    r = cache.get(x)
    if r is not None:
        return r
    M = _twisted_operator(G, x.w)
    ident = la.identity(G.dim)
    acc = tuple(x.lam)
    cur = tuple(x.lam)
    P = M
    N = 1
    while P != ident:
        cur = la.mat_vec(M, cur)
        acc = la.add(acc, cur)
        P = la.mat_mul(P, M)
        N += 1
    nu, _ = G.dominant(la.scale(Fraction(1, N), acc))
    r = IsocrystalClass(la.normalize(nu), G.kottwitz_class(x.lam))
    cache[x] = r
    return r


def class_of_translation(G, lam: Sequence) -> IsocrystalClass:
    return newton_point(G, G.affine.translation(lam))


def is_fundamental(G, x: AffineElement) -> bool:
    b = newton_point(G, x)
    return G.affine.length(x) == G.pairing_2rho(b.nu)


def bg_leq(G, b: IsocrystalClass, bp: IsocrystalClass) -> bool:
    """[b] ≤ [b']: equal κ and ν' − ν a non-negative combination of positive coroots."""
    if b.kappa != bp.kappa:
        return False
    central, coeffs = G.coroot_expansion(la.sub(bp.nu, b.nu))
    return not any(central) and all(c >= 0 for c in coeffs)


def _register(G, x: AffineElement, b: IsocrystalClass):
    reg = G.cache("fundamental_reps")
    if b not in reg:
        reg[b] = x


# ---------------------------------------------------------------------- B(G, μ)

class BSet:
    """A finite subposet of B(G) with cached order and chain lengths."""

    def __init__(self, G, classes: Iterable[IsocrystalClass]):
        self.G = G
        self.classes = tuple(sorted(set(classes), key=lambda b: (G.pairing_2rho(b.nu), b.nu, b.kappa)))
        self._leq = {}
        self._chain = {}

    def __iter__(self):
        return iter(self.classes)

    def __len__(self):
        return len(self.classes)

    def __contains__(self, b):
        return b in self.classes

    def leq(self, a, b) -> bool:
        k = (a, b)
        if k not in self._leq:
            self._leq[k] = bg_leq(self.G, a, b)
        return self._leq[k]

    def minimal(self) -> list:
        return [a for a in self.classes if not any(b != a and self.leq(b, a) for b in self.classes)]

    def maximal(self) -> list:
        return [a for a in self.classes if not any(b != a and self.leq(a, b) for b in self.classes)]

    def minimum(self):
        m = self.minimal()
        if len(m) != 1:
            raise InternalConsistencyError(f"B(G,μ) has {len(m)} minimal elements")
        return m[0]

    def maximum(self):
        m = self.maximal()
        if len(m) != 1:
            raise InternalConsistencyError(f"B(G,μ) has {len(m)} maximal elements")
        return m[0]

    def down_set(self, b) -> list:
        return [a for a in self.classes if self.leq(a, b)]

    def interval(self, lo, hi) -> list:
        return [a for a in self.classes if self.leq(lo, a) and self.leq(a, hi)]

    def chain_length(self, lo, hi) -> int:
        """Length of the longest saturated chain from lo to hi inside this poset."""
        if not self.leq(lo, hi):
            raise PreconditionError("chain length requires lo ≤ hi")
        key = (lo, hi)
        if key in self._chain:
            return self._chain[key]
        ivl = self.interval(lo, hi)
        best = {lo: 0}
        for a in ivl:  # ivl is sorted by ⟨ν,2ρ⟩, a linear extension
            if a == lo:
                continue
            best[a] = max((best[c] + 1 for c in ivl if c in best and c != a and self.leq(c, a)), default=None)
        self._chain[key] = best[hi]
        return best[hi]

    def indecomposable(self, mu) -> list:
        return [b for b in self.classes if is_hn_indecomposable(self.G, mu, b)]


def b_of_mu_set(G, mu: Sequence) -> BSet:
    """B(G, μ) as the set of classes of fundamental elements of Adm(μ)."""
    from .admissible import adm
    mu = la.as_int(mu)
    cache = G.cache("BGmu")
    if mu in cache:
        return cache[mu]
    A = adm(G, mu)
    classes = set()
    for x in A.elements:
        b = newton_point(G, x)
        if G.affine.length(x) == G.pairing_2rho(b.nu):
            classes.add(b)
            _register(G, x, b)
    res = BSet(G, classes)
    res.minimum()
    top = res.maximum()
    if top != class_of_translation(G, mu):
        raise InternalConsistencyError("maximum of B(G,μ) is not [ε^μ]")
    cache[mu] = res
    return res


# ---------------------------------------------------------------------- generic classes

def _max_class(G, cands):
    cands = list(set(cands))
    for c in cands:
        if all(bg_leq(G, d, c) for d in cands):
            return c
    raise InternalConsistencyError("candidate classes have no maximum")


def generic_class(G, x: AffineElement) -> IsocrystalClass:
    """Maximum class of fundamental y ≤ x, by memoised recursion over lower covers."""
    cache = G.cache("generic")
    r = cache.get(x)
    if r is not None:
        return r
    A = G.affine
    stack = [x]
    while stack:
        y = stack[-1]
        if y in cache:
            stack.pop()
            continue
        pending = [c for c in A.lower_covers(y) if c not in cache]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        cands = [cache[c] for c in A.lower_covers(y)]
        b = newton_point(G, y)
        if A.length(y) == G.pairing_2rho(b.nu):
            cands.append(b)
            _register(G, y, b)
        if not cands:
            raise InternalConsistencyError("no fundamental element below x")
        cache[y] = _max_class(G, cands)
    return cache[x]


# ---------------------------------------------------------------------- defect

def _find_fundamental(G, b: IsocrystalClass, search: int = 3) -> AffineElement:
    reg = G.cache("fundamental_reps")
    if b in reg:
        return reg[b]
    lift = G.pi1_sigma.lift(b.kappa)
    base, _ = G.dominant(lift)
    base = la.as_int(base)
    two_rho_vee = [0] * G.dim
    for c in G.pos_coroot:
        two_rho_vee = la.add(two_rho_vee, c)
    for k in range(search + 1):
        mu = la.add(base, la.scale(k, two_rho_vee))
        if not bg_leq(G, b, class_of_translation(G, mu)):
            continue
        b_of_mu_set(G, mu)
        if b in reg:
            return reg[b]
    raise PreconditionError("no fundamental representative found within the search bound")


def _fixed_dim(m) -> int:
    n = len(m)
    diff = tuple(tuple(m[i][j] - (1 if i == j else 0) for j in range(n)) for i in range(n))
    return n - la.rank(diff)


def defect_fixed_space(G, b: IsocrystalClass) -> int:
    """rk_F(G) − dim of the wσ-fixed space at a fundamental representative ε^λ w of b."""
    x = _find_fundamental(G, b)
    return _fixed_dim(G.frobenius.matrix) - _fixed_dim(_twisted_operator(G, x.w))


class NotApplicable(PreconditionError):
    pass


def defect_breakpoints(G, b: IsocrystalClass) -> int:
    """Count of non-integral partial sums of the GL Newton polygon, summed over component orbits."""
    total = 0
    lift = G.pi1_sigma.lift(b.kappa)
    for orbit in G.component_orbits:
        comps = [G.components[c] for c in orbit]
        c0 = comps[0]
        if c0.cartan_type != "A" or any(G.simple_perm_on_component(ci) for ci in orbit):
            raise NotApplicable("breakpoint defect needs untwisted type A components")
        d = len(orbit)
        n1 = c0.coordinate_dim
        first = orbit[0]
        lo = G.lat_off[first]
        amb = c0.to_ambient(b.nu[lo:lo + c0.lattice_dim])
        nu = [d * Fraction(a) for a in amb]
        if c0.isogeny == "ad":
            deg = 0
            for ci in orbit:
                cc = G.components[ci]
                l2 = G.lat_off[ci]
                deg += sum(cc.to_ambient(lift[l2:l2 + cc.lattice_dim]))
            shift = (Fraction(deg) - sum(nu)) / n1
            nu = [a + shift for a in nu]
        nu.sort(reverse=True)
        s = Fraction(0)
        for a in nu:
            s += a
            if s.denominator != 1:
                total += 1
    return total


def defect(G, b: IsocrystalClass) -> int:
    cache = G.cache("defect")
    if b in cache:
        return cache[b]
    r = defect_fixed_space(G, b)
    try:
        r2 = defect_breakpoints(G, b)
    except NotApplicable:
        r2 = r
    if r != r2:
        raise InternalConsistencyError(f"defect algorithms disagree: {r} vs {r2}")
    cache[b] = r
    return r


def chai_length(G, b, bp) -> Fraction:
    """½(⟨ν' − ν, 2ρ⟩ + def(b) − def(b'))."""
    return Fraction(G.pairing_2rho(la.sub(bp.nu, b.nu)) + defect(G, b) - defect(G, bp), 2)


def chain_length(G, bset: BSet, b, bp) -> int:
    n = bset.chain_length(b, bp)
    if n != chai_length(G, b, bp):
        raise InternalConsistencyError("poset chain length disagrees with Chai's formula")
    return n


# ---------------------------------------------------------------------- Hodge–Newton

def is_hn_indecomposable(G, mu: Sequence, b: IsocrystalClass) -> bool:
    c = G.orbit_coefficients(la.sub(mu, b.nu))
    return all(a > 0 for a in c)


def max_indec(G, mu: Sequence) -> IsocrystalClass:
    bs = b_of_mu_set(G, mu)
    ind = bs.indecomposable(mu)
    if not ind:
        raise PreconditionError("no Hodge–Newton indecomposable class in B(G,μ)")
    top = _max_class(G, ind)
    if _noncentral_everywhere(G, mu):
        lam = la.as_int(mu)
        for o in G.simple_orbits:
            lam = la.sub(lam, G.simple_coroot[o[0]])
        if G.pairing_2rho(lam) != G.pairing_2rho(top.nu) - defect(G, top):
            raise InternalConsistencyError("λ(b_{μ,indec}) does not match the poset maximum")
        if G.kottwitz_class(lam) != top.kappa:
            raise InternalConsistencyError("κ of λ(b_{μ,indec}) mismatch")
    return top


def _noncentral_everywhere(G, mu) -> bool:
    _, c = G.coroot_expansion(mu)
    for orbit in G.component_orbits:
        idx = [i for i in range(G.rank) if G.simple_comp[i] in orbit]
        if not any(c[i] for i in idx):
            return False
    return True
