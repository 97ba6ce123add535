"""
Finite and extended affine Weyl group arithmetic.

Finite Weyl group elements are interned integer ids (see :class:`WeylGroup`);
affine elements are :class:`AffineElement` values ``(lam, w)`` standing for
``ε^lam · w`` with ``lam`` in lattice coordinates.  Multiplication is
``(ε^μ w)(ε^λ v) = ε^{μ + wλ} wv``.

Affine simple reflections are indexed ``0 .. rank-1`` for the finite simple
reflections and ``rank + c`` for the affine reflection ``ε^{θ_c^∨} s_{θ_c}``
of component ``c``.

>>> from artifact.rootdata import build_group
>>> G = build_group("A1")
>>> A = G.affine
>>> A.length(A.translation(G.from_ambient((2, 0))))
2
>>> A.length(A.parse("t[0,2]*w[1]"))
3
"""

from __future__ import annotations

import re
from collections import deque
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from . import _linalg as la
from .errors import CapacityError

__all__ = [
    "AffineElement", "WeylGroup", "AffineWeyl", "length_affine", "bruhat_leq",
    "lower_covers", "demazure_product", "sigma_conjugate", "cyclic_shift_class",
    "min_coset_rep", "is_min_in_coset", "reflection_length", "qbg_distance",
    "qbg_weight", "serialize", "parse_element",
]

WEYL_ENUMERATION_CAP = 51840


class AffineElement(NamedTuple):
    """ε^lam · w with lam an integral lattice vector and w a finite Weyl id."""
    lam: tuple
    w: int

    @property
    def translation(self) -> tuple:
        return self.lam

    @property
    def finite(self) -> int:
        return self.w


class WeylGroup:
    """Lazily interned finite Weyl group W_0 acting on the cocharacter lattice."""

    def __init__(self, G):
        self.G = G
        self.mats: list[tuple] = []
        self.flags: list[tuple[bool, ...]] = []   # flags[w][p] = (w^{-1} α_p < 0)
        self.lengths: list[int] = []
        self._index: dict[tuple, int] = {}
        self._mul: dict[tuple[int, int], int] = {}
        self._inv: dict[int, int] = {}
        self._words: dict[int, tuple[int, ...]] = {}
        self._sig: dict[int, int] = {}
        self.identity = self.intern(la.identity(G.dim))
        self.simple = tuple(self.intern(self._reflection_matrix(G.simple_func[i], G.simple_coroot[i]))
                            for i in range(G.rank))
        self._refl: dict[int, int] = {}

    # ------------------------------------------------------------------ interning
    def _reflection_matrix(self, f, c):
        n = self.G.dim
        return tuple(tuple((1 if i == j else 0) - c[i] * f[j] for j in range(n)) for i in range(n))

    def intern(self, m) -> int:
        m = tuple(tuple(r) for r in m)
        idx = self._index.get(m)
        if idx is not None:
            return idx
        G = self.G
        flags = []
        for f in G.pos_func:
            g = la.vec_mat(f, m)   # α ∘ w = w^{-1} α
            r = G.root_index.get(tuple(g))
            if r is None:
                raise ValueError("matrix does not permute the roots")
            flags.append(r < 0)
        idx = len(self.mats)
        self.mats.append(m)
        self.flags.append(tuple(flags))
        self.lengths.append(sum(flags))
        self._index[m] = idx
        return idx

    def __len__(self) -> int:
        return self.order

    @cached_property
    def order(self) -> int:
        n = 1
        for c in self.G.components:
            n *= _weyl_order(c.cartan_type, c.rank)
        return n

    # ------------------------------------------------------------------ arithmetic
    def mul(self, a: int, b: int) -> int:
        key = (a, b)
        r = self._mul.get(key)
        if r is None:
            if a == self.identity:
                r = b
            elif b == self.identity:
                r = a
            else:
                r = self.intern(la.mat_mul(self.mats[a], self.mats[b]))
            self._mul[key] = r
        return r

    def inv(self, a: int) -> int:
        r = self._inv.get(a)
        if r is None:
            r = self.intern(la.inverse(self.mats[a]))
            self._inv[a] = r
            self._inv[r] = a
        return r

    def act(self, w: int, v: Sequence) -> tuple:
        if w == self.identity:
            return tuple(v)
        return la.mat_vec(self.mats[w], v)

    def length(self, w: int) -> int:
        return self.lengths[w]

    def from_word(self, word: Iterable[int]) -> int:
        w = self.identity
        for i in word:
            w = self.mul(w, self.simple[i])
        return w

    def word(self, w: int) -> tuple[int, ...]:
        """Canonical reduced word: repeatedly strip the smallest left descent."""
        if w in self._words:
            return self._words[w]
        out = []
        cur = w
        while self.lengths[cur]:
            fl = self.flags[cur]
            for i in range(self.G.rank):
                if fl[self.G.simple_pos[i]]:
                    out.append(i)
                    cur = self.mul(self.simple[i], cur)
                    break
        self._words[w] = tuple(out)
        return self._words[w]

    def left_descent(self, w: int, i: int) -> bool:
        return self.flags[w][self.G.simple_pos[i]]

    def right_descent(self, w: int, i: int) -> bool:
        return self.flags[self.inv(w)][self.G.simple_pos[i]]

    def sigma(self, w: int) -> int:
        r = self._sig.get(w)
        if r is None:
            G = self.G
            if G.is_split:
                r = w
            else:
                r = self.intern(la.mat_mul(G.frobenius.matrix, la.mat_mul(self.mats[w], G.sigma_inv)))
            self._sig[w] = r
        return r

    def reflection(self, p: int) -> int:
        """s_α for the positive root with index p."""
        r = self._refl.get(p)
        if r is None:
            r = self.intern(self._reflection_matrix(self.G.pos_func[p], self.G.pos_coroot[p]))
            self._refl[p] = r
        return r

    def root_image(self, w: int, r: int) -> int:
        """Signed index of w(α) for a signed root index r."""
        G = self.G
        f = G.pos_func[r] if r >= 0 else tuple(-x for x in G.pos_func[-r - 1])
        return G.root_index[la.vec_mat(f, self.inv_mat(w))]

    def inv_mat(self, w: int):
        return self.mats[self.inv(w)]

    # ------------------------------------------------------------------ enumeration
    def elements(self, cap: int = WEYL_ENUMERATION_CAP) -> list[int]:
        key = "all"
        cache = self.G.cache("weyl_elements")
        if key in cache:
            return cache[key]
        if self.order > cap:
            raise CapacityError(f"|W_0| = {self.order} exceeds enumeration cap {cap}")
        out = self.parabolic(tuple(range(self.G.rank)))
        cache[key] = out
        return out

    def parabolic(self, J: Sequence[int]) -> list[int]:
        J = tuple(sorted(set(J)))
        cache = self.G.cache("parabolic")
        if J in cache:
            return cache[J]
        seen = {self.identity}
        order = [self.identity]
        frontier = [self.identity]
        while frontier:
            nxt = []
            for w in frontier:
                for i in J:
                    if not self.right_descent(w, i):
                        u = self.mul(w, self.simple[i])
                        if u not in seen:
                            seen.add(u)
                            order.append(u)
                            nxt.append(u)
            frontier = nxt
        cache[J] = order
        return order

    def longest(self, J: Sequence[int] | None = None) -> int:
        J = tuple(range(self.G.rank)) if J is None else tuple(J)
        w = self.identity
        while True:
            for i in J:
                if not self.right_descent(w, i):
                    w = self.mul(w, self.simple[i])
                    break
            else:
                return w

    def reflection_length(self, w: int) -> int:
        if not self.G.is_split:
            raise ValueError("twisted reflection length unavailable")
        m = self.mats[w]
        n = self.G.dim
        diff = tuple(tuple(m[i][j] - (1 if i == j else 0) for j in range(n)) for i in range(n))
        return la.rank(diff)

    # ------------------------------------------------------------------ quantum Bruhat graph
    def _qbg_edges(self, w: int):
        G = self.G
        lw = self.lengths[w]
        out = []
        for p in range(G.npos):
            u = self.mul(w, self.reflection(p))
            lu = self.lengths[u]
            if lu == lw + 1:
                out.append((u, None))
            elif lu == lw + 1 - la.dot(G.pos_coroot[p], G.rho2):
                out.append((u, p))
        return out

    def qbg_from(self, u: int) -> dict[int, tuple[int, tuple]]:
        """Single-source BFS: target -> (distance, weight)."""
        cache = self.G.cache("qbg")
        if u in cache:
            return cache[u]
        self.elements()
        edges = self.G.cache("qbg_edges")
        zero = (0,) * self.G.dim
        res = {u: (0, zero)}
        q = deque([u])
        while q:
            a = q.popleft()
            da, wa = res[a]
            if a not in edges:
                edges[a] = self._qbg_edges(a)
            for b, p in edges[a]:
                if b not in res:
                    wt = wa if p is None else la.add(wa, self.G.pos_coroot[p])
                    res[b] = (da + 1, wt)
                    q.append(b)
        cache[u] = res
        return res

    def qbg_distance(self, u: int, v: int) -> int:
        return self.qbg_from(u)[v][0]

    def qbg_weight(self, u: int, v: int) -> tuple:
        return self.qbg_from(u)[v][1]


def _weyl_order(t: str, n: int) -> int:
    from math import factorial
    if t == "A":
        return factorial(n + 1)
    if t in "BC":
        return 2 ** n * factorial(n)
    if t == "D":
        return 2 ** (n - 1) * factorial(n)
    return {("E", 6): 51840, ("E", 7): 2903040, ("E", 8): 696729600,
            ("F", 4): 1152, ("G", 2): 12}[(t, n)]


class AffineWeyl:
    """Extended affine Weyl group arithmetic with memoised length and Bruhat order."""

    def __init__(self, G):
        self.G = G
        self.W = G.weyl
        W = self.W
        zero = (0,) * G.dim
        self.one = AffineElement(zero, W.identity)
        simples = [AffineElement(zero, W.simple[i]) for i in range(G.rank)]
        for ci in range(len(G.components)):
            p = G.highest[ci]
            simples.append(AffineElement(G.pos_coroot[p], W.reflection(p)))
        self.simples = tuple(simples)
        self.nsimple = len(simples)
        self._len: dict[AffineElement, int] = {}
        self._leq: dict[tuple, bool] = {}
        self._covers: dict[AffineElement, tuple] = {}
        self._sig: dict[AffineElement, AffineElement] = {}
        self._omega: dict[tuple, tuple] = {}
        self.sigma_simple = tuple(self.simples.index(self.sigma(s)) for s in self.simples)

    # ------------------------------------------------------------------ constructors
    def translation(self, lam: Sequence) -> AffineElement:
        return AffineElement(la.as_int(lam), self.W.identity)

    def finite(self, w: int) -> AffineElement:
        return AffineElement((0,) * self.G.dim, w)

    def make(self, lam: Sequence, w: int) -> AffineElement:
        return AffineElement(la.as_int(lam), w)

    def right_form(self, w: int, mu: Sequence) -> AffineElement:
        """w ε^mu = ε^{w mu} w."""
        return AffineElement(la.as_int(self.W.act(w, mu)), w)

    def from_affine_word(self, word: Iterable[int], tail: AffineElement | None = None) -> AffineElement:
        x = self.one
        for j in word:
            x = self.mul(x, self.simples[j])
        if tail is not None:
            x = self.mul(x, tail)
        return x

    # ------------------------------------------------------------------ group law
    def mul(self, x: AffineElement, y: AffineElement) -> AffineElement:
        W = self.W
        if y.w == W.identity and not any(y.lam):
            return x
        lam = la.add(x.lam, W.act(x.w, y.lam))
        return AffineElement(lam, W.mul(x.w, y.w))

    def inv(self, x: AffineElement) -> AffineElement:
        wi = self.W.inv(x.w)
        return AffineElement(tuple(-a for a in self.W.act(wi, x.lam)), wi)

    def sigma(self, x: AffineElement) -> AffineElement:
        r = self._sig.get(x)
        if r is None:
            G = self.G
            r = x if G.is_split else AffineElement(G.sigma(x.lam), self.W.sigma(x.w))
            self._sig[x] = r
        return r

    def sigma_inv(self, x: AffineElement) -> AffineElement:
        y = x
        for _ in range(self.G.frobenius.order - 1):
            y = self.sigma(y)
        return y

    def conj(self, x: AffineElement, y: AffineElement) -> AffineElement:
        """x^{-1} y x."""
        return self.mul(self.mul(self.inv(x), y), x)

    # ------------------------------------------------------------------ length
    def length(self, x: AffineElement) -> int:
        r = self._len.get(x)
        if r is None:
            G = self.G
            lam = x.lam
            fl = self.W.flags[x.w]
            r = 0
            for p, sp in enumerate(G.pos_sparse):
                c = 0
                for k, a in sp:
                    c += lam[k] * a
                if fl[p]:
                    c -= 1
                r += c if c >= 0 else -c
            self._len[x] = r
        return r

    def omega_class(self, x: AffineElement) -> tuple:
        r = self._omega.get(x.lam)
        if r is None:
            r = self.G.pi1(x.lam)
            self._omega[x.lam] = r
        return r

    def is_left_descent(self, x: AffineElement, j: int) -> bool:
        return self.length(self.mul(self.simples[j], x)) < self.length(x)

    def is_right_descent(self, x: AffineElement, j: int) -> bool:
        return self.length(self.mul(x, self.simples[j])) < self.length(x)

    def first_left_descent(self, x: AffineElement) -> int | None:
        lx = self.length(x)
        for j in range(self.nsimple):
            if self.length(self.mul(self.simples[j], x)) < lx:
                return j
        return None

    def reduced_word(self, x: AffineElement) -> tuple[tuple[int, ...], AffineElement]:
        """x = s_{j1} ... s_{jk} τ with ℓ(τ) = 0."""
        word = []
        while True:
            j = self.first_left_descent(x)
            if j is None:
                return tuple(word), x
            word.append(j)
            x = self.mul(self.simples[j], x)

    # ------------------------------------------------------------------ Bruhat order
    def bruhat_leq(self, x: AffineElement, y: AffineElement) -> bool:
        if x == y:
            return True
        lx, ly = self.length(x), self.length(y)
        if lx >= ly:
            return False
        if self.omega_class(x) != self.omega_class(y):
            return False
        return self._leq_rec(x, y, lx, ly)

    def _leq_rec(self, x, y, lx, ly) -> bool:
        if lx > ly:
            return False
        if lx == ly:
            return x == y
        if lx == 0:
            # x = τ, which is below y iff y lies in W_af τ
            return True
        key = (x, y)
        r = self._leq.get(key)
        if r is not None:
            return r
        j = self.first_left_descent(y)
        s = self.simples[j]
        sy = self.mul(s, y)
        sx = self.mul(s, x)
        lsx = self.length(sx)
        if lsx < lx:
            r = self._leq_rec(sx, sy, lsx, ly - 1)
        else:
            r = self._leq_rec(x, sy, lx, ly - 1)
        self._leq[key] = r
        return r

    def lower_covers(self, y: AffineElement) -> tuple[AffineElement, ...]:
        r = self._covers.get(y)
        if r is not None:
            return r
        G, W = self.G, self.W
        ly = self.length(y)
        fl = W.flags[y.w]
        out = set()
        for p, sp in enumerate(G.pos_sparse):
            c = 0
            for k, a in sp:
                c += y.lam[k] * a
            m = 1 - c if fl[p] else -c
            if m == 0:
                continue
            ks = range(0, m) if m > 0 else range(m, 0)
            sa = W.reflection(p)
            cor = G.pos_coroot[p]
            slam = W.act(sa, y.lam)
            sw = W.mul(sa, y.w)
            for k in ks:
                z = AffineElement(la.sub(slam, la.scale(k, cor)) if k else slam, sw)
                if self.length(z) == ly - 1:
                    out.add(z)
        r = tuple(sorted(out))
        self._covers[y] = r
        return r

    def upper_covers_within(self, x: AffineElement, pool: Iterable[AffineElement]) -> list[AffineElement]:
        return [y for y in pool if x in self.lower_covers(y)]

    # ------------------------------------------------------------------ Demazure product
    def demazure(self, x: AffineElement, y: AffineElement) -> AffineElement:
        word, tau = self.reduced_word(y)
        z = x
        for j in word:
            zs = self.mul(z, self.simples[j])
            if self.length(zs) > self.length(z):
                z = zs
        return self.mul(z, tau)

    # ------------------------------------------------------------------ σ-conjugation
    def sigma_conjugate(self, x: AffineElement, j: int) -> AffineElement:
        """s_j x σ(s_j)."""
        return self.mul(self.mul(self.simples[j], x), self.simples[self.sigma_simple[j]])

    def cyclic_shift_class(self, x: AffineElement, cap: int = 200000) -> list[AffineElement]:
        lx = self.length(x)
        seen = {x}
        order = [x]
        q = deque([x])
        while q:
            y = q.popleft()
            for j in range(self.nsimple):
                z = self.sigma_conjugate(y, j)
                if z not in seen and self.length(z) == lx:
                    seen.add(z)
                    order.append(z)
                    q.append(z)
                    if len(seen) > cap:
                        raise CapacityError("cyclic shift class exceeds cap")
        return order

    # ------------------------------------------------------------------ cosets
    def min_coset_rep(self, x: AffineElement, K: Sequence[int]) -> AffineElement:
        if len(set(K)) >= self.nsimple and len(self.G.components) == 1:
            raise ValueError("K generates an infinite group")
        while True:
            lx = self.length(x)
            for j in K:
                xs = self.mul(x, self.simples[j])
                if self.length(xs) < lx:
                    x = xs
                    break
            else:
                return x

    def is_min_in_coset(self, x: AffineElement, K: Sequence[int]) -> bool:
        lx = self.length(x)
        return all(self.length(self.mul(x, self.simples[j])) > lx for j in K)

    def parabolic_elements(self, K: Sequence[int], cap: int = WEYL_ENUMERATION_CAP) -> list[AffineElement]:
        """All elements of W̃_K (finite when K is a proper subset on each component)."""
        K = tuple(sorted(set(K)))
        seen = {self.one}
        order = [self.one]
        q = deque([self.one])
        while q:
            y = q.popleft()
            for j in K:
                z = self.mul(y, self.simples[j])
                if z not in seen:
                    seen.add(z)
                    order.append(z)
                    q.append(z)
                    if len(seen) > cap:
                        raise CapacityError("parahoric Weyl group exceeds cap")
        return order

    # ------------------------------------------------------------------ serialization
    def serialize(self, x: AffineElement) -> str:
        amb = self.G.to_ambient(x.lam)
        coords = ",".join(_fmt(a) for a in amb)
        word = ",".join(str(i + 1) for i in self.W.word(x.w))
        return f"t[{coords}]*w[{word}]"

    def parse(self, text: str) -> AffineElement:
        text = text.strip().replace(" ", "")
        m = re.fullmatch(r"t\[([^\]]*)\]\*w\[([^\]]*)\]", text)
        if m:
            mu = _parse_vec(m.group(1))
            w = self.W.from_word(_parse_word(m.group(2), self.G.rank))
            return self.make(self.G.from_ambient(mu), w)
        m = re.fullmatch(r"w\[([^\]]*)\]\*t\[([^\]]*)\]", text)
        if m:
            w = self.W.from_word(_parse_word(m.group(1), self.G.rank))
            mu = _parse_vec(m.group(2))
            return self.right_form(w, self.G.from_ambient(mu))
        m = re.fullmatch(r"s\[([^\]]*)\]", text)
        if m:
            idx = [int(a) for a in m.group(1).split(",") if a]
            return self.from_affine_word(self.affine_label(i) for i in idx)
        raise ValueError(f"cannot parse element {text!r}")

    def affine_label(self, i: int) -> int:
        """User label (0 = affine root of the first component, 1..rank finite) to internal index."""
        if i == 0:
            return self.G.rank
        if 1 <= i <= self.G.rank:
            return i - 1
        raise ValueError(f"affine simple index {i} out of range")

    def user_label(self, j: int) -> str:
        """Inverse of affine_label: "1".."rank" for finite simples, "0" or "0@c" for affine ones."""
        if j < self.G.rank:
            return str(j + 1)
        c = j - self.G.rank
        return "0" if c == 0 else f"0@{c}"


def _fmt(a) -> str:
    f = Fraction(a)
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _parse_vec(s: str) -> tuple:
    return tuple(Fraction(a) for a in s.split(",") if a != "")


def _parse_word(s: str, rank: int) -> tuple[int, ...]:
    out = []
    for a in s.split(","):
        if a == "":
            continue
        i = int(a)
        if not 1 <= i <= rank:
            raise ValueError(f"simple index {i} out of range")
        out.append(i - 1)
    return tuple(out)


# ---------------------------------------------------------------------- module-level API

def _A(G):
    return G.affine


def length_affine(G, x):
    return _A(G).length(x)


def bruhat_leq(G, x, y):
    return _A(G).bruhat_leq(x, y)


def lower_covers(G, y):
    return set(_A(G).lower_covers(y))


def demazure_product(G, x, y):
    return _A(G).demazure(x, y)


def sigma_conjugate(G, x, j):
    return _A(G).sigma_conjugate(x, j)


def cyclic_shift_class(G, x):
    return set(_A(G).cyclic_shift_class(x))


def min_coset_rep(G, x, K):
    return _A(G).min_coset_rep(x, K)


def is_min_in_coset(G, x, K):
    return _A(G).is_min_in_coset(x, K)


def reflection_length(G, w):
    return G.weyl.reflection_length(w)


def qbg_distance(G, u, v):
    return G.weyl.qbg_distance(u, v)


def qbg_weight(G, u, v):
    return G.weyl.qbg_weight(u, v)


def serialize(G, x):
    return _A(G).serialize(x)


def parse_element(G, text):
    return _A(G).parse(text)
