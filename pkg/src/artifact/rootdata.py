"""
Based root data with a Frobenius action.

A group datum is an ordered list of irreducible Cartan components, each with
its own cocharacter lattice, together with a finite-order lattice automorphism
``sigma`` that permutes simple roots.  Vectors are stored in *lattice
coordinates* (integer coordinates w.r.t. a fixed basis of X_*(T)); the
user-facing *ambient coordinates* are

* type A: GL coordinates of length rank+1 (adjoint: last entry normalised to 0),
* types B, C, D: orthogonal coordinates of length rank,
* types E, F, G: coefficients in the simple coroot basis.

>>> G = build_group("A2")
>>> G.rank, G.dim
(2, 3)
>>> G.kottwitz_class(G.from_ambient((2, 0, 0))) == G.kottwitz_class(G.from_ambient((1, 1, 0)))
True
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

from sympy import Matrix, ZZ
from sympy.matrices.normalforms import smith_normal_decomp

from . import _linalg as la

__all__ = [
    "GroupSpecError", "CartanComponent", "FrobeniusAction", "GroupDatum",
    "FundamentalGroup", "cartan_matrix", "build_group", "pairing",
    "dominant_representative", "coroot_expansion", "omega_orbit_weight",
    "kottwitz_class",
]


class GroupSpecError(ValueError):
    """Malformed or unsupported group specification."""


def cartan_matrix(cartan_type: str, n: int) -> tuple[tuple[int, ...], ...]:
    """Cartan matrix with entries A[i][j] = <alpha_i^vee, alpha_j> (Bourbaki numbering)."""
    a = [[2 if i == j else 0 for j in range(n)] for i in range(n)]

    def link(i, j, aij=-1, aji=-1):
        a[i][j], a[j][i] = aij, aji

    t = cartan_type
    if t == "A":
        for i in range(n - 1):
            link(i, i + 1)
    elif t in "BC":
        for i in range(n - 2):
            link(i, i + 1)
        if n >= 2:
            # B: alpha_n short, so <alpha_n^vee, alpha_{n-1}> = -2
            if t == "B":
                link(n - 2, n - 1, -1, -2)
            else:
                link(n - 2, n - 1, -2, -1)
    elif t == "D":
        for i in range(n - 2):
            link(i, i + 1)
        link(n - 3, n - 1)
    elif t == "E":
        link(0, 2)
        link(1, 3)
        for i in range(2, n - 1):
            link(i, i + 1)
    elif t == "F":
        link(0, 1)
        link(1, 2, -1, -2)
        link(2, 3)
    elif t == "G":
        link(0, 1, -3, -1)
    else:
        raise GroupSpecError(f"unknown Cartan type {t!r}")
    return tuple(map(tuple, a))


_RANK_OK = {
    "A": lambda n: n >= 1,
    "B": lambda n: n >= 2,
    "C": lambda n: n >= 2,
    "D": lambda n: n >= 3,
    "E": lambda n: 6 <= n <= 8,
    "F": lambda n: n == 4,
    "G": lambda n: n == 2,
}


def _unit(n, i, c=1):
    return tuple(c if k == i else 0 for k in range(n))


def _ambient_roots(t: str, n: int, cartan):
    """Simple root functionals and simple coroots in ambient coordinates."""
    if t == "A":
        N = n + 1
        f = [la.sub(_unit(N, i), _unit(N, i + 1)) for i in range(n)]
        return N, f, list(f)
    if t in "BCD":
        N = n
        f = [la.sub(_unit(N, i), _unit(N, i + 1)) for i in range(n - 1)]
        c = list(f)
        if t == "B":
            f.append(_unit(N, n - 1))
            c.append(_unit(N, n - 1, 2))
        elif t == "C":
            f.append(_unit(N, n - 1, 2))
            c.append(_unit(N, n - 1))
        else:
            last = la.add(_unit(N, n - 2), _unit(N, n - 1))
            f.append(last)
            c.append(last)
        return N, f, c
    N = n
    c = [_unit(N, i) for i in range(n)]
    f = [tuple(cartan[k][j] for k in range(n)) for j in range(n)]
    return N, f, c


def _twist_permutation(t: str, n: int, order: int) -> tuple[int, ...]:
    ident = tuple(range(n))
    if order == 1:
        return ident
    if order == 2 and t == "A" and n >= 2:
        return tuple(n - 1 - i for i in range(n))
    if order == 2 and t == "D" and n >= 4:
        return ident[: n - 2] + (n - 1, n - 2)
    if order == 3 and t == "D" and n == 4:
        # alpha_1 -> alpha_3 -> alpha_4 -> alpha_1
        return (2, 1, 3, 0)
    if order == 2 and t == "E" and n == 6:
        return (5, 1, 4, 3, 2, 0)
    raise GroupSpecError(f"no diagram automorphism of order {order} on {t}{n}")


def diagram_automorphisms(t: str, n: int) -> list[tuple[int, ...]]:
    """All automorphisms of the Dynkin diagram as permutations of simple roots."""
    out = [tuple(range(n))]
    if t == "A" and n >= 2:
        out.append(_twist_permutation(t, n, 2))
    elif t == "D" and n == 4:
        for a in ((0, 2, 3), (0, 3, 2), (2, 0, 3), (2, 3, 0), (3, 0, 2), (3, 2, 0)):
            p = [0, 1, 0, 0]
            for src, dst in zip((0, 2, 3), a):
                p[src] = dst
            if tuple(p) != out[0]:
                out.append(tuple(p))
    elif t == "D" and n >= 5:
        out.append(_twist_permutation(t, n, 2))
    elif t == "E" and n == 6:
        out.append(_twist_permutation(t, n, 2))
    return out


@dataclass(frozen=True)
class CartanComponent:
    """One irreducible component together with its cocharacter lattice."""
    cartan_type: str
    rank: int
    isogeny: str
    coordinate_dim: int
    cartan: tuple
    basis: tuple          # lattice basis vectors in ambient coordinates
    left_inverse: tuple   # ambient -> lattice
    root_functionals: tuple  # simple roots, lattice-dual coordinates
    coroots: tuple           # simple coroots, lattice coordinates
    twist: tuple             # permutation of simple roots induced by the local twist
    twist_matrix: tuple      # lattice matrix of the local twist

    @property
    def lattice_dim(self) -> int:
        return len(self.basis)

    @property
    def name(self) -> str:
        return f"{self.cartan_type}{self.rank}"

    @cached_property
    def positive_root_count(self) -> int:
        return len(_positive_roots_abstract(self.cartan))

    def to_lattice(self, v: Sequence) -> tuple:
        c = la.mat_vec(self.left_inverse, [Fraction(x) for x in v])
        if not (self.cartan_type == "A" and self.isogeny == "ad"):
            back = la.mat_vec(la.transpose(self.basis), c)
            if tuple(map(Fraction, back)) != tuple(map(Fraction, v)):
                raise ValueError(f"{tuple(v)} is not in the span of the lattice of {self.name}")
        return la.normalize(c)

    def to_ambient(self, c: Sequence) -> tuple:
        return la.normalize(la.mat_vec(la.transpose(self.basis), c))


def _make_component(t: str, n: int, iso: str, twist_order: int) -> CartanComponent:
    if not _RANK_OK[t](n):
        raise GroupSpecError(f"unsupported rank {n} for type {t}")
    cartan = cartan_matrix(t, n)
    N, f_amb, c_amb = _ambient_roots(t, n, cartan)
    for i in range(n):
        for j in range(n):
            assert la.dot(c_amb[i], f_amb[j]) == cartan[i][j]
    if iso == "gl":
        basis = la.identity(N)
        linv = la.identity(N)
    elif iso == "sc":
        basis = tuple(c_amb)
        linv = la.left_inverse(la.transpose(basis))
    elif iso == "ad":
        if t == "A":
            basis = tuple(_unit(N, k) for k in range(n))
            linv = tuple(la.sub(_unit(N, k), _unit(N, N - 1)) for k in range(n))
        else:
            omegas = la.inverse(tuple(f_amb))  # columns are fundamental coweights
            basis = la.transpose(omegas)
            linv = tuple(f_amb)
    else:
        raise GroupSpecError(f"unknown isogeny {iso!r}")
    basis = tuple(tuple(Fraction(x) for x in b) for b in basis)
    funcs = []
    for fa in f_amb:
        fl = tuple(la.dot(fa, b) for b in basis)
        if not la.is_integral(fl):
            raise GroupSpecError("root does not pair integrally with the lattice")
        funcs.append(la.as_int(fl))
    cors = []
    for ca in c_amb:
        cl = la.mat_vec(linv, ca)
        if not la.is_integral(cl):
            raise GroupSpecError("coroot not in the lattice")
        cors.append(la.as_int(cl))

    perm = _twist_permutation(t, n, twist_order)
    if t == "A":
        # -w_0 in GL coordinates: e_i -> -e_{N+1-i}
        s_amb = tuple(tuple(-1 if k == N - 1 - i else 0 for i in range(N)) for k in range(N))
        if twist_order == 1:
            s_amb = la.identity(N)
    else:
        cm = la.transpose(tuple(c_amb))
        cm_perm = la.transpose(tuple(c_amb[perm[i]] for i in range(n)))
        s_amb = la.mat_mul(cm_perm, la.inverse(cm))
    s_lat = la.mat_mul(linv, la.mat_mul(s_amb, la.transpose(basis)))
    if not all(la.is_integral(r) for r in s_lat):
        raise GroupSpecError(f"twist of order {twist_order} does not preserve the {iso} lattice of {t}{n}")
    s_lat = tuple(la.as_int(r) for r in s_lat)
    return CartanComponent(t, n, iso, N, cartan, basis, linv, tuple(funcs), tuple(cors), perm, s_lat)


def _positive_roots_abstract(cartan) -> list[tuple[int, ...]]:
    """Positive roots as simple-root coefficient vectors."""
    n = len(cartan)
    simple = [_unit(n, i) for i in range(n)]
    roots = set(simple)
    frontier = list(simple)
    while frontier:
        new = []
        for a in frontier:
            for i in range(n):
                c = sum(a[j] * cartan[i][j] for j in range(n))
                b = tuple(a[k] - (c if k == i else 0) for k in range(n))
                if all(x >= 0 for x in b) and any(b) and b not in roots:
                    roots.add(b)
                    new.append(b)
        frontier = new
    return sorted(roots, key=lambda a: (sum(a), a))


@dataclass(frozen=True)
class FrobeniusAction:
    matrix: tuple         # lattice automorphism
    simple_perm: tuple    # sigma(alpha_i) = alpha_{simple_perm[i]}
    order: int


@dataclass(frozen=True)
class _Factor:
    cartan_type: str
    rank: int
    twist: int
    isogeny: str
    restriction: int


_FACTOR_RE = re.compile(r"^(?:Res\^(\d+):)?([A-Z])(\d+)(?:~(\d+))?(?::([a-z]+))?$")


def parse_group_spec(spec: str) -> list[_Factor]:
    factors = []
    for raw in spec.strip().split("x"):
        m = _FACTOR_RE.match(raw.strip())
        if not m:
            raise GroupSpecError(f"cannot parse group factor {raw!r}")
        d, t, n, tw, iso = m.groups()
        if t not in _RANK_OK:
            raise GroupSpecError(f"unknown Cartan type {t!r}")
        iso = iso or ("gl" if t == "A" else "sc")
        if iso not in ("gl", "ad", "sc"):
            raise GroupSpecError(f"unknown isogeny {iso!r}")
        d = int(d) if d else 1
        if d < 1:
            raise GroupSpecError("restriction degree must be positive")
        factors.append(_Factor(t, int(n), int(tw) if tw else 1, iso, d))
    return factors


class FundamentalGroup:
    """(X / R) presented through a Smith normal form; R spanned by given relation columns."""

    def __init__(self, dim: int, relations: Sequence[Sequence[int]]):
        self.dim = dim
        rel = [list(r) for r in relations]
        if not rel:
            self.U = la.identity(dim)
            self.diag = (0,) * dim
        else:
            m = Matrix(dim, len(rel), lambda i, j: rel[j][i])
            D, U, _ = smith_normal_decomp(m, domain=ZZ)
            self.U = tuple(tuple(int(U[i, j]) for j in range(dim)) for i in range(dim))
            self.diag = tuple(int(D[i, i]) if i < min(D.shape) else 0 for i in range(dim))
        self.Uinv = la.inverse(self.U)
        self.kept = tuple(i for i, d in enumerate(self.diag) if d != 1)
        self.free = tuple(i for i, d in enumerate(self.diag) if d == 0)

    def __call__(self, v: Sequence[int]) -> tuple[int, ...]:
        u = la.mat_vec(self.U, v)
        return tuple(u[i] if self.diag[i] == 0 else u[i] % self.diag[i] for i in self.kept)

    def rational(self, v: Sequence) -> tuple:
        """Image in the free part tensored with Q."""
        u = la.mat_vec(self.U, v)
        return la.normalize(u[i] for i in self.free)

    def lift(self, cls: Sequence[int]) -> tuple[int, ...]:
        y = [0] * self.dim
        for i, c in zip(self.kept, cls):
            y[i] = c
        return la.as_int(la.mat_vec(self.Uinv, y))

    @property
    def invariants(self) -> tuple[int, ...]:
        return tuple(self.diag[i] for i in self.kept)


class GroupDatum:
    """
    Immutable group datum.  All heavy derived data is computed lazily and
    cached on the instance; the cached Weyl-group machinery lives in
    :mod:`artifact.weylcombi` and is reached through :attr:`weyl`.
    """

    def __init__(self, spec: str, components: Sequence[CartanComponent], sigma: tuple):
        self.spec = spec
        self.components = tuple(components)
        self.lat_off = []
        self.amb_off = []
        self.simple_off = []
        lo = ao = so = 0
        for c in self.components:
            self.lat_off.append(lo)
            self.amb_off.append(ao)
            self.simple_off.append(so)
            lo += c.lattice_dim
            ao += c.coordinate_dim
            so += c.rank
        self.dim = lo
        self.ambient_dim = ao
        self.rank = so
        self._caches: dict = {}

        # simple roots
        self.simple_comp = []
        self.simple_func = []
        self.simple_coroot = []
        for ci, c in enumerate(self.components):
            off = self.lat_off[ci]
            for i in range(c.rank):
                self.simple_comp.append(ci)
                self.simple_func.append(self._embed(c.root_functionals[i], off))
                self.simple_coroot.append(self._embed(c.coroots[i], off))
        self.cartan = tuple(
            tuple(la.dot(self.simple_coroot[i], self.simple_func[j]) for j in range(self.rank))
            for i in range(self.rank))

        perm = []
        sinv = la.inverse(sigma)
        if not all(la.is_integral(r) for r in sinv):
            raise GroupSpecError("Frobenius is not invertible on the lattice")
        for i in range(self.rank):
            img = la.vec_mat(self.simple_func[i], sinv)
            try:
                perm.append(self.simple_func.index(tuple(img)))
            except ValueError:
                raise GroupSpecError("Frobenius does not permute the simple roots") from None
        for i in range(self.rank):
            if tuple(la.mat_vec(sigma, self.simple_coroot[i])) != self.simple_coroot[perm[i]]:
                raise GroupSpecError("Frobenius does not permute the simple coroots")
        order, p = 1, sigma
        ident = la.identity(self.dim)
        while p != ident:
            p = la.mat_mul(p, sigma)
            order += 1
            if order > 1000:
                raise GroupSpecError("Frobenius has infinite order")
        self.frobenius = FrobeniusAction(sigma, tuple(perm), order)
        self.sigma_inv = tuple(la.as_int(r) for r in sinv)
        self._build_roots()

    # ------------------------------------------------------------------ basics
    def _embed(self, v, off):
        out = [0] * self.dim
        out[off:off + len(v)] = v
        return tuple(out)

    def _build_roots(self):
        pos_func, pos_cor, pos_comp, pos_height = [], [], [], []
        self.highest = []
        for ci, c in enumerate(self.components):
            abstract = _positive_roots_abstract(c.cartan)
            so = self.simple_off[ci]
            for a in abstract:
                f = [0] * self.dim
                for i, ai in enumerate(a):
                    if ai:
                        f = la.add(f, la.scale(ai, self.simple_func[so + i]))
                pos_func.append(tuple(f))
                pos_comp.append(ci)
                pos_height.append(sum(a))
            # coroots: the coroot of a root a is obtained by transporting along the reflection
            # orbit; simpler: a^vee = 2 a / (a,a) in coroot basis through the symmetrised form
            pos_cor.extend(self._coroots_for(ci, abstract))
            self.highest.append(len(pos_func) - 1)  # sorted by height, highest last
        self.pos_func = tuple(pos_func)
        self.pos_coroot = tuple(pos_cor)
        self.pos_comp = tuple(pos_comp)
        self.pos_height = tuple(pos_height)
        self.npos = len(pos_func)
        self.pos_sparse = tuple(tuple((k, x) for k, x in enumerate(f) if x) for f in pos_func)
        self.root_index = {}
        for p, f in enumerate(pos_func):
            self.root_index[f] = p
            self.root_index[tuple(-x for x in f)] = -p - 1
        self.rho2 = tuple(sum(f[k] for f in pos_func) for k in range(self.dim))  # 2 rho as functional
        self.simple_pos = tuple(self.root_index[f] for f in self.simple_func)

    def _coroots_for(self, ci, abstract):
        c = self.components[ci]
        n = c.rank
        so = self.simple_off[ci]
        # symmetrise: d_i A_ij symmetric with d_i = (alpha_i, alpha_i)/2
        d = [None] * n
        d[0] = Fraction(1)
        changed = True
        while changed:
            changed = False
            for i in range(n):
                for j in range(n):
                    if d[i] is not None and d[j] is None and c.cartan[i][j] != 0:
                        # d_i A_ij = d_j A_ji
                        d[j] = d[i] * c.cartan[i][j] / c.cartan[j][i]
                        changed = True
        out = []
        for a in abstract:
            # (a,a) = sum a_i a_j d_i A_ij ; a^vee = sum (2 a_i d_i/(a,a)) alpha_i^vee
            norm = sum(a[i] * a[j] * d[i] * c.cartan[i][j] for i in range(n) for j in range(n))
            v = [0] * self.dim
            for i in range(n):
                if a[i]:
                    coeff = Fraction(2 * a[i]) * d[i] / norm
                    v = la.add(v, la.scale(coeff, self.simple_coroot[so + i]))
            out.append(la.as_int(v))
        return out

    def __repr__(self):
        return f"GroupDatum({self.spec!r})"

    def __reduce__(self):
        return (build_group, (self.spec,))

    # ------------------------------------------------------------------ coordinates
    def from_ambient(self, v: Sequence) -> tuple:
        v = list(v)
        if len(v) != self.ambient_dim:
            raise ValueError(f"expected {self.ambient_dim} coordinates, got {len(v)}")
        out = []
        for ci, c in enumerate(self.components):
            ao = self.amb_off[ci]
            out.extend(c.to_lattice(v[ao:ao + c.coordinate_dim]))
        return la.normalize(out)

    def to_ambient(self, v: Sequence) -> tuple:
        out = []
        for ci, c in enumerate(self.components):
            lo = self.lat_off[ci]
            out.extend(c.to_ambient(v[lo:lo + c.lattice_dim]))
        return la.normalize(out)

    def from_coweights(self, coeffs: Sequence) -> tuple:
        """Lattice vector sum_i c_i omega_i^vee (ω_i^vee realised in X_* ⊗ Q)."""
        v = [Fraction(0)] * self.dim
        for i, c in enumerate(coeffs):
            if c:
                v = la.add(v, la.scale(Fraction(c), self.fundamental_coweight(i)))
        return la.normalize(v)

    def fundamental_coweight(self, i: int) -> tuple:
        """ω_i^vee in lattice coordinates ⊗ Q, orthogonal to the centre of its component."""
        key = ("omega_vee", i)
        if key not in self._caches:
            ci = self.simple_comp[i]
            so = self.simple_off[ci]
            c = self.components[ci]
            ainv = la.inverse(c.cartan)
            # ω_i^vee = sum_k (A^{-1})_{ik} alpha_k^vee  since <alpha_k^vee, alpha_j> = A_kj
            v = [Fraction(0)] * self.dim
            for k in range(c.rank):
                v = la.add(v, la.scale(Fraction(ainv[i - so][k]), self.simple_coroot[so + k]))
            self._caches[key] = la.normalize(v)
        return self._caches[key]

    def pair(self, v: Sequence, f: Sequence):
        return la.dot(v, f)

    # ------------------------------------------------------------------ orbits
    @cached_property
    def simple_orbits(self) -> tuple[tuple[int, ...], ...]:
        seen, orbits = set(), []
        for i in range(self.rank):
            if i in seen:
                continue
            orb, j = [], i
            while j not in orb:
                orb.append(j)
                j = self.frobenius.simple_perm[j]
            seen.update(orb)
            orbits.append(tuple(sorted(orb)))
        return tuple(orbits)

    def orbit_of(self, i: int) -> int:
        for k, o in enumerate(self.simple_orbits):
            if i in o:
                return k
        raise KeyError(i)

    @cached_property
    def component_orbits(self) -> tuple[tuple[int, ...], ...]:
        seen, out = set(), []
        for ci in range(len(self.components)):
            if ci in seen:
                continue
            # close under sigma on components
            todo = [ci]
            orb = {ci}
            while todo:
                c = todo.pop()
                so = self.simple_off[c]
                img = self.simple_comp[self.frobenius.simple_perm[so]]
                if img not in orb:
                    orb.add(img)
                    todo.append(img)
            seen |= orb
            out.append(tuple(sorted(orb)))
        return tuple(out)

    def simple_perm_on_component(self, ci: int) -> bool:
        """True when the return map σ^d of the component orbit acts nontrivially on component ci."""
        orbit = next(o for o in self.component_orbits if ci in o)
        perm = self.frobenius.simple_perm
        so = self.simple_off[ci]
        for i in range(so, so + self.components[ci].rank):
            j = i
            for _ in range(len(orbit)):
                j = perm[j]
            if j != i:
                return True
        return False

    @property
    def is_split(self) -> bool:
        return self.frobenius.order == 1

    # ------------------------------------------------------------------ linear maps
    def sigma(self, v: Sequence) -> tuple:
        return la.mat_vec(self.frobenius.matrix, v)

    def sigma_average(self, v: Sequence) -> tuple:
        o = self.frobenius.order
        acc = [Fraction(0)] * self.dim
        cur = tuple(v)
        for _ in range(o):
            acc = la.add(acc, cur)
            cur = self.sigma(cur)
        return la.normalize(la.scale(Fraction(1, o), acc))

    def reflect(self, v: Sequence, i: int) -> tuple:
        c = la.dot(v, self.simple_func[i])
        if not c:
            return tuple(v)
        return la.sub(v, la.scale(c, self.simple_coroot[i]))

    def pairing_2rho(self, v: Sequence):
        return la.dot(v, self.rho2)

    def pairing_rho(self, v: Sequence):
        return Fraction(la.dot(v, self.rho2)) / 2

    def dominant(self, v: Sequence, simple: Iterable[int] | None = None) -> tuple[tuple, tuple[int, ...]]:
        """Dominant representative and a word (s_{i_k} ... s_{i_1}) with w v = v_dom (letters in application order)."""
        idx = tuple(range(self.rank)) if simple is None else tuple(simple)
        v = tuple(v)
        word = []
        while True:
            for i in idx:
                if la.dot(v, self.simple_func[i]) < 0:
                    v = self.reflect(v, i)
                    word.append(i)
                    break
            else:
                return la.normalize(v), tuple(word)

    def is_dominant(self, v: Sequence) -> bool:
        return all(la.dot(v, f) >= 0 for f in self.simple_func)

    def orbit(self, v: Sequence) -> list[tuple]:
        """W_0-orbit of a vector."""
        start = tuple(v)
        seen = {start}
        todo = [start]
        while todo:
            u = todo.pop()
            for i in range(self.rank):
                r = self.reflect(u, i)
                if r not in seen:
                    seen.add(r)
                    todo.append(r)
        return sorted(seen)

    def coroot_expansion(self, v: Sequence) -> tuple[tuple, tuple]:
        """v = central + sum_i c_i alpha_i^vee; returns (central, c)."""
        coeffs = self._coroot_coefficients(v)
        central = tuple(map(Fraction, v))
        for i, ci in enumerate(coeffs):
            if ci:
                central = la.sub(central, la.scale(ci, self.simple_coroot[i]))
        return la.normalize(central), la.normalize(coeffs)

    def _coroot_coefficients(self, v: Sequence) -> list:
        coeffs = [Fraction(0)] * self.rank
        for ci, c in enumerate(self.components):
            so = self.simple_off[ci]
            adj, d = self._cartan_adjugate(ci)
            p = [la.dot(v, self.simple_func[so + j]) for j in range(c.rank)]
            for i in range(c.rank):
                coeffs[so + i] = Fraction(sum(p[j] * adj[j][i] for j in range(c.rank) if p[j])) / d
        return coeffs

    def _cartan_adjugate(self, ci):
        """(d·A^{-1}, d) with d the common denominator of the inverse Cartan matrix."""
        key = ("cartan_adj", ci)
        if key not in self._caches:
            ainv = self._cartan_inv(ci)
            d = math.lcm(*(Fraction(a).denominator for row in ainv for a in row))
            self._caches[key] = (tuple(tuple(int(a * d) for a in row) for row in ainv), d)
        return self._caches[key]

    def _cartan_inv(self, ci):
        key = ("cartan_inv", ci)
        if key not in self._caches:
            self._caches[key] = la.inverse(self.components[ci].cartan)
        return self._caches[key]

    def orbit_coefficients(self, v: Sequence) -> tuple:
        """Per sigma-orbit O: <v, omega_O> = sum of coroot coefficients over O."""
        c = self._coroot_coefficients(v)
        return la.normalize(sum((c[i] for i in o), Fraction(0)) for o in self.simple_orbits)

    # ------------------------------------------------------------------ fundamental group
    @cached_property
    def pi1(self) -> FundamentalGroup:
        """X_* / ZΦ^vee (no coinvariants); classifies Ω-cosets."""
        return FundamentalGroup(self.dim, self.simple_coroot)

    @cached_property
    def pi1_sigma(self) -> FundamentalGroup:
        rel = list(self.simple_coroot)
        s = self.frobenius.matrix
        for j in range(self.dim):
            col = tuple(s[i][j] - (1 if i == j else 0) for i in range(self.dim))
            if any(col):
                rel.append(col)
        return FundamentalGroup(self.dim, rel)

    def kottwitz_class(self, v: Sequence[int]) -> tuple[int, ...]:
        if not la.is_integral(v):
            raise ValueError("Kottwitz class requires an integral cocharacter")
        return self.pi1_sigma(la.as_int(v))

    def omega_class(self, v: Sequence[int]) -> tuple[int, ...]:
        return self.pi1(v)

    # ------------------------------------------------------------------ weights
    def weight_from_roots(self, coeffs: Sequence) -> tuple:
        """Functional sum_i a_i alpha_i in lattice-dual coordinates."""
        f = [Fraction(0)] * self.dim
        for i, a in enumerate(coeffs):
            if a:
                f = la.add(f, la.scale(Fraction(a), self.simple_func[i]))
        return la.normalize(f)

    def fundamental_weight(self, i: int) -> tuple:
        ci = self.simple_comp[i]
        so = self.simple_off[ci]
        c = self.components[ci]
        ainv = self._cartan_inv(ci)
        # ω_i = sum_j M_ij alpha_j with M = (A^T)^{-1}, i.e. M_ij = (A^{-1})_{ji}
        coeffs = [0] * self.rank
        for j in range(c.rank):
            coeffs[so + j] = Fraction(ainv[j][i - so])
        return self.weight_from_roots(coeffs)

    def omega_orbit_weight(self, orbit: Sequence[int]) -> tuple:
        orbit = tuple(sorted(orbit))
        if orbit not in self.simple_orbits:
            raise ValueError(f"{orbit} is not a sigma-orbit of simple roots")
        f = [Fraction(0)] * self.dim
        for i in orbit:
            f = la.add(f, self.fundamental_weight(i))
        return la.normalize(f)

    # ------------------------------------------------------------------ Weyl machinery
    @cached_property
    def weyl(self):
        from .weylcombi import WeylGroup
        return WeylGroup(self)

    @cached_property
    def affine(self):
        from .weylcombi import AffineWeyl
        return AffineWeyl(self)

    def cache(self, name: str) -> dict:
        return self._caches.setdefault(("user", name), {})


_GROUP_CACHE: dict[str, GroupDatum] = {}


def build_group(spec: str) -> GroupDatum:
    """Parse a group spec such as ``A2``, ``C3:ad``, ``Res^3:A1`` or ``A3~2:ad``."""
    spec = spec.strip()
    if spec in _GROUP_CACHE:
        return _GROUP_CACHE[spec]
    factors = parse_group_spec(spec)
    comps: list[CartanComponent] = []
    blocks: list[tuple[int, int, tuple]] = []  # (component index, target index, matrix)
    for fac in factors:
        base = _make_component(fac.cartan_type, fac.rank, fac.isogeny, fac.twist)
        start = len(comps)
        for _ in range(fac.restriction):
            comps.append(base)
        d = fac.restriction
        ident = la.identity(base.lattice_dim)
        for j in range(d):
            src = start + j
            if d == 1:
                blocks.append((src, src, base.twist_matrix))
            elif j < d - 1:
                blocks.append((src, src + 1, ident))
            else:
                blocks.append((src, start, base.twist_matrix))
    offs, o = [], 0
    for c in comps:
        offs.append(o)
        o += c.lattice_dim
    dim = o
    sigma = [[0] * dim for _ in range(dim)]
    for src, dst, m in blocks:
        for a in range(len(m)):
            for b in range(len(m)):
                sigma[offs[dst] + a][offs[src] + b] = m[a][b]
    G = GroupDatum(spec, comps, tuple(map(tuple, sigma)))
    _GROUP_CACHE[spec] = G
    return G


# ---------------------------------------------------------------------- module-level API

def pairing(G: GroupDatum, v: Sequence, w: Sequence):
    """Exact pairing of a cocharacter (lattice coordinates) with a weight (lattice-dual coordinates)."""
    if len(v) != G.dim or len(w) != G.dim:
        raise ValueError("dimension mismatch")
    return la.normalize([la.dot(v, w)])[0]


def dominant_representative(G: GroupDatum, mu: Sequence):
    """(mu_dom, w) with w mu = mu_dom."""
    dom, word = G.dominant(mu)
    return dom, G.weyl.from_word(tuple(reversed(word)))


def coroot_expansion(G: GroupDatum, v: Sequence):
    return G.coroot_expansion(v)


def omega_orbit_weight(G: GroupDatum, orbit: Sequence[int]):
    return G.omega_orbit_weight(orbit)


def kottwitz_class(G: GroupDatum, mu: Sequence):
    return G.kottwitz_class(mu)
