"""Newton points, B(G, μ), defects and chain lengths against GL_n polygon oracles."""

from fractions import Fraction

import pytest

from artifact.admissible import adm
from artifact.newton import (b_of_mu_set, bg_leq, chai_length, chain_length, class_of_translation,
                             defect, defect_breakpoints, defect_fixed_space, generic_class,
                             is_fundamental, is_hn_indecomposable, max_indec, newton_point)
from artifact.reduction import class_dims
from artifact.rootdata import build_group
from oracles import gl_defect, gl_newton, gl_polygons, perm_of

GL_MUS = [(1, 0), (2, 0), (2, 0, 0), (2, 0, -1), (1, 1, 0, 0), (2, 0, 0, -1), (2, 1, 0, 0, 0)]


@pytest.mark.parametrize("mu", [(2, 0, -1), (1, 1, 0, 0), (2, 0, 0)])
def test_newton_point_against_powers(mu):
    G = build_group(f"A{len(mu) - 1}")
    for x in adm(G, mu):
        nu = gl_newton(G.to_ambient(x.lam), perm_of(G, x.w))
        b = newton_point(G, x)
        assert G.to_ambient(b.nu) == nu
        assert b.kappa == G.kottwitz_class(x.lam)


@pytest.mark.parametrize("mu", GL_MUS)
def test_b_of_mu_is_the_set_of_polygons(mu):
    G = build_group(f"A{len(mu) - 1}")
    got = {G.to_ambient(b.nu) for b in b_of_mu_set(G, mu)}
    assert got == gl_polygons(mu)


@pytest.mark.parametrize("mu", GL_MUS)
def test_defect_against_segment_count(mu):
    G = build_group(f"A{len(mu) - 1}")
    for b in b_of_mu_set(G, mu):
        assert defect(G, b) == gl_defect(G.to_ambient(b.nu))
        assert defect_fixed_space(G, b) == defect_breakpoints(G, b)


def test_basic_and_top_classes():
    G = build_group("A2")
    bs = b_of_mu_set(G, (2, 0, 0))
    assert G.to_ambient(bs.minimum().nu) == (Fraction(2, 3),) * 3
    assert defect(G, bs.minimum()) == 2
    assert bs.maximum() == class_of_translation(G, (2, 0, 0))
    assert defect(G, bs.maximum()) == 0


def test_twisted_defect_uses_relative_rank():
    G = build_group("A2~2:ad")
    bs = b_of_mu_set(G, G.from_coweights([1, 1]))
    for b in bs:
        assert 0 <= defect(G, b) <= len(G.simple_orbits)
    assert defect(G, bs.maximum()) == 0


@pytest.mark.parametrize("mu", [(2, 0, 0, -1), (1, 1, 0, -1), (2, 1, 0, 0, 0)])
def test_chain_length_matches_chai(mu):
    G = build_group(f"A{len(mu) - 1}")
    bs = b_of_mu_set(G, mu)
    for a in bs:
        for b in bs:
            if bs.leq(a, b):
                assert chain_length(G, bs, a, b) == chai_length(G, a, b)


def test_order_is_dominance_of_polygons():
    G = build_group("A3")
    bs = b_of_mu_set(G, (2, 0, 0, -1))
    for a in bs:
        for b in bs:
            na, nb = G.to_ambient(a.nu), G.to_ambient(b.nu)
            partial = all(sum(na[:k]) <= sum(nb[:k]) for k in range(1, 5))
            assert bg_leq(G, a, b) == partial


@pytest.mark.parametrize("spec,mu", [("A2", (2, 0, -1)), ("C2", (1, 1)), ("A3", (1, 1, 0, -1))])
def test_generic_class_is_top_of_reduction_table(spec, mu):
    G = build_group(spec)
    mu = G.from_ambient(mu)
    for x in adm(G, mu):
        table = class_dims(G, x).table
        g = generic_class(G, x)
        assert g in table and all(bg_leq(G, b, g) for b in table)
        assert table[g] == G.affine.length(x) - G.pairing_2rho(g.nu)
        if is_fundamental(G, x):
            assert list(table) == [newton_point(G, x)]


def test_hodge_newton_indecomposable_classes():
    G = build_group("A2")
    mu = (2, 0, 0)
    got = sorted(G.to_ambient(b.nu) for b in b_of_mu_set(G, mu) if is_hn_indecomposable(G, mu, b))
    assert got == [(Fraction(2, 3),) * 3, (1, Fraction(1, 2), Fraction(1, 2))]
    assert G.to_ambient(max_indec(G, mu).nu) == (1, Fraction(1, 2), Fraction(1, 2))
