"""Length one Bruhat covers, genericity, dimension formulas and slope statistics."""

from fractions import Fraction

import pytest

from artifact.admissible import ParahoricSpec, adm, adm_K, parse_level
from artifact.criteria import (check_adm_refl_inequality, cordial_dims, depth2_case,
                               depth2_gln_dim, fixed_point_bound, fundamental_inventory,
                               generic_distance_identity, ing_dim_formula, is_s_similar,
                               newton_cutoff, qbg_d, slope_stats, union_adlv_dim_iwahori,
                               verify_CL1BC, verify_ING, verify_L1BC)
from artifact.errors import PreconditionError
from artifact.newton import (b_of_mu_set, class_of_translation, generic_class,
                             is_hn_indecomposable, newton_point)
from artifact.reduction import class_dims
from artifact.rootdata import build_group

IWAHORI = ParahoricSpec(())


def _gl(n):
    return build_group(f"A{n - 1}")


# ---------------------------------------------------------------------- L1BC

def test_l1bc_basic_is_trivial():
    G = _gl(3)
    basic = b_of_mu_set(G, (2, 0, 0)).minimum()
    assert verify_L1BC(G, basic, (2, 0, 0)).verdict
    assert verify_CL1BC(G, basic, (2, 0, 0)).verdict


def test_l1bc_gl3_indecomposable():
    G = _gl(3)
    mu = (2, 0, 0)
    for b in b_of_mu_set(G, mu).indecomposable(mu):
        rep = verify_L1BC(G, b, mu)
        assert rep.verdict
        if G.pairing_2rho(b.nu) == 0:
            continue
        head = rep.witnesses[0]
        assert head["fundamentals"] == len(fundamental_inventory(G, b, mu))
        for w in rep.witnesses[1:]:
            assert w["length"] == 1


def test_cl1bc_gl4():
    G = _gl(4)
    mu = (1, 1, 0, -1)
    for b in b_of_mu_set(G, mu).indecomposable(mu):
        assert verify_CL1BC(G, b, mu).verdict


def test_l1bc_agrees_under_restriction():
    G, Gp = build_group("Res^2:A1:ad"), build_group("A1:ad")
    mu, mup = G.from_coweights([1, 1]), Gp.from_coweights([2])
    key = lambda H, b: (H.pairing_2rho(b.nu), b.kappa)
    left = sorted((key(G, b)[0], verify_L1BC(G, b, mu).verdict) for b in b_of_mu_set(G, mu))
    right = sorted((key(Gp, b)[0], verify_L1BC(Gp, b, mup).verdict) for b in b_of_mu_set(Gp, mup))
    assert [v for _, v in left] == [v for _, v in right]
    assert len(left) == len(right)


def test_cl1bc_failure_carries_counterexample():
    # A non-trivial failure: the reported failing class re-verifies as failing.
    G = _gl(3)
    mu = (3, 0, 0)
    top = class_of_translation(G, mu)
    rep = verify_CL1BC(G, top, mu)
    assert not rep.verdict and rep.failures
    for f in rep.failures:
        nu = tuple(Fraction(a) for a in f["class"]["nu"])
        b = [c for c in b_of_mu_set(G, mu) if G.to_ambient(c.nu) == nu][0]
        assert not verify_L1BC(G, b, mu).verdict


# ---------------------------------------------------------------------- cordial dimensions

def test_cordial_matches_reduction_gl3():
    G = _gl(3)
    for x in adm(G, (2, 0, 0)):
        lhs, d = generic_distance_identity(G, x)
        assert lhs == d
        for b, dim in class_dims(G, x).table.items():
            assert cordial_dims(G, x, b) == dim


def test_cordial_sp6_tau_s0():
    G = build_group("C3:ad")
    x = G.affine.parse("t[1/2,1/2,-1/2]*w[2,1,3,2,3]")
    assert qbg_d(G, x) == 3
    (b, dim), = class_dims(G, x).table.items()
    assert cordial_dims(G, x, b, verified=True) == dim == 1


def test_cordial_rejects_classes_outside_the_interval():
    G = _gl(3)
    x = G.affine.translation((2, 0, 0))
    basic = b_of_mu_set(G, (2, 0, 0)).minimum()
    with pytest.raises(PreconditionError):
        cordial_dims(G, x, basic)


# ---------------------------------------------------------------------- ING and unions

def test_ing_cases():
    assert verify_ING(_gl(4), (2, 0, 0, 0), IWAHORI).verdict
    G = _gl(4)
    assert verify_ING(G, (2, 0, 0, -1), parse_level(G, "hyperspecial")).verdict
    G = build_group("Res^2:A3:ad")
    rep = verify_ING(G, G.from_coweights([1, 0, 0, 1, 0, 0]), IWAHORI)
    assert not rep.verdict and rep.failures
    top = rep.witnesses[0]["b_indec"]
    for f in rep.failures:
        x = G.affine.parse(f["x"])
        assert generic_class(G, x).to_json(G) != top


def test_ing_maximality_notions_agree_at_hyperspecial():
    G = _gl(3)
    rep = verify_ING(G, (2, 0, -1), parse_level(G, "hyperspecial"))
    head = rep.witnesses[0]
    assert isinstance(head["maximality_agrees"], bool)
    assert head["indec_locus"] > 0 and head["bruhat_maximal"]
    assert rep.verdict


def test_union_dimensions():
    G = _gl(2)
    basic = b_of_mu_set(G, (1, 0)).minimum()
    assert union_adlv_dim_iwahori(G, (1, 0), basic)[0] == 0
    G = _gl(3)
    mu = (2, 0, 0)
    assert union_adlv_dim_iwahori(G, mu, class_of_translation(G, mu))[0] == 0
    assert union_adlv_dim_iwahori(G, mu, class_of_translation(G, (3, 0, 0))) is None
    for b in b_of_mu_set(G, mu).indecomposable(mu):
        assert ing_dim_formula(G, mu, IWAHORI, b) == union_adlv_dim_iwahori(G, mu, b)[0]


def test_ing_formula_requires_indecomposable():
    G = _gl(3)
    mu = (2, 0, 0)
    with pytest.raises(PreconditionError):
        ing_dim_formula(G, mu, IWAHORI, class_of_translation(G, mu))


# ---------------------------------------------------------------------- depth two GL_n

def test_depth2_cases():
    assert depth2_case(2, (2, 0, 0), ()) == ("i", 2)
    assert depth2_case(3, (1, 1, 0, 0), (1,)) == ("ii", 3)
    assert depth2_case(2, (2, 0, -1), (2,)) == ("iii", 4)
    assert depth2_case(3, (1, 1, 0, -1), (1,)) == ("iv", Fraction(5, 2))
    assert depth2_case(4, (2, 1, 0, 0, 0), ())[0] == "v"
    with pytest.raises(PreconditionError):
        depth2_case(3, (1, 1, 0, 0), (2,))
    with pytest.raises(PreconditionError):
        depth2_case(2, (1, 1, 0), ())


def test_depth2_gl3_values():
    G = _gl(3)
    mu = (2, 0, 0)
    bs = b_of_mu_set(G, mu)
    basic = bs.minimum()
    assert depth2_gln_dim(G, mu, (), basic) == 1
    mid = [b for b in bs if G.to_ambient(b.nu) == (1, Fraction(1, 2), Fraction(1, 2))][0]
    assert depth2_gln_dim(G, mu, (), mid) == 1


# ---------------------------------------------------------------------- slopes and cutoff

def test_slope_statistics():
    st = slope_stats((2, 0, 0, -1), 0)
    assert (st.S_gt, st.S_lt, st.s_trivial) == (2, 1, False)
    assert st.D_gt == {1} and st.D_lt == {4}
    assert slope_stats((1, 1, 0), 0).s_trivial
    lam = (2, -1, 0, 1)
    assert slope_stats(lam[::-1], Fraction(1, 2)).S_gt == slope_stats(lam, Fraction(1, 2)).S_gt
    assert is_s_similar((Fraction(1, 2), Fraction(1, 2)), (1, 0), 0)


def test_newton_cutoff_examples():
    G = _gl(2)
    A = G.affine
    x = A.parse("t[2,0]*w[1]")
    r = newton_cutoff(G, x, (2, 0), 1)
    assert r.index == 1 and A.serialize(r.tau) == "t[1,0]*w[1]" and G.to_ambient(r.mu_prime) == (1, 1)
    G3 = _gl(3)
    r = newton_cutoff(G3, G3.affine.one, (1, 0, -1), 0)
    assert r.index == 1 and G3.to_ambient(r.mu_prime) == (0, 0, 0)
    tau = A.parse("t[1,0]*w[1]")
    with pytest.raises(PreconditionError):
        newton_cutoff(G, tau, (1, 0), 0)
    with pytest.raises(PreconditionError):
        newton_cutoff(G3, G3.affine.one, (1, 1, 0), 0)


# ---------------------------------------------------------------------- reflection length bounds

def test_reflection_length_inequality():
    G = _gl(3)
    for x in adm(G, (2, 0, 0)):
        assert check_adm_refl_inequality(G, x, (2, 0, 0))
    assert check_adm_refl_inequality(G, G.affine.translation((2, 0, 0)), (2, 0, 0))


def test_fixed_point_bound():
    G = _gl(4)
    mu = (1, 1, 0, 0)
    count = 0
    for x in adm(G, mu):
        if is_hn_indecomposable(G, mu, generic_class(G, x)):
            count += 1
            assert fixed_point_bound(G, x, mu)
            assert G.weyl.reflection_length(x.w) >= 2
    assert count
    with pytest.raises(PreconditionError):
        fixed_point_bound(G, G.affine.translation(mu), mu)
