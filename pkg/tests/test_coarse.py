from fractions import Fraction

import pytest

from coarsedim.coarse import (
    EntourageSample,
    FamilyView,
    GapSet,
    close_family,
    closeness_check,
    cocompact_inclusion_check,
    completion_membership,
    completion_view,
    compose_entourages,
    containment_lemma_check,
    enlarge_by_normal,
    entourage_in_family,
    entourage_membership,
    entourage_membership_bruteforce,
    family_axioms_check,
    family_inverse,
    family_product,
    family_union,
    gap_gap,
    is_bounded,
    is_connected,
    morphism_check,
    normal_product,
    pushforward_family,
    restrict_family,
    shear,
)
from coarsedim.errors import DomainMismatchError, EmptyFamilyError, ModelMismatchError, NotNormalError
from coarsedim.groups import Dyadic, FreeAbelian, FreeGroup, Integers
from coarsedim.homs import (
    abelianization,
    constant_hom,
    coordinate_subgroup,
    cyclic_letter_subgroup,
    identity_hom,
    multiples,
    projection,
    trivial_subgroup,
    whole_group,
)
from oracles import free_inv, free_mul, realize_pair

Z, Z2, F2 = Integers(), FreeAbelian(2), FreeGroup(2)


# -- shear and set algebra --------------------------------------------------

def test_shear_examples():
    assert shear(Z2, ((1, 0), (0, 0))) == (1, 0)
    for g in [(3, -1), (0, 0)]:
        assert shear(Z2, (g, g)) == (0, 0)
    assert shear(F2, ("ab", "b")) == free_mul(free_inv("b"), "ab") == "Bab"


def test_family_operations():
    assert family_product(GapSet.of(Z, [0, 1]), GapSet.of(Z, [0, 2])).elements == {0, 1, 2, 3}
    assert family_inverse(GapSet.of(F2, ["a"])).elements == {"A"}
    U = family_union(GapSet.of(Z2, [(1, 0)]), GapSet.of(Z2, [(0, 1)]))
    assert family_product(U, GapSet.of(Z2, [(0, 0)])).elements == {(1, 0), (0, 1)}


def test_mixed_models_rejected():
    with pytest.raises(ModelMismatchError):
        family_union(GapSet.of(Z, [0]), GapSet.of(F2, [""]))


def test_gapset_json():
    A = GapSet.parse(F2, ["1", "ab", "B"])
    assert A.elements == {"", "ab", "B"}
    assert GapSet.parse(F2, A.to_json()) == A


# -- entourages -------------------------------------------------------------

def test_entourage_membership_examples():
    win = Z.ball(30)
    A = GapSet.of(Z, [0, 1, 2])
    E = EntourageSample.of(Z, [(5, 3)])
    assert entourage_membership(E, A)
    assert realize_pair((5, 3), A.elements, win.elements, Z.mul, Z.inv) is not None
    assert gap_gap(A).elements == set(range(-2, 3))

    diag = EntourageSample.of(F2, [("ab", "ab"), ("", "")])
    assert entourage_membership(diag, GapSet.of(F2, ["b"]))

    E2 = EntourageSample.of(Z, [(10, 0)])
    A2 = GapSet.of(Z, [0, 1])
    assert not entourage_membership(E2, A2)
    assert realize_pair((10, 0), A2.elements, win.elements, Z.mul, Z.inv) is None
    assert not entourage_membership_bruteforce(E2, A2, win)


def test_compose_entourages():
    E = EntourageSample.of(F2, [("a", "b")])
    assert compose_entourages(E, EntourageSample.of(F2, [("b", "ab")])).pairs == {("a", "ab")}
    assert compose_entourages(E, EntourageSample.of(F2, [])).pairs == frozenset()
    E1 = EntourageSample.of(Z, [(2, 1), (3, 1)])
    assert compose_entourages(E1, EntourageSample.of(Z, [(1, 0)])).pairs == {(2, 0), (3, 0)}


def test_containment_lemma():
    assert containment_lemma_check(GapSet.of(Z, [0, 1]), GapSet.of(Z, [0, 2]), Z.ball(8))
    assert containment_lemma_check(GapSet.of(Z, []), GapSet.of(Z, [0, 2]), Z.ball(8))
    rep = containment_lemma_check(GapSet.of(F2, ["a"]), GapSet.of(F2, ["b"]), F2.ball(4))
    assert rep and rep.details["pairs_checked"] > 0


# -- completion and boundedness --------------------------------------------

def test_completion_membership():
    rep = completion_membership(GapSet.of(Z, [-3, 5]), FamilyView.norm_bounded(Z))
    assert rep and rep.details["witness_radius"] == 5
    expl = FamilyView.explicit(Z, [[], [0]])
    assert not completion_membership(GapSet.of(Z, [1]), expl)
    D = Dyadic(6)
    rep = completion_membership(GapSet.of(D, [Fraction(3, 4)]), FamilyView.norm_bounded(D))
    assert rep and rep.details["witness_radius"] == 4   # weights k+1: 1 + (-1/4)


def test_cardinality_view_accepts_finite_sets():
    assert completion_membership(GapSet.of(F2, ["abab", "B"]), FamilyView.cardinality_bounded(F2))


def test_is_bounded():
    B = GapSet.of(Z, range(6))
    assert gap_gap(B).elements == set(range(-5, 6))
    assert is_bounded(B, FamilyView.norm_bounded(Z))
    assert is_bounded(GapSet.of(Z, []), FamilyView.explicit(Z, [[0]]))
    assert not is_bounded(GapSet.of(Z, [0, 7]), FamilyView.explicit(Z, [[0]]))


def test_is_connected():
    for r in (1, 5, 12):
        assert is_connected(FamilyView.norm_bounded(Z), Z.ball(r))
    rep = is_connected(FamilyView.explicit(Z, [[0]]), Z.ball(1))
    assert not rep and set(rep.witnesses) == {"-1", "1"}
    D = Dyadic(6)
    rep = is_connected(FamilyView.norm_bounded(D), D.ball(6))
    assert rep and "connected on window 6" == rep.details["scope"]


# -- restriction, pushforward, normal enlargement ---------------------------

def test_restrict_balls_to_axis_gives_integer_balls():
    H = coordinate_subgroup(Z2, 0)
    R = restrict_family(FamilyView.norm_bounded(Z2), H, Z2.ball(5))
    for t in range(-6, 7):
        assert R.norm(t) == Z.norm(t) == abs(t)
    assert "meets-H checked on window only" in R.flags


def test_restrict_explicit_and_trivial():
    H = coordinate_subgroup(Z2, 0)
    R = restrict_family(FamilyView.explicit(Z2, [[(0, 0)]]), H)
    assert [A.elements for A in R.members] == [{0}]
    T = trivial_subgroup(Z2)
    R = restrict_family(FamilyView.explicit(Z2, [[(0, 0), (1, 2)]]), T)
    assert all(A.elements <= {T.model.identity()} for A in R.members)
    with pytest.raises(EmptyFamilyError):
        restrict_family(FamilyView.explicit(Z2, [[(0, 1)]]), H)


def test_pushforward():
    P = projection(Z2, 0)
    F = pushforward_family(FamilyView.norm_bounded(Z2), P)
    for r in range(4):
        img = GapSet(Z, P.image_set(Z2.ball(r).elements))
        assert img.elements == set(range(-r, r + 1))
        assert completion_membership(img, F)
    expl = FamilyView.explicit(Z2, [[(0, 0), (1, 1)]])
    assert pushforward_family(expl, identity_hom(Z2)).members == expl.members
    ab = pushforward_family(FamilyView.explicit(F2, [["a", "b"]]), abelianization(F2))
    assert ab.members[0].elements == {(1, 0), (0, 1)}


def test_enlarge_by_normal():
    win = Z2.ball(5)
    N = coordinate_subgroup(Z2, 0)
    F = enlarge_by_normal(FamilyView.explicit(Z2, [[(0, 0)], [(0, 1)]]), N, win)
    assert F.members[0].elements == {(t, 0) for t in range(-5, 6)}
    assert F.members[1].elements == {(t, 1) for t in range(-4, 5)}
    assert F.window_radius == 5
    same = enlarge_by_normal(FamilyView.explicit(Z2, [[(0, 0), (1, 0)]]), trivial_subgroup(Z2), win)
    assert same.members[0].elements == {(0, 0), (1, 0)}


def test_enlarge_by_non_normal_subgroup_raises():
    with pytest.raises(NotNormalError) as exc:
        enlarge_by_normal(FamilyView.explicit(F2, [["a"]]), cyclic_letter_subgroup(F2, "a"), F2.ball(3))
    g, n = exc.value.witness
    assert not all(c in "aA" for c in free_mul(free_mul(g, n), free_inv(g)))


def test_normal_product_sides_agree_in_abelian_group():
    win = Z2.ball(6)
    N = coordinate_subgroup(Z2, 1)
    A = [(1, 0), (2, 3)]
    assert normal_product(N, A, win, "left") == normal_product(N, A, win, "right")


# -- morphisms, closeness, cocompactness ------------------------------------

def test_morphism_inclusion_is_embedding():
    H = coordinate_subgroup(Z2, 0)
    rep = morphism_check(H.inclusion, FamilyView.norm_bounded(Z), FamilyView.norm_bounded(Z2), "embedding",
                         Z.ball(10))
    assert rep


def test_morphism_constant_hom():
    c = constant_hom(Z, Z)
    F = FamilyView.norm_bounded(Z)
    assert morphism_check(c, F, F, "uniform", Z.ball(10))
    assert not morphism_check(c, F, F, "proper", Z.ball(10))


def test_morphism_identity():
    F = FamilyView.norm_bounded(F2)
    assert morphism_check(identity_hom(F2), F, F, "embedding", F2.ball(4))


def test_closeness():
    dom = range(-20, 21)
    p = {s: s for s in dom}
    assert closeness_check(p, dict(p), FamilyView.norm_bounded(Z))
    assert closeness_check(p, {s: s + 3 for s in dom}, FamilyView.norm_bounded(Z))
    F5 = FamilyView.explicit(Z, [range(-5, 6)])
    assert not closeness_check(p, {s: 2 * s for s in dom}, F5)
    with pytest.raises(DomainMismatchError):
        closeness_check({0: 0}, {1: 1}, F5)


def test_cocompact_inclusion():
    win = Z.ball(10)
    H = multiples(Z, 2)
    assert cocompact_inclusion_check(H, GapSet.of(Z, [0, 1]), win)
    assert cocompact_inclusion_check(whole_group(Z), GapSet.of(Z, [0]), win)
    rep = cocompact_inclusion_check(H, GapSet.of(Z, [0]), win)
    assert not rep and "1" in rep.child("HB=G").witnesses


# -- window-closed families -------------------------------------------------

def test_close_family_is_closed():
    win = Z.ball(6)
    F = close_family([[2]], win)
    assert F.members[0].elements == {-6, -4, -2, 0, 2, 4, 6}
    assert family_axioms_check(F, win)


def test_completion_view_idempotent():
    F = FamilyView.explicit(Z, [[0, 1], [0], [1, 2, 3], [2, 3]])
    C = completion_view(F)
    assert completion_view(C) == C
    assert sorted(sorted(A.elements) for A in C.members) == [[0, 1], [1, 2, 3]]


def test_entourage_in_family_views():
    E = EntourageSample.of(Z, [(4, 0), (0, 4)])
    assert entourage_in_family(E, FamilyView.norm_bounded(Z))
    assert entourage_in_family(E, FamilyView.explicit(Z, [[0, 4]]))
    assert not entourage_in_family(E, FamilyView.explicit(Z, [[0, 3]]))
