from fractions import Fraction

import pytest

from coarsedim.errors import ConfigError, ModelMismatchError, NotGeneratedError, ResourceLimitError, SearchBudgetError
from coarsedim.groups import (
    Cyclic,
    DirectProduct,
    Dyadic,
    FreeAbelian,
    FreeGroup,
    Integers,
    TrivialGroup,
    as_fraction,
    model_from_json,
    multiply,
    preset,
)
from oracles import dijkstra_norms, dyadic_min_cost, free_reduce, free_words


# -- multiply ---------------------------------------------------------------

def test_multiply_free_abelian():
    G = FreeAbelian(2)
    assert str(multiply(G.element("(1,0)"), G.element("(0,1)"))) == "(1,1)"


def test_multiply_free_cancels():
    F = FreeGroup(2)
    assert F.element("a") * F.element("A") == F.element("1")
    assert str(F.element("a") * F.element("A")) == "1"


def test_multiply_dyadic_is_addition():
    D = Dyadic(6)
    assert D.element("1/2") * D.element("3/4") == D.element("5/4")


def test_multiply_mixed_models_rejected():
    with pytest.raises(ModelMismatchError):
        multiply(Integers().element("1"), FreeAbelian(2).element("(1,0)"))


def test_bad_normal_form_rejected():
    with pytest.raises(ModelMismatchError):
        FreeAbelian(2).multiply((1, 0), (1, 0, 0))


def test_normalize_idempotent_free():
    F = FreeGroup(3)
    for w in ["abBA", "aAbc", "cCCc", "abcCBA", "baAb"]:
        x = F.parse(w)
        assert F.parse(F.format(x)) == x
        assert x == free_reduce(w)


# -- weighted norms ---------------------------------------------------------

def test_norm_integers():
    assert Integers().norm(7) == 7


def test_norm_free_word():
    F = FreeGroup(2)
    x = F.parse("abaB")
    assert F.norm(x) == 4
    # BFS oracle: no reduced word of length < 4 represents it
    assert x not in free_words(2, 3)


def test_norm_dyadic_three_quarters():
    D = Dyadic(6)
    # the stated factorization 1/4 + 1/2 costs 3 + 2 = 5, but 1 + (-1/4) costs 1 + 3 = 4
    assert 3 + 2 == 5
    assert D.norm(Fraction(3, 4)) == 4
    assert dyadic_min_cost(Fraction(3, 4), 6, max_terms=4) == 4


@pytest.mark.parametrize("x", [Fraction(1, 64), Fraction(5, 8), Fraction(-3, 2), Fraction(7, 16), Fraction(2)])
def test_norm_dyadic_matches_exhaustive_oracle(x):
    assert Dyadic(6).norm(x) == dyadic_min_cost(x, 6, max_terms=5)


def test_norm_not_generated():
    # finite search space: exhausting it proves 3 is not generated by ±2 in Z/6
    C = Cyclic(6).with_generators([(2, 1), (4, 1)])
    with pytest.raises(NotGeneratedError):
        C.norm(3)


def test_norm_unreachable_in_infinite_group_is_budget():
    Z = Integers().with_generators([(2, 1), (-2, 1)])
    with pytest.raises(SearchBudgetError):
        Z.norm(3, budget=1000)


def test_norm_budget():
    with pytest.raises(SearchBudgetError):
        FreeGroup(3).norm("abcabcabcabc", budget=50)


def test_custom_weights():
    Z = Integers().with_generators([(1, 1), (-1, 1), (3, "3/2"), (-3, "3/2")])
    assert Z.norm(6) == 3
    assert Z.norm(4) == Fraction(5, 2)


def test_identity_never_a_generator():
    with pytest.raises(ConfigError):
        Integers().with_generators([(0, 1), (1, 1), (-1, 1)])


def test_generators_symmetric():
    for G in [Integers(), FreeAbelian(3), FreeGroup(2), Cyclic(5), Dyadic(4)]:
        gs = G.generators
        for g, w in zip(gs.elements, gs.weights):
            assert G.inv(g) in gs.elements
            assert gs.weight_of(G.inv(g)) == w
            assert g != G.identity()


def test_float_weights_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)
    assert as_fraction("3/2") == Fraction(3, 2)


# -- balls ------------------------------------------------------------------

def test_ball_integers():
    w = Integers().ball(2)
    assert sorted(w.elements) == [-2, -1, 0, 1, 2]
    assert len(w) == 5


def test_ball_free_two():
    w = FreeGroup(2).ball(2)
    assert len(w) == 17 == 1 + 4 + 12
    assert set(w.elements) == set(free_words(2, 2))


def test_ball_z2_diamond():
    for r in range(5):
        assert len(FreeAbelian(2).ball(r)) == 2 * r * r + 2 * r + 1


@pytest.mark.parametrize("G", [Integers(), FreeAbelian(2), FreeGroup(2), Cyclic(7), Dyadic(3), TrivialGroup()])
def test_ball_zero(G):
    w = G.ball(0)
    assert list(w.elements) == [G.identity()]
    assert w.norms == (0,)


def test_ball_sorted_by_norm_then_normal_form():
    w = FreeGroup(2).ball(3)
    keys = [(n, x) for x, n in zip(w.elements, w.norms)]
    assert keys == sorted(keys)


def test_ball_matches_dijkstra_oracle():
    D = Dyadic(3)
    gens = D.standard_generators()
    ref = dijkstra_norms(Fraction(0), gens, lambda x, y: x + y, 7)
    w = D.ball(7)
    assert dict(zip(w.elements, w.norms)) == ref


def test_ball_cap():
    with pytest.raises(ResourceLimitError):
        FreeGroup(2).ball(8, cap=100)


def test_ball_cap_applies_to_cached_windows():
    F = FreeGroup(2)
    F.ball(6)
    with pytest.raises(ResourceLimitError):
        F.ball(6, cap=100)
    with pytest.raises(ResourceLimitError):
        F.ball(5, cap=100)


def test_cyclic_and_products():
    assert len(Cyclic(7).ball(10)) == 7
    P = DirectProduct((Integers(), Cyclic(3)))
    assert len(P.ball(1)) == 5
    assert P.norm((2, 2)) == 3
    assert P.order is None
    assert DirectProduct((Cyclic(2), Cyclic(3))).order == 6


# -- JSON / presets ---------------------------------------------------------

def test_presets():
    assert preset("Z") == Integers()
    assert preset("Z3") == FreeAbelian(3)
    assert preset("F2") == FreeGroup(2)
    assert preset("Z_mod_5") == Cyclic(5)
    assert preset("Dyadic(4)") == Dyadic(4)
    with pytest.raises(ConfigError):
        preset("SL2Z")


def test_model_from_json_round_trip():
    G = model_from_json({"kind": "free_abelian", "rank": 2, "generators": [{"gen": "(1,0)", "weight": "1"},
                                                                          {"gen": "(-1,0)", "weight": "1"},
                                                                          {"gen": "(0,1)", "weight": "2"},
                                                                          {"gen": "(0,-1)", "weight": "2"}]})
    assert G.norm((1, 1)) == 3
    assert model_from_json(G.to_json()) == G
    with pytest.raises(ConfigError):
        model_from_json('{"rank": 2}')
