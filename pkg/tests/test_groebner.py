import pytest
from hypothesis import given
from hypothesis import strategies as st

from phylotoric.algebra.binomial import (
    BinomialBuchberger,
    BudgetExceededError,
    groebner_binomials,
    saturate_binomials,
    saturate_homogeneous_binomials,
)
from phylotoric.algebra.groebner import (
    Ideal,
    MissingBasisError,
    NotBinomialError,
    binomial,
    buchberger,
    is_groebner_basis,
    is_reduced,
    normal_form,
    s_polynomial,
    saturate_by_all_variables,
)
from phylotoric.algebra.orders import DEGREVLEX, LEX, elimination
from phylotoric.algebra.polynomial import Ring

R = Ring(["x", "y"])
R3 = Ring(["x", "y", "z"])


def gb(ring, gens, order=LEX):
    return buchberger(Ideal(ring, [ring(g) for g in gens]), order).basis(order)


def test_single_generator_is_a_basis():
    assert gb(R, ["x^2 - y"]) == (R("x^2 - y"),)


def test_hand_basis():
    # S(xy - 1, y^2 - 1) = y - x
    assert set(gb(R, ["x*y - 1", "y^2 - 1"])) == {R("x - y"), R("y^2 - 1")}


def test_linear_generator_any_order():
    for order in (LEX, DEGREVLEX, elimination(1)):
        assert gb(R, ["x - y"], order) == (R("x - y"),)


def test_normal_form_examples():
    I = buchberger(Ideal(R, [R("x - y")]), LEX)
    assert normal_form(R("x - y"), I).is_zero()
    assert normal_form(R("x^2"), I) == R("y^2")
    J = buchberger(Ideal(R, [R("x")]), LEX)
    assert normal_form(R.one(), J) == R.one()
    with pytest.raises(MissingBasisError):
        normal_form(R("x"), Ideal(R, [R("x")]))


def test_basis_is_sorted_and_monic():
    B = gb(R3, ["2*x^2 - y*z", "x*y - z^2", "y^3 - x*z"], DEGREVLEX)
    assert is_groebner_basis(B, DEGREVLEX) and is_reduced(B, DEGREVLEX)
    keys = [DEGREVLEX.key(g.leading_term(DEGREVLEX)[0]) for g in B]
    assert keys == sorted(keys)


def test_step_budget_aborts():
    gens = [R3("x^3 - y*z^2"), R3("y^3 - x^2*z"), R3("z^3 - x*y^2")]
    with pytest.raises(BudgetExceededError):
        buchberger(Ideal(R3, gens), DEGREVLEX, budget=1)


def test_saturation_examples():
    def sat(g):
        return set(saturate_by_all_variables(Ideal(R3, [R3(g)])).basis(DEGREVLEX))

    assert sat("x*z - y*z") == {R3("x - y")}
    assert sat("x - y") == {R3("x - y")}
    assert sat("x^2 - x*y") == {R3("x - y")}
    with pytest.raises(NotBinomialError):
        saturate_by_all_variables(Ideal(R3, [R3("x + y + z")]))


def test_engines_agree_on_binomials():
    gens = [R3("x^2*y - z^3"), R3("x*z - y^2")]
    generic = buchberger(Ideal(R3, gens + [R3("0")]), DEGREVLEX).basis()
    pairs = groebner_binomials([((2, 1, 0), (0, 0, 3)), ((1, 0, 1), (0, 2, 0))], 3)
    assert set(generic) == {binomial(R3, a, b) for a, b in pairs}


def test_engine_membership_and_size_cap():
    eng = BinomialBuchberger(3, DEGREVLEX)
    eng.run([((1, 0, 0), (0, 1, 0))])
    assert eng.contains((2, 0, 0), (0, 2, 0))
    assert not eng.contains((1, 0, 0), (0, 0, 1))
    capped = BinomialBuchberger(4, DEGREVLEX, max_size=1)
    with pytest.raises(BudgetExceededError, match="exceeds 1 elements"):
        capped.run([((2, 0, 0, 0), (0, 1, 1, 0)), ((0, 2, 0, 0), (1, 0, 0, 1)), ((0, 0, 2, 0), (0, 0, 0, 2))])


def test_variable_by_variable_saturation_matches_t_trick():
    gens = [((1, 0, 1, 0), (0, 1, 0, 1)), ((2, 0, 0, 0), (0, 1, 1, 0))]
    homog = [(a, b) for a, b in gens if sum(a) == sum(b)]
    assert saturate_homogeneous_binomials(homog, 4) == saturate_binomials(homog, 4)


# ---------------------------------------------------------------------------
# properties

expo = st.tuples(st.integers(0, 2), st.integers(0, 2), st.integers(0, 2))
binoms = st.lists(st.tuples(expo, expo).filter(lambda ab: ab[0] != ab[1]), min_size=1, max_size=4)


@given(binoms)
def test_s_polynomials_reduce_to_zero(gens):
    I = buchberger(Ideal(R3, [binomial(R3, a, b) for a, b in gens]), DEGREVLEX)
    B = I.basis(DEGREVLEX)
    assert is_reduced(B, DEGREVLEX)
    for i in range(len(B)):
        for j in range(i + 1, len(B)):
            assert normal_form(s_polynomial(B[i], B[j], DEGREVLEX), I).is_zero()
    for a, b in gens:
        assert binomial(R3, a, b) in I


@given(binoms)
def test_saturation_is_idempotent(gens):
    once = saturate_binomials(gens, 3)
    assert saturate_binomials(once, 3) == once
    # and contains the input ideal
    eng = BinomialBuchberger(3, DEGREVLEX)
    eng.run(once)
    assert all(eng.contains(a, b) for a, b in gens)
