"""Properties of the computed invariants: Gröbner criterion, root and leaf-label invariance."""

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from instances import FEASIBLE, maps, result
from phylotoric.algebra.binomial import BinomialBuchberger, is_binomial_groebner_basis
from phylotoric.algebra.groebner import Ideal, binomial, is_groebner_basis
from phylotoric.algebra.orders import DEGREVLEX
from phylotoric.algebra.polynomial import Ring
from phylotoric.models import get_model
from phylotoric.parametrization import exponent_matrix, fourier_map, leaf_tuples, probability_map
from phylotoric.toric import ToricConfig, analyze
from phylotoric.trees import catalog_tree


def pairs(ideal):
    out = []
    for g in ideal.basis() or ():
        lm, _ = g.leading_term(DEGREVLEX)
        (other,) = [m for m in g.terms if m != lm]
        out.append((lm, other))
    return out


def same_binomial_ideal(P, Q, nvars):
    """Two sets of binomial (lead, trail) pairs generate the same ideal."""
    for X, Y in ((P, Q), (Q, P)):
        eng = BinomialBuchberger(nvars, DEGREVLEX)
        eng.run(Y)
        if not all(eng.contains(a, b) for a, b in X):
            return False
    return True


CHEAP = [k for k in FEASIBLE if k != (2, "K3P")]


@pytest.mark.parametrize("key", FEASIBLE, ids=lambda k: f"{k[0]}-{k[1]}")
def test_computed_bases_satisfy_buchberger_criterion(key):
    ideal = result(*key).ideal
    P = pairs(ideal)
    assert is_binomial_groebner_basis(P, ideal.ring.nvars)
    if len(P) <= 40:
        assert is_groebner_basis(ideal.basis())


def test_criterion_detects_incomplete_basis():
    # twisted cubic: the three quadrics form a basis, the first two do not
    R = Ring(["a", "b", "c", "d"])
    full = [binomial(R, (0, 2, 0, 0), (1, 0, 1, 0)), binomial(R, (0, 1, 1, 0), (1, 0, 0, 1)),
            binomial(R, (0, 0, 2, 0), (0, 1, 0, 1))]
    P = pairs(Ideal(R, full).with_basis(full, DEGREVLEX))
    assert is_binomial_groebner_basis(P, 4)
    assert not is_binomial_groebner_basis(P[:2], 4)
    assert not is_groebner_basis(full[:2])
    with pytest.raises(ValueError):
        is_binomial_groebner_basis([(P[0][1], P[0][0])], 4)


exps = st.tuples(*[st.integers(0, 2)] * 4)


@given(st.lists(st.tuples(exps, exps), min_size=1, max_size=4))
def test_compiled_criterion_matches_reference(raw):
    R = Ring(["a", "b", "c", "d"])
    P = []
    for a, b in raw:
        if a == b:
            continue
        P.append((a, b) if DEGREVLEX.key(a) > DEGREVLEX.key(b) else (b, a))
    polys = [binomial(R, a, b) for a, b in P]
    assert is_binomial_groebner_basis(P, 4) == is_groebner_basis(polys)


def _column_map(em_from, em_to, coord_map):
    """Column of ``em_to`` for each column of ``em_from`` through a coordinate bijection."""
    out = []
    for col in range(em_from.nq):
        targets = {em_to.class_map[coord_map[i]] for i in em_from.column_members(col)}
        assert len(targets) == 1 and None not in targets
        out.append(targets.pop())
    assert sorted(out) == list(range(em_to.nq))
    return out


def _moved(P, cmap, n):
    out = []
    for a, b in P:
        x, y = [0] * n, [0] * n
        for c, (u, v) in enumerate(zip(a, b)):
            x[cmap[c]], y[cmap[c]] = u, v
        out.append((tuple(x), tuple(y)))
    return out


@pytest.mark.parametrize("key", CHEAP, ids=lambda k: f"{k[0]}-{k[1]}")
def test_invariants_do_not_depend_on_the_root(key):
    tree, model, pm, fm, em = maps(*key)
    base = pairs(result(*key).ideal)
    ident = list(range(len(fm.coords)))
    for v in tree.vertices:
        em_v = exponent_matrix(fourier_map(tree, model, root=v), pm)
        cmap = _column_map(em, em_v, ident)
        P = pairs(analyze(em_v, ToricConfig(volume=False)).ideal)
        assert same_binomial_ideal(_moved(base, cmap, em.nq), P, em.nq)


def _relabel_coords(n, model, perm):
    """Coordinate index on the relabelled tree for each coordinate of the original."""
    tuples = leaf_tuples(n, model)
    index = {h: i for i, h in enumerate(tuples)}
    out = []
    for h in tuples:
        moved = [None] * n
        for i in range(n):
            moved[perm[i] - 1] = h[i]
        out.append(index[tuple(moved)])
    return out


RELABEL_CASES = CHEAP + [(4, "JC"), (5, "CFN"), (6, "CFN")]


@pytest.mark.parametrize("key", RELABEL_CASES, ids=lambda k: f"{k[0]}-{k[1]}")
def test_invariants_follow_leaf_relabelling(key):
    tid, mid = key
    tree = catalog_tree(tid).shape
    model = get_model(mid)
    em = exponent_matrix(fourier_map(tree, model))
    base = pairs(analyze(em, ToricConfig(volume=False)).ideal)
    rng = random.Random(tid * 31 + len(mid))
    for _ in range(2):
        perm = list(range(1, tree.n_leaves + 1))
        rng.shuffle(perm)
        t2 = tree.relabel(perm)
        em2 = exponent_matrix(fourier_map(t2, model), probability_map(t2, model))
        assert em2.np == em.np
        cmap = _column_map(em, em2, _relabel_coords(tree.n_leaves, model, perm))
        res2 = analyze(em2, ToricConfig(volume=False))
        assert same_binomial_ideal(_moved(base, cmap, em.nq), pairs(res2.ideal), em.nq)
