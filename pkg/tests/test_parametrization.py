import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from instances import SMALL, maps
from phylotoric.algebra.lattice import lattice_kernel
from phylotoric.models import MODEL_IDS, FiniteAbelianGroup, get_model
from phylotoric.parametrization import (
    column_symmetries,
    exponent_matrix,
    fourier_map,
    fourier_substitution,
    fourier_transform,
    probability_map,
    span_dimension,
    spot_check_commutes,
    stochastic_point,
    text_dump_p,
    text_dump_q,
    verify_commutes,
)
from phylotoric.trees import catalog, catalog_tree, parse_newick

CLAW = parse_newick("(1,2,3);")


def test_fourier_transform_one_leaf():
    assert fourier_transform(1, get_model("CFN")).matrix.tolist() == [[1, 1], [1, -1]]
    assert fourier_transform(1, FiniteAbelianGroup(1)).matrix.tolist() == [[1, 1], [1, -1]]
    with pytest.raises(ValueError):
        fourier_transform(0, get_model("CFN"))


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_transform_entries_are_characters(model_id):
    ft = fourier_transform(2, get_model(model_id))
    G = ft.model.group
    tuples = [(a, b) for a in G.elements for b in G.elements]
    for i, hs in enumerate(tuples):
        for j, gs in enumerate(tuples):
            assert ft.matrix[i, j] == ft.entry(hs, gs)


def test_cfn_claw_fourier_coordinates():
    fm = fourier_map(CLAW, get_model("CFN"))
    got = {lab: fm.monomial(i).to_text() for i, lab in enumerate(fm.labels()) if fm.coords[i] is not None}
    assert got == {
        "000": "f1_0*f2_0*f3_0",
        "011": "f1_0*f2_1*f3_1",
        "101": "f1_1*f2_0*f3_1",
        "110": "f1_1*f2_1*f3_0",
    }


def test_exponent_matrix_examples():
    cfn = exponent_matrix(fourier_map(CLAW, get_model("CFN")))
    assert cfn.A.shape == (6, 4) and cfn.nq == 4 and cfn.rank == 4
    jc = exponent_matrix(fourier_map(CLAW, get_model("JC")))
    assert jc.A.shape == (6, 5) and jc.nq == jc.np == 5 and jc.rank == 4
    (v,) = lattice_kernel(jc.A)
    assert sorted(map(abs, v)) == [1, 1, 1, 1, 2]
    # v1 + 2 v5 = v2 + v3 + v4 in first-occurrence order
    assert v in [(1, -1, -1, -1, 2), (-1, 1, 1, 1, -2)]


@pytest.mark.parametrize("key", SMALL, ids=lambda k: f"{k[0]}-{k[1]}")
def test_np_equals_nq(key):
    tree, model, pm, fm, em = maps(*key)
    assert em.np == em.nq
    # distinct coordinate polynomials may still be linearly dependent
    assert pm.distinct_classes >= em.np
    assert span_dimension(pm) == em.nq  # without the upper bound shortcut


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_zero_coordinates_count(model_id):
    model = get_model(model_id)
    for e in catalog(4):
        fm = fourier_map(e.shape, model)
        n, g = e.shape.n_leaves, model.group.order
        assert len(fm.coords) - len(fm.nonzero) == g**n - g ** (n - 1)


def test_commutes_small():
    assert verify_commutes(CLAW, get_model("CFN"))
    assert verify_commutes(CLAW, get_model("K3P"))
    assert spot_check_commutes(CLAW, get_model("K2P"), points=3, seed=1)


def test_broken_substitution_is_detected(monkeypatch):
    import phylotoric.parametrization as par

    real = par.fourier_substitution

    def swapped(tree, model):
        sub = real(tree, model)
        sub["f1_0"], sub["f1_1"] = sub["f1_1"], sub["f1_0"]
        return sub

    monkeypatch.setattr(par, "fourier_substitution", swapped)
    assert not par.verify_commutes(CLAW, get_model("JC"))
    assert not par.spot_check_commutes(CLAW, get_model("JC"))


@pytest.mark.parametrize("n", [1, 2, 3])
@pytest.mark.parametrize("model_id", ["CFN", "JC"])
def test_round_trip(n, model_id):
    ft = fourier_transform(n, get_model(model_id))
    assert ft.roundtrip_is_identity()
    rng = random.Random(n)
    v = [Fraction(rng.randint(-9, 9), rng.randint(1, 9)) for _ in range(ft.size)]
    assert ft.inverse(ft.forward(v)) == v


@pytest.mark.parametrize("tid", [1, 2, 3])
def test_root_invariance_of_maps(tid):
    tree = catalog_tree(tid).shape
    for mid in MODEL_IDS:
        model = get_model(mid)
        pm0, fm0 = probability_map(tree, model), fourier_map(tree, model)
        for root in tree.vertices:
            assert probability_map(tree, model, root).coords == pm0.coords
            assert fourier_map(tree, model, root).coords == fm0.coords


@given(st.sampled_from(SMALL), st.integers(0, 10_000))
def test_stochastic_parameters_give_a_distribution(key, seed):
    tree, model, pm, _, _ = maps(*key)
    p = pm.evaluate(stochastic_point(tree, model, random.Random(seed)))
    assert sum(p) == 1
    assert all(x > 0 for x in p)


@pytest.mark.parametrize("key", SMALL, ids=lambda k: f"{k[0]}-{k[1]}")
def test_column_symmetries_are_automorphisms_of_a(key):
    em = maps(*key)[4]
    cols = em.columns
    rows = set(map(tuple, em.A.entries))
    syms = column_symmetries(em)
    assert tuple(range(em.nq)) in syms
    for perm in syms:
        permuted = [[0] * em.nq for _ in range(em.A.nrows)]
        for j, c in enumerate(cols):
            for i, x in enumerate(c):
                permuted[i][perm[j]] = x
        assert set(map(tuple, permuted)) == rows


def test_substitution_is_linear():
    sub = fourier_substitution(CLAW, get_model("K3P"))
    assert len(sub) == 12
    assert all(p.total_degree() == 1 for p in sub.values())


def test_text_dumps():
    model = get_model("CFN")
    p = text_dump_p(probability_map(CLAW, model)).splitlines()
    q = text_dump_q(fourier_map(CLAW, model)).splitlines()
    assert len(p) == len(q) == 8
    assert p[0].startswith("p_000 = ") and q[1] == "q_001 = 0"
