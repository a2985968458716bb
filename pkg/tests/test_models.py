import pytest

from phylotoric.models import (
    MODEL_IDS,
    FiniteAbelianGroup,
    GroupBasedModel,
    builtin_models,
    character_table,
    character_value,
    get_model,
)


def test_builtin_models():
    ms = builtin_models()
    assert [m.model_id for m in ms] == list(MODEL_IDS)
    cfn, jc, k2p, k3p = ms
    assert cfn.group.order == 2 and cfn.n_classes == 2
    assert jc.group.order == 4 and jc.classes == (((0, 0),), ((1, 0), (0, 1), (1, 1)))
    assert k2p.n_classes == 3 and k3p.n_classes == 4
    with pytest.raises(ValueError):
        get_model("HKY")


def test_class_of():
    jc, k2p = get_model("JC"), get_model("K2P")
    assert jc.class_of((0, 0)) == 0
    assert jc.class_of((1, 1)) == 1
    # A<->G is the transition class
    assert k2p.class_of((1, 0)) == 1
    assert k2p.class_of(k2p.group.add(k2p.state_map["A"], k2p.state_map["G"])) == 1
    assert k2p.class_of(k2p.group.add(k2p.state_map["C"], k2p.state_map["T"])) == 1
    with pytest.raises(ValueError):
        jc.class_of((2, 0))


def test_transition_matrices():
    assert get_model("CFN").transition_matrix_symbolic(1) == [["m1_0", "m1_1"], ["m1_1", "m1_0"]]
    M = get_model("JC").transition_matrix_symbolic(2)
    assert all(M[i][j] == ("m2_0" if i == j else "m2_1") for i in range(4) for j in range(4))
    K = get_model("K3P").transition_matrix_symbolic(1)
    assert all(sorted(r) == ["m1_0", "m1_1", "m1_2", "m1_3"] for r in K)
    assert all(K[i][j] == K[j][i] for i in range(4) for j in range(4))
    with pytest.raises(ValueError):
        get_model("JC").transition_matrix_symbolic(0)


def test_characters():
    G = FiniteAbelianGroup(2)
    T = character_table(G)
    # orthogonality
    for a in range(4):
        for b in range(4):
            assert sum(T[a][g] * T[b][g] for g in range(4)) == (4 if a == b else 0)
    assert character_value(FiniteAbelianGroup(1), (1,), (1,)) == -1
    with pytest.raises(ValueError):
        FiniteAbelianGroup(3)


def test_fourier_classes():
    assert get_model("JC").is_self_dual and get_model("K3P").is_self_dual
    k2p = get_model("K2P")
    # the dual partition groups the characters 10 and 11
    assert k2p.fourier_classes == (((0, 0),), ((1, 0), (1, 1)), ((0, 1),))
    assert not k2p.is_self_dual
    assert k2p.transformed_parameter(1) == [1, -1, 0]
    assert k2p.transformed_parameter(2) == [1, 1, -2]


def test_automorphisms_preserve_classes():
    assert len(FiniteAbelianGroup(2).automorphisms()) == 6
    assert len(get_model("JC").class_automorphisms()) == 6
    assert len(get_model("K3P").class_automorphisms()) == 6
    assert len(get_model("K2P").class_automorphisms()) == 2


def test_invalid_partition():
    G = FiniteAbelianGroup(1)
    with pytest.raises(ValueError):
        GroupBasedModel("X", G, ("0", "1"), (((1,),), ((0,),)))
