import io
import json
import re
from pathlib import Path

import pytest
import yaml
from hypothesis import given
from hypothesis import strategies as st

from instances import maps
from phylotoric.algebra.groebner import Ideal
from phylotoric.algebra.lattice import IntegerMatrix
from phylotoric.algebra.polynomial import Polynomial, Ring
from phylotoric.database import (
    DATATYPES,
    InvariantRecord,
    NewerVersionError,
    SerializationError,
    UnknownObjectTypeError,
    UnresolvedContextError,
    bundled_reference,
    build_database,
    compute_entry,
    conventions,
    dumps_object,
    emit_entry,
    file_name,
    load_object,
    loads_document,
    parse_file_name,
    save_object,
    validate_record,
    verify_reference,
)
from phylotoric.models import MODEL_IDS, get_model
from phylotoric.toric import ToricConfig, toric_ideal
from phylotoric.trees import catalog, catalog_tree

NAME_GRAMMAR = re.compile(r"^(%s)_[1-9][0-9]*-(CFN|JC|K2P|K3P)\.[a-z]+$" % "|".join(DATATYPES))


def test_file_names():
    assert file_name("invariants", 3, "JC", "yaml") == "invariants_3-JC.yaml"
    assert file_name("ideal_q", 6, "K3P", "txt") == "ideal_q_6-K3P.txt"
    with pytest.raises(ValueError, match="datatype"):
        file_name("foo", 1, "JC", "txt")
    with pytest.raises(ValueError, match="model"):
        file_name("ideal_q", 1, "HKY", "txt")
    with pytest.raises(ValueError):
        file_name("ideal_q", 0, "JC", "txt")
    assert parse_file_name("ideal_p_2-K2P.txt") == ("ideal_p", 2, "K2P", "txt")
    with pytest.raises(ValueError):
        parse_file_name("ideal_2-K2P.txt")


def _record(**kw):
    base = dict(
        tree_id=1, model_id="JC", newick="(1,2,3);", group="Z/2 x Z/2", np=5, nq=5, dim_cone=4,
        dim_projective=3, degree=3, degree_profile={3: 1}, conventions=conventions(get_model("JC")),
    )
    base.update(kw)
    return InvariantRecord(**base)


def test_record_schema():
    d = _record().to_dict()
    assert validate_record(d) == []
    assert list(d) == list(InvariantRecord.KEYS)
    assert InvariantRecord.from_dict(yaml.safe_load(_record().to_yaml())) == _record()
    bad = dict(d, np="5")
    assert "np should be int" in validate_record(bad)
    assert "unknown model_id" in validate_record(dict(d, model_id="X"))
    assert any("source" in p for p in validate_record(dict(d, reference_only={"MLdeg": {"value": 23}})))
    with pytest.raises(ValueError):
        InvariantRecord.from_dict({"tree_id": 1})


# ---------------------------------------------------------------------------
# serialization


def test_round_trip_of_each_type():
    R = Ring(["x", "y"])
    I = toric_ideal(maps(1, "JC")[4])
    objs = [R, R("x^2 - 3/4*y"), I, IntegerMatrix([[1, -2], [10**30, 0]]), catalog_tree(3).shape, get_model("K2P"), _record()]
    for obj in objs:
        back = loads_document(dumps_object(obj))[0]
        assert back == obj
    back = loads_document(dumps_object(I))[0]
    assert back.generators == I.generators and back.basis() == I.basis() and back.order == I.order


def test_attachments_and_files(tmp_path):
    p = tmp_path / "x.json"
    save_object(_record(), p, {"tree": catalog_tree(1).shape})
    obj, att = loads_document(p.read_text())
    assert obj == _record() and att["tree"] == catalog_tree(1).shape
    assert load_object(p) == _record()
    buf = io.StringIO()
    save_object(_record(), buf)
    assert load_object(io.StringIO(buf.getvalue())) == _record()


def test_saves_are_byte_identical():
    I = toric_ideal(maps(2, "JC")[4])
    assert dumps_object(I) == dumps_object(loads_document(dumps_object(I))[0])
    text = dumps_object(_record())
    assert text == dumps_object(_record())
    assert json.loads(text)["namespace"]["version"]


def test_serialization_errors():
    R = Ring(["x"])
    doc = json.loads(dumps_object(R("x")))
    (h,) = doc["refs"]
    missing = dict(doc, refs={})
    with pytest.raises(UnresolvedContextError, match=h):
        loads_document(json.dumps(missing))
    tampered = json.loads(dumps_object(R("x")))
    tampered["refs"][h]["data"]["variables"] = ["y"]
    with pytest.raises(SerializationError, match="hash"):
        loads_document(json.dumps(tampered))
    newer = dict(doc, namespace={"name": doc["namespace"]["name"], "version": "99.0.0"})
    with pytest.raises(NewerVersionError):
        loads_document(json.dumps(newer))
    unknown = dict(doc, object={"type": "sheaf", "context": None, "data": {}})
    with pytest.raises(UnknownObjectTypeError):
        loads_document(json.dumps(unknown))
    with pytest.raises(UnknownObjectTypeError):
        dumps_object(object())
    with pytest.raises(SerializationError):
        loads_document("{not json")


names = st.lists(st.sampled_from(["x", "y", "z", "w"]), min_size=1, max_size=4, unique=True)


@st.composite
def polynomials(draw):
    R = Ring(draw(names))
    mono = st.tuples(*[st.integers(0, 4)] * R.nvars)
    coef = st.fractions(max_denominator=10**6) | st.integers(-(10**40), 10**40)
    return Polynomial(R, draw(st.dictionaries(mono, coef, max_size=6)))


@given(polynomials())
def test_polynomial_round_trip(p):
    assert loads_document(dumps_object(p))[0] == p
    assert loads_document(dumps_object(Ideal(p.ring, [p, p * 2])))[0] == Ideal(p.ring, [p, p * 2])


@given(st.sampled_from([e.tree_id for e in catalog(5)]), st.permutations(range(1, 6)))
def test_tree_round_trip(tid, perm):
    t = catalog_tree(tid).shape
    t = t.relabel([p for p in perm if p <= t.n_leaves])
    assert loads_document(dumps_object(t))[0] == t


text = st.text(st.characters(blacklist_categories=("Cs",)), max_size=12)


@given(
    st.integers(1, 10**6), st.sampled_from(MODEL_IDS), st.integers(0, 10**20),
    st.dictionaries(st.integers(1, 9), st.integers(1, 10**6), max_size=3), text, st.integers(-5, 10**9),
)
def test_record_round_trip(tid, mid, deg, prof, source, val):
    rec = _record(tree_id=tid, model_id=mid, degree=deg, degree_profile=prof, newick=source,
                  reference_only={"MLdeg": {"value": val, "source": source}})
    assert loads_document(dumps_object(rec))[0] == rec


# ---------------------------------------------------------------------------
# emission


def test_emit_jc_claw(tmp_path):
    names = emit_entry(catalog(3)[0], get_model("JC"), tmp_path)
    assert len(names) == 8 and "invariants_1-JC.yaml" in names
    assert {parse_file_name(n)[0] for n in names} == set(DATATYPES)
    assert all(NAME_GRAMMAR.match(n) for n in names)
    rec = yaml.safe_load((tmp_path / "invariants_1-JC.yaml").read_text())
    assert validate_record(rec) == []
    assert (rec["np"], rec["nq"], rec["dim_cone"], rec["degree"]) == (5, 5, 4, 3)
    assert rec["reference_only"]["MLdeg"]["value"] == 23
    before = {n: (tmp_path / n).read_bytes() for n in names}
    emit_entry(catalog(3)[0], get_model("JC"), tmp_path)
    assert before == {n: (tmp_path / n).read_bytes() for n in names}
    ideal_p = (tmp_path / "ideal_p_1-JC.txt").read_text()
    assert "# nonlinear invariants: 1" in ideal_p


def test_emit_cfn_claw_zero_ideal(tmp_path):
    emit_entry(catalog_tree(1), get_model("CFN"), tmp_path)
    lines = (tmp_path / "ideal_q_1-CFN.txt").read_text().splitlines()
    assert all(l.startswith("#") for l in lines)
    assert any("zero ideal" in l for l in lines)
    assert "# linear invariants (vanishing Fourier coordinates): 4" in (tmp_path / "ideal_p_1-CFN.txt").read_text()


def test_compute_entry_without_files():
    res = compute_entry(catalog_tree(2).shape, get_model("JC"), 2, with_files=False)
    assert res.files == {} and res.record.degree == res.volume_degree == 20
    with pytest.raises(ValueError):
        compute_entry(catalog_tree(1).shape, get_model("JC"))


def _tree_bytes(d: Path):
    return {p.name: p.read_bytes() for p in sorted(d.iterdir())}


def test_build_is_deterministic_and_parallel_safe(tmp_path, monkeypatch):
    monkeypatch.delenv("SOURCE_DATE_EPOCH", raising=False)
    a, b = tmp_path / "a", tmp_path / "b"
    build_database(a, 3, MODEL_IDS, jobs=1)
    build_database(b, 3, MODEL_IDS, jobs=2)
    assert _tree_bytes(a) == _tree_bytes(b)
    man = yaml.safe_load((a / "manifest.yaml").read_text())
    assert man["license"] == "MIT" and man["timestamp"] == "1970-01-01T00:00:00Z"
    assert [e["status"] for e in man["entries"]] == ["ok"] * 4
    assert len(list(a.glob("*"))) == 4 * 8 + 1


def test_manifest_timestamp_and_failures(tmp_path, monkeypatch):
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")
    man = build_database(tmp_path, 3, ["JC", "K3P"], config=ToricConfig(budget=3))
    assert man["timestamp"] == "2023-11-14T22:13:20Z"
    status = {e["model_id"]: e["status"] for e in man["entries"]}
    assert status == {"JC": "ok", "K3P": "budget_exceeded"}
    assert not list(tmp_path.glob("*_1-K3P.*"))


# ---------------------------------------------------------------------------
# verification


@pytest.fixture(scope="module")
def small_db(tmp_path_factory):
    d = tmp_path_factory.mktemp("db")
    build_database(d, 3, MODEL_IDS)
    return d


def test_verify_fresh_build(small_db):
    rep = verify_reference(small_db)
    assert rep.mismatches == 0 and rep.exit_status == 0 and rep.malformed == []
    by_field = {(r["tree_id"], r["model_id"], r["field"]): r["status"] for r in rep.rows}
    assert by_field[(1, "JC", "MLdeg")] == "reference_only"
    assert by_field[(1, "JC", "degree")] == "match"
    assert by_field[(4, "JC", "degree")] == "not_computed"


def test_verify_detects_corruption(small_db, tmp_path):
    for p in small_db.iterdir():
        (tmp_path / p.name).write_bytes(p.read_bytes())
    # a fake 5-star JC record with a wrong degree
    rec = _record(tree_id=4, newick="(1,2,3,4,5);", np=27, nq=27, dim_cone=6, dim_projective=5, degree=114,
                  degree_profile={4: 100, 5: 75})
    (tmp_path / "invariants_4-JC.yaml").write_text(rec.to_yaml())
    rep = verify_reference(tmp_path)
    row = next(r for r in rep.rows if (r["tree_id"], r["field"]) == (4, "degree"))
    assert row["status"] == "mismatch" and (row["found"], row["expected"]) == (114, 115)
    assert rep.exit_status == 1
    profile = {r["field"]: r["status"] for r in rep.rows if r["tree_id"] == 4}
    assert profile["degree_profile_sum"] == "match" and profile["degree_profile_support"] == "match"


def test_malformed_rows_listed(small_db, tmp_path):
    table = list(bundled_reference()) + [
        {"tree_id": 1, "model_id": "JC", "field": "degree", "value": 3},
        {"tree_id": "x", "model_id": "JC", "field": "degree", "value": 3, "source": "s"},
        "nonsense",
    ]
    ref = tmp_path / "ref.yaml"
    ref.write_text(yaml.safe_dump(table))
    rep = verify_reference(small_db, ref)
    assert len(rep.malformed) == 3 and rep.exit_status == 0


def test_bundled_reference_rows_carry_sources():
    rows = bundled_reference()
    assert rows and all(r.get("source") for r in rows)
    vals = {(r["tree_id"], r["model_id"], r["field"]): r["value"] for r in rows}
    assert vals[(4, "JC", "dim_cone")] == 6 and vals[(4, "JC", "np")] == 27
    assert vals[(4, "JC", "degree")] == 115 and vals[(4, "JC", "degree_profile_sum")] == 175
    assert vals[(1, "JC", "MLdeg")] == 23
