"""Invariant records, object serialization, catalog emission and reference checks."""

from __future__ import annotations

import datetime as _dt
import hashlib
import json
import logging
import os
import re
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

import yaml

from . import TOOL_NAME, __version__
from .algebra.groebner import Ideal
from .algebra.lattice import IntegerMatrix
from .algebra.orders import DEGREVLEX, parse_order
from .algebra.polynomial import Polynomial, Ring
from .models import MODEL_IDS, GroupBasedModel, get_model
from .parametrization import (
    exponent_matrix,
    fourier_map,
    fourier_transform,
    leaf_tuples,
    character_label,
    probability_map,
    state_label,
    text_dump_p,
    text_dump_q,
    column_symmetries,
)
from .toric import ToricConfig, analyze, ideal_text, probability_invariants
from .trees import PhyloTree, to_newick

log = logging.getLogger(__name__)

DATATYPES = ("invariants", "param_p", "param_q", "fourier", "ifourier", "ideal_q", "ideal_p", "serialized")
EXTENSIONS = {
    "invariants": "yaml",
    "param_p": "txt",
    "param_q": "txt",
    "fourier": "txt",
    "ifourier": "txt",
    "ideal_q": "txt",
    "ideal_p": "txt",
    "serialized": "json",
}
REFERENCE_ONLY_FIELDS = ("sD", "sd", "mu", "e", "M", "E", "MLdeg")
OBJECT_TYPES = ("ring", "polynomial", "ideal", "matrix", "tree", "model", "record")
SCHEMA_VERSION = "1.0.0"
NAMESPACE = f"{TOOL_NAME}.objects"
LICENSE = "MIT"

_NAME_RE = re.compile(r"^(%s)_([1-9][0-9]*)-(%s)\.([A-Za-z0-9]+)$" % ("|".join(DATATYPES), "|".join(MODEL_IDS)))


def conventions(model: GroupBasedModel) -> dict[str, str]:
    states = ", ".join(f"{s}={model.group.label(g)}" for s, g in model.state_map.items())
    return {
        "fourier_normalization": "forward transform unnormalized (entries chi_h(g) = +-1); inverse scaled by 1/|G|^n",
        "state_map": states,
        "root_rule": "uniform root distribution; rooted at the first internal vertex (leaves are 1..n); invariants do not depend on the root",
    }


@dataclass
class InvariantRecord:
    tree_id: int
    model_id: str
    newick: str
    group: str
    np: int
    nq: int
    dim_cone: int
    dim_projective: int
    degree: int
    degree_profile: dict[int, int]
    computed_by: str = f"{TOOL_NAME} {__version__}"
    conventions: dict[str, str] = field(default_factory=dict)
    reference_only: dict[str, dict[str, Any]] = field(default_factory=dict)

    KEYS = (
        "tree_id", "model_id", "newick", "group", "np", "nq", "dim_cone", "dim_projective",
        "degree", "degree_profile", "computed_by", "conventions", "reference_only",
    )

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in self.KEYS}
        d["degree_profile"] = {int(k): int(v) for k, v in sorted(self.degree_profile.items())}
        d["reference_only"] = {k: dict(v) for k, v in sorted(self.reference_only.items())}
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "InvariantRecord":
        missing = [k for k in cls.KEYS if k not in d]
        if missing:
            raise ValueError(f"record is missing keys: {', '.join(missing)}")
        kw = {k: d[k] for k in cls.KEYS}
        kw["degree_profile"] = {int(k): int(v) for k, v in (d["degree_profile"] or {}).items()}
        kw["reference_only"] = dict(d["reference_only"] or {})
        kw["conventions"] = dict(d["conventions"] or {})
        return cls(**kw)

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False, default_flow_style=False, allow_unicode=True)


def validate_record(d: dict) -> list[str]:
    """Schema problems of a record mapping (empty when valid)."""
    problems = []
    types = {
        "tree_id": int, "model_id": str, "newick": str, "group": str, "np": int, "nq": int,
        "dim_cone": int, "dim_projective": int, "degree": int, "degree_profile": dict,
        "computed_by": str, "conventions": dict, "reference_only": dict,
    }
    for k, t in types.items():
        if k not in d:
            problems.append(f"missing {k}")
        elif not isinstance(d[k], t) or (t is int and isinstance(d[k], bool)):
            problems.append(f"{k} should be {t.__name__}")
    if isinstance(d.get("model_id"), str) and d["model_id"] not in MODEL_IDS:
        problems.append("unknown model_id")
    for k in ("fourier_normalization", "state_map", "root_rule"):
        if isinstance(d.get("conventions"), dict) and k not in d["conventions"]:
            problems.append(f"conventions.{k} missing")
    for k, v in (d.get("reference_only") or {}).items():
        if k not in REFERENCE_ONLY_FIELDS:
            problems.append(f"unknown reference-only field {k}")
        elif not isinstance(v, dict) or "source" not in v or "value" not in v:
            problems.append(f"reference-only field {k} needs value and source")
    return problems


# ---------------------------------------------------------------------------
# naming


def file_name(datatype: str, tree_id: int, model_id: str, ext: str) -> str:
    if datatype not in DATATYPES:
        raise ValueError(f"unknown datatype {datatype!r}")
    if model_id not in MODEL_IDS:
        raise ValueError(f"unknown model id {model_id!r}")
    if not isinstance(tree_id, int) or isinstance(tree_id, bool) or tree_id < 1:
        raise ValueError(f"tree id must be a positive integer, got {tree_id!r}")
    if not re.fullmatch(r"[A-Za-z0-9]+", ext):
        raise ValueError(f"bad extension {ext!r}")
    return f"{datatype}_{tree_id}-{model_id}.{ext}"


def parse_file_name(name: str) -> tuple[str, int, str, str]:
    m = _NAME_RE.match(name)
    if not m:
        raise ValueError(f"{name!r} does not follow <datatype>_<tree_id>-<model_id>.<ext>")
    return m.group(1), int(m.group(2)), m.group(3), m.group(4)


# ---------------------------------------------------------------------------
# serialization


class SerializationError(ValueError):
    pass


class UnknownObjectTypeError(SerializationError):
    pass


class UnresolvedContextError(SerializationError):
    pass


class NewerVersionError(SerializationError):
    pass


def _canon(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _int(x: int) -> str:
    return str(int(x))


def _rat(x) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _parse_int(s: str) -> int:
    if not isinstance(s, str) or not re.fullmatch(r"-?[0-9]+", s):
        raise SerializationError(f"expected an integer string, got {s!r}")
    return int(s)


def _parse_rat(s: str) -> Fraction:
    if not isinstance(s, str) or not re.fullmatch(r"-?[0-9]+/[0-9]+", s):
        raise SerializationError(f"expected a num/den string, got {s!r}")
    n, d = s.split("/")
    return Fraction(int(n), int(d))


def content_hash(node: dict) -> str:
    return "sha256:" + hashlib.sha256(_canon(node).encode()).hexdigest()


class _Writer:
    """Collects referenced context objects by content hash."""

    def __init__(self):
        self.refs: dict[str, dict] = {}

    def ref(self, node: dict) -> str:
        h = content_hash(node)
        self.refs[h] = node
        return h

    # one node per object type; nested contexts are hashes into refs
    def node(self, obj) -> dict:
        if isinstance(obj, Ring):
            return {"type": "ring", "context": None, "data": {"variables": list(obj.variables)}}
        if isinstance(obj, Polynomial):
            ctx = self.ref(self.node(obj.ring))
            return {"type": "polynomial", "context": ctx, "data": self._poly(obj)}
        if isinstance(obj, Ideal):
            ctx = self.ref(self.node(obj.ring))
            data = {"generators": [self._poly(g) for g in obj.generators], "groebner_basis": None}
            if obj.groebner_cache is not None:
                basis, order = obj.groebner_cache
                data["groebner_basis"] = {"order": str(order), "elements": [self._poly(g) for g in basis]}
            return {"type": "ideal", "context": ctx, "data": data}
        if isinstance(obj, IntegerMatrix):
            return {
                "type": "matrix",
                "context": None,
                "data": {"ncols": _int(obj.ncols), "rows": [[_int(x) for x in r] for r in obj.entries]},
            }
        if isinstance(obj, PhyloTree):
            return {
                "type": "tree",
                "context": None,
                "data": {
                    "n_leaves": _int(obj.n_leaves),
                    "edges": [[_int(u), _int(v)] for u, v in obj.edges],
                    "newick": to_newick(obj),
                },
            }
        if isinstance(obj, GroupBasedModel):
            return {
                "type": "model",
                "context": None,
                "data": {
                    "model_id": obj.model_id,
                    "group": obj.group.name,
                    "states": list(obj.states),
                    "classes": [[obj.group.label(g) for g in c] for c in obj.classes],
                },
            }
        if isinstance(obj, InvariantRecord):
            ctx = self.ref(self.node(get_model(obj.model_id)))
            return {"type": "record", "context": ctx, "data": _encode_plain(obj.to_dict())}
        raise UnknownObjectTypeError(f"cannot serialize objects of type {type(obj).__name__}")

    @staticmethod
    def _poly(p: Polynomial) -> list:
        return [[[_int(e) for e in m], _rat(c)] for m, c in p.sorted_terms(DEGREVLEX)]


_INT_RE = re.compile(r"-?[0-9]+")


def _encode_plain(x):
    """Plain record data: ints become decimal strings; strings that would read
    back as ints (or start with the escape ``'``) get an ``'`` prefix."""
    if isinstance(x, bool) or x is None:
        return x
    if isinstance(x, int):
        return _int(x)
    if isinstance(x, str):
        return "'" + x if _INT_RE.fullmatch(x) or x.startswith("'") else x
    if isinstance(x, dict):
        return {_encode_plain(k): _encode_plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode_plain(v) for v in x]
    raise SerializationError(f"cannot encode {type(x).__name__} in record data")


def _decode_plain(x):
    if isinstance(x, str):
        if x.startswith("'"):
            return x[1:]
        return int(x) if _INT_RE.fullmatch(x) else x
    if isinstance(x, dict):
        return {_decode_plain(k): _decode_plain(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_decode_plain(v) for v in x]
    return x


def dumps_object(obj, attachments: dict[str, Any] | None = None) -> str:
    """Canonical JSON document for ``obj``; ``attachments`` are extra named objects stored alongside."""
    w = _Writer()
    doc = {"namespace": {"name": NAMESPACE, "version": SCHEMA_VERSION}, "object": w.node(obj)}
    if attachments:
        doc["attachments"] = {k: w.ref(w.node(v)) for k, v in sorted(attachments.items())}
    doc["refs"] = dict(sorted(w.refs.items()))
    return json.dumps(doc, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def save_object(obj, sink, attachments: dict[str, Any] | None = None) -> None:
    text = dumps_object(obj, attachments)
    if hasattr(sink, "write"):
        sink.write(text)
    else:
        Path(sink).write_text(text, encoding="utf-8")


def _version_tuple(v: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in v.split("."))
    except (AttributeError, ValueError):
        raise SerializationError(f"bad version string {v!r}") from None


class _Reader:
    def __init__(self, refs: dict):
        self.refs = refs
        self.stack: list[str] = []

    def resolve(self, h: str):
        if h not in self.refs:
            raise UnresolvedContextError(f"context {h} cannot be resolved")
        if h in self.stack:
            raise SerializationError(f"cyclic context reference at {h}")
        node = self.refs[h]
        if content_hash(node) != h:
            raise SerializationError(f"content of {h} does not match its hash")
        self.stack.append(h)
        try:
            return self.build(node)
        finally:
            self.stack.pop()

    def build(self, node: dict):
        t = node.get("type")
        if t not in OBJECT_TYPES:
            raise UnknownObjectTypeError(f"unknown object type {t!r}")
        data = node.get("data")
        ctx = node.get("context")
        if t == "ring":
            return Ring(data["variables"])
        if t == "polynomial":
            ring = self._ring(ctx)
            return self._poly(ring, data)
        if t == "ideal":
            ring = self._ring(ctx)
            gens = [self._poly(ring, g) for g in data["generators"]]
            cache = None
            gb = data.get("groebner_basis")
            if gb is not None:
                cache = (tuple(self._poly(ring, g) for g in gb["elements"]), parse_order(gb["order"]))
            return Ideal(ring, gens, cache)
        if t == "matrix":
            return IntegerMatrix([[_parse_int(x) for x in r] for r in data["rows"]], _parse_int(data["ncols"]))
        if t == "tree":
            tree = PhyloTree(_parse_int(data["n_leaves"]), tuple((_parse_int(u), _parse_int(v)) for u, v in data["edges"]))
            if to_newick(tree) != data["newick"]:
                raise SerializationError("tree edges and Newick string disagree")
            return tree
        if t == "model":
            model = get_model(data["model_id"])
            if [[model.group.label(g) for g in c] for c in model.classes] != data["classes"]:
                raise SerializationError(f"model {data['model_id']} differs from the built-in definition")
            return model
        if t == "record":
            if ctx is not None:
                self.resolve(ctx)
            return InvariantRecord.from_dict(_decode_plain(data))
        raise AssertionError("unreachable")

    def _ring(self, ctx) -> Ring:
        if ctx is None:
            raise UnresolvedContextError("missing ring context")
        ring = self.resolve(ctx)
        if not isinstance(ring, Ring):
            raise SerializationError(f"context {ctx} is not a ring")
        return ring

    @staticmethod
    def _poly(ring: Ring, data) -> Polynomial:
        terms = {}
        for m, c in data:
            terms[tuple(_parse_int(e) for e in m)] = _parse_rat(c)
        return Polynomial(ring, terms)


def loads_document(text: str) -> tuple[Any, dict[str, Any]]:
    """Parse a document; returns ``(object, attachments)``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"not JSON: {exc}") from None
    ns = doc.get("namespace") or {}
    if ns.get("name") != NAMESPACE:
        raise SerializationError(f"unknown namespace {ns.get('name')!r}")
    if _version_tuple(ns.get("version", ""))[:1] > _version_tuple(SCHEMA_VERSION)[:1]:
        raise NewerVersionError(f"document version {ns['version']} is newer than supported {SCHEMA_VERSION}")
    r = _Reader(doc.get("refs") or {})
    obj = r.build(doc["object"])
    att = {k: r.resolve(h) for k, h in (doc.get("attachments") or {}).items()}
    return obj, att


def load_object(source):
    if hasattr(source, "read"):
        text = source.read()
    else:
        text = Path(source).read_text(encoding="utf-8")
    return loads_document(text)[0]


# ---------------------------------------------------------------------------
# pipeline


class EntryFailure(RuntimeError):
    def __init__(self, message: str, budget: bool = False):
        super().__init__(message)
        self.budget = budget


@dataclass
class EntryResult:
    record: InvariantRecord
    files: dict[str, str]  # file name -> content
    volume_degree: int | None = None


def reference_only_values(tree_id: int | None, model_id: str, table: list[dict] | None = None) -> dict:
    rows = bundled_reference() if table is None else table
    out = {}
    for row in rows:
        if not isinstance(row, dict):
            continue
        if row.get("tree_id") == tree_id and row.get("model_id") == model_id and row.get("field") in REFERENCE_ONLY_FIELDS:
            out[row["field"]] = {"value": row.get("value"), "source": str(row.get("source", ""))}
    return out


def _matrix_text(rows, scale: str | None = None) -> str:
    lines = []
    if scale:
        lines.append(f"# scale: {scale}")
    lines.extend(" ".join(f"{x:2d}" for x in r) for r in rows)
    return "\n".join(lines) + "\n"


def compute_entry(
    tree: PhyloTree,
    model: GroupBasedModel,
    tree_id: int | None = None,
    config: ToricConfig | None = None,
    with_files: bool = True,
) -> EntryResult:
    """Run the whole pipeline for one (tree, model) pair."""
    from .algebra.binomial import BudgetExceededError

    cfg = config or ToricConfig()
    mid = model.model_id
    tid = tree_id if tree_id is not None else 0
    pm = probability_map(tree, model)
    fm = fourier_map(tree, model)
    em = exponent_matrix(fm, pm)
    try:
        res = analyze(em, cfg, symmetries=column_symmetries(em))
    except BudgetExceededError as exc:
        raise EntryFailure(f"{exc}", budget=True) from None
    if res.volume_degree is not None and res.volume_degree != res.degree:
        raise EntryFailure(f"degree mismatch: Hilbert {res.degree}, volume {res.volume_degree}")
    record = InvariantRecord(
        tree_id=tid,
        model_id=mid,
        newick=to_newick(tree),
        group=model.group.name,
        np=em.np,
        nq=em.nq,
        dim_cone=res.dim_cone,
        dim_projective=res.dim_projective,
        degree=res.degree,
        degree_profile=res.degree_profile,
        conventions=conventions(model),
        reference_only=reference_only_values(tree_id, mid),
    )
    files: dict[str, str] = {}
    if with_files:
        if tree_id is None:
            raise ValueError("writing files needs a catalog tree id")
        name = lambda dt: file_name(dt, tree_id, mid, EXTENSIONS[dt])
        head = {"tree_id": str(tree_id), "model_id": mid, "newick": record.newick}
        files[name("invariants")] = record.to_yaml()
        files[name("param_p")] = _header(head) + text_dump_p(pm)
        files[name("param_q")] = _header(head) + text_dump_q(fm)
        ft = fourier_transform(tree.n_leaves, model)
        n = tree.n_leaves
        rows_p = [state_label(model, g) for g in leaf_tuples(n, model)]
        rows_q = [character_label(model, h) for h in leaf_tuples(n, model)]
        files[name("fourier")] = _header({**head, "rows": "q_" + ",q_".join(rows_q), "columns": "p_" + ",p_".join(rows_p)}) + _matrix_text(ft.matrix.tolist())
        files[name("ifourier")] = _header({**head, "rows": "p_" + ",p_".join(rows_p), "columns": "q_" + ",q_".join(rows_q)}) + _matrix_text(
            ft.matrix.T.tolist(), scale=f"1/{ft.size}"
        )
        ideal_head = dict(head)
        if res.ideal.is_zero():
            ideal_head["note"] = "zero ideal: the variety fills its ambient space"
        ideal_head["columns"] = "; ".join(
            f"q{c + 1}=" + ",".join("q_" + rows_q[i] for i in em.column_members(c)) for c in range(em.nq)
        )
        files[name("ideal_q")] = ideal_text(res.ideal, ideal_head)
        files[name("ideal_p")] = _ideal_p_text(res.ideal, fm, ft, head)
        files[name("serialized")] = dumps_object(
            record, {"tree": tree, "model": model, "exponent_matrix": em.A, "ideal_q": res.ideal}
        )
    return EntryResult(record, files, res.volume_degree)


def _header(items: dict[str, str]) -> str:
    return "".join(f"# {k}: {v}\n" for k, v in items.items())


def _ideal_p_text(ideal: Ideal, fm, ft, head: dict) -> str:
    inv = probability_invariants(ideal, fm, ft)
    lines = [_header(head).rstrip("\n")] if head else []
    lines.append("# substitution (q-variable -> linear form in p): forward Fourier transform of the first coordinate in its class")
    for q, form in inv.substitution.items():
        lines.append(f"# {q} = {form.to_text()}")
    lines.append(f"# linear invariants (vanishing Fourier coordinates): {len(inv.linear)}")
    lines.extend(f.to_text() for f in inv.linear)
    if inv.expanded:
        lines.append(f"# nonlinear invariants: {len(inv.nonlinear)}")
        lines.extend(f.to_text() for f in inv.nonlinear)
    else:
        lines.append("# nonlinear invariants: not expanded (too large); apply the substitution above to the ideal_q generators")
    return "\n".join(lines) + "\n"


def emit_entry(tree, model, out_dir, tree_id: int | None = None, config: ToricConfig | None = None) -> list[str]:
    """Compute and write the files of one entry; returns the file names written."""
    if hasattr(tree, "tree_id"):
        tree_id = tree.tree_id if tree_id is None else tree_id
        tree = tree.shape
    if tree_id is None:
        raise ValueError("need a catalog tree id")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    result = compute_entry(tree, model, tree_id, config)
    for name, text in result.files.items():
        (out / name).write_text(text, encoding="utf-8")
    return sorted(result.files)


def _timestamp() -> tuple[str, str]:
    sde = os.environ.get("SOURCE_DATE_EPOCH")
    if sde is not None and sde.strip().isdigit():
        t = _dt.datetime.fromtimestamp(int(sde), tz=_dt.timezone.utc)
        source = "SOURCE_DATE_EPOCH"
    else:
        t = _dt.datetime.fromtimestamp(0, tz=_dt.timezone.utc)
        source = "fixed (set SOURCE_DATE_EPOCH to record the build time)"
    return t.strftime("%Y-%m-%dT%H:%M:%SZ"), source


def _emit_task(args):
    tree_id, newick, model_id, out_dir, cfg = args
    from .trees import parse_newick

    try:
        names = emit_entry(parse_newick(newick), get_model(model_id), out_dir, tree_id, cfg)
        return {"tree_id": tree_id, "model_id": model_id, "status": "ok", "files": names}
    except EntryFailure as exc:
        status = "budget_exceeded" if exc.budget else "failed"
        return {"tree_id": tree_id, "model_id": model_id, "status": status, "error": str(exc)}
    except Exception as exc:  # recorded in the manifest, the build goes on
        return {"tree_id": tree_id, "model_id": model_id, "status": "failed", "error": f"{type(exc).__name__}: {exc}"}


def build_database(
    out_dir,
    max_leaves: int = 4,
    models=MODEL_IDS,
    config: ToricConfig | None = None,
    jobs: int = 1,
) -> dict:
    """Emit every catalog entry and write ``manifest.yaml``; returns the manifest."""
    from .trees import catalog

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cfg = config or ToricConfig()
    tasks = [(e.tree_id, e.newick, mid, str(out), cfg) for e in catalog(max_leaves) for mid in models]
    if jobs > 1 and len(tasks) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_emit_task, tasks))
    else:
        results = [_emit_task(t) for t in tasks]
    for r in results:
        if r["status"] != "ok":
            log.warning("entry %s-%s %s: %s", r["tree_id"], r["model_id"], r["status"], r.get("error"))
    ts, ts_source = _timestamp()
    manifest = {
        "tool": TOOL_NAME,
        "version": __version__,
        "timestamp": ts,
        "timestamp_source": ts_source,
        "license": LICENSE,
        "max_leaves": max_leaves,
        "models": list(models),
        "toric_config": {
            "method": cfg.method,
            "step_budget": cfg.budget,
            "max_basis_size": cfg.max_basis_size,
            "max_fiber_monomials": cfg.max_fiber_monomials,
            "max_fiber_degree": cfg.max_fiber_degree,
            "max_volume_facets": cfg.max_volume_facets,
            "max_volume_memory_mb": cfg.max_volume_memory_mb,
        },
        "entries": results,
    }
    (out / "manifest.yaml").write_text(yaml.safe_dump(manifest, sort_keys=False), encoding="utf-8")
    return manifest


# ---------------------------------------------------------------------------
# reference verification


def bundled_reference_path():
    return resources.files("phylotoric") / "data" / "reference.yaml"


def bundled_reference() -> list:
    return yaml.safe_load(bundled_reference_path().read_text(encoding="utf-8")) or []


DERIVED_FIELDS = {
    "degree_profile_sum": lambda r: sum(r["degree_profile"].values()),
    "degree_profile_support": lambda r: sorted(r["degree_profile"]),
}
COMPARABLE_FIELDS = ("np", "nq", "dim_cone", "dim_projective", "degree", "degree_profile", "newick")


@dataclass
class VerificationReport:
    rows: list[dict]
    malformed: list[dict]

    @property
    def mismatches(self) -> int:
        return sum(1 for r in self.rows if r["status"] == "mismatch")

    @property
    def exit_status(self) -> int:
        return 1 if self.mismatches else 0

    def to_dict(self) -> dict:
        counts: dict[str, int] = {}
        for r in self.rows:
            counts[r["status"]] = counts.get(r["status"], 0) + 1
        return {"summary": dict(sorted(counts.items())), "rows": self.rows, "malformed": self.malformed}

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def _load_db(db_dir) -> dict[tuple[int, str], dict]:
    out = {}
    for p in sorted(Path(db_dir).glob("invariants_*.yaml")):
        try:
            _, tid, mid, _ = parse_file_name(p.name)
        except ValueError:
            continue
        out[(tid, mid)] = yaml.safe_load(p.read_text(encoding="utf-8"))
    return out


def _normalize(v):
    if isinstance(v, dict):
        return {int(k) if isinstance(k, str) and k.isdigit() else k: _normalize(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_normalize(x) for x in v]
    return v


def verify_reference(db_dir, reference_table=None) -> VerificationReport:
    """Compare emitted records with a reference table (path, list of rows, or None for the bundled one)."""
    if reference_table is None:
        rows = bundled_reference()
    elif isinstance(reference_table, (str, Path)):
        rows = yaml.safe_load(Path(reference_table).read_text(encoding="utf-8"))
    else:
        rows = reference_table
    db = _load_db(db_dir)
    report, malformed = [], []
    if not isinstance(rows, list):
        return VerificationReport([], [{"row": rows, "problem": "reference table must be a list"}])
    for i, row in enumerate(rows):
        problem = _row_problem(row)
        if problem:
            malformed.append({"index": i, "row": row, "problem": problem})
            continue
        key = (row["tree_id"], row["model_id"])
        f = row["field"]
        entry = {"tree_id": key[0], "model_id": key[1], "field": f, "expected": row["value"], "source": row["source"]}
        if f in REFERENCE_ONLY_FIELDS:
            entry["status"] = "reference_only"
        elif key not in db:
            entry["status"] = "not_computed"
        else:
            rec = db[key]
            try:
                found = DERIVED_FIELDS[f](rec) if f in DERIVED_FIELDS else rec[f]
            except (KeyError, TypeError, AttributeError):
                entry["status"] = "not_computed"
                report.append(entry)
                continue
            entry["found"] = found
            entry["status"] = "match" if _normalize(found) == _normalize(row["value"]) else "mismatch"
        report.append(entry)
    return VerificationReport(report, malformed)


def _row_problem(row) -> str | None:
    if not isinstance(row, dict):
        return "row is not a mapping"
    for k in ("tree_id", "model_id", "field", "value", "source"):
        if k not in row:
            return f"missing {k}"
    if not isinstance(row["tree_id"], int) or row["tree_id"] < 1:
        return "tree_id must be a positive integer"
    if row["model_id"] not in MODEL_IDS:
        return f"unknown model_id {row['model_id']!r}"
    f = row["field"]
    if f not in COMPARABLE_FIELDS and f not in DERIVED_FIELDS and f not in REFERENCE_ONLY_FIELDS:
        return f"unknown field {f!r}"
    return None
