"""Command line interface: ``phylotoric {list,compute,build-db,verify}``.

Standard output carries YAML only; messages go to standard error.
Exit status: 0 success, 1 reference mismatch, 2 usage error, 3 budget exhausted.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import yaml

from . import __version__

EXIT_OK, EXIT_MISMATCH, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
ENV_BUDGET = "PHYLOTORIC_STEP_BUDGET"

log = logging.getLogger("phylotoric")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    tree: str | None = None
    model: str | None = None
    models: str = "all"
    out_dir: str | None = None
    max_leaves: int = 4
    db: str | None = None
    reference: str | None = None
    step_budget: int | None = None
    jobs: int = 1


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="phylotoric", description="Phylogenetic invariants of group-based models.")
    p.add_argument("--version", action="version", version=f"phylotoric {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sp = sub.add_parser("list", help="print the tree catalog")
    sp.add_argument("--max-leaves", type=_positive_int, default=5)

    sp = sub.add_parser("compute", help="compute the invariant record of one tree")
    sp.add_argument("--tree", required=True, help="catalog id, Newick string, or file with a Newick string")
    sp.add_argument("--model", required=True, help="CFN, JC, K2P, K3P or all")
    sp.add_argument("--out", help="also write the entry files into this directory")
    sp.add_argument("--step-budget", type=_positive_int)

    sp = sub.add_parser("build-db", help="emit every catalog entry and a manifest")
    sp.add_argument("--max-leaves", type=_positive_int, default=4)
    sp.add_argument("--models", default="all", help="comma separated model ids or all")
    sp.add_argument("--out", required=True)
    sp.add_argument("--step-budget", type=_positive_int)
    sp.add_argument("--jobs", type=_positive_int, default=1)

    sp = sub.add_parser("verify", help="compare a database with a reference table")
    sp.add_argument("--db", required=True)
    sp.add_argument("--reference", help="reference YAML (default: the bundled table)")
    return p


def parse_config(argv) -> CliConfig:
    ns = build_parser().parse_args(argv)
    cfg = CliConfig(command=ns.command)
    for k in ("tree", "model", "models", "db", "reference", "jobs", "max_leaves"):
        if hasattr(ns, k):
            setattr(cfg, k, getattr(ns, k))
    cfg.out_dir = getattr(ns, "out", None)
    if hasattr(ns, "step_budget"):
        cfg.step_budget = ns.step_budget
        if cfg.step_budget is None and os.environ.get(ENV_BUDGET):
            try:
                cfg.step_budget = _positive_int(os.environ[ENV_BUDGET])
            except argparse.ArgumentTypeError as exc:
                raise UsageError(f"{ENV_BUDGET}: {exc}") from None
    return cfg


def _models(spec: str) -> list[str]:
    from .models import MODEL_IDS

    if spec.strip().lower() == "all":
        return list(MODEL_IDS)
    out = [m.strip() for m in spec.split(",") if m.strip()]
    bad = [m for m in out if m not in MODEL_IDS]
    if bad or not out:
        raise UsageError(f"unknown model id(s) {', '.join(bad) or spec!r}; expected {', '.join(MODEL_IDS)} or all")
    return out


def _resolve_tree(spec: str):
    """``(tree, catalog id or None)`` for a catalog id, Newick string or file."""
    from .trees import NewickError, catalog, catalog_tree, parse_newick, to_newick

    s = spec.strip()
    if s.isdigit():
        try:
            e = catalog_tree(int(s))
        except KeyError as exc:
            raise UsageError(str(exc).strip("'\"")) from None
        return e.shape, e.tree_id
    text = s
    if not s.startswith("(") and Path(s).is_file():
        text = Path(s).read_text(encoding="utf-8").strip()
    try:
        tree = parse_newick(text)
    except NewickError as exc:
        raise UsageError(f"bad tree {spec!r}: {exc}") from None
    nw = to_newick(tree)
    tid = None
    if tree.n_leaves <= 5:
        for e in catalog(5):
            if e.newick == nw:
                tid = e.tree_id
    return tree, tid


def _dump(obj) -> None:
    sys.stdout.write(yaml.safe_dump(obj, sort_keys=False, default_flow_style=False))


def _toric_config(cfg: CliConfig):
    from .toric import ToricConfig

    return ToricConfig(budget=cfg.step_budget)


def run(cfg: CliConfig) -> int:
    from .database import EntryFailure, build_database, compute_entry, verify_reference
    from .models import get_model
    from .trees import catalog

    if cfg.command == "list":
        if not 3 <= cfg.max_leaves <= 5:
            raise UsageError("--max-leaves must be between 3 and 5")
        _dump([{"tree_id": e.tree_id, "leaves": e.shape.n_leaves, "newick": e.newick} for e in catalog(cfg.max_leaves)])
        return EXIT_OK

    if cfg.command == "compute":
        tree, tid = _resolve_tree(cfg.tree)
        models = _models(cfg.model)
        if cfg.out_dir and tid is None:
            raise UsageError("--out needs a catalog tree (file names use the catalog id)")
        records = []
        for mid in models:
            try:
                res = compute_entry(tree, get_model(mid), tid, _toric_config(cfg), with_files=bool(cfg.out_dir))
            except EntryFailure as exc:
                log.error("%s on %s: %s", mid, cfg.tree, exc)
                return EXIT_BUDGET if exc.budget else EXIT_MISMATCH
            if cfg.out_dir:
                out = Path(cfg.out_dir)
                out.mkdir(parents=True, exist_ok=True)
                for name, text in res.files.items():
                    (out / name).write_text(text, encoding="utf-8")
                log.info("wrote %d files to %s", len(res.files), out)
            records.append(res.record.to_dict())
        _dump(records[0] if len(records) == 1 else records)
        return EXIT_OK

    if cfg.command == "build-db":
        if not 3 <= cfg.max_leaves <= 5:
            raise UsageError("--max-leaves must be between 3 and 5")
        models = _models(cfg.models)
        manifest = build_database(cfg.out_dir, cfg.max_leaves, models, _toric_config(cfg), cfg.jobs)
        entries = manifest["entries"]
        _dump({
            "out": str(cfg.out_dir),
            "entries": len(entries),
            "ok": sum(e["status"] == "ok" for e in entries),
            "failed": [f"{e['tree_id']}-{e['model_id']}: {e['status']}" for e in entries if e["status"] != "ok"],
        })
        if any(e["status"] == "budget_exceeded" for e in entries):
            log.warning("some entries exhausted the computation budget; see manifest.yaml")
            return EXIT_BUDGET
        return EXIT_OK

    if cfg.command == "verify":
        if not Path(cfg.db).is_dir():
            raise UsageError(f"database directory {cfg.db!r} does not exist")
        if cfg.reference is not None and not Path(cfg.reference).is_file():
            raise UsageError(f"reference table {cfg.reference!r} does not exist")
        report = verify_reference(cfg.db, cfg.reference)
        sys.stdout.write(report.to_yaml())
        for m in report.malformed:
            log.warning("malformed reference row %s: %s", m.get("index"), m["problem"])
        if report.mismatches:
            log.error("%d mismatch(es)", report.mismatches)
        return report.exit_status

    raise UsageError(f"unknown command {cfg.command!r}")


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stderr)
    try:
        cfg = parse_config(sys.argv[1:] if argv is None else argv)
        return run(cfg)
    except UsageError as exc:
        print(f"phylotoric: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
