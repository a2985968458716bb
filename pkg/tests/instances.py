"""Shared, memoized pipeline results for the test modules."""

from functools import lru_cache

from phylotoric.models import MODEL_IDS, get_model
from phylotoric.parametrization import column_symmetries, exponent_matrix, fourier_map, probability_map
from phylotoric.toric import ToricConfig, analyze
from phylotoric.trees import catalog, catalog_tree

SMALL = [(e.tree_id, m) for e in catalog(4) for m in MODEL_IDS]
# instances whose toric ideal exceeds the default resource caps
INFEASIBLE = {(3, "K3P")}
FEASIBLE = [k for k in SMALL if k not in INFEASIBLE]


@lru_cache(maxsize=None)
def maps(tree_id, model_id):
    tree = catalog_tree(tree_id).shape
    model = get_model(model_id)
    pm = probability_map(tree, model)
    fm = fourier_map(tree, model)
    return tree, model, pm, fm, exponent_matrix(fm, pm)


@lru_cache(maxsize=None)
def result(tree_id, model_id):
    """Full analysis (toric ideal, Hilbert and volume degree); raises for the infeasible instances."""
    em = maps(tree_id, model_id)[4]
    return analyze(em, ToricConfig(), symmetries=column_symmetries(em))
