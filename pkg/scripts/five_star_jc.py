#!/usr/bin/env python3
"""The 5-leaf Jukes-Cantor star: linear span, dimension, degree and equation degrees.

Prints each quantity with the time it took; the published values are
np = 27, dimension 6, degree 115 and 175 equations of degree 4 and 5.
"""

import time

from phylotoric.models import get_model
from phylotoric.parametrization import column_symmetries, exponent_matrix, fourier_map, probability_map
from phylotoric.toric import ToricConfig, analyze, cone_dimension, degree_via_volume
from phylotoric.trees import catalog_tree


def timed(label, fn, show=str):
    t = time.perf_counter()
    out = fn()
    print(f"{label:<28} {show(out):<24} {time.perf_counter() - t:7.2f}s")
    return out


def main():
    tree = catalog_tree(4).shape
    model = get_model("JC")
    em = timed("np (linear span)", lambda: exponent_matrix(fourier_map(tree, model), probability_map(tree, model)),
               lambda em: f"np={em.np} nq={em.nq}")
    timed("dim_cone", lambda: cone_dimension(em))
    timed("degree via volume", lambda: degree_via_volume(em))
    res = timed("toric ideal", lambda: analyze(em, ToricConfig(volume=False), column_symmetries(em)).degree_profile)
    print(f"{'':<28} {sum(res.values())} minimal generators, degrees {sorted(res)}")


if __name__ == "__main__":
    main()
