"""Probability and Fourier parametrizations of a group-based model on a tree.

Coordinates are indexed by tuples of group elements, one per leaf, in
lexicographic order with leaf 1 most significant and group elements in
the order of ``FiniteAbelianGroup.elements``. The root distribution is
uniform. The forward Fourier transform is unnormalised (entries +-1); the
inverse carries the factor ``1/|G|^n``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

import numpy as np

from .algebra.lattice import IntegerMatrix, rank
from .algebra.polynomial import Polynomial, Ring
from .models import Element, FiniteAbelianGroup, GroupBasedModel, character_value, get_model
from .trees import PhyloTree, edge_splits


def param_ring(tree: PhyloTree, model: GroupBasedModel, fourier: bool = False) -> Ring:
    """Edge parameters ordered by edge id, then class index."""
    return Ring(model.param(e, c, fourier) for e in range(1, tree.n_edges + 1) for c in range(model.n_classes))


def leaf_tuples(n: int, model: GroupBasedModel) -> list[tuple[Element, ...]]:
    return list(itertools.product(model.group.elements, repeat=n))


def state_label(model: GroupBasedModel, gs) -> str:
    return "".join(model.states[model.group.index(g)] for g in gs)


def character_label(model: GroupBasedModel, hs) -> str:
    return "".join(str(model.group.index(h)) for h in hs)


def p_ring(tree: PhyloTree, model: GroupBasedModel) -> Ring:
    return Ring("p_" + state_label(model, gs) for gs in leaf_tuples(tree.n_leaves, model))


# ---------------------------------------------------------------------------
# probability side


@dataclass(frozen=True)
class ProbabilityMap:
    tree: PhyloTree
    model: GroupBasedModel
    ring: Ring
    coords: tuple[Polynomial, ...]

    def labels(self) -> list[str]:
        return [state_label(self.model, gs) for gs in leaf_tuples(self.tree.n_leaves, self.model)]

    @cached_property
    def distinct_classes(self) -> int:
        return len(set(self.coords))

    def evaluate(self, point: dict[str, Fraction]) -> list[Fraction]:
        return [p.evaluate(point) for p in self.coords]


def probability_map(tree: PhyloTree, model: GroupBasedModel, root: int | None = None) -> ProbabilityMap:
    """``p_g = (1/|G|) sum_{internal states} prod_e m_{e, class(state(v) - state(w))}``."""
    if root is None:
        root = tree.default_root
    if root not in tree.vertices:
        raise ValueError(f"unknown root vertex {root}")
    G = model.group
    ring = param_ring(tree, model)
    n, E, k = tree.n_leaves, tree.n_edges, model.n_classes
    internal = tree.internal_vertices
    # the root only fixes the summation order; the sum is root-free
    internal = [root] + [v for v in internal if v != root] if root in internal else internal
    weight = Fraction(1, G.order)
    coords = []
    for leaves in leaf_tuples(n, model):
        state = {i + 1: g for i, g in enumerate(leaves)}
        terms: dict[tuple[int, ...], Fraction] = {}
        for assignment in itertools.product(G.elements, repeat=len(internal)):
            state.update(zip(internal, assignment))
            e = [0] * (E * k)
            for idx, (u, v) in enumerate(tree.edges):
                e[idx * k + model.class_of(G.add(state[u], state[v]))] = 1
            e = tuple(e)
            terms[e] = terms.get(e, 0) + weight
        coords.append(Polynomial._raw(ring, terms))
    return ProbabilityMap(tree, model, ring, tuple(coords))


def stochastic_point(tree: PhyloTree, model: GroupBasedModel, rng: random.Random) -> dict[str, Fraction]:
    """Random rational parameters whose transition-matrix rows sum to 1."""
    out = {}
    for e in range(1, tree.n_edges + 1):
        vals = [Fraction(rng.randint(1, 50), rng.randint(1, 50)) for _ in range(model.n_classes)]
        total = sum(v * model.class_size(c) for c, v in enumerate(vals))
        for c, v in enumerate(vals):
            out[model.param(e, c)] = v / total
    return out


def random_point(ring: Ring, rng: random.Random) -> dict[str, Fraction]:
    return {v: Fraction(rng.randint(-30, 30), rng.randint(1, 30)) for v in ring.variables}


# ---------------------------------------------------------------------------
# Fourier transform


@dataclass(frozen=True)
class FourierTransform:
    """Tensor power of the character table; ``H H = |G|^n I``."""

    n: int
    model: GroupBasedModel

    @property
    def size(self) -> int:
        return self.model.group.order**self.n

    @cached_property
    def _table(self) -> np.ndarray:
        G = self.model.group
        return np.array([[character_value(G, h, g) for g in G.elements] for h in G.elements], dtype=np.int64)

    @cached_property
    def matrix(self) -> np.ndarray:
        M = np.ones((1, 1), dtype=np.int64)
        for _ in range(self.n):
            M = np.kron(M, self._table)
        return M

    def entry(self, hs, gs) -> int:
        G = self.model.group
        out = 1
        for h, g in zip(hs, gs):
            out *= character_value(G, h, g)
        return out

    @property
    def inverse_scale(self) -> Fraction:
        return Fraction(1, self.size)

    def forward(self, vector):
        """``H v`` for a vector of Fractions or Polynomials."""
        return _apply(self.matrix, vector)

    def inverse(self, vector):
        """``H^{-1} v = |G|^{-n} H v``."""
        out = _apply(self.matrix, vector)
        return [x * self.inverse_scale for x in out]

    def roundtrip_is_identity(self) -> bool:
        """Exact check that forward followed by inverse is the identity matrix."""
        M = self.matrix.astype(object)
        prod = M.dot(M)
        return bool(np.array_equal(prod, np.eye(self.size, dtype=np.int64) * self.size))


def fourier_transform(n: int, model_or_group) -> FourierTransform:
    """Transform on ``n`` leaves; a bare group stands for its finest model (CFN or K3P)."""
    if n < 1:
        raise ValueError("need at least one leaf")
    if isinstance(model_or_group, FiniteAbelianGroup):
        model_or_group = get_model("CFN" if model_or_group.k == 1 else "K3P")
    return FourierTransform(n, model_or_group)


def _apply(M: np.ndarray, vector):
    vec = list(vector)
    if len(vec) != M.shape[1]:
        raise ValueError("dimension mismatch")
    out = []
    for row in M:
        acc = None
        for s, x in zip(row.tolist(), vec):
            term = x if s == 1 else -x
            acc = term if acc is None else acc + term
        out.append(acc)
    return out


# ---------------------------------------------------------------------------
# Fourier side


@dataclass(frozen=True)
class FourierMap:
    tree: PhyloTree
    model: GroupBasedModel
    ring: Ring  # Fourier edge parameters f{e}_{c}
    coords: tuple[tuple[int, ...] | None, ...]  # exponent vector or None for zero

    def labels(self) -> list[str]:
        return [character_label(self.model, hs) for hs in leaf_tuples(self.tree.n_leaves, self.model)]

    def monomial(self, i: int) -> Polynomial:
        e = self.coords[i]
        if e is None:
            return self.ring.zero()
        return Polynomial.monomial(self.ring, e)

    @property
    def nonzero(self) -> list[int]:
        return [i for i, e in enumerate(self.coords) if e is not None]


def fourier_map(tree: PhyloTree, model: GroupBasedModel, root: int | None = None) -> FourierMap:
    """``q_h = prod_e f_{e, c(sum of h over the far side of e)}`` when ``sum h = 0``, else 0.

    ``c`` is the Fourier-side class, see ``GroupBasedModel.fourier_classes``.
    """
    G = model.group
    ring = param_ring(tree, model, fourier=True)
    k = model.n_classes
    splits = edge_splits(tree, root)
    coords = []
    for hs in leaf_tuples(tree.n_leaves, model):
        if G.sum(hs) != G.identity:
            coords.append(None)
            continue
        e = [0] * (tree.n_edges * k)
        for sp in splits:
            c = model.fourier_class_of(G.sum([hs[i - 1] for i in sp.far_leaves]))
            e[(sp.edge_id - 1) * k + c] = 1
        coords.append(tuple(e))
    return FourierMap(tree, model, ring, tuple(coords))


@dataclass(frozen=True)
class ExponentMatrix:
    A: IntegerMatrix
    class_map: tuple[int | None, ...]  # coordinate index -> column, None for zero coordinates
    np: int
    nq: int
    row_names: tuple[str, ...]
    fm: FourierMap | None = None

    @property
    def columns(self) -> list[tuple[int, ...]]:
        return self.A.columns()

    def column_members(self, col: int) -> list[int]:
        return [i for i, c in enumerate(self.class_map) if c == col]

    @cached_property
    def rank(self) -> int:
        return rank(self.A)


def exponent_matrix(fm: FourierMap, pm: ProbabilityMap | None = None) -> ExponentMatrix:
    """Distinct nonzero Fourier monomials as columns, in first-occurrence order.

    ``np`` is the dimension of the linear span of the probability coordinates.
    It equals ``nq``; here it is certified independently by a rank computation
    on evaluations of ``pm`` (computed when not supplied).
    """
    cols: dict[tuple[int, ...], int] = {}
    class_map = []
    for e in fm.coords:
        if e is None:
            class_map.append(None)
            continue
        if e not in cols:
            cols[e] = len(cols)
        class_map.append(cols[e])
    columns = list(cols)
    A = IntegerMatrix.from_columns(columns, fm.ring.nvars)
    if pm is None:
        pm = probability_map(fm.tree, fm.model)
    np_ = span_dimension(pm, upper=len(columns))
    return ExponentMatrix(A, tuple(class_map), np_, len(columns), fm.ring.variables, fm)


_PRIME = 2_147_483_629


def span_dimension(pm: ProbabilityMap, upper: int | None = None, seed: int = 0) -> int:
    """Dimension of the linear span of the coordinate polynomials of ``pm``.

    Evaluates the coordinates at random points modulo a prime; the rank of
    that matrix is a lower bound for the rank over Q. When it reaches
    ``upper`` (a proven upper bound) it is exact. Otherwise the exact rank
    of the coefficient matrix is computed.
    """
    ring = pm.ring
    rng = random.Random(seed)
    npts = (upper if upper is not None else len(pm.coords)) + 8
    monos = sorted({m for p in pm.coords for m in p.terms})
    col = {m: j for j, m in enumerate(monos)}
    C = np.zeros((len(pm.coords), len(monos)), dtype=np.int64)
    scale = pm.model.group.order
    for i, p in enumerate(pm.coords):
        for m, c in p.terms.items():
            v = c * scale
            if v.denominator != 1:
                raise AssertionError("unexpected coefficient denominator")
            C[i, col[m]] = int(v) % _PRIME
    # monomial values at random points, mod p
    X = np.array(monos, dtype=np.int64)
    vals = np.ones((len(monos), npts), dtype=np.int64)
    pts = np.array([[rng.randrange(1, _PRIME) for _ in range(npts)] for _ in range(ring.nvars)], dtype=np.int64)
    for v in range(ring.nvars):
        rows = X[:, v] == 1
        if rows.any():
            vals[rows] = vals[rows] * pts[v] % _PRIME
    E = _matmul_mod(C, vals)
    r = _rank_mod(E)
    if upper is not None and r == upper:
        return r
    return rank([[int(x * scale) for x in (p.terms.get(m, 0) for m in monos)] for p in pm.coords])


def _matmul_mod(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for k in range(A.shape[1]):
        a = A[:, k]
        nz = np.flatnonzero(a)
        if nz.size:
            out[nz] = (out[nz] + (a[nz, None] * B[k][None, :]) % _PRIME) % _PRIME
    return out


def _rank_mod(M: np.ndarray) -> int:
    M = M.copy() % _PRIME
    rows, cols = M.shape
    r = 0
    for c in range(cols):
        piv = np.flatnonzero(M[r:, c])
        if piv.size == 0:
            continue
        p = r + piv[0]
        M[[r, p]] = M[[p, r]]
        inv = pow(int(M[r, c]), _PRIME - 2, _PRIME)
        M[r] = M[r] * inv % _PRIME
        below = np.flatnonzero(M[r + 1:, c]) + r + 1
        if below.size:
            f = M[below, c][:, None]
            M[below] = (M[below] - (f * M[r][None, :]) % _PRIME) % _PRIME
        r += 1
        if r == rows:
            break
    return r


# ---------------------------------------------------------------------------
# the commuting square


class NotSelfDualError(ValueError):
    pass


def fourier_substitution(tree: PhyloTree, model: GroupBasedModel) -> dict[str, Polynomial]:
    """``f_{e,c} -> sum_g chi_{h_c}(g) m_{e, class(g)}`` for every edge and class."""
    mring = param_ring(tree, model)
    out = {}
    for e in range(1, tree.n_edges + 1):
        for c in range(model.n_classes):
            try:
                form = model.transformed_parameter(c)
            except ValueError as exc:
                raise NotSelfDualError(str(exc)) from None
            terms = {}
            for cls, coef in enumerate(form):
                if coef:
                    ex = [0] * mring.nvars
                    ex[mring.index(model.param(e, cls))] = 1
                    terms[tuple(ex)] = coef
            out[model.param(e, c, fourier=True)] = Polynomial(mring, terms)
    return out


def verify_commutes(tree: PhyloTree, model: GroupBasedModel, root: int | None = None) -> bool:
    """Fourier transform of the probability map equals the substituted Fourier map, exactly."""
    pm = probability_map(tree, model, root)
    fm = fourier_map(tree, model, root)
    ft = fourier_transform(tree.n_leaves, model)
    lhs = ft.forward(pm.coords)
    sub = fourier_substitution(tree, model)
    for i, q in enumerate(lhs):
        rhs = fm.monomial(i).substitute(sub, pm.ring)
        if q != rhs:
            return False
    return True


def spot_check_commutes(tree: PhyloTree, model: GroupBasedModel, points: int = 5, seed: int = 0) -> bool:
    """The same identity evaluated at random rational parameter points."""
    rng = random.Random(seed)
    pm = probability_map(tree, model)
    fm = fourier_map(tree, model)
    ft = fourier_transform(tree.n_leaves, model)
    sub = fourier_substitution(tree, model)
    for _ in range(points):
        pt = random_point(pm.ring, rng)
        pv = pm.evaluate(pt)
        lhs = ft.forward(pv)
        fv = {name: lin.evaluate(pt) for name, lin in sub.items()}
        for i, q in enumerate(lhs):
            rhs = fm.monomial(i).evaluate(fv) if fm.coords[i] is not None else Fraction(0)
            if q != rhs:
                return False
    return True


def column_symmetries(em: ExponentMatrix) -> list[tuple[int, ...]]:
    """Column permutations of ``A`` induced by tree automorphisms and class-permuting group automorphisms.

    ``perm[j]`` is the image of column ``j``.
    """
    from .trees import automorphisms

    fm = em.fm
    if fm is None:
        return []
    tree, model = fm.tree, fm.model
    tuples = leaf_tuples(tree.n_leaves, model)
    index = {t: i for i, t in enumerate(tuples)}
    out = set()
    for pi in automorphisms(tree):
        for phi in model.class_automorphisms(fourier=True):
            perm = [None] * em.nq
            ok = True
            for i, hs in enumerate(tuples):
                col = em.class_map[i]
                if col is None:
                    continue
                img = [None] * tree.n_leaves
                for leaf, h in enumerate(hs):
                    img[pi[leaf] - 1] = phi[h]
                c2 = em.class_map[index[tuple(img)]]
                if c2 is None or (perm[col] is not None and perm[col] != c2):
                    ok = False
                    break
                perm[col] = c2
            if ok and None not in perm:
                out.add(tuple(perm))
    return sorted(out)


def text_dump_p(pm: ProbabilityMap) -> str:
    lines = [f"p_{lab} = {p.to_text()}" for lab, p in zip(pm.labels(), pm.coords)]
    return "\n".join(lines) + "\n"


def text_dump_q(fm: FourierMap) -> str:
    lines = []
    for i, lab in enumerate(fm.labels()):
        lines.append(f"q_{lab} = {fm.monomial(i).to_text() if fm.coords[i] is not None else '0'}")
    return "\n".join(lines) + "\n"
