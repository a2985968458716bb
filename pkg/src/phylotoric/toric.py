"""Toric ideals of exponent matrices, their dimension, degree and generator degrees.

The default way of computing ``I_A`` builds the ideal degree by degree from
fiber moves and then certifies the result (see ``toric_ideal``). Saturating a
lattice-basis ideal is available as well and is used as the fallback.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .algebra.binomial import (
    BinomialBuchberger,
    BudgetExceededError,
    saturate_binomials,
    saturate_homogeneous_binomials,
    saturate_variable,
)
from .algebra.groebner import Ideal, binomial, buchberger
from .algebra.hilbert import hilbert_dimension_degree, monomial_dimension_degree
from .algebra.lattice import IntegerMatrix, hermite_normal_form, lattice_kernel, rank
from .algebra.orders import DEGREVLEX
from .algebra.polynomial import Polynomial, Ring

log = logging.getLogger(__name__)

METHODS = ("markov", "saturate", "sturmfels")


class ToricBudgetError(BudgetExceededError):
    """Step budget exhausted; ``partial`` is the unsaturated lattice-basis ideal."""


class DegeneratePolytopeError(ValueError):
    pass


@dataclass
class ToricConfig:
    method: str = "markov"
    budget: int | None = None
    # largest number of degree-D monomials enumerated by the fiber method
    max_fiber_monomials: int = 1_500_000
    # degrees beyond this are left to saturation
    max_fiber_degree: int = 10
    # give up (as for the step budget) once a Gröbner basis grows past this
    max_basis_size: int | None = 12_000
    # same for the boundary of the placing triangulation
    max_volume_facets: int | None = 1_500_000
    # estimated memory of the triangulation bookkeeping, in MB
    max_volume_memory_mb: int | None = 2048
    volume: bool = True


@dataclass
class ToricIdealResult:
    ideal: Ideal
    dim_cone: int
    degree: int
    degree_profile: dict[int, int]
    volume_degree: int | None = None
    method: str = "markov"
    steps: int = 0
    certified_by: str = ""

    @property
    def dim_projective(self) -> int:
        return self.dim_cone - 1


def q_ring(nq: int) -> Ring:
    return Ring(f"q{i}" for i in range(1, nq + 1))


def _matrix(A) -> IntegerMatrix:
    # ExponentMatrix or IntegerMatrix or nested lists
    if hasattr(A, "A"):
        return A.A
    if isinstance(A, IntegerMatrix):
        return A
    return IntegerMatrix(A)


def _split(v) -> tuple[tuple[int, ...], tuple[int, ...]]:
    return tuple(max(x, 0) for x in v), tuple(max(-x, 0) for x in v)


def _is_homogeneous(M: IntegerMatrix) -> bool:
    """Some rational row combination of ``M`` is the all-ones vector."""
    if M.ncols == 0:
        return True
    return rank([list(r) for r in M.entries] + [[1] * M.ncols]) == rank(M)


def _binomials_to_ideal(ring: Ring, pairs) -> Ideal:
    basis = [binomial(ring, a, b) for a, b in pairs]
    return Ideal(ring, basis, (tuple(basis), DEGREVLEX))


# ---------------------------------------------------------------------------
# fiber moves


def _multisets(m: int, d: int) -> np.ndarray:
    """All non-decreasing index tuples of length ``d`` over ``range(m)``, lexicographically."""
    cur = np.arange(m, dtype=np.int32)[:, None]
    for _ in range(d - 1):
        last = cur[:, -1].astype(np.int64)
        reps = m - last
        rows = np.repeat(np.arange(len(cur)), reps)
        starts = np.repeat(last, reps)
        off = np.arange(len(rows)) - np.repeat(np.cumsum(reps) - reps, reps)
        cur = np.hstack([cur[rows], (starts + off).astype(np.int32)[:, None]])
    return cur


def fiber_moves(M: IntegerMatrix, d: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Moves connecting each degree-``d`` fiber of ``A``, given all lower-degree moves.

    Two monomials of one fiber are already connected by lower-degree moves
    exactly when they are linked by a chain of monomials in which neighbours
    share a variable. One move joins each further component to the first,
    so the moves returned are minimal generators of ``I_A`` of degree ``d``;
    their number is the degree-``d`` entry of the degree profile.
    """
    m = M.ncols
    cols = np.array(M.entries, dtype=np.int64).T.reshape(m, -1)
    C = _multisets(m, d)
    N = len(C)
    img = cols[C].sum(axis=1)
    _, fib = np.unique(img, axis=0, return_inverse=True)
    fib = fib.ravel()
    F = int(fib.max()) + 1
    # bipartite graph: monomial -- (fiber, variable)
    rows = np.repeat(np.arange(N), d)
    other = N + fib[rows] * m + C.ravel()
    g = coo_matrix((np.ones(len(rows), np.int8), (rows, other)), shape=(N + F * m, N + F * m))
    _, lab = connected_components(g, directed=False)
    lab = lab[:N]
    order = np.lexsort((np.arange(N), lab, fib))
    f_s, l_s = fib[order], lab[order]
    first = np.ones(N, bool)
    first[1:] = (f_s[1:] != f_s[:-1]) | (l_s[1:] != l_s[:-1])
    reps = order[first]
    rf = fib[reps]
    fstart = np.ones(len(reps), bool)
    fstart[1:] = rf[1:] != rf[:-1]
    base = reps[np.maximum.accumulate(np.where(fstart, np.arange(len(reps)), 0))]
    out = []
    for a, b in zip(base[~fstart], reps[~fstart]):
        out.append((tuple(np.bincount(C[a], minlength=m).tolist()), tuple(np.bincount(C[b], minlength=m).tolist())))
    # deterministic order: by fiber then representative index
    out.sort()
    return out


def _column_orbits(m: int, symmetries) -> list[list[int]]:
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for perm in symmetries or ():
        for j, k in enumerate(perm):
            a, b = find(j), find(k)
            if a != b:
                parent[max(a, b)] = min(a, b)
    orbits: dict[int, list[int]] = {}
    for j in range(m):
        orbits.setdefault(find(j), []).append(j)
    return list(orbits.values())


def _check_symmetries(M: IntegerMatrix, symmetries) -> list[tuple[int, ...]]:
    """Keep the column permutations that map the column set of ``M`` onto itself up to a row permutation."""
    rows = [tuple(r) for r in M.entries]
    good = []
    for perm in symmetries or ():
        if sorted(perm) != list(range(M.ncols)):
            continue
        permuted = sorted(tuple(r[perm.index(j)] for j in range(M.ncols)) for r in rows)
        if permuted == sorted(rows):
            good.append(tuple(perm))
    return good


# ---------------------------------------------------------------------------
# toric ideal


def toric_ideal(
    A,
    method: str = "markov",
    budget: int | None = None,
    symmetries=None,
    kernel_basis=None,
    config: ToricConfig | None = None,
) -> Ideal:
    """``I_A``, carrying its reduced degrevlex Gröbner basis.

    ``method``:

    * ``"saturate"``: binomials of a lattice basis of ``ker A``, saturated
      by the product of all variables with one auxiliary variable;
    * ``"sturmfels"``: the same ideal saturated one variable at a time;
    * ``"markov"``: the ideal ``J`` generated by fiber moves of degree
      ``<= D`` for increasing ``D``. ``J`` is contained in ``I_A`` and
      ``J = I_A`` once (a) every lattice-basis binomial lies in ``J`` and
      (b) ``J : x_i = J`` for all ``i``. ``J`` is invariant under column
      symmetries of ``A``, so (b) is checked on one column per orbit.
      Uncertified results fall back to ``"sturmfels"`` seeded with ``J``.

    ``symmetries`` are column permutations of ``A`` (checked, bad ones dropped).
    ``budget`` bounds the total number of S-pair reductions.
    """
    return toric_ideal_details(A, method, budget, symmetries, kernel_basis, config)[0]


def toric_ideal_details(A, method="markov", budget=None, symmetries=None, kernel_basis=None, config=None):
    """Like ``toric_ideal`` but returns ``(ideal, steps, certificate, profile)``.

    ``profile`` is the degree profile when the fiber method produced it, else None.
    """
    cfg = config or ToricConfig(method=method, budget=budget)
    method = cfg.method if config else method
    budget = cfg.budget if config else budget
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    M = _matrix(A)
    m = M.ncols
    ring = q_ring(m)
    L = list(kernel_basis) if kernel_basis is not None else lattice_kernel(M)
    for v in L:
        if any(M.apply(v)):
            raise ValueError("kernel basis vector not in ker A")
    lattice = [_split(v) for v in L]
    unsat = Ideal(ring, [binomial(ring, a, b) for a, b in lattice])
    if not L:
        return Ideal(ring, (), ((), DEGREVLEX)), 0, "trivial kernel", {}
    if not _is_homogeneous(M):
        raise ValueError("A does not define a homogeneous toric ideal")

    def fail(exc):
        raise ToricBudgetError(str(exc), partial=unsat) from None

    if method == "saturate":
        try:
            pairs = saturate_binomials(lattice, m, budget)
        except BudgetExceededError as exc:
            fail(exc)
        return _binomials_to_ideal(ring, pairs), 0, "saturation", None
    if method == "sturmfels":
        try:
            pairs = saturate_homogeneous_binomials(lattice, m, budget, max_size=cfg.max_basis_size)
        except BudgetExceededError as exc:
            fail(exc)
        return _binomials_to_ideal(ring, pairs), 0, "saturation", None

    syms = _check_symmetries(M, symmetries)
    orbit_reps = [max(o) for o in _column_orbits(m, syms)]
    cap = cfg.max_basis_size
    engine = BinomialBuchberger(m, DEGREVLEX, budget, cap)
    profile: dict[int, int] = {}
    spent = 0

    def remaining():
        return None if budget is None else max(budget - engine.steps - spent, 0)

    d = 0
    try:
        while True:
            d += 1
            if d > cfg.max_fiber_degree or math.comb(m + d - 1, d) > cfg.max_fiber_monomials:
                break
            moves = fiber_moves(M, d)
            if moves:
                profile[d] = len(moves)
            for a, b in moves:
                engine.add(a, b)
            engine.process()
            if not all(engine.contains(a, b) for a, b in lattice):
                continue
            basis = engine.reduced_basis()
            ok, steps = _saturated_at_reps(basis, m, orbit_reps, remaining(), cap)
            spent += steps
            if ok:
                log.debug("fiber moves up to degree %d certified", d)
                return _binomials_to_ideal(ring, basis), engine.steps + spent, f"fiber moves <= {d}", profile
        log.info("fiber moves not certified up to degree %d; saturating", d - 1)
        pairs = saturate_homogeneous_binomials(engine.current_basis() + lattice, m, remaining(), max_size=cap)
    except BudgetExceededError as exc:
        fail(exc)
    return _binomials_to_ideal(ring, pairs), engine.steps + spent, "saturation", None


def _saturated_at_reps(basis, m, reps, budget, max_size=None) -> tuple[bool, int]:
    """Whether ``J : x_r = J`` for each ``r`` in ``reps``; also returns the steps used."""
    spent = 0
    for r in sorted(reps, reverse=True):
        if r == m - 1:
            # degrevlex already has x_r last
            if any(a[r] and b[r] for a, b in basis):
                return False, spent
            continue
        rest = None if budget is None else max(budget - spent, 0)
        _, steps, changed = saturate_variable(basis, m, r, rest, max_size)
        spent += steps
        if changed:
            return False, spent
    return True, spent


# ---------------------------------------------------------------------------
# dimension and degree


def cone_dimension(A) -> int:
    return rank(_matrix(A))


def degree_via_hilbert(ideal: Ideal, nq: int | None = None) -> int:
    """Degree of the projective variety cut out by a homogeneous ideal; 1 for the zero ideal."""
    if nq is not None and nq != ideal.ring.nvars:
        raise ValueError("ambient dimension does not match the ideal's ring")
    if ideal.is_zero():
        return 1
    basis = ideal.basis(DEGREVLEX)
    if basis is not None:
        leads = [g.leading_term(DEGREVLEX)[0] for g in basis]
        return monomial_dimension_degree(leads, ideal.ring.nvars)[1]
    return hilbert_dimension_degree(ideal)[1]


def hilbert_dimension(ideal: Ideal) -> int:
    """Krull dimension of ``S/I`` from the initial ideal."""
    if ideal.is_zero():
        return ideal.ring.nvars
    I = buchberger(ideal, DEGREVLEX)
    leads = [g.leading_term(DEGREVLEX)[0] for g in I.basis(DEGREVLEX)]
    return monomial_dimension_degree(leads, ideal.ring.nvars)[0]


@dataclass
class LatticePolytope:
    """Columns of ``A`` in coordinates of a basis of the lattice spanned by their differences."""

    points: list[tuple[int, ...]]
    dim: int
    basis: list[tuple[int, ...]] = field(default_factory=list)

    @classmethod
    def from_matrix(cls, A) -> "LatticePolytope":
        M = _matrix(A)
        cols = list(dict.fromkeys(M.columns()))
        if len(cols) < 2:
            raise DegeneratePolytopeError("all points coincide; volume is 0")
        a0 = cols[0]
        diffs = [[x - y for x, y in zip(c, a0)] for c in cols[1:]]
        H, _ = hermite_normal_form(diffs)
        B = [tuple(r) for r in H if any(r)]
        pts = [(0,) * len(B)] + [_coordinates(B, dv) for dv in diffs]
        return cls(pts, len(B), B)

    def normalized_volume(self, max_facets: int | None = 1_500_000, max_memory_mb: int | None = 2048) -> int:
        return placing_volume(self.points, max_facets, max_memory_mb)


def _coordinates(B, v) -> tuple[int, ...]:
    """Integer coefficients of ``v`` in the echelon basis ``B`` (rows)."""
    v = list(v)
    out = []
    for row in B:
        p = next(j for j, x in enumerate(row) if x)
        q, r = divmod(v[p], row[p])
        if r:
            raise ValueError("vector not in the lattice")
        out.append(q)
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    if any(v):
        raise ValueError("vector not in the lattice")
    return tuple(out)


def _facet_normals(P: np.ndarray, facets: np.ndarray) -> np.ndarray:
    """Integer normals ``n`` with ``n . (x - v0) = det[v1 - v0, ..., x - v0]`` for facet vertices ``v``."""
    k, d = facets.shape
    V = P[facets]  # k x d x d
    D = (V[:, 1:, :] - V[:, :1, :]).astype(np.float64)  # k x (d-1) x d
    normals = np.empty((k, d), dtype=np.float64)
    for i in range(d):
        minor = np.delete(D, i, axis=2)
        normals[:, i] = (-1) ** (i + d - 1) * (np.linalg.det(minor) if d > 1 else 1.0)
    return np.rint(normals).astype(np.int64)


def _volume_memory_mb(n_facets: int, n_ridges: int, d: int) -> float:
    # facet tuple and normal rows; ridge key, owner list and dict slot (calibrated against peak RSS)
    return (n_facets * (160 + 48 * d) + n_ridges * (520 + 16 * d)) / 2**20


def placing_volume(points, max_facets: int | None = 1_500_000, max_memory_mb: int | None = 2048) -> int:
    """Normalized volume of the convex hull of full-dimensional integer points.

    Placing triangulation with points inserted in lexicographic order: each
    point is coned to the boundary facets it lies strictly beyond. Returns
    the sum of ``|det|`` over the simplices. More than ``max_facets``
    facets created in total, or bookkeeping estimated above
    ``max_memory_mb``, raise ``BudgetExceededError``.
    """
    pts = sorted(set(tuple(int(x) for x in p) for p in points))
    if len(pts) < 2:
        raise DegeneratePolytopeError("all points coincide; volume is 0")
    d = len(pts[0])
    P = np.array(pts, dtype=np.int64)
    if d == 0:
        raise DegeneratePolytopeError("zero-dimensional polytope")
    # initial simplex: greedily by affine rank in insertion order
    simplex = [0]
    for i in range(1, len(pts)):
        if len(simplex) == d + 1:
            break
        trial = [list(P[j] - P[0]) for j in simplex[1:]] + [list(P[i] - P[0])]
        if rank(trial) == len(simplex):
            simplex.append(i)
    if len(simplex) < d + 1:
        raise DegeneratePolytopeError("points do not span the lattice dimension")
    in_simplex = set(simplex)
    interior = P[simplex].sum(axis=0)  # (d+1) x centroid

    volume = abs(int(round(np.linalg.det((P[simplex[1:]] - P[simplex[0]]).astype(np.float64)))))
    facets = np.array([[v for v in simplex if v != w] for w in simplex], dtype=np.int64)
    normals = _facet_normals(P, facets)
    offsets = np.einsum("ij,ij->i", normals, P[facets[:, 0]])
    # orient outward: interior point has n.x < offset
    sign = np.where(normals @ interior < (d + 1) * offsets, 1, -1)
    normals *= sign[:, None]
    offsets *= sign
    alive = np.ones(len(facets), bool)
    flist = [tuple(sorted(f)) for f in facets.tolist()]
    ridges: dict[tuple[int, ...], list[int]] = {}

    def register(start):
        for f in range(start, len(flist)):
            vs = flist[f]
            for j in range(d):
                ridges.setdefault(vs[:j] + vs[j + 1:], []).append(f)

    register(0)
    for i in range(len(pts)):
        if i in in_simplex:
            continue
        vals = normals @ P[i] - offsets
        visible = np.flatnonzero((vals > 0) & alive)
        if visible.size == 0:
            continue
        volume += int(vals[visible].sum())
        vis = set(visible.tolist())
        new = []
        for f in vis:
            vs = flist[f]
            for j in range(d):
                key = vs[:j] + vs[j + 1:]
                owners = ridges[key]
                if len(owners) == 2 and (owners[0] if owners[1] == f else owners[1]) not in vis:
                    new.append(tuple(sorted(key + (i,))))
                owners.remove(f)
                if not owners:
                    del ridges[key]
        alive[visible] = False
        if not new:
            continue
        nf = np.array(new, dtype=np.int64)
        nn = _facet_normals(P, nf)
        no = np.einsum("ij,ij->i", nn, P[nf[:, 0]])
        sign = np.where(nn @ interior < (d + 1) * no, 1, -1)
        nn *= sign[:, None]
        no *= sign
        start = len(flist)
        flist.extend(new)
        if max_facets is not None and len(flist) > max_facets:
            raise BudgetExceededError(f"placing triangulation exceeds {max_facets} facets")
        if max_memory_mb is not None and _volume_memory_mb(len(flist), len(ridges), d) > max_memory_mb:
            raise BudgetExceededError(f"placing triangulation needs more than {max_memory_mb} MB")
        normals = np.vstack([normals, nn])
        offsets = np.concatenate([offsets, no])
        alive = np.concatenate([alive, np.ones(len(nf), bool)])
        register(start)
    return volume


def degree_via_volume(A, max_facets: int | None = 1_500_000, max_memory_mb: int | None = 2048) -> int:
    """Normalized volume of the column polytope, relative to the lattice of column differences."""
    poly = LatticePolytope.from_matrix(A)
    if poly.dim == 0:
        raise DegeneratePolytopeError("all points coincide; volume is 0")
    return poly.normalized_volume(max_facets, max_memory_mb)


# ---------------------------------------------------------------------------
# minimal generators


def minimal_generators(ideal: Ideal, budget: int | None = None) -> list[Polynomial]:
    """Greedy minimal generating set of a homogeneous binomial ideal.

    Reduced degrevlex basis elements are visited by degree, then by their
    index in the basis; an element is kept unless it lies in the ideal of
    those kept so far (checked by normal form against a truncated basis).
    """
    if ideal.is_zero():
        return []
    I = buchberger(ideal, DEGREVLEX, budget)
    basis = list(I.basis(DEGREVLEX))
    if not all(len(g.terms) == 2 and g.is_binomial() for g in basis):
        raise ValueError("minimal_generators expects a binomial ideal")
    cand = sorted(range(len(basis)), key=lambda i: (basis[i].total_degree(), i))
    engine = BinomialBuchberger(ideal.ring.nvars, DEGREVLEX, budget)
    kept = []
    cur = None
    for i in cand:
        g = basis[i]
        deg = g.total_degree()
        if deg != cur:
            engine.process(maxdeg=deg)
            cur = deg
        (a, _), (b, _) = g.sorted_terms(DEGREVLEX)[:2]
        if engine.contains(a, b):
            continue
        kept.append(g)
        engine.add(a, b)
        engine.process(maxdeg=deg)
    return kept


def degree_profile(ideal: Ideal) -> dict[int, int]:
    out: dict[int, int] = {}
    for g in minimal_generators(ideal):
        d = g.total_degree()
        out[d] = out.get(d, 0) + 1
    return dict(sorted(out.items()))


# ---------------------------------------------------------------------------
# pullback to probability coordinates


@dataclass
class ProbabilityInvariants:
    nonlinear: list[Polynomial]
    linear: list[Polynomial]  # vanishing Fourier coordinates
    substitution: dict[str, Polynomial]  # q-variable -> linear form in p
    expanded: bool = True


def _product_coefficients(forms: np.ndarray, idx: list[int], C: np.ndarray) -> np.ndarray:
    """Coefficients of ``prod_k forms[idx[k]]`` on the multisets ``C`` (rows, sorted)."""
    d = len(idx)
    acc = np.zeros(len(C), dtype=object)
    for perm in set(itertools.permutations(idx)):
        term = np.ones(len(C), dtype=object)
        for k, row in enumerate(perm):
            term = term * forms[row][C[:, k]]
        acc = acc + term
    return acc


def pullback(gens, forms, target: Ring) -> list[Polynomial]:
    """Substitute ``q_c -> sum_j forms[c][j] * y_j`` into homogeneous polynomials.

    ``forms`` is an integer matrix with one row per variable of the source
    ring; ``target`` has one variable per column. Terms are expanded
    degree by degree on all monomials of that degree, with exact integers.
    """
    F = np.array(forms, dtype=object)
    if F.ndim != 2 or F.shape[1] != target.nvars:
        raise ValueError("forms must have one column per target variable")
    N = target.nvars
    out = []
    cache: dict[int, np.ndarray] = {}
    for g in gens:
        if g.is_zero():
            out.append(target.zero())
            continue
        if not g.is_homogeneous():
            raise ValueError("pullback expects homogeneous polynomials")
        d = g.total_degree()
        if d == 0:
            out.append(Polynomial(target, {(0,) * N: next(iter(g.terms.values()))}))
            continue
        if d not in cache:
            cache[d] = _multisets(N, d)
        C = cache[d]
        total = np.zeros(len(C), dtype=object)
        for m, c in g.terms.items():
            idx = [v for v, e in enumerate(m) for _ in range(e)]
            # distinct orderings of idx, times the orderings fixing it
            weight = math.prod(math.factorial(e) for e in m)
            total = total + _product_coefficients(F, idx, C) * (Fraction(c) * weight)
        # divide out the orderings of repeated variables of each monomial
        terms = {}
        for r in np.flatnonzero(total != 0):
            e = np.bincount(C[r], minlength=N)
            terms[tuple(int(x) for x in e)] = Fraction(total[r]) / math.prod(math.factorial(int(x)) for x in e)
        out.append(Polynomial(target, terms))
    return out


def probability_invariants(ideal: Ideal, fm, ft, expand_limit: int | None = 250_000) -> ProbabilityInvariants:
    """Pull the invariants back to probability coordinates.

    ``q_c`` becomes the forward-transform linear form of the first coordinate
    in class ``c``. The expanded forms are dense; when their total number of
    possible terms exceeds ``expand_limit`` the expansion is skipped
    (``expanded`` is then False and only the substitution is meaningful).
    Zero Fourier coordinates give linear invariants.
    """
    from .parametrization import p_ring

    P = p_ring(fm.tree, fm.model)
    H = ft.matrix
    cols: dict = {}
    class_map = [None if e is None else cols.setdefault(e, len(cols)) for e in fm.coords]
    if len(cols) != ideal.ring.nvars:
        raise ValueError("ideal ring does not match the Fourier map")

    def form(i):
        terms = {}
        for j, s in enumerate(H[i].tolist()):
            e = [0] * P.nvars
            e[j] = 1
            terms[tuple(e)] = Fraction(s)
        return Polynomial(P, terms)

    first: dict[int, int] = {}
    linear = []
    for i, c in enumerate(class_map):
        if c is None:
            linear.append(form(i))
        elif c not in first:
            first[c] = i
    sub = {ideal.ring.variables[c]: form(i) for c, i in sorted(first.items())}
    gens = ideal.basis(DEGREVLEX) or ideal.generators
    estimate = sum(math.comb(P.nvars + g.total_degree() - 1, g.total_degree()) for g in gens if not g.is_zero())
    if expand_limit is not None and estimate > expand_limit:
        return ProbabilityInvariants([], linear, sub, expanded=False)
    forms = [H[first[c]].tolist() for c in range(len(cols))]
    return ProbabilityInvariants(pullback(gens, forms, P), linear, sub, expanded=True)


# ---------------------------------------------------------------------------
# everything at once


def analyze(em, config: ToricConfig | None = None, symmetries=None) -> ToricIdealResult:
    """Toric ideal, dimension, Hilbert degree, profile and (optionally) volume degree."""
    cfg = config or ToricConfig()
    ideal, steps, cert, profile = toric_ideal_details(em, symmetries=symmetries, config=cfg)
    if profile is None:
        profile = degree_profile(ideal)
    dim = cone_dimension(em)
    deg = degree_via_hilbert(ideal)
    vol = degree_via_volume(em, cfg.max_volume_facets, cfg.max_volume_memory_mb) if cfg.volume else None
    return ToricIdealResult(ideal, dim, deg, dict(sorted(profile.items())), vol, cfg.method, steps, cert)


def ideal_text(ideal: Ideal, header: dict[str, str] | None = None) -> str:
    lines = [f"# {k}: {v}" for k, v in (header or {}).items()]
    lines.append(f"# variables: {' '.join(ideal.ring.variables)}")
    lines.append(f"# order: {DEGREVLEX}")
    gens = ideal.basis(DEGREVLEX)
    if gens is None:
        gens = ideal.generators
    lines.extend(g.to_text(DEGREVLEX) for g in gens)
    return "\n".join(lines) + "\n"


__all__ = [
    "DegeneratePolytopeError",
    "LatticePolytope",
    "METHODS",
    "ProbabilityInvariants",
    "ToricBudgetError",
    "ToricConfig",
    "ToricIdealResult",
    "analyze",
    "cone_dimension",
    "degree_profile",
    "degree_via_hilbert",
    "degree_via_volume",
    "fiber_moves",
    "hilbert_dimension",
    "ideal_text",
    "minimal_generators",
    "placing_volume",
    "probability_invariants",
    "q_ring",
    "toric_ideal",
    "toric_ideal_details",
]

