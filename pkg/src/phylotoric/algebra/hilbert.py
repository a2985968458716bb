"""Hilbert series of monomial ideals, and dimension/degree of homogeneous ideals.

For a monomial ideal ``M`` in ``n`` variables the Hilbert series of ``S/M``
is ``K(s) / (1 - s)^n``. The numerator ``K`` is computed with the pivot
recursion ``K(M) = K(M + <p>) + s^deg(p) K(M : p)`` for a pure power pivot
``p``, splitting off variable-disjoint blocks of generators on the way.
"""

from __future__ import annotations

from math import prod
from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .groebner import Ideal, buchberger
from .orders import DEGREVLEX, MonomialOrder

Poly = list[int]  # integer coefficients in s, index = power


def _padd(a: Poly, b: Poly) -> Poly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, c in enumerate(b):
        out[i] += c
    return out


def _pmul(a: Poly, b: Poly) -> Poly:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _shift(a: Poly, k: int) -> Poly:
    return [0] * k + a


def _one_minus(d: int) -> Poly:
    p = [0] * (d + 1)
    p[0] = 1
    p[d] -= 1
    return p


def minimalize(gens: Iterable[Sequence[int]]) -> list[tuple[int, ...]]:
    """Minimal generators of the monomial ideal spanned by ``gens``."""
    gs = sorted({tuple(g) for g in gens}, key=lambda g: (sum(g), g))
    out: list[tuple[int, ...]] = []
    for g in gs:
        if not any(all(x <= y for x, y in zip(h, g)) for h in out):
            out.append(g)
    return out


def _numerator(gens: list[tuple[int, ...]]) -> Poly:
    if not gens:
        return [1]
    supports = [frozenset(i for i, e in enumerate(g) if e) for g in gens]
    if any(not s for s in supports):
        return [0]  # the unit ideal
    # pairwise coprime generators: product formula
    seen: set[int] = set()
    coprime = True
    for s in supports:
        if seen & s:
            coprime = False
            break
        seen |= s
    if coprime:
        out = [1]
        for g in gens:
            out = _pmul(out, _one_minus(sum(g)))
        return out
    # split into variable-disjoint blocks
    blocks = _blocks(supports)
    if len(blocks) > 1:
        out = [1]
        for b in blocks:
            out = _pmul(out, _numerator([gens[i] for i in b]))
        return out
    # pivot on the most frequent variable, at its median positive exponent
    n = len(gens[0])
    counts = [0] * n
    for g in gens:
        for i, e in enumerate(g):
            if e:
                counts[i] += 1
    v = max(range(n), key=lambda i: (counts[i], -i))
    exps = sorted(g[v] for g in gens if g[v])
    e = exps[(len(exps) - 1) // 2]
    pivot = tuple(e if i == v else 0 for i in range(n))
    plus = minimalize([g for g in gens if g[v] < e] + [pivot])
    colon = minimalize([tuple(max(x - y, 0) for x, y in zip(g, pivot)) for g in gens])
    return _padd(_numerator(plus), _shift(_numerator(colon), e))


def _blocks(supports: list[frozenset]) -> list[list[int]]:
    parent = list(range(len(supports)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    owner: dict[int, int] = {}
    for k, s in enumerate(supports):
        for v in s:
            if v in owner:
                a, b = find(owner[v]), find(k)
                if a != b:
                    parent[a] = b
            else:
                owner[v] = k
    groups: dict[int, list[int]] = {}
    for k in range(len(supports)):
        groups.setdefault(find(k), []).append(k)
    return list(groups.values())


def hilbert_numerator_reference(gens: Iterable[Sequence[int]], nvars: int) -> Poly:
    """Pure Python version of ``hilbert_numerator``; slow, kept as a cross-check."""
    gs = minimalize(gens)
    for g in gs:
        if len(g) != nvars:
            raise ValueError("exponent length mismatch")
    K = _numerator(gs)
    while len(K) > 1 and K[-1] == 0:
        K.pop()
    return K


# compiled version: same recursion (without block splitting), coefficients
# modulo a few primes and lifted by CRT; the last prime is a check
_PRIMES = np.array([2147483629, 2147483587, 2147483579, 2147483563], dtype=np.int64)


@njit(cache=True)
def _times_one_minus(poly, d, primes):
    L = poly.shape[1]
    for r in range(primes.shape[0]):
        p = primes[r]
        for i in range(L - 1, d - 1, -1):
            poly[r, i] = (poly[r, i] - poly[r, i - d]) % p


@njit(cache=True)
def _minimal_rows(G):
    k, n = G.shape
    order = np.argsort(G.sum(axis=1), kind="mergesort")
    kept = np.empty(k, np.int64)
    nk = 0
    for t in range(k):
        i = order[t]
        ok = True
        for s in range(nk):
            j = kept[s]
            div = True
            for c in range(n):
                if G[j, c] > G[i, c]:
                    div = False
                    break
            if div:
                ok = False
                break
        if ok:
            kept[nk] = i
            nk += 1
    out = np.empty((nk, n), G.dtype)
    for s in range(nk):
        out[s] = G[kept[s]]
    return out


@njit(cache=True)
def _numerator_mod(G, L, primes):
    k, n = G.shape
    out = np.zeros((primes.shape[0], L), np.int64)
    out[:, 0] = 1
    if k == 0:
        return out
    counts = np.zeros(n, np.int64)
    for i in range(k):
        for c in range(n):
            if G[i, c] > 0:
                counts[c] += 1
    if counts.max() <= 1:
        for i in range(k):
            _times_one_minus(out, G[i].sum(), primes)
        return out
    v = np.argmax(counts)
    ex = np.empty(counts[v], np.int64)
    t = 0
    for i in range(k):
        if G[i, v] > 0:
            ex[t] = G[i, v]
            t += 1
    ex.sort()
    e = ex[(t - 1) // 2]
    nplus = 0
    redundant = False
    for i in range(k):
        if G[i, v] < e:
            nplus += 1
            if G[i, v] > 0:
                pure = True
                for c in range(n):
                    if c != v and G[i, c] > 0:
                        pure = False
                        break
                if pure:
                    redundant = True
    P = np.zeros((nplus + (0 if redundant else 1), n), G.dtype)
    t = 0
    for i in range(k):
        if G[i, v] < e:
            P[t] = G[i]
            t += 1
    if not redundant:
        P[t, v] = e
    C = G.copy()
    for i in range(k):
        C[i, v] = max(C[i, v] - e, 0)
    a = _numerator_mod(P, L, primes)
    b = _numerator_mod(_minimal_rows(C), L, primes)
    for r in range(primes.shape[0]):
        p = primes[r]
        for i in range(L - e):
            a[r, i + e] = (a[r, i + e] + b[r, i]) % p
    return a


def _crt(residues: Sequence[int], primes: Sequence[int]) -> int:
    M = prod(primes)
    x = 0
    for r, p in zip(residues, primes):
        Mi = M // p
        x += r * Mi * pow(Mi, -1, p)
    x %= M
    return x if x <= M // 2 else x - M


def hilbert_numerator(gens: Iterable[Sequence[int]], nvars: int) -> Poly:
    """``K(s)`` with ``HS(S/M) = K(s) / (1 - s)^nvars``."""
    gs = [tuple(int(x) for x in g) for g in gens]
    for g in gs:
        if len(g) != nvars:
            raise ValueError("exponent length mismatch")
    if not gs:
        return [1]
    if any(not any(g) for g in gs):
        return [0]
    G = _minimal_rows(np.array(gs, dtype=np.int32).reshape(len(gs), nvars))
    L = int(G.max(axis=0).sum()) + 1
    res = _numerator_mod(G, L, _PRIMES)
    primes = [int(p) for p in _PRIMES]
    K = []
    for i in range(L):
        c = _crt([int(res[r, i]) for r in range(len(primes) - 1)], primes[:-1])
        if c % primes[-1] != int(res[-1, i]):
            raise ArithmeticError("Hilbert numerator coefficient out of range")
        K.append(c)
    while len(K) > 1 and K[-1] == 0:
        K.pop()
    return K


def reduced_series(K: Poly, nvars: int) -> tuple[int, Poly]:
    """Write ``K / (1-s)^n`` as ``Q / (1-s)^d`` with ``Q(1) != 0``; return ``(d, Q)``."""
    Q = list(K)
    d = nvars
    if not any(Q):
        return 0, [0]
    while d > 0 and sum(Q) == 0:
        # synthetic division by (1 - s)
        out = []
        acc = 0
        for c in Q[:-1]:
            acc += c
            out.append(acc)
        Q = out
        d -= 1
    return d, Q


def monomial_dimension_degree(gens: Iterable[Sequence[int]], nvars: int) -> tuple[int, int]:
    """Krull dimension and degree of ``S/M`` for a monomial ideal ``M``."""
    d, Q = reduced_series(hilbert_numerator(gens, nvars), nvars)
    return d, sum(Q)


def independent_set_dimension(gens: Iterable[Sequence[int]], nvars: int) -> int:
    """Largest set of variables containing the support of no generator.

    Exact branch and bound; an independent check on the Hilbert-series value.
    """
    supports = []
    for g in minimalize(gens):
        s = 0
        for i, e in enumerate(g):
            if e:
                s |= 1 << i
        supports.append(s)
    supports = sorted(set(supports), key=lambda s: bin(s).count("1"))
    if any(s == 0 for s in supports):
        return 0  # unit ideal: the quotient is zero; report dimension 0
    best = 0
    singles = 0
    for s in supports:
        if s & (s - 1) == 0:
            singles |= s
    free = ((1 << nvars) - 1) & ~singles

    def bits(x):
        return bin(x).count("1")

    def search(chosen: int, cand: int):
        nonlocal best
        if bits(chosen) + bits(cand) <= best:
            return
        if not cand:
            best = bits(chosen)
            return
        v = cand & -cand
        rest = cand & ~v
        new = chosen | v
        # adding v is allowed when no support fits inside the new set
        if all(s & ~new for s in supports if s & v):
            pruned = rest
            for s in supports:
                if s & v:
                    left = s & ~new
                    if left & (left - 1) == 0 and left:
                        pruned &= ~left
            search(new, pruned)
        search(chosen, rest)

    search(0, free)
    return best


def hilbert_dimension_degree(I: Ideal, order: MonomialOrder = DEGREVLEX) -> tuple[int, int]:
    """``(dim, degree)`` of ``S/I`` for a homogeneous ideal, via its initial ideal."""
    if not order.is_degree_compatible:
        raise ValueError(f"order {order} is not degree compatible")
    if not I.is_homogeneous():
        raise ValueError("ideal is not homogeneous")
    I = buchberger(I, order)
    leads = [g.leading_term(order)[0] for g in I.basis(order)]
    return monomial_dimension_degree(leads, I.ring.nvars)
