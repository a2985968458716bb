"""Buchberger's algorithm specialised to pure difference binomials.

A binomial ``x^a - x^b`` stays a binomial under S-pair formation and
reduction, and reducing a monomial by binomials yields a monomial, so the
whole computation runs on exponent vectors. The inner loops (normal forms,
the Gebauer-Moeller update, the pair queue) are compiled with numba; the
Python class only owns the arrays and grows them on request.

Pairs follow the normal strategy: smallest total degree of the lcm first,
ties broken lexicographically on the pair indices ``(i, j)`` with ``i < j``.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np
from numba import njit

from .orders import DEGREVLEX, MonomialOrder, elimination

EXP = np.int32

Exponents = tuple[int, ...]
BinomialPair = tuple[Exponents, Exponents]

# slots of the counter array shared with the compiled kernels
_SIZE, _NACT, _NPAIRS, _HEAP, _STEPS = range(5)
_DONE, _GROW, _BUDGET = 0, 1, 2

_KIND = {"lex": 0, "degrevlex": 1, "block": 2}


class BudgetExceededError(RuntimeError):
    """A Gröbner computation ran past its step budget.

    ``partial`` holds the binomials accumulated so far as ``(lead, trail)``
    exponent pairs.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


# ---------------------------------------------------------------------------
# compiled kernels


@njit(cache=True)
def _sig(m):
    s = np.uint64(0)
    for v in range(min(m.shape[0], 64)):
        if m[v] > 0:
            s |= np.uint64(1) << np.uint64(v)
    return s


@njit(cache=True)
def _drl_cmp(a, b, lo, hi):
    da = 0
    db = 0
    for v in range(lo, hi):
        da += a[v]
        db += b[v]
    if da != db:
        return 1 if da > db else -1
    for v in range(hi - 1, lo - 1, -1):
        if a[v] != b[v]:
            return 1 if a[v] < b[v] else -1
    return 0


@njit(cache=True)
def _cmp(kind, split, a, b):
    n = a.shape[0]
    if kind == 0:
        for v in range(n):
            if a[v] != b[v]:
                return 1 if a[v] > b[v] else -1
        return 0
    if kind == 1:
        return _drl_cmp(a, b, 0, n)
    c = _drl_cmp(a, b, 0, split)
    if c != 0:
        return c
    return _drl_cmp(a, b, split, n)


@njit(cache=True)
def _nf(m, lead, trail, sig, act, nact):
    """Reduce monomial ``m`` in place until no active lead divides it."""
    n = m.shape[0]
    while True:
        inv = ~_sig(m)
        hit = -1
        for t in range(nact):
            r = act[t]
            if sig[r] & inv:
                continue
            ok = True
            for v in range(n):
                if lead[r, v] > m[v]:
                    ok = False
                    break
            if ok:
                hit = r
                break
        if hit < 0:
            return
        for v in range(n):
            m[v] += trail[hit, v] - lead[hit, v]


@njit(cache=True)
def _pair_less(p, q, pdeg, pi, pj):
    if pdeg[p] != pdeg[q]:
        return pdeg[p] < pdeg[q]
    if pi[p] != pi[q]:
        return pi[p] < pi[q]
    return pj[p] < pj[q]


@njit(cache=True)
def _heap_push(heap, cnt, pid, pdeg, pi, pj):
    k = cnt[_HEAP]
    heap[k] = pid
    cnt[_HEAP] = k + 1
    while k > 0:
        parent = (k - 1) // 2
        if _pair_less(heap[k], heap[parent], pdeg, pi, pj):
            heap[k], heap[parent] = heap[parent], heap[k]
            k = parent
        else:
            break


@njit(cache=True)
def _heap_pop(heap, cnt, pdeg, pi, pj):
    top = heap[0]
    k = cnt[_HEAP] - 1
    cnt[_HEAP] = k
    heap[0] = heap[k]
    i = 0
    while True:
        l = 2 * i + 1
        if l >= k:
            break
        c = l
        if l + 1 < k and _pair_less(heap[l + 1], heap[l], pdeg, pi, pj):
            c = l + 1
        if _pair_less(heap[c], heap[i], pdeg, pi, pj):
            heap[i], heap[c] = heap[c], heap[i]
            i = c
        else:
            break
    return top


@njit(cache=True)
def _divides(a, b):
    for v in range(a.shape[0]):
        if a[v] > b[v]:
            return False
    return True


@njit(cache=True)
def _insert(a, b, lead, trail, sig, act, cnt, pi, pj, pdeg, psig, palive, heap):
    """Add binomial ``x^a - x^b`` (``a`` the larger, both reduced) with the GM update."""
    n = a.shape[0]
    h = cnt[_SIZE]
    lead[h] = a
    trail[h] = b
    hs = _sig(a)
    sig[h] = hs
    cnt[_SIZE] = h + 1
    nact = cnt[_NACT]

    # candidate pairs (g, h): sorted by lcm degree, coprime first, then g
    lcms = np.empty((nact, n), dtype=lead.dtype)
    deg = np.empty(nact, dtype=np.int64)
    cop = np.empty(nact, dtype=np.bool_)
    csig = np.empty(nact, dtype=np.uint64)
    for t in range(nact):
        g = act[t]
        d = 0
        for v in range(n):
            x = lead[g, v] if lead[g, v] > a[v] else a[v]
            lcms[t, v] = x
            d += x
        deg[t] = d
        csig[t] = sig[g] | hs
        c = (sig[g] & hs) == 0
        if c and n > 64:
            for v in range(64, n):
                if lead[g, v] > 0 and a[v] > 0:
                    c = False
                    break
        cop[t] = c
    key = np.empty(nact, dtype=np.int64)
    for t in range(nact):
        key[t] = (deg[t] * 2 + (0 if cop[t] else 1)) * (nact + 1) + t
    order = np.argsort(key)
    kept = np.empty(nact, dtype=np.int64)
    nk = 0
    for s in range(nact):
        t = order[s]
        redundant = False
        for u in range(nk):
            q = kept[u]
            if (csig[q] & ~csig[t]) != 0:
                continue
            if _divides(lcms[q], lcms[t]):
                redundant = True
                break
        if not redundant:
            kept[nk] = t
            nk += 1

    # old pairs (g1, g2) whose lcm is strictly divisible through h
    np_old = cnt[_NPAIRS]
    l1 = np.empty(n, dtype=lead.dtype)
    for p in range(np_old):
        if not palive[p]:
            continue
        if (psig[p] & hs) != hs:
            continue
        g1 = pi[p]
        g2 = pj[p]
        ok = True
        for v in range(n):
            L = lead[g1, v] if lead[g1, v] > lead[g2, v] else lead[g2, v]
            l1[v] = L
            if a[v] > L:
                ok = False
                break
        if not ok:
            continue
        same1 = True
        same2 = True
        for v in range(n):
            x1 = lead[g1, v] if lead[g1, v] > a[v] else a[v]
            x2 = lead[g2, v] if lead[g2, v] > a[v] else a[v]
            if x1 != l1[v]:
                same1 = False
            if x2 != l1[v]:
                same2 = False
        if not same1 and not same2:
            palive[p] = False

    # new pairs
    k = np_old
    for u in range(nk):
        t = kept[u]
        if cop[t]:
            continue
        pi[k] = act[t]
        pj[k] = h
        pdeg[k] = deg[t]
        psig[k] = csig[t]
        palive[k] = True
        _heap_push(heap, cnt, k, pdeg, pi, pj)
        k += 1
    cnt[_NPAIRS] = k

    # drop active elements whose lead is divisible by the new lead
    w = 0
    for t in range(nact):
        g = act[t]
        if (sig[g] & hs) == hs and _divides(a, lead[g]):
            continue
        act[w] = g
        w += 1
    act[w] = h
    cnt[_NACT] = w + 1


@njit(cache=True)
def _add(a, b, kind, split, lead, trail, sig, act, cnt, pi, pj, pdeg, psig, palive, heap):
    _nf(a, lead, trail, sig, act, cnt[_NACT])
    _nf(b, lead, trail, sig, act, cnt[_NACT])
    c = _cmp(kind, split, a, b)
    if c > 0:
        _insert(a, b, lead, trail, sig, act, cnt, pi, pj, pdeg, psig, palive, heap)
    elif c < 0:
        _insert(b, a, lead, trail, sig, act, cnt, pi, pj, pdeg, psig, palive, heap)


@njit(cache=True)
def _run(kind, split, maxdeg, budget, lead, trail, sig, act, cnt, pi, pj, pdeg, psig, palive, heap):
    n = lead.shape[1]
    cap = lead.shape[0]
    pcap = pi.shape[0]
    m1 = np.empty(n, dtype=lead.dtype)
    m2 = np.empty(n, dtype=lead.dtype)
    while cnt[_HEAP] > 0:
        if cnt[_SIZE] + 1 > cap or cnt[_NPAIRS] + cnt[_NACT] + 1 > pcap:
            return _GROW
        top = heap[0]
        if not palive[top]:
            _heap_pop(heap, cnt, pdeg, pi, pj)
            continue
        if maxdeg >= 0 and pdeg[top] > maxdeg:
            return _DONE
        if budget >= 0 and cnt[_STEPS] >= budget:
            return _BUDGET
        _heap_pop(heap, cnt, pdeg, pi, pj)
        palive[top] = False
        cnt[_STEPS] += 1
        i = pi[top]
        j = pj[top]
        for v in range(n):
            L = lead[i, v] if lead[i, v] > lead[j, v] else lead[j, v]
            m1[v] = L - lead[i, v] + trail[i, v]
            m2[v] = L - lead[j, v] + trail[j, v]
        _add(m1, m2, kind, split, lead, trail, sig, act, cnt, pi, pj, pdeg, psig, palive, heap)
    return _DONE


@njit(cache=True)
def _reduce_many(ms, lead, trail, sig, act, nact):
    for r in range(ms.shape[0]):
        _nf(ms[r], lead, trail, sig, act, nact)


@njit(cache=True)
def _first_bad_pair(lead, trail, sig, act, nact):
    """Index ``i * nact + j`` of the first S-pair not reducing to zero, or -1."""
    n = lead.shape[1]
    a = np.empty(n, lead.dtype)
    b = np.empty(n, lead.dtype)
    for i in range(nact):
        gi = act[i]
        for j in range(i + 1, nact):
            gj = act[j]
            coprime = True
            for v in range(n):
                if lead[gi, v] > 0 and lead[gj, v] > 0:
                    coprime = False
                    break
            if coprime:
                continue
            for v in range(n):
                l = max(lead[gi, v], lead[gj, v])
                a[v] = l - lead[gi, v] + trail[gi, v]
                b[v] = l - lead[gj, v] + trail[gj, v]
            _nf(a, lead, trail, sig, act, nact)
            _nf(b, lead, trail, sig, act, nact)
            for v in range(n):
                if a[v] != b[v]:
                    return i * nact + j
    return -1


# ---------------------------------------------------------------------------
# driver


class BinomialBuchberger:
    """Reduced Gröbner basis of an ideal generated by binomials ``x^a - x^b``.

    Useless pairs are dropped with the Gebauer-Moeller criteria. ``budget``
    bounds the number of S-pair reductions; ``steps`` counts them.
    ``max_size`` bounds the number of basis elements (checked whenever the
    storage grows and when the queue is empty).
    """

    def __init__(self, nvars: int, order: MonomialOrder, budget: int | None = None, max_size: int | None = None):
        self.n = nvars
        self.order = order
        self.kind = _KIND[order.kind]
        self.split = order.split
        self.budget = budget
        self.max_size = max_size
        cap, pcap = 64, 256
        self.lead = np.zeros((cap, nvars), EXP)
        self.trail = np.zeros((cap, nvars), EXP)
        self.sig = np.zeros(cap, np.uint64)
        self.act = np.zeros(cap + 1, np.int64)
        self.cnt = np.zeros(5, np.int64)
        self.pi = np.zeros(pcap, np.int64)
        self.pj = np.zeros(pcap, np.int64)
        self.pdeg = np.zeros(pcap, np.int64)
        self.psig = np.zeros(pcap, np.uint64)
        self.palive = np.zeros(pcap, np.bool_)
        self.heap = np.zeros(pcap, np.int64)

    @property
    def steps(self) -> int:
        return int(self.cnt[_STEPS])

    @property
    def size(self) -> int:
        return int(self.cnt[_NACT])

    def _arrays(self):
        return (self.lead, self.trail, self.sig, self.act, self.cnt,
                self.pi, self.pj, self.pdeg, self.psig, self.palive, self.heap)

    def _reserve(self, elements: int, pairs: int):
        cap = self.lead.shape[0]
        if elements > cap:
            new = max(2 * cap, elements)
            for name in ("lead", "trail"):
                arr = np.zeros((new, self.n), EXP)
                arr[:cap] = getattr(self, name)
                setattr(self, name, arr)
            sig = np.zeros(new, np.uint64)
            sig[:cap] = self.sig
            self.sig = sig
            act = np.zeros(new + 1, np.int64)
            act[: self.act.shape[0]] = self.act
            self.act = act
        pcap = self.pi.shape[0]
        if pairs > pcap:
            new = max(2 * pcap, pairs)
            for name in ("pi", "pj", "pdeg", "psig", "palive", "heap"):
                old = getattr(self, name)
                arr = np.zeros(new, old.dtype)
                arr[:pcap] = old
                setattr(self, name, arr)

    def _room_for_insert(self):
        c = self.cnt
        self._reserve(int(c[_SIZE]) + 1, int(c[_NPAIRS] + c[_NACT]) + 1)

    def add(self, a: Sequence[int], b: Sequence[int]):
        """Reduce ``x^a - x^b`` against the current basis and insert it if nonzero."""
        a = np.array(a, dtype=EXP)
        b = np.array(b, dtype=EXP)
        if a.shape != (self.n,) or b.shape != (self.n,):
            raise ValueError("exponent length mismatch")
        if (a < 0).any() or (b < 0).any():
            raise ValueError("negative exponent")
        self._room_for_insert()
        _add(a, b, self.kind, self.split, *self._arrays())

    def process(self, maxdeg: int | None = None):
        """Work through the pair queue, stopping early at pairs of lcm degree > ``maxdeg``."""
        budget = -1 if self.budget is None else int(self.budget)
        md = -1 if maxdeg is None else int(maxdeg)
        while True:
            status = _run(self.kind, self.split, md, budget, *self._arrays())
            if status == _BUDGET:
                raise BudgetExceededError(
                    f"Gröbner step budget {self.budget} exhausted", partial=self.current_basis()
                )
            if self.max_size is not None and self.size > self.max_size:
                raise BudgetExceededError(
                    f"Gröbner basis exceeds {self.max_size} elements", partial=self.current_basis()
                )
            if status == _DONE:
                return
            self._room_for_insert()

    def run(self, generators: Iterable[tuple[Sequence[int], Sequence[int]]]) -> list[BinomialPair]:
        for a, b in generators:
            self.add(a, b)
        self.process()
        return self.reduced_basis()

    def reduce(self, monomials) -> np.ndarray:
        """Normal forms of the rows of ``monomials`` (a fresh array)."""
        ms = np.array(monomials, dtype=EXP, ndmin=2, copy=True)
        _reduce_many(ms, self.lead, self.trail, self.sig, self.act, self.cnt[_NACT])
        return ms

    def contains(self, a: Sequence[int], b: Sequence[int]) -> bool:
        """Membership of ``x^a - x^b``; exact once the queue is empty."""
        r = self.reduce(np.array([a, b], dtype=EXP))
        return bool(np.array_equal(r[0], r[1]))

    def current_basis(self) -> list[BinomialPair]:
        idx = self.act[: self.cnt[_NACT]]
        return [(tuple(self.lead[g].tolist()), tuple(self.trail[g].tolist())) for g in idx]

    def reduced_basis(self) -> list[BinomialPair]:
        """Reduced basis as ``(lead, trail)`` pairs sorted by increasing lead."""
        idx = self.act[: self.cnt[_NACT]].copy()
        tails = self.reduce(self.trail[idx]) if idx.size else np.zeros((0, self.n), EXP)
        out = [(tuple(self.lead[g].tolist()), tuple(t.tolist())) for g, t in zip(idx, tails)]
        out.sort(key=lambda lt: self.order.key(lt[0]))
        return out


def _check(generators, nvars):
    out = []
    for a, b in generators:
        a, b = tuple(int(x) for x in a), tuple(int(x) for x in b)
        if len(a) != nvars or len(b) != nvars:
            raise ValueError("exponent length mismatch")
        out.append((a, b))
    return out


def groebner_binomials(
    generators: Iterable[tuple[Sequence[int], Sequence[int]]],
    nvars: int,
    order: MonomialOrder = DEGREVLEX,
    budget: int | None = None,
) -> list[BinomialPair]:
    """Reduced Gröbner basis of the binomials ``x^a - x^b`` given as ``(a, b)``."""
    return BinomialBuchberger(nvars, order, budget).run(_check(generators, nvars))


def saturate_binomials(
    generators: Sequence[tuple[Sequence[int], Sequence[int]]],
    nvars: int,
    budget: int | None = None,
) -> list[BinomialPair]:
    """Reduced degrevlex basis of ``I : (x_1 ... x_n)^inf`` for a binomial ideal ``I``.

    Adjoins ``t`` as variable 0 with generator ``t*x_1*...*x_n - 1`` and
    eliminates it under a block order with ``t`` greatest.
    """
    gens = [((0,) + a, (0,) + b) for a, b in _check(generators, nvars)]
    gens.append(((1,) * (nvars + 1), (0,) * (nvars + 1)))
    engine = BinomialBuchberger(nvars + 1, elimination(1), budget)
    try:
        basis = engine.run(gens)
    except BudgetExceededError as exc:
        raise BudgetExceededError(str(exc), partial=list(generators)) from None
    out = [(l[1:], t[1:]) for l, t in basis if l[0] == 0]
    rest = None if budget is None else max(budget - engine.steps, 0)
    return groebner_binomials(out, nvars, DEGREVLEX, rest)


def _permute(pairs, perm):
    return [(tuple(a[j] for j in perm), tuple(b[j] for j in perm)) for a, b in pairs]


def saturate_variable(generators, nvars: int, i: int, budget: int | None = None, max_size: int | None = None):
    """``I : x_i^inf`` for a homogeneous binomial ideal ``I``.

    Under degrevlex with ``x_i`` last, a Gröbner basis of the saturation is
    obtained by dividing each basis element by the largest power of ``x_i``
    dividing it. Returns ``(generators, steps, changed)``; ``changed`` is
    False when ``I`` was already saturated with respect to ``x_i``.
    """
    perm = [j for j in range(nvars) if j != i] + [i]
    inv = [0] * nvars
    for pos, j in enumerate(perm):
        inv[j] = pos
    engine = BinomialBuchberger(nvars, DEGREVLEX, budget, max_size)
    try:
        basis = engine.run(_permute(generators, perm))
    except BudgetExceededError as exc:
        raise BudgetExceededError(str(exc), partial=list(generators)) from None
    changed = False
    out = []
    for a, b in basis:
        k = min(a[-1], b[-1])
        if k:
            changed = True
            a = a[:-1] + (a[-1] - k,)
            b = b[:-1] + (b[-1] - k,)
        out.append((a, b))
    return _permute(out, inv), engine.steps, changed


def saturate_homogeneous_binomials(
    generators: Sequence[tuple[Sequence[int], Sequence[int]]],
    nvars: int,
    budget: int | None = None,
    variables: Sequence[int] | None = None,
    max_size: int | None = None,
) -> list[BinomialPair]:
    """Saturation of a homogeneous binomial ideal, one variable at a time.

    ``variables`` restricts which variables are saturated (default: all).
    """
    current = _check(generators, nvars)
    for a, b in current:
        if sum(a) != sum(b):
            raise ValueError("generators must be homogeneous")
    spent = 0
    for i in range(nvars) if variables is None else variables:
        rest = None if budget is None else max(budget - spent, 0)
        current, steps, _ = saturate_variable(current, nvars, i, rest, max_size)
        spent += steps
    rest = None if budget is None else max(budget - spent, 0)
    return BinomialBuchberger(nvars, DEGREVLEX, rest, max_size).run(current)


def is_binomial_groebner_basis(pairs: Sequence[BinomialPair], nvars: int, order: MonomialOrder = DEGREVLEX) -> bool:
    """Buchberger's criterion for ``(lead, trail)`` pairs, every S-pair checked.

    Leads must be the larger monomials under ``order``; the engine's
    divisor search is reused, so no pair is skipped except coprime leads.
    """
    m = len(pairs)
    if m == 0:
        return True
    lead = np.array([a for a, _ in pairs], dtype=EXP).reshape(m, nvars)
    trail = np.array([b for _, b in pairs], dtype=EXP).reshape(m, nvars)
    for r in range(m):
        if _cmp(_KIND[order.kind], order.split, lead[r], trail[r]) <= 0:
            raise ValueError(f"pair {r}: the lead is not the larger monomial")
    sig = np.array([_sig(x) for x in lead], dtype=np.uint64)
    act = np.arange(m, dtype=np.int64)
    return _first_bad_pair(lead, trail, sig, act, m) < 0
