"""Ideals, Buchberger's algorithm over Q, normal forms and saturation.

Pure difference binomial input is routed to the compiled binomial engine;
everything else goes through the generic implementation below. Both return
the reduced Gröbner basis, which is unique for a given order, so the choice
of engine never shows in the output.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .binomial import BudgetExceededError, groebner_binomials, saturate_binomials
from .orders import DEGREVLEX, MonomialOrder
from .polynomial import Polynomial, Ring, RingMismatchError

Terms = dict[tuple[int, ...], Fraction]


class MissingBasisError(ValueError):
    """Normal form requested for an order without a cached Gröbner basis."""


@dataclass(frozen=True)
class Ideal:
    ring: Ring
    generators: tuple[Polynomial, ...]
    groebner_cache: tuple[tuple[Polynomial, ...], MonomialOrder] | None = field(default=None, compare=False)

    def __init__(self, ring: Ring, generators: Iterable[Polynomial] = (), groebner_cache=None):
        gens = tuple(generators)
        for g in gens:
            if g.ring != ring:
                raise RingMismatchError(f"generator outside the ring: {g.ring.diff(ring)}")
        object.__setattr__(self, "ring", ring)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "groebner_cache", groebner_cache)

    def basis(self, order: MonomialOrder | None = None) -> tuple[Polynomial, ...] | None:
        """Cached reduced Gröbner basis, if one exists for ``order`` (default: any)."""
        if self.groebner_cache is None:
            return None
        basis, cached = self.groebner_cache
        if order is not None and cached != order:
            return None
        return basis

    @property
    def order(self) -> MonomialOrder | None:
        return None if self.groebner_cache is None else self.groebner_cache[1]

    def with_basis(self, basis: Sequence[Polynomial], order: MonomialOrder) -> "Ideal":
        return Ideal(self.ring, self.generators, (tuple(basis), order))

    def is_zero(self) -> bool:
        return all(g.is_zero() for g in self.generators)

    def is_binomial(self) -> bool:
        return all(g.is_binomial() for g in self.generators if not g.is_zero())

    def is_homogeneous(self) -> bool:
        return all(g.is_homogeneous() for g in self.generators)

    def __contains__(self, f: Polynomial) -> bool:
        if self.groebner_cache is None:
            raise MissingBasisError("membership needs a Gröbner basis; call buchberger first")
        return normal_form(f, self).is_zero()


# ---------------------------------------------------------------------------
# term-dict helpers


def _lead(terms: Terms, key):
    return max(terms, key=key)


def _divides(a, b) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _reduce_terms(f: Terms, basis: list[tuple[tuple[int, ...], Fraction, Terms]], key) -> Terms:
    """Full multivariate division remainder of ``f`` by ``basis`` (lead, lc, terms)."""
    p = dict(f)
    r: Terms = {}
    while p:
        m = _lead(p, key)
        c = p[m]
        for lm, lc, g in basis:
            if _divides(lm, m):
                q = c / lc
                shift = tuple(x - y for x, y in zip(m, lm))
                for gm, gc in g.items():
                    t = tuple(x + y for x, y in zip(gm, shift))
                    v = p.get(t, 0) - q * gc
                    if v:
                        p[t] = v
                    else:
                        p.pop(t, None)
                break
        else:
            r[m] = c
            del p[m]
    return r


def _s_poly(f: Terms, lf, g: Terms, lg) -> Terms:
    L = tuple(max(x, y) for x, y in zip(lf, lg))
    sf = tuple(x - y for x, y in zip(L, lf))
    sg = tuple(x - y for x, y in zip(L, lg))
    cf, cg = f[lf], g[lg]
    out: Terms = {}
    for m, c in f.items():
        t = tuple(x + y for x, y in zip(m, sf))
        out[t] = out.get(t, 0) + c / cf
    for m, c in g.items():
        t = tuple(x + y for x, y in zip(m, sg))
        v = out.get(t, 0) - c / cg
        if v:
            out[t] = v
        else:
            out.pop(t, None)
    return {m: c for m, c in out.items() if c}


def s_polynomial(f: Polynomial, g: Polynomial, order: MonomialOrder = DEGREVLEX) -> Polynomial:
    lf = f.leading_term(order)[0]
    lg = g.leading_term(order)[0]
    return Polynomial._raw(f.ring, _s_poly(f.terms, lf, g.terms, lg))


def _monic(terms: Terms, key) -> Terms:
    c = terms[_lead(terms, key)]
    return {m: v / c for m, v in terms.items()}


# ---------------------------------------------------------------------------
# Buchberger


def _pure_binomial_exponents(gens: Sequence[Polynomial]):
    out = []
    for g in gens:
        if len(g.terms) != 2:
            return None
        (a, ca), (b, cb) = g.terms.items()
        if ca != -cb:
            return None
        out.append((a, b))
    return out


def _generic_buchberger(gens: list[Terms], order: MonomialOrder, budget: int | None) -> list[Terms]:
    key = order.key
    G: list[tuple[tuple[int, ...], Fraction, Terms]] = []
    alive: list[bool] = []
    pairs: list[tuple[int, int, int]] = []
    steps = 0

    def lcm(a, b):
        return tuple(max(x, y) for x, y in zip(a, b))

    def insert(h: Terms):
        h = _monic(h, key)
        lh = _lead(h, key)
        k = len(G)
        cands = []
        for i, (lg, _, _) in enumerate(G):
            if alive[i]:
                L = lcm(lg, lh)
                coprime = all(x == 0 or y == 0 for x, y in zip(lg, lh))
                cands.append((sum(L), 0 if coprime else 1, i, L, coprime))
        cands.sort()
        kept = []
        for d, _, i, L, coprime in cands:
            if any(_divides(K, L) for K in kept_l(kept)):
                continue
            kept.append((i, L, coprime))
        # Gebauer-Moeller pruning of old pairs
        still = []
        for d, i, j in pairs:
            L = lcm(G[i][0], G[j][0])
            if _divides(lh, L) and lcm(G[i][0], lh) != L and lcm(G[j][0], lh) != L:
                continue
            still.append((d, i, j))
        pairs[:] = still
        heapq.heapify(pairs)
        for i, L, coprime in kept:
            if not coprime:
                heapq.heappush(pairs, (sum(L), i, k))
        for i, (lg, _, _) in enumerate(G):
            if alive[i] and _divides(lh, lg):
                alive[i] = False
        G.append((lh, Fraction(1), h))
        alive.append(True)

    def kept_l(kept):
        return [L for _, L, _ in kept]

    def active():
        return [g for g, a in zip(G, alive) if a]

    for f in gens:
        r = _reduce_terms(f, active(), key)
        if r:
            insert(r)
    while pairs:
        _, i, j = heapq.heappop(pairs)
        steps += 1
        if budget is not None and steps > budget:
            raise BudgetExceededError(
                f"Gröbner step budget {budget} exhausted", partial=[g for _, _, g in active()]
            )
        s = _s_poly(G[i][2], G[i][0], G[j][2], G[j][0])
        r = _reduce_terms(s, active(), key)
        if r:
            insert(r)
    basis = active()
    out = []
    for idx, (lm, lc, g) in enumerate(basis):
        others = [b for k, b in enumerate(basis) if k != idx]
        tail = {m: c for m, c in g.items() if m != lm}
        out.append({lm: Fraction(1), **_reduce_terms(tail, others, key)})
    out.sort(key=lambda t: key(_lead(t, key)))
    return out


def buchberger(I: Ideal, order: MonomialOrder = DEGREVLEX, budget: int | None = None) -> Ideal:
    """Attach the reduced Gröbner basis of ``I`` for ``order``.

    The basis is sorted by increasing leading monomial; every element is
    monic. ``budget`` bounds the number of S-pair reductions.
    """
    cached = I.basis(order)
    if cached is not None:
        return I
    gens = [g for g in I.generators if not g.is_zero()]
    ring = I.ring
    if not gens:
        return I.with_basis((), order)
    binom = _pure_binomial_exponents(gens)
    if binom is not None:
        pairs = groebner_binomials(binom, ring.nvars, order, budget)
        basis = [binomial(ring, a, b) for a, b in pairs]
    else:
        basis = [Polynomial._raw(ring, t) for t in _generic_buchberger([g.terms for g in gens], order, budget)]
    return I.with_basis(basis, order)


def binomial(ring: Ring, a: Sequence[int], b: Sequence[int]) -> Polynomial:
    """The polynomial ``x^a - x^b``."""
    a, b = tuple(a), tuple(b)
    if a == b:
        return ring.zero()
    return Polynomial._raw(ring, {a: Fraction(1), b: Fraction(-1)})


def normal_form(f: Polynomial, I: Ideal, order: MonomialOrder | None = None) -> Polynomial:
    """Remainder of ``f`` on division by the cached basis; zero iff ``f`` is in ``I``."""
    if f.ring != I.ring:
        raise RingMismatchError(f"ring mismatch: {f.ring.diff(I.ring)}")
    basis = I.basis(order)
    if basis is None:
        raise MissingBasisError(f"no Gröbner basis cached for order {order}")
    used = I.order
    key = used.key
    B = []
    for g in basis:
        lm = _lead(g.terms, key)
        B.append((lm, g.terms[lm], g.terms))
    return Polynomial._raw(f.ring, _reduce_terms(f.terms, B, key))


def is_groebner_basis(basis: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> bool:
    """Buchberger's criterion: every S-polynomial reduces to zero."""
    key = order.key
    B = []
    for g in basis:
        if g.is_zero():
            continue
        lm = _lead(g.terms, key)
        B.append((lm, g.terms[lm], g.terms))
    for i in range(len(B)):
        for j in range(i + 1, len(B)):
            li, lj = B[i][0], B[j][0]
            if all(x == 0 or y == 0 for x, y in zip(li, lj)):
                continue
            s = _s_poly(B[i][2], li, B[j][2], lj)
            if _reduce_terms(s, B, key):
                return False
    return True


def is_reduced(basis: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> bool:
    """Monic, and no term of any element is divisible by another element's lead."""
    leads = [g.leading_term(order) for g in basis]
    if any(c != 1 for _, c in leads):
        return False
    for i, g in enumerate(basis):
        for j, (lm, _) in enumerate(leads):
            if i != j and any(_divides(lm, m) for m in g.terms):
                return False
    return True


class NotBinomialError(ValueError):
    pass


def saturate_by_all_variables(I: Ideal, budget: int | None = None) -> Ideal:
    """``I : (x_1 ... x_n)^inf`` for an ideal generated by binomials.

    An auxiliary variable ``t`` with generator ``t*x_1*...*x_n - 1`` is
    eliminated under a block order with ``t`` greatest. The result carries
    its reduced degrevlex basis.
    """
    gens = [g for g in I.generators if not g.is_zero()]
    binom = _pure_binomial_exponents(gens)
    if binom is None:
        bad = next(g for g in gens if not g.is_binomial() or len(g.terms) != 2)
        raise NotBinomialError(f"saturation is only implemented for binomial ideals, got {bad}")
    pairs = saturate_binomials(binom, I.ring.nvars, budget)
    basis = [binomial(I.ring, a, b) for a, b in pairs]
    return Ideal(I.ring, basis, (tuple(basis), DEGREVLEX))
