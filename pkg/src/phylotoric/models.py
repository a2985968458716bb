"""Group-based substitution models on Z/2 and (Z/2)^2.

Group elements are bit tuples and addition is xor. The nucleotide states
are identified with (Z/2)^2 via A=(0,0), G=(1,0), C=(0,1), T=(1,1), so a
transition (A<->G or C<->T) is translation by (1,0).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

Element = tuple[int, ...]

MODEL_IDS = ("CFN", "JC", "K2P", "K3P")


@dataclass(frozen=True)
class FiniteAbelianGroup:
    """``(Z/2)^k`` for ``k`` in {1, 2}."""

    k: int

    def __post_init__(self):
        if self.k not in (1, 2):
            raise ValueError("only Z/2 and (Z/2)^2 are supported")

    @property
    def order(self) -> int:
        return 2**self.k

    @cached_property
    def elements(self) -> tuple[Element, ...]:
        """Elements in the order 0, 1 (k=1) or 00, 10, 01, 11 (k=2)."""
        return tuple(tuple((i >> b) & 1 for b in range(self.k)) for i in range(self.order))

    @property
    def identity(self) -> Element:
        return (0,) * self.k

    def __contains__(self, g) -> bool:
        return isinstance(g, tuple) and len(g) == self.k and all(x in (0, 1) for x in g)

    def check(self, g) -> Element:
        g = tuple(g)
        if g not in self:
            raise ValueError(f"{g!r} is not an element of (Z/2)^{self.k}")
        return g

    def add(self, g: Element, h: Element) -> Element:
        return tuple(a ^ b for a, b in zip(g, h))

    def sum(self, gs: Sequence[Element]) -> Element:
        out = self.identity
        for g in gs:
            out = self.add(out, g)
        return out

    def index(self, g: Element) -> int:
        return sum(x << b for b, x in enumerate(g))

    def label(self, g: Element) -> str:
        return "".join(str(x) for x in g)

    @property
    def name(self) -> str:
        return "Z/2" if self.k == 1 else "Z/2 x Z/2"

    def automorphisms(self) -> list[dict[Element, Element]]:
        """All group automorphisms (invertible linear maps over F_2)."""
        out = []
        for images in itertools.permutations([g for g in self.elements if g != self.identity], self.k):
            m = {}
            for g in self.elements:
                img = self.identity
                for b, bit in enumerate(g):
                    if bit:
                        img = self.add(img, images[b])
                m[g] = img
            if len(set(m.values())) == self.order:
                out.append(m)
        return out


def character_value(G: FiniteAbelianGroup, h, g) -> int:
    """``chi_h(g) = (-1)^<h, g>``."""
    h, g = G.check(h), G.check(g)
    return -1 if sum(a & b for a, b in zip(h, g)) % 2 else 1


def character_table(G: FiniteAbelianGroup) -> list[list[int]]:
    return [[character_value(G, h, g) for g in G.elements] for h in G.elements]


@dataclass(frozen=True)
class GroupBasedModel:
    model_id: str
    group: FiniteAbelianGroup
    states: tuple[str, ...]  # states[i] corresponds to group.elements[i]
    classes: tuple[tuple[Element, ...], ...]  # class 0 is {identity}
    prob_symbol: str = "m"
    fourier_symbol: str = "f"

    def __post_init__(self):
        flat = [g for c in self.classes for g in c]
        if sorted(flat) != sorted(self.group.elements) or len(flat) != self.group.order:
            raise ValueError("classes must partition the group")
        if self.classes[0] != (self.group.identity,):
            raise ValueError("the identity must form the first, singleton class")

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def state_map(self) -> dict[str, Element]:
        return dict(zip(self.states, self.group.elements))

    def class_of(self, g) -> int:
        g = self.group.check(g)
        for i, c in enumerate(self.classes):
            if g in c:
                return i
        raise AssertionError("unreachable")

    def class_size(self, c: int) -> int:
        return len(self.classes[c])

    def param(self, edge_id: int, c: int, fourier: bool = False) -> str:
        """Variable name of the class-``c`` parameter on an edge, e.g. ``m3_1``."""
        sym = self.fourier_symbol if fourier else self.prob_symbol
        return f"{sym}{edge_id}_{c}"

    def transition_matrix_symbolic(self, edge_id: int) -> list[list[str]]:
        """Entry ``(g, h)`` is the parameter of the class of ``h - g``."""
        if edge_id < 1:
            raise ValueError("edge ids start at 1")
        G = self.group
        return [[self.param(edge_id, self.class_of(G.add(g, h))) for h in G.elements] for g in G.elements]

    def class_automorphisms(self, fourier: bool = False) -> list[dict[Element, Element]]:
        """Group automorphisms permuting the classes (each class onto some class)."""
        classes = self.fourier_classes if fourier else self.classes
        blocks = {frozenset(c) for c in classes}
        out = []
        for m in self.group.automorphisms():
            if all(frozenset(m[g] for g in c) in blocks for c in classes):
                out.append(m)
        return out

    @cached_property
    def fourier_classes(self) -> tuple[tuple[Element, ...], ...]:
        """Characters grouped by the transformed edge parameter they produce.

        ``h`` and ``h'`` share a class iff ``sum_g chi_h(g) m_class(g)`` equals
        ``sum_g chi_h'(g) m_class(g)`` as linear forms. Classes are listed by
        their smallest element, so the trivial character comes first.
        """
        G = self.group
        groups: dict[tuple[int, ...], list[Element]] = {}
        for h in G.elements:
            form = [0] * self.n_classes
            for g in G.elements:
                form[self.class_of(g)] += character_value(G, h, g)
            groups.setdefault(tuple(form), []).append(h)
        out = sorted((tuple(v) for v in groups.values()), key=lambda c: min(G.index(h) for h in c))
        if len(out) != self.n_classes:
            raise ValueError(f"{self.model_id}: the class partition is not Fourier-stable")
        return tuple(out)

    def fourier_class_of(self, h) -> int:
        """Index of the Fourier-side class containing the character ``h``."""
        h = self.group.check(h)
        for i, c in enumerate(self.fourier_classes):
            if h in c:
                return i
        raise AssertionError("unreachable")

    @property
    def is_self_dual(self) -> bool:
        """True when the Fourier-side classes coincide with the parameter classes."""
        return self.fourier_classes == self.classes

    def transformed_parameter(self, c: int) -> list[int]:
        """Coefficients of ``f_c`` in the edge parameters: ``sum_g chi_h(g) m_class(g)``, ``h`` in class ``c``."""
        G = self.group
        forms = set()
        for h in self.fourier_classes[c]:
            form = [0] * self.n_classes
            for g in G.elements:
                form[self.class_of(g)] += character_value(G, h, g)
            forms.add(tuple(form))
        if len(forms) != 1:
            raise ValueError(f"{self.model_id}: transformed parameter depends on the representative")
        return list(forms.pop())


def _model(model_id: str) -> GroupBasedModel:
    if model_id == "CFN":
        G = FiniteAbelianGroup(1)
        return GroupBasedModel("CFN", G, ("0", "1"), (((0,),), ((1,),)))
    G = FiniteAbelianGroup(2)
    e, tr, tv1, tv2 = (0, 0), (1, 0), (0, 1), (1, 1)
    states = ("A", "G", "C", "T")
    if model_id == "JC":
        return GroupBasedModel("JC", G, states, ((e,), (tr, tv1, tv2)))
    if model_id == "K2P":
        return GroupBasedModel("K2P", G, states, ((e,), (tr,), (tv1, tv2)))
    if model_id == "K3P":
        return GroupBasedModel("K3P", G, states, ((e,), (tr,), (tv1,), (tv2,)))
    raise ValueError(f"unknown model id {model_id!r}; expected one of {', '.join(MODEL_IDS)}")


def builtin_models() -> list[GroupBasedModel]:
    return [_model(m) for m in MODEL_IDS]


def get_model(model_id: str) -> GroupBasedModel:
    return _model(model_id)
