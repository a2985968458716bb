"""Monomial orders on exponent tuples.

Each order exposes ``key(exponents)``: larger key means larger monomial.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class MonomialOrder:
    kind: str  # "lex" | "degrevlex" | "block"
    split: int = 0

    def __post_init__(self):
        if self.kind not in ("lex", "degrevlex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.split < 1:
            raise ValueError("block order needs split index >= 1")

    def key(self, e: tuple[int, ...]):
        if self.kind == "lex":
            return e
        if self.kind == "degrevlex":
            return _degrevlex_key(e)
        head, tail = e[: self.split], e[self.split :]
        return _degrevlex_key(head) + _degrevlex_key(tail)

    @property
    def is_degree_compatible(self) -> bool:
        return self.kind == "degrevlex"

    def __str__(self) -> str:
        if self.kind == "block":
            return f"block({self.split})"
        return self.kind


def _degrevlex_key(e: tuple[int, ...]):
    return (sum(e),) + tuple(-x for x in reversed(e))


LEX = MonomialOrder("lex")
DEGREVLEX = MonomialOrder("degrevlex")


def elimination(split: int) -> MonomialOrder:
    """Block order: first ``split`` variables eliminated, degrevlex in each block."""
    return MonomialOrder("block", split)


def parse_order(text: str) -> MonomialOrder:
    text = text.strip()
    if text.startswith("block(") and text.endswith(")"):
        return elimination(int(text[6:-1]))
    return MonomialOrder(text)
