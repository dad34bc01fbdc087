"""Exact polynomials in the amplitude symbols ``a_0 ... a_{2^n - 1}``.

A polynomial is a canonical, sorted tuple of ``Monomial`` records with
nonzero integer coefficients. Two polynomials are equal exactly when their
canonical tuples are identical, which is what the identity checks rely on.
"""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

import numpy as np

from .state import QubitPermutation, transposition

MAX_SYMBOLIC_QUBITS = 9


@dataclass(frozen=True, order=True)
class Monomial:
    factors: tuple[int, ...]
    coeff: int

    def evaluate(self, amps) -> complex:
        out = complex(self.coeff)
        for k in self.factors:
            out *= amps[k]
        return out


def _canonical(terms: Mapping[tuple[int, ...], int]) -> tuple[Monomial, ...]:
    return tuple(Monomial(f, c) for f, c in sorted(terms.items()) if c != 0)


class Polynomial:
    """Sparse integer polynomial over amplitude symbols of an ``n``-qubit state."""

    __slots__ = ("n", "monomials")

    def __init__(self, n: int, terms: Mapping[tuple[int, ...], int] | Iterable[Monomial] = ()):
        self.n = n
        if isinstance(terms, Mapping):
            collected = defaultdict(int)
            for f, c in terms.items():
                collected[tuple(sorted(f))] += int(c)
        else:
            collected = defaultdict(int)
            for m in terms:
                collected[tuple(sorted(m.factors))] += int(m.coeff)
        self.monomials = _canonical(collected)

    @classmethod
    def symbol(cls, k: int, n: int) -> "Polynomial":
        if not 0 <= k < 1 << n:
            raise ValueError(f"symbol a_{k} out of range for n={n}")
        return cls(n, {(k,): 1})

    @classmethod
    def constant(cls, c: int, n: int) -> "Polynomial":
        return cls(n, {(): c})

    def as_dict(self) -> dict[tuple[int, ...], int]:
        return {m.factors: m.coeff for m in self.monomials}

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            if other.n != self.n:
                raise ValueError(f"qubit count mismatch: {self.n} vs {other.n}")
            return other
        if isinstance(other, (int, np.integer)):
            return Polynomial.constant(int(other), self.n)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms = defaultdict(int, self.as_dict())
        for m in other.monomials:
            terms[m.factors] += m.coeff
        return Polynomial(self.n, terms)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.n, {m.factors: -m.coeff for m in self.monomials})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        terms: dict[tuple[int, ...], int] = defaultdict(int)
        for p in self.monomials:
            for q in other.monomials:
                terms[tuple(sorted(p.factors + q.factors))] += p.coeff * q.coeff
        return Polynomial(self.n, terms)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Polynomial.constant(1, self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return poly_equal(self, other)

    def __hash__(self):
        return hash((self.n, self.monomials))

    def __len__(self):
        return len(self.monomials)

    def __repr__(self):
        return f"Polynomial(n={self.n}, {len(self)} monomials)"

    def degree(self) -> int:
        return max((len(m.factors) for m in self.monomials), default=0)

    def evaluate(self, amps) -> complex:
        return sum((m.evaluate(amps) for m in self.monomials), 0j)

    def canonical(self) -> "Polynomial":
        return Polynomial(self.n, self.monomials)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "monomials": [{"coeff": m.coeff, "factors": list(m.factors)} for m in self.monomials],
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_json_dict(), **kw)

    @classmethod
    def from_json(cls, doc: str | dict) -> "Polynomial":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(doc["n"], [Monomial(tuple(m["factors"]), int(m["coeff"])) for m in doc["monomials"]])

    def pretty(self) -> str:
        parts = []
        for m in self.monomials:
            mono = "*".join(f"a{k}" for k in m.factors) or "1"
            c = m.coeff
            sign = "-" if c < 0 else "+"
            mag = "" if abs(c) == 1 and m.factors else f"{abs(c)}*"
            parts.append(f"{sign} {mag}{mono}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else s or "0"


def poly_equal(p: Polynomial, q: Polynomial) -> bool:
    if p.n != q.n:
        raise ValueError(f"qubit count mismatch: {p.n} vs {q.n}")
    return p.monomials == q.monomials


def symbols(n: int) -> list[Polynomial]:
    return [Polynomial.symbol(k, n) for k in range(1 << n)]


def bilinear_poly(u_idx: list[int], v_idx: list[int], n: int) -> Polynomial:
    """Signed anti-diagonal pairing on symbol index blocks ``u_idx``, ``v_idx``."""
    size = len(u_idx)
    terms: dict[tuple[int, ...], int] = defaultdict(int)
    for i in range(size):
        sign = -1 if bin(i).count("1") % 2 else 1
        terms[tuple(sorted((u_idx[i], v_idx[size - 1 - i])))] += sign
    return Polynomial(n, terms)


def expand_tau_core(n: int) -> Polynomial:
    """``B(u,v)**2 - B(u,u) B(v,v)`` as an exact polynomial (the tangle is 4|.|)."""
    if n % 2 == 0:
        raise ValueError(f"odd-n tangle needs odd n, got {n}")
    if not 3 <= n <= MAX_SYMBOLIC_QUBITS:
        raise OverflowError(f"symbolic expansion supports 3 <= n <= {MAX_SYMBOLIC_QUBITS}, got {n}")
    half = 1 << (n - 1)
    u = list(range(half))
    v = list(range(half, 2 * half))
    buv = bilinear_poly(u, v, n)
    return buv * buv - bilinear_poly(u, u, n) * bilinear_poly(v, v, n)


def permute_polynomial(p: Polynomial, perm: QubitPermutation) -> Polynomial:
    """Substitute symbols so the result evaluated on ``psi`` equals ``p`` on ``perm psi``.

    The permuted state has amplitude ``a_k`` at index ``perm(k)``, so symbol
    ``a_j`` is replaced by ``a_{perm^-1(j)}``. For transpositions this is the
    plain image of each index.
    """
    if perm.n != p.n:
        raise ValueError(f"permutation on {perm.n} qubits applied to n={p.n} polynomial")
    back = perm.inverse().index_map()
    return Polynomial(p.n, [Monomial(tuple(int(back[k]) for k in m.factors), m.coeff)
                            for m in p.monomials])


def expand_tau_i_core(n: int, i: int) -> Polynomial:
    core = expand_tau_core(n)
    return core if i == 1 else permute_polynomial(core, transposition(1, i, n))


def contains_pair(p: Polynomial, i: int, j: int) -> bool:
    """Whether some monomial holds both ``a_i`` and ``a_j`` (``a_i**2`` when ``i == j``)."""
    size = 1 << p.n
    if not (0 <= i < size and 0 <= j < size):
        raise ValueError(f"indices must be below 2**{p.n}")
    for m in p.monomials:
        if i == j:
            if m.factors.count(i) >= 2:
                return True
        elif i in m.factors and j in m.factors:
            return True
    return False


def from_callable(f: Callable[[list[Polynomial]], Polynomial], n: int) -> Polynomial:
    """Expand an expression written over a list of symbol polynomials."""
    return f(symbols(n))


def three_qubit_forms() -> tuple[Polynomial, Polynomial, Polynomial]:
    from .invariants import THREE_QUBIT_FORMS

    return tuple(from_callable(f, 3) for f in THREE_QUBIT_FORMS)


def bilinear_pairs(n: int) -> set[tuple[int, int]]:
    """Quadratic products ``a_i a_j`` occurring in the unexpanded pairings ``B(u,v)``, ``B(u,u)``, ``B(v,v)``.

    Useful for auditing printed expressions written as products of such
    pairs: ``a_13 a_18`` is one, ``a_13 a_28`` is not.
    """
    half = 1 << (n - 1)
    pairs = set()
    for i in range(half):
        pairs.add((i, 2 * half - 1 - i))
        pairs.add(tuple(sorted((i, half - 1 - i))))
        pairs.add(tuple(sorted((half + i, 2 * half - 1 - i))))
    return pairs
