"""Dense n-qubit pure states, qubit permutations and local operator chains.

Conventions used throughout the package:

* qubit 1 is the most significant bit of the basis index, so ``|24>`` on five
  qubits is ``|11000>``;
* a permutation ``p`` moves the qubit at position ``j`` to position ``p(j)``;
* ``compose(p, q)`` applies ``q`` first, then ``p``.
"""
from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

MAX_QUBITS = 21


class StateParseError(ValueError):
    """Raised for malformed ket strings or JSON state documents."""


def _check_n(n: int, max_qubits: int | None = None) -> None:
    cap = MAX_QUBITS if max_qubits is None else max_qubits
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ValueError(f"qubit count must be an integer >= 1, got {n!r}")
    if n > cap:
        raise ValueError(f"{n} qubits exceeds the configured maximum of {cap}")


@dataclass(frozen=True, eq=False)
class PureState:
    """Unnormalized amplitude vector ``amps`` over the ``2**n`` basis kets."""

    n: int
    amps: np.ndarray

    def __post_init__(self):
        _check_n(self.n)
        amps = np.array(self.amps, dtype=np.complex128).reshape(-1)
        if amps.shape[0] != 1 << self.n:
            raise ValueError(f"expected {1 << self.n} amplitudes for n={self.n}, got {amps.shape[0]}")
        if not np.all(np.isfinite(amps)):
            raise ValueError("amplitudes must be finite")
        amps.flags.writeable = False
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, index: int, n: int) -> "PureState":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n, amps)

    @classmethod
    def from_terms(cls, terms: dict[int, complex], n: int) -> "PureState":
        amps = np.zeros(1 << n, dtype=np.complex128)
        for k, c in terms.items():
            if not 0 <= k < 1 << n:
                raise ValueError(f"basis index {k} out of range for n={n}")
            amps[k] = c
        return cls(n, amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def support(self) -> list[int]:
        return [int(k) for k in np.flatnonzero(self.amps)]

    def __eq__(self, other):
        if not isinstance(other, PureState):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.amps, other.amps)

    def __mul__(self, c: complex) -> "PureState":
        return PureState(self.n, self.amps * c)

    __rmul__ = __mul__

    def __repr__(self):
        return f"PureState({to_ket(self)})"


def ghz(n: int) -> PureState:
    return PureState.from_terms({0: 1 / math.sqrt(2), (1 << n) - 1: 1 / math.sqrt(2)}, n)


def w_state(n: int) -> PureState:
    return PureState.from_terms({1 << k: 1 / math.sqrt(n) for k in range(n)}, n)


# ---------------------------------------------------------------------------
# Parsing and serialization
# ---------------------------------------------------------------------------

_KET = re.compile(r"\|\s*(\d+)\s*>")
_DIRECTIVE = re.compile(r"^\s*n\s*=\s*(\d+)\s*[;,:]?")


def _parse_coeff(chunk: str) -> complex:
    s = re.sub(r"\s+", "", chunk)
    sign = 1
    while s and s[0] in "+-":
        if s[0] == "-":
            sign = -sign
        s = s[1:]
    if s.endswith("*"):
        s = s[:-1]
    if s.startswith("(") and s.endswith(")"):
        s = s[1:-1]
    if s == "":
        return complex(sign)
    try:
        return sign * complex(s.replace("i", "j"))
    except ValueError:
        raise StateParseError(f"cannot parse coefficient {chunk.strip()!r}") from None


def parse_ket(text: str, n: int | None = None) -> PureState:
    """Parse ``"0.5|0> + 0.5|7> - (0.1+0.2i)|3>"``, optionally led by ``n=<int>``.

    Without a directive or explicit ``n`` the smallest qubit count holding the
    largest index is used.
    """
    m = _DIRECTIVE.match(text)
    if m:
        directive = int(m.group(1))
        if n is not None and n != directive:
            raise StateParseError(f"n={n} conflicts with directive n={directive}")
        n = directive
        text = text[m.end():]
    terms: dict[int, complex] = {}
    pos = 0
    for km in _KET.finditer(text):
        chunk = text[pos:km.start()]
        if terms and not re.match(r"\s*[+-]", chunk):
            raise StateParseError(f"missing '+' or '-' before term at {km.start()}")
        k = int(km.group(1))
        if k in terms:
            raise StateParseError(f"duplicate basis index {k}")
        terms[k] = _parse_coeff(chunk)
        pos = km.end()
    if not terms:
        raise StateParseError("no ket terms found")
    if text[pos:].strip():
        raise StateParseError(f"trailing text {text[pos:].strip()!r}")
    if n is None:
        n = max(1, max(terms).bit_length())
    if n < 1:
        raise StateParseError("qubit count must be >= 1")
    if max(terms) >= 1 << n:
        raise StateParseError(f"basis index {max(terms)} >= 2**{n}")
    return PureState.from_terms(terms, n)


def parse_json_state(doc: str | dict) -> PureState:
    if isinstance(doc, str):
        try:
            doc = json.loads(doc)
        except json.JSONDecodeError as exc:
            raise StateParseError(f"invalid JSON: {exc}") from None
    try:
        n = doc["n"]
        raw_terms = doc["terms"]
    except (KeyError, TypeError):
        raise StateParseError("JSON state needs 'n' and 'terms'") from None
    if not isinstance(n, int) or n < 1:
        raise StateParseError(f"bad qubit count {n!r}")
    terms: dict[int, complex] = {}
    last = -1
    for t in raw_terms:
        try:
            k = int(t["index"])
            c = complex(float(t.get("re", 0.0)), float(t.get("im", 0.0)))
        except (KeyError, TypeError, ValueError):
            raise StateParseError(f"bad term {t!r}") from None
        if k in terms:
            raise StateParseError(f"duplicate basis index {k}")
        if k <= last:
            raise StateParseError("term indices must be strictly increasing")
        if not 0 <= k < 1 << n:
            raise StateParseError(f"basis index {k} out of range for n={n}")
        terms[k] = c
        last = k
    return PureState.from_terms(terms, n)


def parse_state(text: str, n: int | None = None) -> PureState:
    """Parse either a JSON state document or ket text."""
    if text.lstrip().startswith("{"):
        state = parse_json_state(text)
        if n is not None and n != state.n:
            raise StateParseError(f"n={n} conflicts with document n={state.n}")
        return state
    return parse_ket(text, n)


def to_json_dict(state: PureState) -> dict:
    return {
        "n": state.n,
        "terms": [
            {"index": k, "re": float(state.amps[k].real), "im": float(state.amps[k].imag)}
            for k in state.support()
        ],
    }


def to_json(state: PureState) -> str:
    return json.dumps(to_json_dict(state))


def _fmt_coeff(c: complex) -> str:
    if c.imag == 0:
        return repr(float(c.real))
    return f"({c.real!r}{c.imag:+}i)"


def to_ket(state: PureState) -> str:
    parts = [f"n={state.n};"]
    for i, k in enumerate(state.support()):
        c = complex(state.amps[k])
        if c.imag == 0 and c.real < 0:
            parts.append(f"- {-c.real!r}|{k}>")
        else:
            parts.append(("+ " if i else "") + f"{_fmt_coeff(c)}|{k}>")
    if len(parts) == 1:
        parts.append("0|0>")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# Basic state algebra
# ---------------------------------------------------------------------------

def normalize(state: PureState) -> tuple[PureState, float]:
    norm = state.norm
    if norm == 0:
        raise ValueError("cannot normalize the zero state")
    return PureState(state.n, state.amps / norm), norm


def tensor_product(a: PureState, b: PureState, max_qubits: int | None = None) -> PureState:
    """``a`` occupies the high-order qubits of the result."""
    _check_n(a.n + b.n, max_qubits)
    return PureState(a.n + b.n, np.kron(a.amps, b.amps))


# ---------------------------------------------------------------------------
# Qubit permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QubitPermutation:
    """Bijection on positions ``1..n``; ``image[j-1]`` is where qubit ``j`` goes."""

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(x) for x in self.image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"{image} is not a permutation of 1..{len(image)}")
        object.__setattr__(self, "image", image)

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, j: int) -> int:
        return self.image[j - 1]

    @classmethod
    def identity(cls, n: int) -> "QubitPermutation":
        return cls(tuple(range(1, n + 1)))

    def is_identity(self) -> bool:
        return self.image == tuple(range(1, self.n + 1))

    def inverse(self) -> "QubitPermutation":
        inv = [0] * self.n
        for j, pj in enumerate(self.image, start=1):
            inv[pj - 1] = j
        return QubitPermutation(tuple(inv))

    def __matmul__(self, other: "QubitPermutation") -> "QubitPermutation":
        return compose_permutations(self, other)

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles of length >= 2, each starting at its smallest element."""
        seen: set[int] = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            j = self(start)
            while j != start:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1:
                out.append(tuple(cyc))
        return out

    def transpositions(self) -> list[tuple[int, int]]:
        """Transpositions ``t_1, ..., t_s`` with ``self == t_1 t_2 ... t_s``."""
        out = []
        for cyc in self.cycles():
            # (c0 c1 ... ck) = (c0 ck)(c0 c(k-1))...(c0 c1)
            out.extend((cyc[0], c) for c in reversed(cyc[1:]))
        return out

    def index_map(self) -> np.ndarray:
        """``m[k]`` is the basis index that ket ``|k>`` is sent to."""
        n = self.n
        k = np.arange(1 << n)
        out = np.zeros_like(k)
        for j in range(1, n + 1):
            bit = (k >> (n - j)) & 1
            out |= bit << (n - self(j))
        return out

    def __str__(self):
        cyc = self.cycles()
        return "".join("(" + " ".join(map(str, c)) + ")" for c in cyc) or "()"


def compose_permutations(p: QubitPermutation, q: QubitPermutation) -> QubitPermutation:
    """Permutation acting as ``q`` first, then ``p``."""
    if p.n != q.n:
        raise ValueError(f"size mismatch: {p.n} vs {q.n}")
    return QubitPermutation(tuple(p(q(j)) for j in range(1, p.n + 1)))


def transposition(i: int, j: int, n: int) -> QubitPermutation:
    if i == j:
        raise ValueError("transposition needs two distinct positions")
    return permutation_from_cycles([(i, j)], n)


def _parse_cycles(text: str) -> list[tuple[int, ...]]:
    if not re.fullmatch(r"\s*(\(\s*(\d+([\s,]+\d+)*)?\s*\)\s*)*", text):
        raise ValueError(f"malformed cycle string {text!r}")
    return [tuple(int(x) for x in re.split(r"[\s,]+", body.strip()) if x)
            for body in re.findall(r"\(([^()]*)\)", text)]


def permutation_from_cycles(cycles: str | Iterable[Sequence[int]], n: int) -> QubitPermutation:
    """Build the product of disjoint cycles, e.g. ``"(1 5)(2 3 4)"``.

    A cycle ``(c0 c1 ... ck)`` sends ``c0 -> c1 -> ... -> ck -> c0``.
    """
    if isinstance(cycles, str):
        cycles = _parse_cycles(cycles)
    image = list(range(1, n + 1))
    seen: set[int] = set()
    for cyc in cycles:
        cyc = tuple(cyc)
        for c in cyc:
            if not 1 <= c <= n:
                raise ValueError(f"cycle element {c} out of range 1..{n}")
            if c in seen:
                raise ValueError(f"element {c} repeated in cycles")
            seen.add(c)
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            image[a - 1] = b
    return QubitPermutation(tuple(image))


def permute_amps(amps: np.ndarray, perm: QubitPermutation) -> np.ndarray:
    """Qubit permutation on the last axis of an amplitude array (batched)."""
    n = perm.n
    if amps.shape[-1] != 1 << n:
        raise ValueError(f"permutation on {n} qubits applied to length {amps.shape[-1]}")
    batch = amps.shape[:-1]
    t = amps.reshape(batch + (2,) * n)
    nb = len(batch)
    inv = perm.inverse()
    axes = list(range(nb)) + [nb + inv(k) - 1 for k in range(1, n + 1)]
    return np.ascontiguousarray(t.transpose(axes)).reshape(amps.shape)


def apply_qubit_permutation(state: PureState, perm: QubitPermutation) -> PureState:
    if perm.n != state.n:
        raise ValueError(f"permutation on {perm.n} qubits applied to {state.n}-qubit state")
    return PureState(state.n, permute_amps(state.amps, perm))


# ---------------------------------------------------------------------------
# Local operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LocalOperatorChain:
    """The product operator ``ops[0] (x) ops[1] (x) ... (x) ops[n-1]``."""

    ops: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = []
        for A in self.ops:
            A = np.array(A, dtype=np.complex128)
            if A.shape != (2, 2):
                raise ValueError(f"local operators must be 2x2, got {A.shape}")
            if not np.all(np.isfinite(A)):
                raise ValueError("operator entries must be finite")
            A.flags.writeable = False
            ops.append(A)
        object.__setattr__(self, "ops", tuple(ops))

    @property
    def n(self) -> int:
        return len(self.ops)

    @classmethod
    def identity(cls, n: int) -> "LocalOperatorChain":
        return cls(tuple(np.eye(2) for _ in range(n)))

    @classmethod
    def single(cls, A, position: int, n: int) -> "LocalOperatorChain":
        ops = [np.eye(2)] * n
        ops[position - 1] = A
        return cls(tuple(ops))

    def dets(self) -> np.ndarray:
        return np.array([np.linalg.det(A) for A in self.ops])

    def det_factor(self) -> float:
        """``prod_k |det A_k|**2``."""
        return float(np.prod(np.abs(self.dets()) ** 2))

    def is_special(self, tol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(self.dets() - 1) <= tol))


def apply_local_operators(state: PureState, chain: LocalOperatorChain) -> PureState:
    """Raw ``(A_1 (x) ... (x) A_n)|psi>``; no renormalization."""
    if chain.n != state.n:
        raise ValueError(f"chain of {chain.n} operators applied to {state.n}-qubit state")
    n = state.n
    t = state.amps.reshape((2,) * n)
    for axis, A in enumerate(chain.ops):
        t = np.moveaxis(np.tensordot(A, t, axes=([1], [axis])), 0, axis)
    return PureState(n, t.reshape(-1))


# ---------------------------------------------------------------------------
# Random sampling
# ---------------------------------------------------------------------------

def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_state(n: int, seed=None) -> PureState:
    """Haar-random state: complex Gaussian amplitudes, then normalized."""
    rng = _rng(seed)
    z = rng.standard_normal(1 << n) + 1j * rng.standard_normal(1 << n)
    return PureState(n, z / np.linalg.norm(z))


def random_unitary2(seed=None) -> np.ndarray:
    """Haar unitary via QR with the phase fix of Mezzadri."""
    rng = _rng(seed)
    z = (rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_invertible2(seed=None, max_entry: float = 4.0) -> np.ndarray:
    """Complex Gaussian 2x2 matrix rescaled so that no entry exceeds ``max_entry``."""
    rng = _rng(seed)
    while True:
        A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        big = np.max(np.abs(A))
        if big > max_entry:
            A *= max_entry / big
        if abs(np.linalg.det(A)) > 1e-3:
            return A


def random_sl2(seed=None) -> np.ndarray:
    rng = _rng(seed)
    while True:
        A = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        d = np.linalg.det(A)
        # keep condition numbers moderate so SL checks stay in float headroom
        if abs(d) > 0.25:
            A = A / np.sqrt(d)
            # one Newton-style touch-up of the residual det error
            return A / np.sqrt(np.linalg.det(A))


def random_local_measurement(seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Two-outcome single-qubit POVM ``{M1, M2}`` with ``M1^+ M1 + M2^+ M2 = I``.

    ``M1 = U diag(d) V^+`` with ``d ~ U[0, 1]^2``, ``M2 = W sqrt(I - M1^+ M1)``.
    """
    rng = _rng(seed)
    U, V, W = (random_unitary2(rng) for _ in range(3))
    d = rng.uniform(0.0, 1.0, size=2)
    M1 = U @ np.diag(d) @ V.conj().T
    M2 = W @ V @ np.diag(np.sqrt(1.0 - d**2)) @ V.conj().T
    return M1, M2
