"""Residual entanglement for odd qubit counts and its permutation-averaged form.

The tangle is built from the signed anti-diagonal pairing

    B_m(u, v) = sum_i (-1)**popcount(i) * u[i] * v[2**m - 1 - i]

applied to the two halves of the amplitude vector split on qubit 1
(``u`` = qubit 1 in ``|0>``, ``v`` = qubit 1 in ``|1>``):

    tau(psi) = 4 |B(u, v)**2 - B(u, u) * B(v, v)|

At n = 3 this is exactly the Cayley hyperdeterminant form of the 3-tangle.
All array-level helpers accept a leading batch axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .state import PureState, permute_amps, transposition


class OddQubitError(ValueError):
    """The invariant is only defined for an odd number of qubits >= 3."""


@dataclass(frozen=True)
class InvariantValue:
    """Value on the raw amplitudes plus the value after normalizing them.

    Degree-4 homogeneity ties them together: ``raw == normalized * norm**4``.
    For the zero state both values are 0.
    """

    raw: float
    normalized: float
    norm: float

    def as_dict(self) -> dict:
        return {"raw": self.raw, "normalized": self.normalized, "norm": self.norm}


@lru_cache(maxsize=None)
def popcount_signs(m: int) -> np.ndarray:
    i = np.arange(1 << m)
    pc = np.zeros_like(i)
    for b in range(m):
        pc += (i >> b) & 1
    signs = np.where(pc % 2 == 0, 1.0, -1.0)
    signs.flags.writeable = False
    return signs


def sigma_y_bilinear(u, v, m: int | None = None):
    """Signed anti-diagonal pairing of two length ``2**m`` vectors (batched)."""
    u = np.asarray(u)
    v = np.asarray(v)
    if u.shape[-1] != v.shape[-1]:
        raise ValueError(f"length mismatch: {u.shape[-1]} vs {v.shape[-1]}")
    size = u.shape[-1]
    if m is None:
        m = size.bit_length() - 1
    if size != 1 << m:
        raise ValueError(f"vectors of length {size} do not match m={m}")
    return np.sum(popcount_signs(m) * u * v[..., ::-1], axis=-1)


def _check_odd(n: int) -> None:
    if n < 3 or n % 2 == 0:
        raise OddQubitError(f"odd-n tangle needs an odd qubit count >= 3, got n={n}")


def tau_core(amps: np.ndarray):
    """Inner expression ``B(u,v)**2 - B(u,u) B(v,v)`` (complex, batched)."""
    half = amps.shape[-1] // 2
    u, v = amps[..., :half], amps[..., half:]
    return sigma_y_bilinear(u, v) ** 2 - sigma_y_bilinear(u, u) * sigma_y_bilinear(v, v)


def tau_amps(amps: np.ndarray) -> np.ndarray:
    """Raw tau on a (batch of) amplitude vectors."""
    return 4.0 * np.abs(tau_core(amps))


def tau_i_amps(amps: np.ndarray, n: int, i: int) -> np.ndarray:
    if i == 1:
        return tau_amps(amps)
    return tau_amps(permute_amps(amps, transposition(1, i, n)))


def all_tau_i_amps(amps: np.ndarray, n: int) -> np.ndarray:
    """Stack ``tau^(1) ... tau^(n)`` along a new last axis."""
    return np.stack([tau_i_amps(amps, n, i) for i in range(1, n + 1)], axis=-1)


def big_r_amps(amps: np.ndarray, n: int) -> np.ndarray:
    return all_tau_i_amps(amps, n).mean(axis=-1)


def _value(raw: float, norm: float) -> InvariantValue:
    normalized = raw / norm**4 if norm > 0 else 0.0
    return InvariantValue(float(raw), float(normalized), float(norm))


def tau(state: PureState) -> InvariantValue:
    _check_odd(state.n)
    return _value(tau_amps(state.amps), state.norm)


def tau_i(state: PureState, i: int) -> InvariantValue:
    """Tangle after exchanging qubits 1 and ``i``; ``tau_i(psi, 1) == tau(psi)``."""
    _check_odd(state.n)
    if not 1 <= i <= state.n:
        raise IndexError(f"qubit position {i} out of range 1..{state.n}")
    return _value(tau_i_amps(state.amps, state.n, i), state.norm)


def all_tau_i(state: PureState) -> list[InvariantValue]:
    _check_odd(state.n)
    norm = state.norm
    return [_value(r, norm) for r in all_tau_i_amps(state.amps, state.n)]


def big_r(state: PureState) -> InvariantValue:
    """Average of ``tau_i`` over all qubit positions; symmetric in every qubit."""
    _check_odd(state.n)
    return _value(big_r_amps(state.amps, state.n), state.norm)


def even_pairing(state: PureState) -> float:
    """``|B_n(a, a)|`` for an even number of qubits.

    Squared, this is the factor the tangle picks up when an even-qubit block
    is tensored onto the qubit-1 block. For two qubits it is the concurrence.
    """
    if state.n % 2:
        raise ValueError("pairing is antisymmetric (identically zero) for odd n")
    return float(abs(sigma_y_bilinear(state.amps, state.amps)))


# literal transcriptions of the three printed 3-qubit forms

def _form1(a):
    return ((a[0] * a[7] - a[1] * a[6]) - (a[2] * a[5] - a[3] * a[4])) ** 2 \
        - 4 * (a[0] * a[3] - a[1] * a[2]) * (a[4] * a[7] - a[5] * a[6])


def _form2(a):
    return ((a[0] * a[7] - a[3] * a[4]) + (a[1] * a[6] - a[2] * a[5])) ** 2 \
        - 4 * (a[3] * a[5] - a[1] * a[7]) * (a[2] * a[4] - a[0] * a[6])


def _form3(a):
    return (a[0] * a[7] - a[3] * a[4] - (a[1] * a[6] - a[2] * a[5])) ** 2 \
        - 4 * (a[1] * a[4] - a[0] * a[5]) * (a[3] * a[6] - a[2] * a[7])


THREE_QUBIT_FORMS = (_form1, _form2, _form3)


def tau3_forms(state: PureState) -> tuple[float, float, float]:
    """``4|f|`` for each printed 3-qubit form ``f``, on the raw amplitudes.

    The second form is tau after exchanging qubits 1 and 3, the third after
    exchanging qubits 1 and 2.
    """
    if state.n != 3:
        raise ValueError(f"three-qubit forms need n=3, got n={state.n}")
    a = state.amps
    return tuple(float(4 * abs(f(a))) for f in THREE_QUBIT_FORMS)
