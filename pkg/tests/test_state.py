import math
from functools import reduce

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import bits, qubit_permutations, seeds
from oddtangle import state as S
from oddtangle.state import (
    LocalOperatorChain,
    PureState,
    QubitPermutation,
    StateParseError,
    apply_local_operators,
    apply_qubit_permutation,
    compose_permutations,
    ghz,
    normalize,
    parse_json_state,
    parse_ket,
    parse_state,
    permutation_from_cycles,
    random_invertible2,
    random_local_measurement,
    random_sl2,
    random_state,
    random_unitary2,
    tensor_product,
    to_json,
    to_ket,
    transposition,
)


def brute_permute(state: PureState, perm: QubitPermutation) -> PureState:
    """Move the bit of qubit j to position perm(j), one basis string at a time."""
    n = state.n
    out = np.zeros_like(state.amps)
    for k in range(1 << n):
        old = bits(k, n)
        new = ["?"] * n
        for j in range(1, n + 1):
            new[perm(j) - 1] = old[j - 1]
        out[int("".join(new), 2)] = state.amps[k]
    return PureState(n, out)


# --- parsing ---------------------------------------------------------------

def test_parse_example_ket():
    psi = parse_state("0.5|0> + 0.5|7> + 0.5|24> + 0.5|31>", n=5)
    assert psi.n == 5
    assert psi.support() == [0, 7, 24, 31]
    assert np.all(psi.amps[[0, 7, 24, 31]] == 0.5)
    assert np.count_nonzero(psi.amps) == 4


def test_parse_single_ket():
    psi = parse_state("1|0>", n=1)
    assert np.array_equal(psi.amps, [1, 0])


def test_parse_json_example():
    psi = parse_state('{"n":3,"terms":[{"index":7,"re":1.0,"im":0.0}]}')
    expected = np.zeros(8)
    expected[7] = 1
    assert np.array_equal(psi.amps, expected)


@pytest.mark.parametrize("text, terms, n", [
    ("n=3; |0> - |7>", {0: 1, 7: -1}, 3),
    ("(0.5+0.5i)|1> + -0.25|2>", {1: 0.5 + 0.5j, 2: -0.25}, 2),
    ("0.5-0.5i|3>", {3: 0.5 - 0.5j}, 2),
    ("2i|1> - i|0>", {1: 2j, 0: -1j}, 1),
    ("1e-3|4>", {4: 1e-3}, 3),
])
def test_parse_ket_coefficients(text, terms, n):
    psi = parse_ket(text)
    assert psi.n == n
    assert psi == PureState.from_terms(terms, n)


@pytest.mark.parametrize("text, n", [
    ("0.5|0> 0.5|1>", None),
    ("0.5|8>", 3),
    ("0.5|1> + 0.5|1>", None),
    ("abc|1>", None),
    ("0.5|1> + junk", None),
    ("", None),
    ("n=0; 1|0>", None),
    ('{"n":0,"terms":[]}', None),
    ('{"n":2,"terms":[{"index":3,"re":1},{"index":1,"re":1}]}', None),
    ('{"n":2,"terms":[{"index":4,"re":1}]}', None),
    ('{"n":2,"terms":[{"index":1,"re":1},{"index":1,"re":1}]}', None),
    ('{"n":2}', None),
])
def test_parse_errors(text, n):
    with pytest.raises(ValueError):
        parse_state(text, n)


def test_parse_error_type():
    with pytest.raises(StateParseError):
        parse_ket("0.5|8>", 3)


@given(n=st.integers(1, 6), seed=seeds)
def test_json_round_trip_exact(n, seed):
    psi = random_state(n, seed)
    assert parse_json_state(to_json(psi)) == psi


@given(n=st.integers(1, 5), seed=seeds)
def test_ket_round_trip_exact(n, seed):
    psi = random_state(n, seed)
    assert parse_ket(to_ket(psi)) == psi


def test_pure_state_validation():
    with pytest.raises(ValueError):
        PureState(2, np.zeros(3))
    with pytest.raises(ValueError):
        PureState(1, [np.nan, 0])
    with pytest.raises(ValueError):
        PureState(0, [1])
    psi = PureState(1, [1, 0])
    with pytest.raises(ValueError):
        psi.amps[0] = 2


# --- normalize -------------------------------------------------------------

def test_normalize_scaling():
    psi, norm = normalize(PureState(3, [2, 0, 0, 0, 0, 0, 0, 0]))
    assert norm == 2
    assert psi == PureState.basis(0, 3)


def test_normalize_idempotent_on_ghz():
    psi, norm = normalize(ghz(3))
    assert abs(norm - 1) < 1e-15
    assert np.allclose(psi.amps, ghz(3).amps, atol=1e-15)


def test_normalize_hand_value():
    psi, norm = normalize(PureState(3, [1, 1, 0, 0, 0, 0, 0, 0]))
    assert norm == pytest.approx(math.sqrt(2), abs=1e-15)
    assert np.allclose(psi.amps[:2], 1 / math.sqrt(2), atol=1e-15)
    assert abs(psi.norm - 1) <= 1e-14


def test_normalize_zero_state():
    with pytest.raises(ValueError):
        normalize(PureState(2, np.zeros(4)))


@given(n=st.integers(1, 7), seed=seeds, scale=st.floats(1e-3, 1e3))
def test_normalize_unit_norm(n, seed, scale):
    psi, _ = normalize(random_state(n, seed) * scale)
    assert abs(psi.norm - 1) <= 1e-14


# --- tensor product ----------------------------------------------------------

def test_tensor_product_bell_ghz3(bell):
    prod = tensor_product(bell, ghz(3))
    assert prod.n == 5
    assert prod.support() == [0, 7, 24, 31]
    assert np.allclose(prod.amps[[0, 7, 24, 31]], 0.5, atol=1e-15)


def test_tensor_product_bit_convention():
    prod = tensor_product(PureState.basis(3, 2), PureState.basis(0, 3))
    assert prod.support() == [24]


def test_tensor_product_small():
    assert tensor_product(PureState.basis(0, 1), PureState.basis(0, 1)) == PureState.basis(0, 2)
    assert tensor_product(PureState.basis(1, 1), PureState.basis(2, 2)).support() == [1 * 4 + 2]


def test_tensor_product_cap():
    with pytest.raises(ValueError):
        tensor_product(PureState.basis(0, 2), PureState.basis(0, 2), max_qubits=3)


@given(na=st.integers(1, 3), nb=st.integers(1, 3), seed=seeds)
def test_tensor_support_law(na, nb, seed):
    rng = np.random.default_rng(seed)
    a = PureState(na, rng.standard_normal(1 << na) * (rng.random(1 << na) < 0.5))
    b = PureState(nb, rng.standard_normal(1 << nb) * (rng.random(1 << nb) < 0.5))
    prod = tensor_product(a, b)
    expected = sorted(j * (1 << nb) + k for j in a.support() for k in b.support())
    assert prod.support() == expected
    for j in range(1 << na):
        for k in range(1 << nb):
            assert prod.amps[j * (1 << nb) + k] == a.amps[j] * b.amps[k]


# --- permutations -------------------------------------------------------------

def test_swap_1_5_maps_example(example_psi, example_psi_swapped):
    assert apply_qubit_permutation(example_psi, transposition(1, 5, 5)) == example_psi_swapped


def test_identity_permutation(rng):
    psi = random_state(5, rng)
    assert apply_qubit_permutation(psi, QubitPermutation.identity(5)) == psi


def test_swap_1_3_on_basis():
    assert bits(7, 5) == "00111" and bits(19, 5) == "10011"
    out = apply_qubit_permutation(PureState.basis(7, 5), transposition(1, 3, 5))
    assert out.support() == [19]


def test_cycle_string_on_basis():
    out = apply_qubit_permutation(PureState.basis(24, 5), permutation_from_cycles("(1 5)", 5))
    assert out.support() == [9]


def test_transposition_involution():
    t = transposition(1, 2, 3)
    assert compose_permutations(t, t).is_identity()


def test_three_cycle_is_product_of_transpositions():
    cyc = permutation_from_cycles("(1 2 3)", 3)
    prod = compose_permutations(transposition(1, 2, 3), transposition(2, 3, 3))
    assert cyc == prod
    for k in range(8):
        basis = PureState.basis(k, 3)
        assert apply_qubit_permutation(basis, cyc) == \
            apply_qubit_permutation(apply_qubit_permutation(basis, transposition(2, 3, 3)),
                                    transposition(1, 2, 3))


@pytest.mark.parametrize("cycle", [(3,), (3, 4), (4, 5, 3), (5, 3, 4)])
def test_conjugation_identity_from_proof(cycle):
    # (1, i1, ..., il) = (1,2)(2, i1, ..., il)(1,2)
    n = 5
    lhs = permutation_from_cycles([(1,) + cycle], n)
    t12 = transposition(1, 2, n)
    rhs = t12 @ permutation_from_cycles([(2,) + cycle], n) @ t12
    assert lhs == rhs


@pytest.mark.parametrize("bad", ["(1 6)", "(1 1)", "(1 2)(2 3)", "(1 x)", "1 2", "(1 2"])
def test_cycle_errors(bad):
    with pytest.raises(ValueError):
        permutation_from_cycles(bad, 5)


def test_transposition_needs_distinct():
    with pytest.raises(ValueError):
        transposition(2, 2, 3)


def test_permutation_validation():
    with pytest.raises(ValueError):
        QubitPermutation((1, 1, 2))
    with pytest.raises(ValueError):
        apply_qubit_permutation(PureState.basis(0, 3), QubitPermutation.identity(4))
    with pytest.raises(ValueError):
        compose_permutations(QubitPermutation.identity(3), QubitPermutation.identity(4))


@given(data=st.data(), n=st.sampled_from([3, 5]), seed=seeds)
def test_permutation_matches_bit_oracle(data, n, seed):
    perm = data.draw(qubit_permutations(n))
    psi = random_state(n, seed)
    assert apply_qubit_permutation(psi, perm) == brute_permute(psi, perm)


@given(data=st.data(), n=st.sampled_from([3, 5]), seed=seeds)
def test_permutation_round_trip_and_norm(data, n, seed):
    perm = data.draw(qubit_permutations(n))
    psi = random_state(n, seed)
    moved = apply_qubit_permutation(psi, perm)
    assert apply_qubit_permutation(moved, perm.inverse()) == psi
    assert compose_permutations(perm, perm.inverse()).is_identity()
    assert np.array_equal(np.sort(np.abs(moved.amps)), np.sort(np.abs(psi.amps)))


@given(data=st.data(), n=st.sampled_from([3, 5]), seed=seeds)
def test_composition_convention(data, n, seed):
    p = data.draw(qubit_permutations(n))
    q = data.draw(qubit_permutations(n))
    psi = random_state(n, seed)
    assert apply_qubit_permutation(psi, compose_permutations(p, q)) == \
        apply_qubit_permutation(apply_qubit_permutation(psi, q), p)


@given(data=st.data(), n=st.integers(2, 7))
def test_transposition_decomposition(data, n):
    perm = data.draw(qubit_permutations(n))
    ts = [transposition(i, j, n) for i, j in perm.transpositions()]
    assert reduce(compose_permutations, ts, QubitPermutation.identity(n)) == perm
    assert permutation_from_cycles(perm.cycles(), n) == perm
    assert permutation_from_cycles(str(perm), n) == perm


# --- local operators -------------------------------------------------------------

def test_identity_chain(ghz3):
    assert apply_local_operators(ghz3, LocalOperatorChain.identity(3)) == ghz3


def test_scaled_first_qubit(ghz3):
    chain = LocalOperatorChain.single(np.diag([2, 2]), 1, 3)
    out = apply_local_operators(ghz3, chain)
    assert out.support() == [0, 7]
    assert np.allclose(out.amps[[0, 7]], 2 / math.sqrt(2), atol=1e-15)


@pytest.mark.parametrize("n", [1, 3, 5])
def test_bit_flip_first_qubit(n):
    chain = LocalOperatorChain.single([[0, 1], [1, 0]], 1, n)
    assert apply_local_operators(PureState.basis(0, n), chain).support() == [1 << (n - 1)]


@given(n=st.integers(1, 5), seed=seeds)
def test_local_operators_match_kron(n, seed):
    rng = np.random.default_rng(seed)
    chain = LocalOperatorChain(tuple(random_invertible2(rng) for _ in range(n)))
    psi = random_state(n, rng)
    full = reduce(np.kron, chain.ops)
    assert np.allclose(apply_local_operators(psi, chain).amps, full @ psi.amps, atol=1e-12)


def test_chain_validation():
    with pytest.raises(ValueError):
        LocalOperatorChain((np.eye(3),))
    with pytest.raises(ValueError):
        apply_local_operators(PureState.basis(0, 2), LocalOperatorChain.identity(3))
    assert LocalOperatorChain.identity(3).is_special()
    assert not LocalOperatorChain.single(np.diag([2, 2]), 1, 3).is_special()
    assert LocalOperatorChain.single(np.diag([2, 2]), 1, 3).det_factor() == 16


# --- random sampling ------------------------------------------------------------

@given(seed=seeds)
def test_random_sl2_det(seed):
    assert abs(np.linalg.det(random_sl2(seed)) - 1) <= 1e-12


@given(seed=seeds)
def test_random_unitary(seed):
    U = random_unitary2(seed)
    assert np.allclose(U.conj().T @ U, np.eye(2), atol=1e-12)


@given(seed=seeds)
def test_random_invertible_clamped(seed):
    A = random_invertible2(seed)
    assert np.max(np.abs(A)) <= 4 + 1e-12
    assert abs(np.linalg.det(A)) > 1e-3


@given(seed=seeds)
def test_random_measurement_completeness(seed):
    M1, M2 = random_local_measurement(seed)
    residual = M1.conj().T @ M1 + M2.conj().T @ M2 - np.eye(2)
    assert np.linalg.norm(residual) <= 1e-12


def test_random_state_deterministic():
    assert random_state(3, 1234) == random_state(3, 1234)
    assert random_state(3, 1234) != random_state(3, 1235)
    assert abs(random_state(5, 7).norm - 1) < 1e-14


def test_max_qubits_configurable(monkeypatch):
    monkeypatch.setattr(S, "MAX_QUBITS", 4)
    with pytest.raises(ValueError):
        PureState.basis(0, 5)
