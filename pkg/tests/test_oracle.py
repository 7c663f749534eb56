"""Tests for the statevector oracle itself (checked against explicit
embedded-matrix products, so later modules can trust it)."""

import numpy as np
import pytest

from mirrorbreak.circuit import Circuit, Gate
from mirrorbreak.oracle import (
    bits_to_index,
    index_to_bits,
    peak_of,
    permutation_unitary,
    permute_index,
    permute_statevector,
    simulate,
    tvd,
    unitary,
)

from .oracles import circuit_unitary_naive, random_circuit


class TestSimulate:
    def test_empty_circuit_is_basis_zero(self):
        v = simulate(Circuit(3, ()))
        expected = np.zeros(8)
        expected[0] = 1
        np.testing.assert_array_equal(v, expected)

    def test_h_on_single_qubit(self):
        v = simulate(Circuit(1, (Gate("h", (0,)),)))
        np.testing.assert_allclose(v, np.array([1, 1]) / np.sqrt(2), atol=1e-15)

    def test_ghz_state(self):
        c = Circuit(3, (Gate("h", (0,)), Gate("cx", (0, 1)), Gate("cx", (1, 2))))
        v = simulate(c)
        expected = np.zeros(8, dtype=complex)
        expected[0] = expected[7] = 1 / np.sqrt(2)
        np.testing.assert_allclose(v, expected, atol=1e-15)

    def test_bit_order_qubit0_is_lsb(self):
        # X on qubit 0 of two qubits puts the amplitude at index 1, not 2
        v = simulate(Circuit(2, (Gate("x", (0,)),)))
        assert v[1] == 1

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_embedded_matrix_product(self, seed):
        rng = np.random.default_rng(400 + seed)
        c = random_circuit(4, 8, rng)
        expected = circuit_unitary_naive(c)[:, 0]
        np.testing.assert_allclose(simulate(c), expected, atol=1e-12)

    def test_norm_preserved_over_ten_thousand_gates(self):
        rng = np.random.default_rng(5)
        c = random_circuit(4, 5000, rng)  # each entangler comes with a 1q gate
        assert len(c.gates) == 10_000
        v = simulate(c)
        assert abs(np.linalg.norm(v) - 1.0) <= 1e-10

    def test_qubit_guard(self):
        with pytest.raises(ValueError, match="capped"):
            simulate(Circuit(25, ()))


class TestUnitary:
    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_product(self, seed):
        rng = np.random.default_rng(500 + seed)
        c = random_circuit(3, 6, rng)
        np.testing.assert_allclose(unitary(c), circuit_unitary_naive(c), atol=1e-12)


class TestPeakOf:
    def test_basis_state(self):
        v = np.zeros(8, dtype=complex)
        v[5] = 1.0
        bits, p = peak_of(v)
        assert bits == index_to_bits(5, 3) == "101"
        assert p == 1.0

    def test_uniform_state_tie_breaks_to_lowest_index(self):
        v = np.full(4, 0.5, dtype=complex)
        bits, p = peak_of(v)
        assert bits == "00"
        assert p == pytest.approx(0.25)


class TestBitStrings:
    def test_round_trip(self):
        for x in range(16):
            assert bits_to_index(index_to_bits(x, 4)) == x

    def test_qubit0_leftmost(self):
        assert index_to_bits(1, 3) == "100"
        assert index_to_bits(4, 3) == "001"


class TestTvd:
    def test_equal_distributions(self):
        p = np.array([0.5, 0.5])
        assert tvd(p, p) == 0.0

    def test_disjoint_point_masses(self):
        assert tvd(np.array([1.0, 0.0]), np.array([0.0, 1.0])) == 1.0

    def test_uniform_vs_point_mass_analytic(self):
        uniform = np.full(4, 0.25)
        point = np.array([1.0, 0.0, 0.0, 0.0])
        assert tvd(uniform, point) == pytest.approx(0.75)

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="mismatch"):
            tvd(np.ones(2) / 2, np.ones(4) / 4)


class TestPermutationOps:
    def test_permute_index_moves_bits(self):
        # wire 0 -> wire 2 on three wires: index 1 (bit on wire 0) -> index 4
        mapping = (2, 0, 1)
        assert permute_index(mapping, 1) == 4

    def test_permutation_unitary_is_permutation_matrix(self):
        mapping = (1, 2, 0)
        mat = permutation_unitary(mapping)
        assert np.all(mat.sum(axis=0) == 1)
        assert np.all(mat.sum(axis=1) == 1)
        np.testing.assert_allclose(mat @ mat.conj().T, np.eye(8), atol=1e-15)

    def test_permute_statevector_matches_matrix(self):
        rng = np.random.default_rng(9)
        v = rng.standard_normal(8) + 1j * rng.standard_normal(8)
        mapping = (2, 0, 1)
        np.testing.assert_allclose(
            permute_statevector(mapping, v), permutation_unitary(mapping) @ v
        )

    def test_swap_gate_equals_permutation_operator(self):
        # the swap gate's embedded unitary equals the wire transposition operator
        c = Circuit(3, (Gate("swap", (0, 2)),))
        np.testing.assert_allclose(unitary(c), permutation_unitary((2, 1, 0)), atol=1e-15)
