# pylint: skip-file
import numpy as np
import pytest

from polardp.error import InvalidArgument
from polardp.polar_core import (as_bits, bernoulli_bits, bit_generator, hamming_weight, is_power_of_two,
                                polar_transform, xor)


def kron_generator(n):
    kernel = np.array([[1, 0], [1, 1]], dtype=np.int64)
    matrix = np.ones((1, 1), dtype=np.int64)
    for _ in range(n):
        matrix = np.kron(matrix, kernel)
    return matrix


class TestPolarTransform:
    def test_zero_word(self):
        assert not polar_transform(np.zeros(8, dtype=np.uint8)).any()

    def test_last_index_gives_all_ones(self):
        u = np.zeros(8, dtype=np.uint8)
        u[-1] = 1
        assert polar_transform(u).tolist() == [1] * 8

    def test_first_index_of_four(self):
        assert polar_transform([1, 0, 0, 0]).tolist() == [1, 0, 0, 0]

    def test_length_one_is_identity(self):
        assert polar_transform([1]).tolist() == [1]

    @pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
    def test_matches_kronecker_power(self, n):
        rng = np.random.default_rng(n)
        u = rng.integers(0, 2, size=(20, 1 << n), dtype=np.uint8)
        expected = (u.astype(np.int64) @ kron_generator(n)) % 2
        assert np.array_equal(polar_transform(u), expected)

    @pytest.mark.parametrize("N", [2, 4, 16, 256, 1024])
    def test_involution(self, N):
        rng = np.random.default_rng(N)
        u = rng.integers(0, 2, size=N, dtype=np.uint8)
        assert np.array_equal(polar_transform(polar_transform(u)), u)

    def test_linearity(self):
        rng = np.random.default_rng(7)
        a = rng.integers(0, 2, size=64, dtype=np.uint8)
        b = rng.integers(0, 2, size=64, dtype=np.uint8)
        assert np.array_equal(polar_transform(a ^ b), polar_transform(a) ^ polar_transform(b))

    def test_batch_rows_are_independent(self):
        rng = np.random.default_rng(3)
        u = rng.integers(0, 2, size=(5, 32), dtype=np.uint8)
        batch = polar_transform(u)
        for row in range(5):
            assert np.array_equal(batch[row], polar_transform(u[row]))

    def test_input_left_untouched(self):
        u = np.array([0, 1, 1, 0], dtype=np.uint8)
        polar_transform(u)
        assert u.tolist() == [0, 1, 1, 0]

    @pytest.mark.parametrize("bad", [[1, 0, 1], [], [0, 2]])
    def test_invalid_input(self, bad):
        with pytest.raises(InvalidArgument):
            polar_transform(bad)


class TestBitHelpers:
    def test_hamming_weight(self):
        assert hamming_weight(np.zeros(16, dtype=np.uint8)) == 0
        assert hamming_weight(np.ones(16, dtype=np.uint8)) == 16
        assert hamming_weight([1, 0, 1, 1]) == 3

    def test_xor(self):
        a = np.array([1, 0, 1], dtype=np.uint8)
        assert xor(a, a).tolist() == [0, 0, 0]
        assert xor(a, [0, 0, 0]).tolist() == [1, 0, 1]
        assert xor([1, 0, 1], [1, 1, 0]).tolist() == [0, 1, 1]

    def test_xor_length_mismatch(self):
        with pytest.raises(InvalidArgument):
            xor([1, 0], [1, 0, 1])

    def test_as_bits(self):
        assert as_bits([True, False]).dtype == np.uint8
        assert as_bits([], allow_empty=True).size == 0
        with pytest.raises(InvalidArgument):
            as_bits([])
        with pytest.raises(InvalidArgument):
            as_bits(np.array([3], dtype=np.uint8))

    def test_power_of_two(self):
        assert [value for value in range(1, 20) if is_power_of_two(value)] == [1, 2, 4, 8, 16]
        assert not is_power_of_two(0)


class TestRandomBits:
    def test_same_key_same_stream(self):
        first = bernoulli_bits(bit_generator(5, 1, 2), 0.3, 1000)
        second = bernoulli_bits(bit_generator(5, 1, 2), 0.3, 1000)
        assert np.array_equal(first, second)

    def test_keys_are_independent(self):
        first = bernoulli_bits(bit_generator(5, 1, 2), 0.5, 1000)
        second = bernoulli_bits(bit_generator(5, 2, 1), 0.5, 1000)
        assert not np.array_equal(first, second)

    def test_extremes(self):
        rng = bit_generator(0)
        assert not bernoulli_bits(rng, 0.0, 100).any()
        assert bernoulli_bits(rng, 1.0, 100).all()
