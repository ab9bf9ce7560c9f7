import numpy as np
import pytest
from hypothesis import given, strategies as st

from ising_feedback.channel import (
    Bit, ForcedNoise, NoiseSource, next_state, transition_prob, transmit,
)

bits = st.sampled_from([0, 1])


@pytest.mark.parametrize(
    "x, s_prev, y, expected",
    [(0, 0, 0, 1.0), (1, 0, 1, 0.5), (0, 0, 1, 0.0), (1, 1, 1, 1.0), (0, 1, 0, 0.5)],
)
def test_transition_table(x, s_prev, y, expected):
    assert transition_prob(x, s_prev, y) == expected


@given(bits, bits)
def test_rows_sum_to_one(x, s_prev):
    assert transition_prob(x, s_prev, 0) + transition_prob(x, s_prev, 1) == 1.0


def test_noiseless_diagonal():
    for x in (0, 1):
        assert transition_prob(x, x, x) == 1.0


def test_bad_bit_rejected():
    with pytest.raises(ValueError):
        transition_prob(2, 0, 0)


@pytest.mark.parametrize("s_prev, x, y", [(0, 1, 0), (1, 1, 1), (0, 0, 1)])
def test_next_state_is_input(s_prev, x, y):
    assert next_state(s_prev, x, y) == x


def test_transmit_repeat_is_noiseless():
    noise = NoiseSource(1)
    assert transmit(1, 1, noise) == (Bit.ONE, Bit.ONE)
    assert transmit(0, 0, noise) == (Bit.ZERO, Bit.ZERO)
    assert noise.flips == 0


@given(bits, bits, st.integers(0, 2**32))
def test_transmit_unifilar(x, s_prev, seed):
    y, s_new = transmit(x, s_prev, NoiseSource(seed))
    assert s_new == x == next_state(s_prev, x, y)


def test_connected_in_one_step():
    # from either state the input equal to the target state reaches it surely
    for s in (0, 1):
        for target in (0, 1):
            _, s_new = transmit(target, s, NoiseSource(0))
            assert s_new == target


def test_alternation_output_is_fair():
    noise = NoiseSource(2024)
    n = 100_000
    hits = sum(transmit(1, 0, noise)[0] == 1 for _ in range(n))
    assert abs(hits / n - 0.5) <= 0.01


def test_noise_reproducible_and_spawnable():
    s1, s2 = NoiseSource(7), NoiseSource(7)
    assert [s1.flip() for _ in range(100)] == [s2.flip() for _ in range(100)]
    kids = NoiseSource(7).spawn(2)
    seq = [[k.flip() for _ in range(200)] for k in kids]
    assert seq[0] != seq[1]


def test_forced_noise():
    noise = ForcedNoise("10")
    assert transmit(1, 0, noise)[0] == 1
    assert transmit(0, 1, noise)[0] == 0
    with pytest.raises(IndexError):
        transmit(1, 0, noise)
