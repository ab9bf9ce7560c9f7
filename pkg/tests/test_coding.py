import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ising_feedback import coding
from ising_feedback.analytic import default_params
from ising_feedback.channel import ForcedNoise, NoiseSource, transmit


def alternations(bits):
    return sum(1 for a, b in zip(bits, bits[1:]) if a != b)


def all_runs(data, s0):
    """Every (flips, transcript) pair: depth-first over the coin flips the
    encoder consumes.  The weights 2^-len(flips) sum to one."""
    stack = [()]
    while stack:
        flips = stack.pop()
        try:
            tr = coding.channel_encode(data, s0, ForcedNoise(flips))
        except IndexError:
            stack.extend([flips + (0,), flips + (1,)])
            continue
        yield flips, tr


# ---- type class counting and enumerative coding ----

@pytest.mark.parametrize("m,k,expected", [(2, 1, 2), (3, 0, 2), (5, 2, 12)])
def test_markov_sequence_count_examples(m, k, expected):
    assert coding.markov_sequence_count(m, k) == expected


def test_markov_sequence_count_enumeration():
    for m in range(1, 13):
        counts = [0] * m
        for bits in itertools.product((0, 1), repeat=m):
            counts[alternations(bits)] += 1
        assert counts == [coding.markov_sequence_count(m, k) for k in range(m)]


@pytest.mark.parametrize("m,k", [(0, 0), (3, 3), (3, -1)])
def test_markov_sequence_count_domain(m, k):
    with pytest.raises(ValueError):
        coding.markov_sequence_count(m, k)


def test_big_class_exact():
    assert coding.markov_sequence_count(2001, 1000) == 2 * math.comb(2000, 1000)


def test_unrank_is_lexicographic():
    m, k = 7, 3
    strings = [b for b in itertools.product((0, 1), repeat=m) if alternations(b) == k]
    for i, s in enumerate(sorted(strings)):
        assert coding.unrank(i, m, k) == list(s)
        assert coding.rank(s) == i


def test_unrank_range():
    with pytest.raises(ValueError):
        coding.unrank(12, 5, 2)


@pytest.mark.parametrize("q", [0.3, 0.5, 0.55])
def test_round_trip(q):
    for n in (1, 2, 5, 8):
        for value in range(1 << n):
            msg = [(value >> (n - 1 - i)) & 1 for i in range(n)]
            stream = coding.data_encode(msg, q)
            assert stream.alternations == stream.k
            assert stream.m >= n
            assert coding.data_decode(stream, n, q) == msg


def test_q_one_two_phases():
    a = coding.data_encode([0], 1.0)
    b = coding.data_encode([1], 1.0)
    assert a.m == b.m and a.alternations == a.m - 1
    assert [1 - v for v in a.bits] == b.bits
    assert coding.markov_sequence_count(a.m, a.k) == 2


def test_zero_entropy_rejects_long_messages():
    with pytest.raises(coding.CapacityError):
        coding.data_encode([0, 1], 1.0)
    with pytest.raises(coding.CapacityError):
        coding.class_parameters(3, 0.0)


def test_data_decode_checks_class():
    stream = coding.data_encode([1, 0, 1], 0.5)
    bad = coding.DataStream(stream.bits + [0], stream.k)
    with pytest.raises(ValueError):
        coding.data_decode(bad, 3, 0.5)


def test_encoded_alternation_frequency():
    rng = np.random.default_rng(11)
    q = 0.3
    msg = rng.integers(0, 2, 10_000).tolist()
    stream = coding.data_encode(msg, q)
    assert abs(stream.alternations / (stream.m - 1) - q) <= 0.02 * q


def test_message_bits_validated():
    with pytest.raises(ValueError):
        coding.data_encode([0, 2], 0.5)


# ---- channel encoder and decoder ----

def test_worked_example():
    tr = coding.channel_encode([0, 1, 1, 0], 0, ForcedNoise("11"))
    assert "".join(map(str, tr.x)) == "0011100"
    assert "".join(map(str, tr.y)) == "0011110"
    assert tr.case == ["1.2", "1.2", "1.1", "1.2", "1.2", "1.2", "1.2"]
    assert [i + 1 for i in tr.data_index] == [1, 1, 2, 3, 3, 4, 4]
    assert tr.once_sent == 1 and tr.twice_sent == 3
    assert tr.to_csv().splitlines()[3] == "3,1,1,1.1,2"


def test_worked_decode():
    steps = coding.decode_trace([0, 0, 1, 1, 1, 1, 0], 0)
    got = [(s.t_prime, s.y, s.state, s.action, s.decoded, s.case) for s in steps]
    assert got == [
        (1, 0, None, "none", "?", "1.2"),
        (2, 0, 0, "decode", "0", "1.2"),
        (3, 1, 1, "decode", "01", "1.1"),
        (4, 1, None, "none", "01?", "1.2"),
        (5, 1, 1, "decode", "011", "1.2"),
        (6, 1, None, "none", "011?", "1.2"),
        (7, 0, 0, "decode", "0110", "1.2"),
    ]
    assert coding.decode_stream([0, 0, 1, 1, 1, 1, 0], 0) == [0, 1, 1, 0]
    csv = coding.decode_trace_csv(steps).splitlines()
    assert csv[0] == "t_prime,y,state_or_unknown,action,decoded_prefix"
    assert csv[1] == "1,0,?,none,?"


def test_all_zeros_noiseless():
    noise = ForcedNoise("")
    tr = coding.channel_encode([0] * 6, 0, noise)
    assert tr.x == tr.y == [0] * 12
    assert set(tr.case) == {"1.2"}
    assert noise.flips == 0
    assert coding.decode_stream(tr.y, 0) == [0] * 6


def test_incomplete_transcript():
    with pytest.raises(coding.IncompleteTranscript, match="incomplete transcript"):
        coding.decode_stream([0, 0, 0], 0)


def test_empty_stream():
    assert coding.decode_stream([], 1) == []


@pytest.mark.parametrize("s0", [0, 1])
def test_zero_error_exhaustive_short(s0):
    for m in range(1, 6):
        for data in itertools.product((0, 1), repeat=m):
            mass = 0.0
            for flips, tr in all_runs(list(data), s0):
                mass += 2.0 ** -len(flips)
                assert coding.decode_stream(tr.y, s0) == list(data)
                assert len(tr) == tr.once_sent + 2 * tr.twice_sent
            assert mass == 1.0


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.integers(0, 1), min_size=1, max_size=400),
    st.integers(0, 1),
    st.integers(0, 2**32 - 1),
)
def test_zero_error_random(data, s0, seed):
    tr = coding.channel_encode(data, s0, NoiseSource(seed))
    assert coding.decode_stream(tr.y, s0) == data


def test_feedback_only_read_on_alternations():
    rng = np.random.default_rng(4)
    data = rng.integers(0, 2, 500).tolist()
    noise = NoiseSource(8)
    enc = coding.ChannelEncoder(data, 0)
    s, alternating_sends = 0, 0
    while not enc.done:
        x = enc.next_input()
        y, s_new = transmit(x, s, noise)
        fresh = not enc.repeat_pending
        if fresh and x != s:
            alternating_sends += 1
            enc.observe(int(y))
        else:
            # the encoder must not need y here
            enc.observe(None)
        s = int(s_new)
    assert enc.feedback_reads == alternating_sends


def test_decoder_tracks_channel_state():
    rng = np.random.default_rng(2)
    data = rng.integers(0, 2, 300).tolist()
    tr = coding.channel_encode(data, 1, NoiseSource(3))
    # channel state after use t is x_t; after each decoded bit the decoder
    # must hold exactly that value
    for st_ in coding.decode_trace(tr.y, 1):
        if st_.action == "decode":
            assert st_.state == tr.x[st_.t_prime - 1]


def test_case_fractions():
    q = 0.4
    tr = coding.markov_transcript(coding.CodingConfig(q=q, n=1, seed=5), 200_000)
    once = tr.once_sent / 200_000
    twice = tr.twice_sent / 200_000
    assert once == pytest.approx(q / 2, abs=0.005)
    assert twice == pytest.approx((2 - q) / 2, abs=0.005)
    assert len(tr) / 200_000 == pytest.approx((4 - q) / 2, abs=0.01)


# ---- rates ----

def test_predicted_rate_examples():
    assert coding.predicted_rate(0.5) == pytest.approx(2 / 3.5, abs=1e-15)
    assert round(coding.predicted_rate(0.5), 4) == 0.5714
    assert coding.predicted_rate(0.0) == 0.0
    assert coding.predicted_rate(1.0) == 0.0


def test_rate_peak():
    a = default_params().a
    qs = np.linspace(0, 1, 10_000)
    q_best = qs[np.argmax(coding.predicted_rate(qs))]
    assert abs(q_best - (1 - a)) <= 1e-3
    assert coding.predicted_rate(1 - a) == pytest.approx(default_params().rho_star, abs=1e-12)


def test_simulate_rate_small():
    cfg = coding.CodingConfig(q=0.5, n=50_000, seed=1)
    emp, pred = coding.simulate_rate(cfg)
    assert emp == pytest.approx(pred, rel=0.02)
    assert coding.simulate_rate(cfg) == (emp, pred)


def test_config_validation():
    with pytest.raises(ValueError):
        coding.CodingConfig(q=1.5, n=1)
    with pytest.raises(ValueError):
        coding.CodingConfig(q=0.5, n=0)
    with pytest.raises(ValueError):
        coding.CodingConfig(q=0.5, n=1, s0=2)
    with pytest.raises(ValueError):
        coding.simulate_rate(coding.CodingConfig(q=0.5, n=1), 0)
