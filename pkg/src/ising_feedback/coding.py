"""Zero-error feedback coding scheme for the Ising channel.

Two stages.  The data encoder maps an n-bit message bijectively onto a
binary string of length m with exactly k alternations (enumerative coding
over that type class).  The channel encoder then sends each data bit once
if it alternates and the feedback shows it came through, and twice
otherwise; the second copy of a repeated bit always arrives intact.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .channel import NoiseSource, transmit
from .dp import _hb


class CapacityError(ValueError):
    """The message does not fit in the chosen type class."""


class IncompleteTranscript(ValueError):
    pass


def markov_sequence_count(m: int, k: int) -> int:
    """Number of binary strings of length m with exactly k alternations."""
    if m < 1 or not 0 <= k <= m - 1:
        raise ValueError(f"need m >= 1 and 0 <= k <= m - 1, got m={m}, k={k}")
    return 2 * math.comb(m - 1, k)


def unrank(index: int, m: int, k: int) -> list[int]:
    """The ``index``-th string (lexicographic, 0 < 1) of length m with k
    alternations."""
    total = markov_sequence_count(m, k)
    if not 0 <= index < total:
        raise ValueError(f"index {index} outside [0, {total})")
    R, K = m - 1, k
    cur = math.comb(R, K)  # completions after the first bit
    if index < cur:
        bits = [0]
    else:
        bits = [1]
        index -= cur
    for _ in range(m - 1):
        stay = cur * (R - K) // R
        alt = cur - stay
        prev = bits[-1]
        count0 = stay if prev == 0 else alt
        if index < count0:
            bit = 0
        else:
            bit = 1
            index -= count0
        if bit == prev:
            cur = stay
        else:
            cur, K = alt, K - 1
        R -= 1
        bits.append(bit)
    return bits


def rank(bits: Sequence[int]) -> int:
    """Inverse of :func:`unrank`."""
    m = len(bits)
    k = sum(1 for i in range(1, m) if bits[i] != bits[i - 1])
    R, K = m - 1, k
    cur = math.comb(R, K)
    index = cur if bits[0] == 1 else 0
    for i in range(1, m):
        stay = cur * (R - K) // R
        alt = cur - stay
        prev, bit = bits[i - 1], bits[i]
        if bit == 1:
            index += stay if prev == 0 else alt
        if bit == prev:
            cur = stay
        else:
            cur, K = alt, K - 1
        R -= 1
    return index


def class_parameters(n: int, q: float) -> tuple[int, int]:
    """Smallest stream length m >= n / H(q) whose type class, with
    k = round(q (m - 1)) alternations, holds all 2^n messages."""
    if n < 1:
        raise ValueError("n must be positive")
    if not 0.0 <= q <= 1.0:
        raise ValueError("q must lie in [0, 1]")
    hq = float(_hb(np.float64(q)))
    m = max(n if hq == 0 else math.ceil(n / hq), 1)
    need = 1 << n
    if hq == 0:
        # only two strings per class whatever m is
        k = round(q * (m - 1))
        if markov_sequence_count(m, k) < need:
            raise CapacityError(f"q={q} carries no information; cannot send {n} bits")
        return m, k
    while True:
        k = round(q * (m - 1))
        if markov_sequence_count(m, k) >= need:
            return m, k
        m += 1


@dataclass
class DataStream:
    bits: list[int]
    k: int

    @property
    def m(self) -> int:
        return len(self.bits)

    @property
    def alternations(self) -> int:
        b = self.bits
        return sum(1 for i in range(1, len(b)) if b[i] != b[i - 1])


def _to_int(message: Sequence[int]) -> int:
    value = 0
    for b in message:
        if b not in (0, 1):
            raise ValueError(f"message bits must be 0/1, got {b!r}")
        value = (value << 1) | int(b)
    return value


def data_encode(message: Sequence[int], q: float) -> DataStream:
    """Message bits (most significant first) to a fixed-type data stream."""
    n = len(message)
    m, k = class_parameters(n, q)
    return DataStream(unrank(_to_int(message), m, k), k)


def data_decode(stream: DataStream, n: int, q: float) -> list[int]:
    m, k = class_parameters(n, q)
    if stream.m != m or stream.alternations != k:
        raise ValueError("stream does not belong to the expected type class")
    index = rank(stream.bits)
    if index >= 1 << n:
        raise ValueError("stream index outside the message range")
    return [(index >> (n - 1 - i)) & 1 for i in range(n)]


CASE_ONCE = "1.1"
CASE_TWICE = "1.2"


@dataclass
class Transcript:
    s0: int
    x: list[int] = field(default_factory=list)
    y: list[int] = field(default_factory=list)
    case: list[str] = field(default_factory=list)
    data_index: list[int] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.x)

    @property
    def once_sent(self) -> int:
        return sum(1 for c in self.case if c == CASE_ONCE)

    @property
    def twice_sent(self) -> int:
        return sum(1 for c in self.case if c == CASE_TWICE) // 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t_prime,x,y,case,data_index\n")
        for i in range(len(self.x)):
            # 1-based indices, as in the worked example
            buf.write(f"{i + 1},{self.x[i]},{self.y[i]},{self.case[i]},{self.data_index[i] + 1}\n")
        return buf.getvalue()


class ChannelEncoder:
    """Feedback encoder as a state machine.

    Call :meth:`next_input` for the symbol to send and hand the channel
    output to :meth:`observe`.  The output is only looked at when the
    current data bit differs from the channel state; ``feedback_reads``
    counts those looks.
    """

    def __init__(self, bits: Sequence[int], s0: int):
        self.bits = list(bits)
        self.state = int(s0)
        self.pos = 0
        self.repeat_pending = False
        self.feedback_reads = 0

    @property
    def done(self) -> bool:
        return self.pos >= len(self.bits)

    def next_input(self) -> int:
        return self.bits[self.pos]

    def observe(self, y) -> str:
        """Advance after sending; returns the case tag of this channel use."""
        x = self.bits[self.pos]
        if self.repeat_pending:
            self.repeat_pending = False
            self.pos += 1
            self.state = x
            return CASE_TWICE
        if x == self.state:
            # no alternation: the bit goes out twice regardless of y
            self.repeat_pending = True
            return CASE_TWICE
        self.feedback_reads += 1
        self.state = x
        if y != x:
            self.repeat_pending = True
            return CASE_TWICE
        self.pos += 1
        return CASE_ONCE


def channel_encode(stream, s0: int, noise: NoiseSource) -> Transcript:
    """Send a data stream (a :class:`DataStream` or plain bit list) through
    the simulated channel, recording every channel use."""
    bits = stream.bits if isinstance(stream, DataStream) else list(stream)
    enc = ChannelEncoder(bits, s0)
    tr = Transcript(s0=int(s0))
    s = int(s0)
    while not enc.done:
        x = enc.next_input()
        y, s_new = transmit(x, s, noise)
        idx = enc.pos
        tr.case.append(enc.observe(int(y)))
        tr.x.append(x)
        tr.y.append(int(y))
        tr.data_index.append(idx)
        s = int(s_new)
    return tr


@dataclass
class DecodeStep:
    t_prime: int
    y: int
    state: int | None
    action: str
    decoded: str
    case: str


def decode_trace(y: Sequence[int], s0: int) -> list[DecodeStep]:
    """Run the decoder and log one row per channel output.

    A ``None`` state means the decoder does not know the channel state yet
    and is waiting for the next output.
    """
    steps = []
    out = ""
    s = int(s0)
    i = 0
    while i < len(y):
        if y[i] != s:
            s = int(y[i])
            out += str(s)
            steps.append(DecodeStep(i + 1, int(y[i]), s, "decode", out, CASE_ONCE))
            i += 1
            continue
        steps.append(DecodeStep(i + 1, int(y[i]), None, "none", out + "?", CASE_TWICE))
        if i + 1 >= len(y):
            raise IncompleteTranscript("incomplete transcript: stream ends while waiting")
        s = int(y[i + 1])
        out += str(s)
        steps.append(DecodeStep(i + 2, s, s, "decode", out, CASE_TWICE))
        i += 2
    return steps


def decode_stream(y: Sequence[int], s0: int) -> list[int]:
    return [
        int(st.decoded[-1]) for st in decode_trace(y, s0) if st.action == "decode"
    ]


def decode_trace_csv(steps: Sequence[DecodeStep]) -> str:
    buf = io.StringIO()
    buf.write("t_prime,y,state_or_unknown,action,decoded_prefix\n")
    for st in steps:
        state = "?" if st.state is None else str(st.state)
        buf.write(f"{st.t_prime},{st.y},{state},{st.action},{st.decoded}\n")
    return buf.getvalue()


def predicted_rate(q):
    q = np.asarray(q, dtype=float)
    out = 2.0 * _hb(q) / (4.0 - q)
    return float(out) if out.ndim == 0 else out


def markov_stream(length: int, q: float, rng: np.random.Generator) -> list[int]:
    """Binary Markov chain with alternation probability q and a fair first bit."""
    flips = (rng.random(length) < q).astype(np.int64)
    flips[0] = rng.integers(0, 2)
    return (np.cumsum(flips) % 2).tolist()


@dataclass
class CodingConfig:
    q: float
    n: int
    s0: int = 0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.q <= 1.0:
            raise ValueError("q must lie in [0, 1]")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.s0 not in (0, 1):
            raise ValueError("s0 must be 0 or 1")


def markov_transcript(cfg: CodingConfig, data_bits: int) -> Transcript:
    """Channel-encode ``data_bits`` Markov(q) bits drawn from ``cfg.seed``."""
    if data_bits < 1:
        raise ValueError("data_bits must be positive")
    data_seed, noise_seed = np.random.SeedSequence(cfg.seed).spawn(2)
    bits = markov_stream(data_bits, cfg.q, np.random.default_rng(data_seed))
    return channel_encode(bits, cfg.s0, NoiseSource(noise_seed))


def simulate_rate(cfg: CodingConfig, data_bits: int | None = None) -> tuple[float, float]:
    """Empirical and predicted rate of the channel encoder on Markov(q) data.

    The data stream is drawn directly (no data encoder), so the empirical
    rate is ``H(q) * m / T`` for ``m`` data bits sent in ``T`` channel uses.
    """
    m = cfg.n if data_bits is None else data_bits
    tr = markov_transcript(cfg, m)
    hq = float(_hb(np.float64(cfg.q)))
    return hq * m / len(tr), predicted_rate(cfg.q)
