import pytest
from hypothesis import given
from hypothesis import strategies as st

from wirespec.bits import EMPTY, BitString
from wirespec.errors import NotByteAligned, Underrun


def bs(bits):
    return BitString.from_bits(bits)


def test_append_concatenates():
    assert bs("01").append(bs("000000")) == bs("01000000")
    assert EMPTY.append(bs("101")) == bs("101")
    assert bs("1").append(bs("1")) == bs("11")


def test_take_splits():
    head, rest = bs("01000000").take(2)
    assert (head, rest) == (bs("01"), bs("000000"))
    head, rest = bs("101").take(0)
    assert (head, rest) == (EMPTY, bs("101"))


def test_take_underrun():
    with pytest.raises(Underrun):
        bs("1").take(2)


def test_to_bytes_msb_first():
    # hand-packed: bit 0 of the string is the high bit of the byte
    assert bs("01000000").to_bytes() == bytes([0x40])
    assert bs("11111111").to_bytes() == bytes([0xFF])


def test_to_bytes_rejects_ragged_length():
    with pytest.raises(NotByteAligned):
        bs("0100000").to_bytes()


def test_hex_and_repr():
    assert BitString.from_hex("ff") == bs("11111111")
    assert repr(BitString.from_hex("0a")) == "X'0a'"
    assert repr(bs("0101")) == "b'0101'"


def test_concat_matches_fold():
    parts = [bs("1"), bs(""), bs("0011"), bs("000")]
    folded = EMPTY
    for p in parts:
        folded = folded.append(p)
    assert BitString.concat(parts) == folded


bitstrings = st.text(alphabet="01", max_size=64).map(BitString.from_bits)


@given(bitstrings, bitstrings)
def test_append_length_adds(a, b):
    assert a.append(b).length == a.length + b.length


@given(st.binary(max_size=48))
def test_bytes_roundtrip(data):
    assert BitString.from_bytes(data).to_bytes() == data


@given(bitstrings, st.data())
def test_take_then_append_restores(a, data):
    n = data.draw(st.integers(min_value=0, max_value=a.length))
    head, rest = a.take(n)
    assert head.append(rest) == a
    assert head.length == n
