import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from satsim.packets import (
    HEADER_LEN,
    MAX_PAYLOAD,
    SEQ_MODULUS,
    CodecError,
    CodecErrorKind,
    MessageId,
    SpacePacket,
    decode,
    encode,
    next_seq,
)


def header_oracle(mid_raw: int, seq_flags: int, seq_count: int, payload_len: int) -> bytes:
    """Independent bit-string assembly of the 6-byte primary header."""
    bits = (
        f"{0:03b}"
        f"{(mid_raw >> 12) & 1:01b}"
        f"{(mid_raw >> 11) & 1:01b}"
        f"{mid_raw & 0x7FF:011b}"
        f"{seq_flags:02b}"
        f"{seq_count:014b}"
        f"{payload_len - 1:016b}"
    )
    assert len(bits) == 48
    return bytes(int(bits[i : i + 8], 2) for i in range(0, 48, 8))


def mids():
    return st.integers(min_value=0, max_value=0x1FFF).map(MessageId)


def packets(max_payload=512):
    return st.builds(
        SpacePacket,
        mid=mids(),
        seq_count=st.integers(min_value=0, max_value=SEQ_MODULUS - 1),
        payload=st.binary(min_size=1, max_size=max_payload),
        seq_flags=st.integers(min_value=0, max_value=3),
    )


def test_encode_worked_example():
    # tlm mid 0x123, seq 5, four payload bytes -> 01 23 C0 05 00 03 AA BB CC DD
    p = SpacePacket(MessageId(0x0123), 5, bytes([0xAA, 0xBB, 0xCC, 0xDD]))
    wire = encode(p)
    assert wire == bytes.fromhex("0123C0050003AABBCCDD")
    assert wire[:6] == header_oracle(0x0123, 0b11, 5, 4)
    assert decode(wire) == p


def test_decode_truncated_below_header():
    assert decode(b"\x01\x02\x03\x04\x05") == CodecError(CodecErrorKind.TRUNCATED)


def test_decode_bad_length_surplus_bytes():
    # header declares 4 payload bytes, 7 follow
    wire = header_oracle(0x0123, 0b11, 5, 4) + b"\x00" * 7
    assert decode(wire) == CodecError(CodecErrorKind.BAD_LENGTH)


def test_decode_truncated_short_payload():
    wire = header_oracle(0x0123, 0b11, 5, 4) + b"\x00\x01"
    assert decode(wire) == CodecError(CodecErrorKind.TRUNCATED)


def test_empty_payload_rejected_at_construction():
    with pytest.raises(CodecError) as exc:
        SpacePacket(MessageId(1), 0, b"")
    assert exc.value.kind is CodecErrorKind.EMPTY_PAYLOAD


def test_oversize_payload_rejected_at_construction():
    SpacePacket(MessageId(1), 0, b"\x00" * MAX_PAYLOAD)  # ceiling is fine
    with pytest.raises(CodecError):
        SpacePacket(MessageId(1), 0, b"\x00" * (MAX_PAYLOAD + 1))


def test_message_id_version_bits_rejected():
    MessageId(0x1FFF)
    with pytest.raises(ValueError):
        MessageId(0x2000)
    assert MessageId(0x0810) == MessageId(0x0810)
    assert MessageId(0x0810) != MessageId(0x1810)


def test_message_id_fields():
    m = MessageId(0x1910)
    assert m.is_command and m.has_secondary_header and m.apid == 0x110
    t = MessageId(0x0123)
    assert not t.is_command and not t.has_secondary_header and t.apid == 0x123


@pytest.mark.parametrize("c,expected", [(0, 1), (16383, 0), (100, 101)])
def test_next_seq(c, expected):
    assert next_seq(c) == expected


def test_next_seq_rejects_out_of_range():
    with pytest.raises(ValueError):
        next_seq(SEQ_MODULUS)


@given(packets())
def test_round_trip_identity(p):
    assert decode(encode(p)) == p


@given(packets())
def test_encoded_length(p):
    assert len(encode(p)) == HEADER_LEN + len(p.payload)


@given(st.binary(max_size=2048))
@settings(max_examples=300)
def test_decode_total_on_junk(b):
    out = decode(b)
    assert isinstance(out, (SpacePacket, CodecError))


def test_header_bit_exactness_against_oracle():
    rng = random.Random(0xC0FFEE)
    for _ in range(1000):
        p = SpacePacket(
            mid=MessageId(rng.randrange(0x2000)),
            seq_count=rng.randrange(SEQ_MODULUS),
            payload=rng.randbytes(rng.randint(1, 64)),
            seq_flags=rng.randrange(4),
        )
        assert encode(p)[:6] == header_oracle(p.mid.raw, p.seq_flags, p.seq_count, len(p.payload))


def test_decode_normalizes_version_bits():
    wire = bytearray(encode(SpacePacket(MessageId(0x0123), 7, b"\x01")))
    wire[0] |= 0b11100000  # set version bits
    out = decode(bytes(wire))
    assert isinstance(out, SpacePacket)
    assert out.mid == MessageId(0x0123)
