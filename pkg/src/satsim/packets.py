"""CCSDS-style space packet codec.

The 6-byte primary header is packed big-endian:

    [3]  version      always 0b000
    [1]  type         0 = telemetry, 1 = command
    [1]  sec_hdr      secondary-header flag (carried, never interpreted)
    [11] apid
    [2]  seq_flags    0b11 = unsegmented
    [14] seq_count    wraps at 16384
    [16] length       payload length in bytes, minus one

The same byte layout is the wire format of the ground-station datagram
link, so encode/decode here are the single source of truth for framing.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

HEADER_LEN = 6
SEQ_MODULUS = 16384
MAX_PAYLOAD = 65536
SEQ_FLAGS_UNSEGMENTED = 0b11


class CodecErrorKind(Enum):
    TRUNCATED = "Truncated"
    BAD_LENGTH = "BadLength"
    EMPTY_PAYLOAD = "EmptyPayload"


class CodecError(Exception):
    """Framing failure: returned by decode, raised on invalid construction."""

    def __init__(self, kind: CodecErrorKind, detail: str = ""):
        super().__init__(f"{kind.value}: {detail}" if detail else kind.value)
        self.kind = kind
        self.detail = detail

    def __eq__(self, other):
        return isinstance(other, CodecError) and other.kind is self.kind

    def __hash__(self):
        return hash(self.kind)


@dataclass(frozen=True)
class MessageId:
    """16-bit message ID; the three version bits must be zero."""

    raw: int

    def __post_init__(self):
        if not 0 <= self.raw <= 0x1FFF:
            raise ValueError(f"message id 0x{self.raw:04X}: version bits must be zero")

    @property
    def is_command(self) -> bool:
        return bool(self.raw & 0x1000)

    @property
    def has_secondary_header(self) -> bool:
        return bool(self.raw & 0x0800)

    @property
    def apid(self) -> int:
        return self.raw & 0x07FF

    def __str__(self):
        return f"0x{self.raw:04X}"


@dataclass(frozen=True)
class SpacePacket:
    mid: MessageId
    seq_count: int
    payload: bytes
    seq_flags: int = SEQ_FLAGS_UNSEGMENTED

    def __post_init__(self):
        if not isinstance(self.payload, bytes):
            object.__setattr__(self, "payload", bytes(self.payload))
        if len(self.payload) == 0:
            raise CodecError(CodecErrorKind.EMPTY_PAYLOAD, "payload must carry at least one byte")
        if len(self.payload) > MAX_PAYLOAD:
            raise CodecError(
                CodecErrorKind.BAD_LENGTH,
                f"payload of {len(self.payload)} bytes exceeds the {MAX_PAYLOAD}-byte length-field ceiling",
            )
        if not 0 <= self.seq_count < SEQ_MODULUS:
            raise ValueError(f"seq_count {self.seq_count} out of 14-bit range")
        if not 0 <= self.seq_flags <= 0b11:
            raise ValueError(f"seq_flags {self.seq_flags} out of 2-bit range")


def encode(p: SpacePacket) -> bytes:
    """Serialize to 6 header bytes followed by the payload."""
    word1 = (p.seq_flags << 14) | p.seq_count
    return struct.pack(">HHH", p.mid.raw, word1, len(p.payload) - 1) + p.payload


def decode(b: bytes) -> SpacePacket | CodecError:
    """Inverse of encode on its image; never raises on arbitrary input.

    The CCSDS version field is normalized to zero on decode; junk with
    version bits set still yields a packet rather than a fourth error kind.
    """
    if len(b) < HEADER_LEN:
        return CodecError(CodecErrorKind.TRUNCATED, f"{len(b)} bytes is below the 6-byte header")
    word0, word1, length_field = struct.unpack(">HHH", b[:HEADER_LEN])
    declared = length_field + 1
    actual = len(b) - HEADER_LEN
    if actual < declared:
        return CodecError(CodecErrorKind.TRUNCATED, f"header declares {declared} payload bytes, got {actual}")
    if actual > declared:
        return CodecError(CodecErrorKind.BAD_LENGTH, f"header declares {declared} payload bytes, got {actual}")
    return SpacePacket(
        mid=MessageId(word0 & 0x1FFF),
        seq_count=word1 & 0x3FFF,
        payload=b[HEADER_LEN:],
        seq_flags=(word1 >> 14) & 0b11,
    )


def next_seq(c: int) -> int:
    if not 0 <= c < SEQ_MODULUS:
        raise ValueError(f"seq_count {c} out of 14-bit range")
    return (c + 1) % SEQ_MODULUS
