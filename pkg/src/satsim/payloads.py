"""Telemetry payload layouts (big-endian throughout).

nav:        fix_valid u8, x/y/z float64 meters
hk:         name_len u8, name, uptime u32, error_count u16, command_count u16
evs:        app_len u8, app, event_id u16, text_len u16, text
time:       tick u32, seconds float64
sb_stats:   total_publishes u32, drops u32, n u16, then n * (mid u16, count u32)
eps:        battery_pct u8, bus_millivolts u16, load_milliamps u16
radio:      forwarded u32, dropped u32
"""

from __future__ import annotations

import struct

EVS_TEXT_CAP = 122  # longer event text is truncated silently


def pack_nav(fix_valid: bool, position: tuple[float, float, float]) -> bytes:
    return struct.pack(">B3d", 1 if fix_valid else 0, *position)


def unpack_nav(payload: bytes) -> tuple[bool, tuple[float, float, float]]:
    fix, x, y, z = struct.unpack(">B3d", payload)
    return bool(fix), (x, y, z)


def pack_hk(name: str, uptime: int, error_count: int, command_count: int) -> bytes:
    raw = name.encode()
    return struct.pack(f">B{len(raw)}sIHH", len(raw), raw, uptime, error_count, command_count)


def unpack_hk(payload: bytes) -> tuple[str, int, int, int]:
    n = payload[0]
    name = payload[1 : 1 + n].decode()
    uptime, errors, commands = struct.unpack(">IHH", payload[1 + n : 9 + n])
    return name, uptime, errors, commands


def pack_evs(app: str, event_id: int, text: str) -> bytes:
    app_raw = app.encode()[:255]
    text_raw = text.encode()[:EVS_TEXT_CAP]
    return struct.pack(
        f">B{len(app_raw)}sHH{len(text_raw)}s",
        len(app_raw), app_raw, event_id & 0xFFFF, len(text_raw), text_raw,
    )


def unpack_evs(payload: bytes) -> tuple[str, int, str]:
    n = payload[0]
    app = payload[1 : 1 + n].decode()
    event_id, text_len = struct.unpack(">HH", payload[1 + n : 5 + n])
    text = payload[5 + n : 5 + n + text_len].decode()
    return app, event_id, text


def pack_time(tick: int, seconds: float) -> bytes:
    return struct.pack(">Id", tick & 0xFFFFFFFF, seconds)


def unpack_time(payload: bytes) -> tuple[int, float]:
    return struct.unpack(">Id", payload)


def pack_sb_stats(total_publishes: int, drops: int, mid_counts: dict[int, int]) -> bytes:
    out = struct.pack(">IIH", total_publishes & 0xFFFFFFFF, drops & 0xFFFFFFFF, len(mid_counts))
    for mid_raw in sorted(mid_counts):
        out += struct.pack(">IH", mid_counts[mid_raw] & 0xFFFFFFFF, mid_raw)
    return out


def unpack_sb_stats(payload: bytes) -> tuple[int, int, dict[int, int]]:
    total, drops, n = struct.unpack(">IIH", payload[:10])
    counts = {}
    for i in range(n):
        count, mid_raw = struct.unpack(">IH", payload[10 + 6 * i : 16 + 6 * i])
        counts[mid_raw] = count
    return total, drops, counts


def pack_eps(battery_pct: int, bus_millivolts: int, load_milliamps: int) -> bytes:
    return struct.pack(">BHH", battery_pct, bus_millivolts, load_milliamps)


def pack_radio_status(forwarded: int, dropped: int) -> bytes:
    return struct.pack(">II", forwarded & 0xFFFFFFFF, dropped & 0xFFFFFFFF)
