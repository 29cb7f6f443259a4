"""Message-ID registry: fixed symbolic names -> 16-bit raw values.

All raw values are assigned at build time from the tables below so that
every run routes, downlinks, and reports the same numbers. Telemetry
streams use the 0x08xx convention (secondary-header flag set), commands
0x18xx. Each component in the build roster also gets a command MID at
apid 0x100 + roster index.
"""

from __future__ import annotations

from .packets import MessageId

TLM_BASE = 0x0800
CMD_BASE = 0x1800

# Shared and device telemetry streams. INSTR_CAL_TLM is a spare
# calibration stream with no benign publisher in this build.
TELEMETRY_STREAMS = {
    "SAT_HK_TLM": 0x001,
    "TIME_HK_TLM": 0x005,
    "EVS_EVENT_TLM": 0x008,
    "SB_STATS_TLM": 0x00A,
    "NOVATEL_OEM615_DEVICE_TLM": 0x010,
    "GENERIC_EPS_DEVICE_TLM": 0x012,
    "GENERIC_RADIO_DOWNLINK_TLM": 0x020,
    "INSTR_CAL_TLM": 0x030,
}

# Housekeeping-class streams the attack agent siphons by default.
HOUSEKEEPING_CLASS_STREAMS = (
    "SAT_HK_TLM",
    "EVS_EVENT_TLM",
    "SB_STATS_TLM",
    "TIME_HK_TLM",
)

# Benign flight stack. Hardware components mirror a typical smallsat
# bill of materials; the last three are core services.
BENIGN_COMPONENTS = (
    "novatel_oem615",
    "generic_eps",
    "generic_radio",
    "generic_torquer",
    "generic_imu",
    "generic_mag",
    "generic_css",
    "generic_fss",
    "generic_star_tracker",
    "generic_reaction_wheel",
    "generic_thruster",
    "generic_adcs",
    "generic_battery",
    "generic_thermal",
    "arducam",
    "sample_instrument",
    "payload_manager",
    "evs",
    "time_services",
    "sb_stats",
)

MALICIOUS_COMPONENTS = ("trigger_agent", "attack_agent")

ALL_COMPONENTS = BENIGN_COMPONENTS + MALICIOUS_COMPONENTS


class MessageIdRegistry:
    """Bidirectional name <-> MessageId table, frozen at construction."""

    def __init__(self):
        self._by_name: dict[str, MessageId] = {}
        self._by_mid: dict[MessageId, str] = {}
        for name, apid in TELEMETRY_STREAMS.items():
            self._add(name, MessageId(TLM_BASE | apid))
        for i, comp in enumerate(ALL_COMPONENTS):
            self._add(f"{comp.upper()}_CMD", MessageId(CMD_BASE | (0x100 + i)))

    def _add(self, name: str, mid: MessageId):
        if name in self._by_name or mid in self._by_mid:
            raise ValueError(f"registry collision on {name} / {mid}")
        self._by_name[name] = mid
        self._by_mid[mid] = name

    def mid(self, name: str) -> MessageId:
        return self._by_name[name]

    def name_of(self, mid: MessageId) -> str | None:
        return self._by_mid.get(mid)

    def telemetry_mids(self) -> tuple[MessageId, ...]:
        return tuple(m for m in self._by_mid if not m.is_command)

    def command_mid(self, component: str) -> MessageId:
        return self._by_name[f"{component.upper()}_CMD"]

    def names(self) -> tuple[str, ...]:
        return tuple(self._by_name)


REGISTRY = MessageIdRegistry()

COORDINATION_STREAM = "INSTR_CAL_TLM"
