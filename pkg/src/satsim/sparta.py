"""Space-attack TTP mapping, driven by a declarative trigger table.

Each technique carries a predicate key evaluated against the run summary,
so the mapping is auditable: a technique appears in a report iff its
trigger condition occurred in (or is structurally implied by) the run.
Reconnaissance and initial-access techniques precede the simulation and
are attributed to the threat model whenever any implant is installed.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RunSummary:
    """Facts distilled from one completed run's omniscient log."""

    scenario: int
    malicious_components: tuple[str, ...] = ()
    trigger_fired: bool = False
    gnss_trigger_fired: bool = False
    static_timer_fired: bool = False
    kill_issued: bool = False
    coordination_consumed: bool = False
    exfil_sends: int = 0
    ledger_size: int = 0
    flood_publishes: int = 0
    deception_emissions: int = 0
    malware_crash: bool = False
    security_event_indices: tuple[int, ...] = ()
    exfil_intended: bool = False
    first_activity_tick: int | None = None
    last_activity_tick: int | None = None
    throttles: int = 0
    acl_subscribe_denials: int = 0
    acl_publish_violations: int = 0
    syscall_denials: int = 0


_PREDICATES = {
    "implant_installed": lambda s: s.scenario >= 1,
    "malicious_code_ran": lambda s: s.scenario >= 1,
    "gnss_trigger": lambda s: s.gnss_trigger_fired,
    "timed_execution": lambda s: s.static_timer_fired or s.kill_issued,
    "flooding": lambda s: s.flood_publishes > 0,
    "exfiltrated": lambda s: s.ledger_size > 0,
    "deception": lambda s: s.deception_emissions > 0,
    "disruption": lambda s: s.flood_publishes > 0 or s.malware_crash,
    "dos_crash": lambda s: s.malware_crash,
    "collusion": lambda s: len(s.malicious_components) >= 2 and s.coordination_consumed,
}

# (category, ttp id, name, predicate key)
TTP_TABLE = (
    ("Reconnaissance", "REC-0001.01", "Gather Spacecraft Design Information: Software Design", "implant_installed"),
    ("Reconnaissance", "REC-0001.04", "Gather Spacecraft Design Information: Data Bus", "implant_installed"),
    ("Initial Access", "IA-0010", "Unauthorized Access During Safe-Mode", "implant_installed"),
    ("Initial Access", "IA-0001.02", "Compromise Supply Chain: Software Supply Chain", "implant_installed"),
    ("Initial Access", "IA-0009.0", "Trusted Relationship: Vendor", "implant_installed"),
    ("Execution", "EX-0002", "Position, Navigation, and Timing Geofencing", "gnss_trigger"),
    ("Execution", "EX-0010", "Malicious Code", "malicious_code_ran"),
    ("Execution", "EX-0009.01", "Exploit Code Flaws: Flight Software", "malicious_code_ran"),
    ("Execution", "EX-0008", "Time Synchronized Execution", "timed_execution"),
    ("Execution", "EX-0013", "Flooding", "flooding"),
    ("Persistence", "PER-0002.01", "Backdoor: Hardware Backdoor", "implant_installed"),
    ("Exfiltration", "EXF-0003.02", "Signal Interception: Downlink Exfiltration", "exfiltrated"),
    ("Impact", "IMP-0001", "Deception", "deception"),
    ("Impact", "IMP-0002", "Disruption", "disruption"),
    ("Impact", "IMP-0003", "Denial", "dos_crash"),
    ("Impact", "IMP-0006", "Theft", "exfiltrated"),
    ("Defense Evasion", "DE-0012", "Component Collusion", "collusion"),
)

ALL_TTP_IDS = tuple(row[1] for row in TTP_TABLE)


def sparta_report(summary: RunSummary) -> dict:
    """TTP ids whose trigger conditions occurred, with readable names."""
    hits = [
        {"category": category, "id": ttp_id, "name": name, "trigger": key}
        for category, ttp_id, name, key in TTP_TABLE
        if _PREDICATES[key](summary)
    ]
    return {"ids": [h["id"] for h in hits], "techniques": hits}
