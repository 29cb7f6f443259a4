"""Operator view and run-report assembly.

The operator view is the ground truth for every stealth claim: it is the
ordered merge of exactly four sources - ground records, event-services
text, defense security events, and boot banners. Nothing from the
omniscient-only channels may appear here, which the channel tags enforce
mechanically.
"""

from __future__ import annotations

from .events import Channel, EventLog, SimEvent
from .sparta import RunSummary

FORMAT_VERSION = 1


def view_entry(event: SimEvent) -> dict:
    if event.channel is Channel.GROUND:
        return {
            "type": "ground_record",
            "tick": event.tick,
            "seq": event.seq,
            "decode_status": event.data["decode_status"],
            "mid": event.data["mid"],
            "mid_name": event.data["mid_name"],
            "seq_count": event.data["seq"],
            "length": event.data["length"],
        }
    if event.channel is Channel.EVS:
        return {
            "type": "evs",
            "tick": event.tick,
            "seq": event.seq,
            "app": event.data["app"],
            "text": event.data["text"],
        }
    if event.channel is Channel.SECURITY:
        return {"type": "security", "tick": event.tick, "seq": event.seq,
                "kind": event.kind, **event.data}
    if event.channel is Channel.BANNER:
        return {"type": "banner", "tick": event.tick, "seq": event.seq,
                "text": event.data["text"]}
    raise ValueError(f"channel {event.channel} is not operator-visible")


def operator_view(log: EventLog) -> list[dict]:
    return [view_entry(e) for e in log.visible()]


def build_report(
    config_obj: dict,
    log: EventLog,
    ledger: list,
    verdict,
    stealth: dict,
    sparta: dict,
    summary: RunSummary,
    counters: dict,
    score: dict | None = None,
) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "config": config_obj,
        "log_digest": log.digest(),
        "event_count": len(log),
        "counters": counters,
        "operator_view": operator_view(log),
        "exfil_ledger": [r.to_json_obj() for r in ledger],
        "verdict": verdict.to_json_obj(),
        "stealth": stealth,
        "sparta": sparta,
        "summary": {
            "trigger_fired": summary.trigger_fired,
            "exfil_sends": summary.exfil_sends,
            "flood_publishes": summary.flood_publishes,
            "deception_emissions": summary.deception_emissions,
            "malware_crash": summary.malware_crash,
            "first_activity_tick": summary.first_activity_tick,
            "last_activity_tick": summary.last_activity_tick,
            "malicious_components": list(summary.malicious_components),
        },
        "score": score,
    }
