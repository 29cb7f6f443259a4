"""Onboard countermeasures, installable as bus/runtime hooks.

Three policies:

  * RateMonitor - per-component transmission counters over fixed tick
    windows; crossing the threshold puts the component in a throttled
    state for the rest of the window and logs exactly one warning per
    throttling episode.
  * AclPolicy - manifest-driven software-bus access control. Subscription
    requests outside the manifest are denied (blocked); publish
    violations are logged but let through, since the prototype gates
    subscription requests only.
  * SyscallFilter - per-component syscall allowlists, default deny.
    Enforcement (kill on violation) lives in the runtime's gate.

A component with no manifest gets an empty allowlist everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .events import Channel, EventLog
from .packets import MessageId
from .runtime import SyscallKind


class RateScope(Enum):
    BUS_PUBLISH = "bus_publish"
    NET_SEND = "net_send"
    BOTH = "both"


@dataclass(frozen=True)
class RateMonitorPolicy:
    window: int = 50
    threshold: int = 100
    scope: RateScope = RateScope.BOTH


@dataclass(frozen=True)
class ComponentManifest:
    """Declared behavior of one component: the closed world a defense trusts."""

    name: str
    allowed_subscriptions: frozenset[MessageId] = frozenset()
    allowed_publications: frozenset[MessageId] = frozenset()
    allowed_syscalls: frozenset[SyscallKind] = frozenset()


class RateMonitor:
    def __init__(self, policy: RateMonitorPolicy, log: EventLog):
        self.policy = policy
        self.log = log
        self._window_start: dict[str, int] = {}
        self._counts: dict[str, int] = {}
        self._throttled: dict[str, bool] = {}
        self.throttle_count = 0

    def _roll(self, component: str, tick: int):
        window_start = (tick // self.policy.window) * self.policy.window
        if self._window_start.get(component) != window_start:
            self._window_start[component] = window_start
            self._counts[component] = 0
            self._throttled[component] = False

    def _on_action(self, component: str, tick: int) -> bool:
        self._roll(component, tick)
        if self._throttled[component]:
            self.throttle_count += 1
            return False
        if self._counts[component] >= self.policy.threshold:
            self._throttled[component] = True
            self.throttle_count += 1
            self.log.emit(
                tick, "rate_monitor", Channel.SECURITY, "rate_warning",
                component=component,
                window_start=self._window_start[component],
                threshold=self.policy.threshold,
            )
            return False
        self._counts[component] += 1
        return True

    def on_bus_publish(self, component: str, tick: int) -> bool:
        if self.policy.scope is RateScope.NET_SEND:
            return True
        return self._on_action(component, tick)

    def on_net_send(self, component: str, tick: int) -> bool:
        if self.policy.scope is RateScope.BUS_PUBLISH:
            return True
        return self._on_action(component, tick)


class AclPolicy:
    def __init__(self, manifests: dict[str, ComponentManifest], log: EventLog):
        self.manifests = manifests
        self.log = log
        self.subscribe_denials = 0
        self.publish_violations = 0

    def check_subscribe(self, component: str, mid: MessageId, tick: int) -> bool:
        manifest = self.manifests.get(component)
        if manifest is not None and mid in manifest.allowed_subscriptions:
            return True
        self.subscribe_denials += 1
        self.log.emit(
            tick, "bus_acl", Channel.SECURITY, "acl_subscribe_denied",
            component=component, mid=mid.raw,
        )
        return False

    def note_publish(self, component: str, mid: MessageId, tick: int):
        manifest = self.manifests.get(component)
        if manifest is not None and mid in manifest.allowed_publications:
            return
        self.publish_violations += 1
        self.log.emit(
            tick, "bus_acl", Channel.SECURITY, "acl_publish_violation",
            component=component, mid=mid.raw,
        )


class SyscallFilter:
    def __init__(self, manifests: dict[str, ComponentManifest]):
        self.manifests = manifests

    def check(self, component: str, kind: SyscallKind) -> bool:
        manifest = self.manifests.get(component)
        return manifest is not None and kind in manifest.allowed_syscalls


class Outcome(Enum):
    UNDETECTED = "Undetected"
    DETECTED = "Detected"
    BLOCKED = "Blocked"


@dataclass(frozen=True)
class Verdict:
    scenario: int
    defenses: tuple[str, ...]
    outcome: Outcome
    evidence: tuple[int, ...] = ()  # event-log indices

    def to_json_obj(self) -> dict:
        return {
            "scenario": self.scenario,
            "defenses": list(self.defenses),
            "outcome": self.outcome.value,
            "evidence": list(self.evidence),
        }


def compute_verdict(
    scenario: int,
    defenses: tuple[str, ...],
    exfil_intended: bool,
    exfil_ledger_size: int,
    security_event_indices: tuple[int, ...],
) -> Verdict:
    """Fold a completed run into the scenario/defense outcome.

    Blocked means the attack meant to exfiltrate and got nothing out while
    a defense fired; Detected means something fired but data still left;
    Undetected means the operator-facing record is clean.
    """
    if exfil_intended and exfil_ledger_size == 0 and security_event_indices:
        outcome = Outcome.BLOCKED
    elif security_event_indices:
        outcome = Outcome.DETECTED
    else:
        outcome = Outcome.UNDETECTED
    return Verdict(scenario, tuple(defenses), outcome, tuple(security_event_indices))
