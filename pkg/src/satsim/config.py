"""Run configuration: a JSON document that fully determines a run.

Together with the build's fixed message-ID registry and component
roster, a ScenarioConfig pins every degree of freedom the simulator has,
so replays are byte-identical. Validation errors carry the path to the
offending field.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace

from .defenses import ComponentManifest, RateMonitorPolicy, RateScope
from .malware import DEFAULT_DECEPTIONS
from .registry import (
    BENIGN_COMPONENTS,
    HOUSEKEEPING_CLASS_STREAMS,
    MALICIOUS_COMPONENTS,
    REGISTRY,
    TELEMETRY_STREAMS,
)
from .runtime import SyscallKind

FORMAT_VERSION = 1

VALID_MODES = ("exfiltrate", "deceive", "flood", "dos_crash", "persist")
VALID_DEFENSES = ("rate", "acl", "syscall")
VALID_SCOPES = ("bus_publish", "net_send", "both")


class ConfigError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


@dataclass
class PeriodsConfig:
    gnss: int = 5
    housekeeping: int = 10
    evs: int = 10
    sb_stats: int = 10
    time: int = 10


@dataclass
class AttackConfig:
    modes: tuple = ("exfiltrate",)
    static_trigger_tick: int = 100
    kill_after: int | None = None
    flood_mid: str = "SAT_HK_TLM"
    flood_per_tick: int = 0
    deceive_period: int = 25
    deceptions: tuple = DEFAULT_DECEPTIONS
    extra_exfil_mids: tuple = ()
    fifo_path: str = "/tmp/.sync"


@dataclass
class RateConfig:
    window: int = 50
    threshold: int = 100
    scope: str = "both"

    def to_policy(self) -> RateMonitorPolicy:
        return RateMonitorPolicy(self.window, self.threshold, RateScope(self.scope))


@dataclass
class EndpointConfig:
    mode: str = "in_process"  # or "datagram"
    host: str = "127.0.0.1"
    port: int = 5012


@dataclass
class ScenarioConfig:
    scenario: int = 0
    seed: int = 1
    run_ticks: int = 500
    orbit_insertion_tick: int = 100
    tick_seconds: float = 1.0
    uplink_port: int = 5010
    periods: PeriodsConfig = field(default_factory=PeriodsConfig)
    attack: AttackConfig = field(default_factory=AttackConfig)
    defenses: tuple = ()
    rate: RateConfig = field(default_factory=RateConfig)
    manifests: dict | None = None  # name -> {subscriptions, publications, syscalls}
    endpoint: EndpointConfig = field(default_factory=EndpointConfig)
    inject_crash: dict | None = None  # {"component": ..., "tick": ...}
    ticks_per_second: float = 10.0

    def with_overrides(self, **kw) -> "ScenarioConfig":
        return replace(self, **kw)

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        obj = asdict(self)
        obj["format_version"] = FORMAT_VERSION
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "ScenarioConfig":
        if not isinstance(obj, dict):
            raise ConfigError("$", "config document must be a JSON object")
        obj = dict(obj)
        version = obj.pop("format_version", FORMAT_VERSION)
        if version != FORMAT_VERSION:
            raise ConfigError("format_version", f"unsupported version {version}")
        cfg = cls()
        for section, section_cls in (
            ("periods", PeriodsConfig),
            ("attack", AttackConfig),
            ("rate", RateConfig),
            ("endpoint", EndpointConfig),
        ):
            if section in obj:
                sub = obj.pop(section)
                if not isinstance(sub, dict):
                    raise ConfigError(section, "must be an object")
                known = section_cls().__dict__
                for key in sub:
                    if key not in known:
                        raise ConfigError(f"{section}.{key}", "unknown field")
                merged = {**known, **sub}
                for key in ("modes", "deceptions", "extra_exfil_mids"):
                    if key in merged and isinstance(merged[key], list):
                        merged[key] = tuple(
                            tuple(x) if isinstance(x, list) else x for x in merged[key]
                        )
                setattr(cfg, section, section_cls(**merged))
        for key, value in obj.items():
            if not hasattr(cfg, key):
                raise ConfigError(key, "unknown field")
            if key == "defenses" and isinstance(value, list):
                value = tuple(value)
            setattr(cfg, key, value)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, text: str) -> "ScenarioConfig":
        try:
            obj = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"not valid JSON: {exc}") from exc
        return cls.from_json_obj(obj)

    # -- validation --------------------------------------------------------

    def validate(self):
        def require(cond, path, message):
            if not cond:
                raise ConfigError(path, message)

        require(self.scenario in range(0, 6), "scenario", "must be between 0 and 5")
        require(isinstance(self.seed, int), "seed", "must be an integer")
        require(1 <= self.run_ticks <= 1_000_000, "run_ticks", "must be in 1..1000000")
        require(self.orbit_insertion_tick >= 0, "orbit_insertion_tick", "must be >= 0")
        require(self.tick_seconds > 0, "tick_seconds", "must be positive")
        require(0 < self.uplink_port < 65536, "uplink_port", "must be a port number")
        for name in ("gnss", "housekeeping", "evs", "sb_stats", "time"):
            require(getattr(self.periods, name) >= 1, f"periods.{name}", "must be >= 1")
        for i, mode in enumerate(self.attack.modes):
            require(mode in VALID_MODES, f"attack.modes[{i}]", f"unknown mode {mode!r}")
        require(
            not ("dos_crash" in self.attack.modes and "persist" in self.attack.modes),
            "attack.modes", "dos_crash and persist are mutually exclusive",
        )
        require(self.attack.static_trigger_tick >= 0, "attack.static_trigger_tick", "must be >= 0")
        require(
            self.attack.kill_after is None or self.attack.kill_after >= 0,
            "attack.kill_after", "must be >= 0 when set",
        )
        require(
            self.attack.flood_mid in TELEMETRY_STREAMS,
            "attack.flood_mid", f"unknown telemetry stream {self.attack.flood_mid!r}",
        )
        require(
            0 <= self.attack.flood_per_tick <= 5000,
            "attack.flood_per_tick", "must be in 0..5000",
        )
        require(self.attack.deceive_period >= 1, "attack.deceive_period", "must be >= 1")
        for i, mid_name in enumerate(self.attack.extra_exfil_mids):
            require(
                mid_name in TELEMETRY_STREAMS,
                f"attack.extra_exfil_mids[{i}]", f"unknown telemetry stream {mid_name!r}",
            )
        for i, d in enumerate(self.defenses):
            require(d in VALID_DEFENSES, f"defenses[{i}]", f"unknown defense {d!r}")
        require(self.rate.window >= 1, "rate.window", "must be >= 1")
        require(self.rate.threshold >= 1, "rate.threshold", "must be >= 1")
        require(self.rate.scope in VALID_SCOPES, "rate.scope", f"must be one of {VALID_SCOPES}")
        require(
            self.endpoint.mode in ("in_process", "datagram"),
            "endpoint.mode", "must be in_process or datagram",
        )
        if self.inject_crash is not None:
            require(isinstance(self.inject_crash, dict), "inject_crash", "must be an object")
            component = self.inject_crash.get("component")
            tick = self.inject_crash.get("tick")
            require(
                component in BENIGN_COMPONENTS + MALICIOUS_COMPONENTS,
                "inject_crash.component", f"unknown component {component!r}",
            )
            require(isinstance(tick, int) and tick >= 1, "inject_crash.tick", "must be >= 1")
        require(self.ticks_per_second >= 0, "ticks_per_second", "must be >= 0 (0 = unpaced)")


# -- manifests ---------------------------------------------------------------


def default_manifests() -> dict[str, ComponentManifest]:
    """Closed-world declared behavior for the whole installed stack.

    Benign manifests list exactly what each component does. The two
    implanted components get manifests matching their vendor datasheet -
    housekeeping out, own command stream in, no syscalls - so their
    covert actions fall outside the declared envelope.
    """
    sat_hk = REGISTRY.mid("SAT_HK_TLM")
    manifests: dict[str, ComponentManifest] = {}
    for name in BENIGN_COMPONENTS + MALICIOUS_COMPONENTS:
        subs = {REGISTRY.command_mid(name)}
        pubs = {sat_hk}
        syscalls: set[SyscallKind] = set()
        if name == "novatel_oem615":
            pubs.add(REGISTRY.mid("NOVATEL_OEM615_DEVICE_TLM"))
        elif name == "generic_eps":
            pubs.add(REGISTRY.mid("GENERIC_EPS_DEVICE_TLM"))
        elif name == "generic_radio":
            subs.update(REGISTRY.telemetry_mids())
            pubs.add(REGISTRY.mid("GENERIC_RADIO_DOWNLINK_TLM"))
            syscalls.add(SyscallKind.NET_RECV)
        elif name == "evs":
            pubs.add(REGISTRY.mid("EVS_EVENT_TLM"))
        elif name == "time_services":
            pubs.add(REGISTRY.mid("TIME_HK_TLM"))
        elif name == "sb_stats":
            pubs.add(REGISTRY.mid("SB_STATS_TLM"))
        manifests[name] = ComponentManifest(
            name,
            allowed_subscriptions=frozenset(subs),
            allowed_publications=frozenset(pubs),
            allowed_syscalls=frozenset(syscalls),
        )
    return manifests


def manifests_from_config(config: ScenarioConfig) -> dict[str, ComponentManifest]:
    if config.manifests is None:
        return default_manifests()
    manifests = {}
    for name, spec in config.manifests.items():
        try:
            manifests[name] = ComponentManifest(
                name,
                allowed_subscriptions=frozenset(
                    REGISTRY.mid(n) for n in spec.get("subscriptions", ())
                ),
                allowed_publications=frozenset(
                    REGISTRY.mid(n) for n in spec.get("publications", ())
                ),
                allowed_syscalls=frozenset(
                    SyscallKind(k) for k in spec.get("syscalls", ())
                ),
            )
        except KeyError as exc:
            raise ConfigError(f"manifests.{name}", f"unknown stream {exc.args[0]!r}") from exc
        except ValueError as exc:
            raise ConfigError(f"manifests.{name}.syscalls", str(exc)) from exc
    return manifests
