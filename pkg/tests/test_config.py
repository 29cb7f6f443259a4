import json

import pytest

from satsim.config import (
    AttackConfig,
    ConfigError,
    ScenarioConfig,
    default_manifests,
    manifests_from_config,
)
from satsim.registry import ALL_COMPONENTS, REGISTRY
from satsim.runtime import SyscallKind


def test_defaults_validate():
    ScenarioConfig().validate()


def test_json_round_trip():
    cfg = ScenarioConfig(
        scenario=5, seed=99, run_ticks=300,
        attack=AttackConfig(modes=("exfiltrate", "deceive"), kill_after=40),
        defenses=("rate", "syscall"),
    )
    restored = ScenarioConfig.from_json(cfg.to_json())
    assert restored.scenario == 5
    assert restored.seed == 99
    assert tuple(restored.attack.modes) == ("exfiltrate", "deceive")
    assert restored.attack.kill_after == 40
    assert tuple(restored.defenses) == ("rate", "syscall")
    # round-trips to identical JSON
    assert restored.to_json() == cfg.to_json()


@pytest.mark.parametrize(
    "mutate,path",
    [
        ({"scenario": 7}, "scenario"),
        ({"run_ticks": 0}, "run_ticks"),
        ({"defenses": ["firewall"]}, "defenses[0]"),
        ({"attack": {"modes": ["exfiltrate", "nonsense"]}}, "attack.modes[1]"),
        ({"attack": {"modes": ["dos_crash", "persist"]}}, "attack.modes"),
        ({"attack": {"flood_mid": "NOPE_TLM"}}, "attack.flood_mid"),
        ({"rate": {"scope": "everything"}}, "rate.scope"),
        ({"endpoint": {"mode": "carrier_pigeon"}}, "endpoint.mode"),
        ({"inject_crash": {"component": "ghost", "tick": 5}}, "inject_crash.component"),
    ],
)
def test_validation_paths(mutate, path):
    obj = ScenarioConfig().to_json_obj()
    obj.update(mutate)
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_json_obj(obj)
    assert exc.value.path == path


def test_unknown_top_level_field_rejected():
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_json('{"bogus": 1}')
    assert exc.value.path == "bogus"


def test_unknown_section_field_rejected():
    with pytest.raises(ConfigError) as exc:
        ScenarioConfig.from_json('{"periods": {"warp": 1}}')
    assert exc.value.path == "periods.warp"


def test_not_json_is_config_error():
    with pytest.raises(ConfigError):
        ScenarioConfig.from_json("{nope")


def test_default_manifests_cover_roster():
    manifests = default_manifests()
    assert set(manifests) == set(ALL_COMPONENTS)
    radio = manifests["generic_radio"]
    assert SyscallKind.NET_RECV in radio.allowed_syscalls
    assert REGISTRY.mid("SAT_HK_TLM") in radio.allowed_subscriptions
    agent = manifests["attack_agent"]
    assert agent.allowed_syscalls == frozenset()
    assert REGISTRY.mid("SAT_HK_TLM") not in agent.allowed_subscriptions


def test_manifest_override_from_config():
    cfg = ScenarioConfig(
        manifests={
            "attack_agent": {
                "subscriptions": ["SAT_HK_TLM"],
                "publications": [],
                "syscalls": ["MkFifo"],
            }
        }
    )
    manifests = manifests_from_config(cfg)
    assert set(manifests) == {"attack_agent"}
    assert SyscallKind.MKFIFO in manifests["attack_agent"].allowed_syscalls


def test_manifest_override_bad_stream():
    cfg = ScenarioConfig(manifests={"x": {"subscriptions": ["NOT_A_STREAM"]}})
    with pytest.raises(ConfigError) as exc:
        manifests_from_config(cfg)
    assert "manifests.x" in str(exc.value)


def test_config_echo_has_format_version():
    obj = ScenarioConfig().to_json_obj()
    assert obj["format_version"] == 1
    assert json.dumps(obj)  # JSON-safe
