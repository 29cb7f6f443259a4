"""Deterministic small-satellite flight-software testbed.

Simulates a pub/sub flight stack with implanted supply-chain components,
five escalating attack scenarios, three onboard countermeasures, and a
ground station that records exactly what an operator could see.
"""

from .config import ScenarioConfig
from .orchestrate import RunResult, replay_check, run, run_matrix

__all__ = ["ScenarioConfig", "RunResult", "run", "run_matrix", "replay_check"]
