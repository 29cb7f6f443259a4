"""Shared scripted components for driving the runtime directly."""

from __future__ import annotations

import pytest

from satsim.runtime import Simulation


class Scripted:
    """Component whose init/step are supplied as callables."""

    def __init__(self, name, on_init=None, on_step=None):
        self.name = name
        self._on_init = on_init
        self._on_step = on_step

    def init(self, ctx):
        if self._on_init:
            self._on_init(ctx)

    def step(self, ctx):
        if self._on_step:
            self._on_step(ctx)


class Idle(Scripted):
    def __init__(self, name):
        super().__init__(name)


@pytest.fixture
def sim():
    return Simulation()
