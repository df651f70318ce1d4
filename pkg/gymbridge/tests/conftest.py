from __future__ import annotations

import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from _scenarios import short_community  # noqa: E402


@pytest.fixture
def env():
    from homegrid_gym import HomeGridEnv

    return HomeGridEnv(short_community())
