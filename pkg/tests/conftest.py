from __future__ import annotations

import pytest

from homegrid.scenario import default_parameters


@pytest.fixture
def default_params():
    return default_parameters()
