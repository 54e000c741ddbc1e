from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from glyscan.data import calibration_readings, validation_tests


@pytest.fixture(scope="session")
def calib_samples():
    return calibration_readings()


@pytest.fixture(scope="session")
def validation_rows():
    return validation_tests()
