import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import SOLDIER_BIOS, SOLDIER_BODY, SOLDIER_OUTLINE  # noqa: E402

from tableread.offline import OfflineProvider
from tableread.screenplay import RawScreenplay, parse_screenplay


@pytest.fixture(scope="session")
def offline_provider():
    return OfflineProvider()


@pytest.fixture(scope="session")
def soldier_raw():
    return RawScreenplay(
        title="The Platform",
        body=SOLDIER_BODY,
        bios=SOLDIER_BIOS,
        outline=SOLDIER_OUTLINE,
    )


@pytest.fixture(scope="session")
def soldier_parsed(soldier_raw, offline_provider):
    return parse_screenplay(soldier_raw, offline_provider)
