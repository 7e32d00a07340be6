from pathlib import Path

import pytest

from mfengine import parse_csv, parse_json, parse_xml
from mfengine.timeutil import parse_instant

DATA = Path(__file__).parent / "data"

# collection begin instant shared by all three corpus documents
T0 = parse_instant("2011-07-14T22:00:00Z")


def sec(offset: float) -> int:
    """Epoch ms for an offset in seconds from the corpus begin."""
    return T0 + round(offset * 1000)


@pytest.fixture(scope="session")
def csv_text() -> str:
    return (DATA / "vehicles.csv").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def xml_text() -> str:
    return (DATA / "vehicle_a.xml").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def json_text() -> str:
    return (DATA / "vehicle_a.json").read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def csv_collection(csv_text):
    return parse_csv(csv_text)


@pytest.fixture(scope="session")
def xml_collection(xml_text):
    return parse_xml(xml_text)


@pytest.fixture(scope="session")
def json_collection(json_text):
    return parse_json(json_text)


@pytest.fixture(scope="session")
def vehicle_a(csv_collection):
    return csv_collection.feature("A")


@pytest.fixture(scope="session")
def vehicle_b(csv_collection):
    return csv_collection.feature("B")
