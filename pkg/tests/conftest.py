import shutil
from pathlib import Path

import pytest

from dashforge.llm import TableSchema
from dashforge.model import read_config
from dashforge.render import default_registry

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def artifact_dir() -> Path:
    return FIXTURES / "artifacts"


@pytest.fixture(scope="session")
def registry():
    return default_registry()


@pytest.fixture()
def full_config():
    return read_config(FIXTURES / "configs" / "full_3x3.dbconfig.json")


@pytest.fixture()
def generated_config():
    return read_config(FIXTURES / "configs" / "generated.dbconfig.json")


@pytest.fixture(scope="session")
def golden_html() -> bytes:
    return (FIXTURES / "golden" / "generated_dashboard.html").read_bytes()


@pytest.fixture(scope="session")
def sample_schema() -> TableSchema:
    return TableSchema.from_csv(FIXTURES / "tables" / "sample_sales.csv")


@pytest.fixture()
def workspace(tmp_path: Path) -> Path:
    """A scratch copy of the fixture tree for commands that write to disk."""
    shutil.copytree(FIXTURES / "artifacts", tmp_path / "artifacts")
    shutil.copytree(FIXTURES / "configs", tmp_path / "configs")
    shutil.copy(FIXTURES / "tables" / "sample_sales.csv", tmp_path / "sample_sales.csv")
    return tmp_path
