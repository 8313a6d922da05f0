"""Bundled example specs and symbolic certificates."""
from pathlib import Path

HERE = Path(__file__).parent


def fixture_path(name: str) -> Path:
    return HERE / name


def load_fixture_spec(name: str):
    from ..syntax import parse_spec
    return parse_spec(fixture_path(name).read_text())
