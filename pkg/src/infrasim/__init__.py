"""Deterministic infrastructure-centric cooperative driving simulation kernel."""

from importlib import resources

__version__ = "0.1.0"


def data_path(*parts: str):
    """Path to a shipped data file (maps, sensor presets, scenarios, replays)."""
    root = resources.files(__name__) / "data"
    for part in parts:
        root = root / part
    return root
