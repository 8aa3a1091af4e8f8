"""Bundled example documents, loaded by name."""

from __future__ import annotations

from importlib import resources

from .. import io


def names() -> list[str]:
    return sorted(p.name[:-5] for p in resources.files(__name__).iterdir() if p.name.endswith(".json"))


def raw(name: str) -> bytes:
    return resources.files(__name__).joinpath(f"{name}.json").read_bytes()


def load(name: str) -> io.Document:
    return io.parse(raw(name))


def get(name: str):
    """The payload object of a fixture."""
    return load(name).payload
