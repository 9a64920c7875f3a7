"""Access to the cipher description files shipped with the package."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

from .cipher import CipherDescription, parse_description

_PKG = "spndiff.descriptions"


def bundled_names() -> list[str]:
    files = resources.files(_PKG)
    return sorted(p.name for p in files.iterdir() if p.name.endswith(".cd"))


def load_bundled(name: str) -> str:
    if not name.endswith(".cd"):
        name += ".cd"
    return resources.files(_PKG).joinpath(name).read_text(encoding="utf-8")


def resolve_description(spec: str) -> tuple[str, CipherDescription]:
    """Load a description from a filesystem path or a bundled file name.

    Returns (display name, parsed description).
    """
    path = Path(spec)
    if path.exists():
        return str(path), parse_description(path.read_text(encoding="utf-8"))
    candidates = bundled_names()
    name = spec if spec.endswith(".cd") else spec + ".cd"
    if name in candidates:
        return name, parse_description(load_bundled(name))
    raise FileNotFoundError(
        f"description {spec!r} is not a readable file or a bundled name "
        f"(bundled: {', '.join(candidates)})"
    )
