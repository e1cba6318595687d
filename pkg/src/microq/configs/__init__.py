"""Shipped run configurations.

`path(name)` returns the absolute path of a bundled .cfg file so scripts
and tests can reference them without knowing the install location.
"""

from __future__ import annotations

import os

_HERE = os.path.dirname(__file__)


def path(name: str) -> str:
    p = os.path.join(_HERE, name)
    if not os.path.isfile(p):
        raise FileNotFoundError(f"no bundled config named {name!r}")
    return p


def available() -> list[str]:
    return sorted(f for f in os.listdir(_HERE) if f.endswith(".cfg"))
