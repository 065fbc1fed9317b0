"""Dense graph limit workbench: explicit graphons, weak regularity, constraints."""

from __future__ import annotations

__version__ = "0.1.0"
