"""Command line and UCI adapters."""

from typing import Optional, Sequence


def main(argv: Optional[Sequence[str]] = None) -> int:
    # Imported lazily: the bench harness imports the UCI client from here.
    from .main import main as _main

    return _main(argv)


__all__ = ["main"]
