"""Alpha-beta and PUCT chess engines with an exact oracle for studying Plaskett's Puzzle."""

__version__ = "0.1.0"
