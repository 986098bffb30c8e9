"""Shared CSV number formatting: shortest exact round-trip representation."""


def fnum(x) -> str:
    """repr of a plain Python float; round-trips IEEE-754 doubles exactly."""
    return repr(float(x))
