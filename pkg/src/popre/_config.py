import os

DEFAULT_MAX_N = 128


def max_n():
    """Dimension guard; ``POPRE_MAX_N`` overrides the default of 128."""
    raw = os.environ.get("POPRE_MAX_N")
    if raw is None or raw == "":
        return DEFAULT_MAX_N
    value = int(raw)
    if value < 1:
        raise ValueError(f"POPRE_MAX_N must be positive, got {raw!r}")
    return value
