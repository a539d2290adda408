import os

DEFAULT_MAX_N = 20
HARD_MAX_N = 28


def max_n() -> int:
    """Dimension cap for dense truth tables; ``BFAN_MAX_N`` overrides the default."""
    raw = os.environ.get("BFAN_MAX_N")
    if not raw:
        return DEFAULT_MAX_N
    try:
        value = int(raw)
    except ValueError:
        return DEFAULT_MAX_N
    return max(1, min(value, HARD_MAX_N))
